#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Entry point for python -m docpair
"""

import sys

# Import from src/docpair/cli.py
from src.docpair.cli import main

if __name__ == "__main__":
    sys.exit(main())
