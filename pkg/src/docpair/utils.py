#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 10:02:17"
# File: ./src/docpair/utils.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/utils.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Small helpers shared across docpair: output paths, digests, thread caps.
"""

import hashlib
import re
from datetime import datetime
from pathlib import Path
from typing import Mapping, Optional, Union

DEFAULT_CACHE_DIR = "~/.cache/docpair"
THREADS_ENV = "GDOC_THREADS"


def normalize_message(message: Optional[str], limit: int = 50) -> str:
    """
    Turn a free-form run message into a filename fragment.

    Examples
    --------
    >>> normalize_message("S2 run, seed 7!")
    '-S2-run-seed-7'
    """
    if not message:
        return ""
    normalized = re.sub(r"[^\w\s-]", "", message.split("\n")[0])
    normalized = re.sub(r"[-\s]+", "-", normalized).strip("-")
    return f"-{normalized[:limit]}" if normalized else ""


def resolve_output_dir(
    path: Optional[str] = None,
    command: str = "run",
    message: Optional[str] = None,
) -> Path:
    """
    Resolve an output directory and create it.

    ``path`` may contain the placeholders ``<timestamp>``, ``<command>`` and
    ``<message>``. Without a path, runs land in
    ``~/.cache/docpair/<timestamp>-<command><message>``.
    """
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    if path is None:
        path = f"{DEFAULT_CACHE_DIR}/<timestamp>-<command><message>"
    path = os.path.expanduser(path)
    path = (
        path.replace("<timestamp>", timestamp)
        .replace("<command>", command)
        .replace("<message>", normalize_message(message))
    )
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


CONFIG_FILENAME = "config.cfg"


def format_config_lines(values: Mapping[str, object]) -> str:
    """One ``key = value`` line per item; booleans as true/false, floats by repr."""
    lines = []
    for key, value in values.items():
        if isinstance(value, bool):
            value = "true" if value else "false"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_config_echo(directory: Union[str, Path], text: str) -> Path:
    path = Path(directory) / CONFIG_FILENAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: Union[str, Path], chunk_size: int = 1 << 20) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def resolve_threads(requested: Optional[int] = None) -> int:
    """Worker count for thread pools, capped by ``GDOC_THREADS`` when set."""
    cap = os.environ.get(THREADS_ENV)
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


# EOF
