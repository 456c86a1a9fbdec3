#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 09:12:40"
# File: ./src/docpair/exceptions.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/exceptions.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Exception hierarchy for docpair.

Every class carries the CLI exit code it maps to:
1 = usage, 2 = data, 3 = numeric failure.
"""


class DocPairError(Exception):
    """Base class for all docpair errors."""

    exit_code = 1


# Usage
class ConfigError(DocPairError):
    """Unknown config key, bad value or inconsistent setting."""

    exit_code = 1


# Data
class DataError(DocPairError):
    exit_code = 2


class CorpusError(DataError):
    """Corpus directory missing, malformed or truncated."""


class DigestMismatchError(CorpusError):
    """Manifest digest does not match the files on disk."""


class CheckpointError(DataError):
    """Checkpoint or embedding export has a bad header or layout."""


class EmptySupportError(DataError, LookupError):
    """Nearest-neighbour lookup on an empty support queue."""


class InsufficientDataError(DataError):
    """Not enough samples/classes for the requested batch or episode."""


class VocabularyError(DataError, ValueError):
    """Token id outside the configured vocabulary."""


# Numeric
class NumericError(DocPairError):
    exit_code = 3


class DimensionError(NumericError, ValueError):
    """Shape mismatch between operands."""


class DegenerateInputError(NumericError, ValueError):
    """Input outside the domain of an operation (zero norm, bad distribution)."""


class NonFiniteError(NumericError):
    """NaN or inf in an input, loss or gradient."""


class GradcheckFailure(NumericError):
    """Analytic and finite-difference gradients disagree."""


class StagedTrainingError(NumericError):
    """A stage-2 objective was requested before its prerequisites exist."""


# EOF
