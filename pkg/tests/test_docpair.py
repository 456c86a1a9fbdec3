#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 19:33:12"
# File: ./tests/test_docpair.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./tests/test_docpair.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Tests for the package surface, output paths and run sessions.
"""

import json
import logging

import pytest

import docpair
from docpair.config import CONFIG_FILENAME, RunConfig
from docpair.exceptions import ConfigError
from docpair.session import RunSession
from docpair.utils import normalize_message, resolve_output_dir, resolve_threads, sha256_bytes, sha256_file


class TestPackage:
    """Public API."""

    def test_import(self):
        """The convenience aliases point at the real functions."""
        assert docpair.generate is docpair.generate_corpus
        assert docpair.pretrain is docpair.train
        assert docpair.fewshot is docpair.run_fewshot_eval
        assert docpair.retrieval is docpair.evaluate_retrieval

    def test_all_is_importable(self):
        """Every name in __all__ exists."""
        for name in docpair.__all__:
            assert hasattr(docpair, name), name


class TestOutputPaths:
    """Output directory placeholders and digests."""

    def test_normalize_message(self):
        """Messages become filename fragments."""
        assert normalize_message("S2 run, seed 7!") == "-S2-run-seed-7"
        assert normalize_message(None) == ""
        assert normalize_message("!!!") == ""
        assert normalize_message("first line\nsecond") == "-first-line"

    def test_placeholders(self, tmp_path):
        """<command> and <message> are filled in and the directory exists."""
        out = resolve_output_dir(str(tmp_path / "<command><message>"), command="pretrain", message="short run")
        assert out.name == "pretrain-short-run"
        assert out.is_dir()
        stamped = resolve_output_dir(str(tmp_path / "run-<timestamp>"))
        assert "<timestamp>" not in stamped.name

    def test_file_digest(self, tmp_path):
        """File and byte digests agree."""
        path = tmp_path / "blob.bin"
        path.write_bytes(b"docpair" * 1000)
        assert sha256_file(path, chunk_size=64) == sha256_bytes(b"docpair" * 1000)

    def test_thread_cap(self, monkeypatch):
        """The environment caps the worker count; junk is ignored."""
        monkeypatch.setenv("GDOC_THREADS", "2")
        assert resolve_threads(8) == 2
        assert resolve_threads(1) == 1
        monkeypatch.setenv("GDOC_THREADS", "lots")
        assert resolve_threads(3) == 3


class TestRunSession:
    """Per-run output directory, log file and config echo."""

    def test_log_and_config_echo(self, tmp_path):
        """run.log records start and finish; the config is echoed."""
        config = RunConfig(seed=5)
        with RunSession("pretrain", config, out=tmp_path / "run") as run:
            logging.getLogger("docpair.trainer").info("inside the run")
            run.write_report("summary", "steps = 3", {"steps": 3})
        log = (tmp_path / "run" / "run.log").read_text()
        assert "pretrain started" in log
        assert "inside the run" in log
        assert "pretrain finished" in log
        assert RunConfig.from_file(tmp_path / "run" / CONFIG_FILENAME) == config
        assert (tmp_path / "run" / "summary.txt").read_text() == "steps = 3\n"
        assert json.loads((tmp_path / "run" / "summary.json").read_text()) == {"steps": 3}

    def test_failure_is_logged_and_reraised(self, tmp_path):
        """Errors are written to run.log and propagate."""
        with pytest.raises(ConfigError):
            with RunSession("gradcheck", out=tmp_path / "bad"):
                raise ConfigError("broken")
        log = (tmp_path / "bad" / "run.log").read_text()
        assert "gradcheck failed: ConfigError: broken" in log

    def test_handler_removed(self, tmp_path):
        """The package logger is restored after the run."""
        package = logging.getLogger("docpair")
        handlers, level = list(package.handlers), package.level
        with RunSession("preview", out=tmp_path / "p"):
            assert len(package.handlers) == len(handlers) + 1
        assert package.handlers == handlers
        assert package.level == level

    def test_factory(self, tmp_path):
        """session() builds a RunSession."""
        run = docpair.session("gen-corpus", out=tmp_path / "g")
        assert isinstance(run, RunSession)
        assert run.command == "gen-corpus"

# EOF
