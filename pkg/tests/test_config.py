#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 19:21:44"
# File: ./tests/test_config.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./tests/test_config.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Tests for the flat key=value run configuration.
"""

import logging

import pytest

from docpair.config import CONFIG_FILENAME, RunConfig
from docpair.exceptions import ConfigError


class TestParsing:
    """Reading key=value lines."""

    def test_comments_and_blank_lines(self):
        """Comments and empty lines are skipped; values take the field type."""
        values = RunConfig.parse_lines(
            ["# header", "", "setting = S3", "total_steps = 40   # short", "cmae_shared = no", "peak_lr=2e-3"]
        )
        assert values == {"setting": "S3", "total_steps": 40, "cmae_shared": False, "peak_lr": 2e-3}

    @pytest.mark.parametrize("word,expected", [("yes", True), ("ON", True), ("0", False), ("false", False)])
    def test_boolean_words(self, word, expected):
        """Common boolean spellings are accepted."""
        assert RunConfig.coerce("deterministic", word) is expected

    def test_bad_boolean(self):
        """Anything else is rejected."""
        with pytest.raises(ConfigError, match="boolean"):
            RunConfig.coerce("deterministic", "maybe")

    def test_bad_number(self):
        """Numbers must parse."""
        with pytest.raises(ConfigError, match="int"):
            RunConfig.coerce("batch_size", "many")

    def test_int_widens_to_float(self):
        """Integer values are accepted for float keys."""
        assert RunConfig.coerce("peak_lr", 1) == 1.0
        assert isinstance(RunConfig.coerce("peak_lr", 1), float)

    def test_unknown_key(self):
        """Typos are errors, not silently ignored."""
        with pytest.raises(ConfigError, match="unknown"):
            RunConfig.parse_lines(["totl_steps = 3"])

    def test_missing_equals_reports_line(self):
        """Malformed lines name their source and line number."""
        with pytest.raises(ConfigError, match="run.cfg:2"):
            RunConfig.parse_lines(["seed = 1", "seed 2"], source="run.cfg")

    def test_missing_file(self, tmp_path):
        """A missing config file is a usage error."""
        with pytest.raises(ConfigError, match="not found"):
            RunConfig.from_file(tmp_path / "nope.cfg")


class TestResolution:
    """Defaults < file < --set < flags."""

    def test_precedence(self, tmp_path):
        """Later sources override earlier ones."""
        path = tmp_path / "run.cfg"
        path.write_text("seed = 1\nbatch_size = 4\ntotal_steps = 10\n")
        config = RunConfig.resolve(path, ["batch_size=8", "total_steps=20"], {"total_steps": "30", "seed": None})
        assert config.seed == 1
        assert config.batch_size == 8
        assert config.total_steps == 30
        assert config.peak_lr == RunConfig().peak_lr

    def test_merged_rejects_unknown(self):
        """merged() checks keys too."""
        with pytest.raises(ConfigError):
            RunConfig().merged({"colour": "blue"})


class TestOutput:
    """Echo, digest and the component builders."""

    def test_echo_reads_back(self, tmp_path):
        """The echoed file resolves to the same configuration."""
        config = RunConfig(setting="S3", temperature=0.1, cmae_shared=False, disabled_terms="l2r")
        path = config.echo(tmp_path)
        assert path.name == CONFIG_FILENAME
        assert RunConfig.from_file(path) == config
        assert RunConfig.from_file(path).digest() == config.digest()

    def test_digest_tracks_values(self):
        """Any changed value changes the digest."""
        assert RunConfig().digest() == RunConfig().digest()
        assert RunConfig().digest() != RunConfig(seed=1).digest()

    def test_builders(self):
        """Flat keys flow into the model, objective and training configs."""
        config = RunConfig(
            image_size=16, patch_size=4, vision_hidden_dim=16, vision_heads=2, setting="S3",
            disabled_terms="l2u, l2r", stage2_start_step=50, total_steps=100,
        )
        model = config.model_config()
        assert model.vision.image_height == model.vision.image_width == 16
        assert model.vision.patch_size == 4
        assert model.cmae.shared_parameters is True
        objective = config.objective_config()
        assert objective.disabled_terms == ("l2u", "l2r")
        assert objective.terms == {"l2m"}
        train = config.train_config()
        assert train.setting == "S3" and train.stage2_start_step == 50

    def test_for_corpus(self, caplog):
        """Corpus sizes replace the configured ones with a warning."""
        config = RunConfig()
        assert config.for_corpus(config.image_size, config.channels, config.vocab_size) is config
        with caplog.at_level(logging.WARNING, logger="docpair.config"):
            adopted = config.for_corpus(16, 1, 32)
        assert adopted.image_size == 16 and adopted.vocab_size == 32
        assert "image_size=16" in caplog.text

# EOF
