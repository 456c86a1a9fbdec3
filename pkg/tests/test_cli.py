#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 19:58:03"
# File: ./tests/test_cli.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./tests/test_cli.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Tests for the docpair command line, end to end on a tiny corpus.
"""

import json

import pytest

from docpair.cli import build_parser, main
from docpair.datagen import generate_corpus, read_manifest
from docpair.evaluation import read_embeddings

TINY_CONFIG = """
# 16x16 images, width 16
image_size = 16
patch_size = 4
vision_hidden_dim = 16
vision_layers = 1
vision_heads = 2
vocab_size = 32
max_sequence_length = 16
language_hidden_dim = 16
language_layers = 1
language_heads = 2
cmae_hidden_dim = 16
cmae_heads = 2
projection_dim = 8
projection_hidden_dim = 16
batch_size = 8
total_steps = 4
queue_capacity = 32
stage2_start_step = 2
checkpoint_interval = 2
num_clusters = 4
k_mine = 2
episodes = 5
num_base_classes = 2
probe_steps = 20
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """A corpus, a tiny config and one S3 pretraining run shared by the module."""
    root = tmp_path_factory.mktemp("cli")
    generate_corpus(
        root / "corpus", seed=3, num_categories=4, per_class=20,
        image_size=16, vocab_size=32, min_tokens=4, max_tokens=10,
    )
    (root / "tiny.cfg").write_text(TINY_CONFIG)
    code = main(
        [
            "-q", "pretrain", "--corpus", str(root / "corpus"), "--config", str(root / "tiny.cfg"),
            "--setting", "S3", "-o", str(root / "run"),
        ]
    )
    assert code == 0
    return root


def run_args(workspace, command, *extra):
    return [
        "-q", command, "--corpus", str(workspace / "corpus"),
        "--checkpoint", str(workspace / "run" / "model.gdoc"), *extra,
    ]


class TestParser:
    """Usage handling."""

    def test_no_command(self, capsys):
        """Without a command the usage is printed and the exit code is 1."""
        assert main([]) == 1
        assert "usage" in capsys.readouterr().err

    def test_unknown_command(self):
        """Usage errors exit with 1."""
        assert main(["train-everything"]) == 1

    def test_help(self, capsys):
        """--help exits cleanly and lists the examples."""
        assert main(["--help"]) == 0
        assert "docpair gradcheck" in capsys.readouterr().out

    def test_config_flags(self):
        """Config keys become dashed flags that default to None."""
        args = build_parser().parse_args(["pretrain", "--corpus", "c", "--peak-lr", "2e-3"])
        assert args.peak_lr == "2e-3"
        assert args.total_steps is None

    def test_gradcheck_defaults(self):
        """gradcheck checks every entry and fills the queues unless told otherwise."""
        args = build_parser().parse_args(["gradcheck"])
        assert args.entries == 0
        assert args.queue == 8
        assert args.setting == "S3"


class TestErrors:
    """Domain errors map to exit codes."""

    def test_missing_corpus(self, tmp_path):
        """A missing corpus is a data error."""
        assert main(["-q", "pretrain", "--corpus", str(tmp_path / "none"), "-o", str(tmp_path / "r")]) == 2

    def test_unknown_config_key(self, workspace, tmp_path):
        """Unknown --set keys are usage errors."""
        args = run_args(workspace, "linear-probe", "--set", "colour=blue", "-o", str(tmp_path / "r"))
        assert main(args) == 1

    def test_failed_gradcheck(self, tmp_path):
        """An impossible tolerance fails with the numeric exit code."""
        args = ["-q", "gradcheck", "--setting", "S1", "--tolerance", "1e-30", "--entries", "2"]
        assert main(args + ["-o", str(tmp_path / "g")]) == 3


class TestCommands:
    """Every subcommand on the shared tiny run."""

    def test_gen_corpus(self, tmp_path):
        """gen-corpus writes a verified manifest."""
        out = tmp_path / "corpus"
        code = main(
            ["-q", "gen-corpus", "--classes", "3", "--per-class", "8", "--image-size", "8", "--vocab", "16",
             "-o", str(out)]
        )
        assert code == 0
        manifest = read_manifest(out)
        assert manifest.num_categories == 3
        assert sum(manifest.counts.values()) == 24
        echoed = (out / "config.cfg").read_text().splitlines()
        for line in ("seed = 0", "num_categories = 3", "per_class = 8", "image_size = 8", "vocab_size = 16"):
            assert line in echoed
        assert "gen-corpus started" in (out / "run.log").read_text()

    def test_pretrain_outputs(self, workspace):
        """The run directory holds the model, checkpoints, metrics, config and log."""
        run = workspace / "run"
        for name in ("model.gdoc", "metrics.jsonl", "config.cfg", "run.log", "summary.txt"):
            assert (run / name).exists(), name
        assert (run / "checkpoints" / "step_000002.gdoc").exists()
        records = [json.loads(line) for line in (run / "metrics.jsonl").read_text().splitlines()]
        assert [r["stage"] for r in records] == [1, 1, 2, 2]
        assert "setting = S3" in (run / "summary.txt").read_text()

    def test_gradcheck(self, tmp_path):
        """A sampled gradcheck with filled queues passes and writes its report."""
        assert main(["-q", "gradcheck", "--setting", "S2", "--entries", "4", "-o", str(tmp_path / "g")]) == 0
        report = json.loads((tmp_path / "g" / "gradcheck.json").read_text())
        assert report["passed"] is True
        assert report["queue_size"] == 8
        assert report["checked_entries"] > 0

    def test_eval_fewshot(self, workspace, tmp_path):
        """Few-shot results for every modality, before and after meta-training."""
        out = tmp_path / "fewshot"
        assert main(run_args(workspace, "eval-fewshot", "--meta-steps", "2", "-o", str(out))) == 0
        data = json.loads((out / "fewshot.json").read_text())
        assert set(data) == {"pretrained", "meta_trained"}
        assert set(data["pretrained"]) == {"vision", "language", "multimodal"}
        assert data["pretrained"]["vision"]["way"] == 2

    def test_eval_retrieval(self, workspace, tmp_path):
        """Recall@K per setting plus qualitative panels."""
        out = tmp_path / "retrieval"
        assert main(run_args(workspace, "eval-retrieval", "--panels", "2", "-o", str(out))) == 0
        data = json.loads((out / "retrieval.json").read_text())
        assert set(data) == {"V->V", "L->L", "V->L", "L->V", "M->M"}
        assert all(0.0 <= v <= 1.0 for row in data.values() for v in row.values())
        assert len(list((out / "panels").glob("*.png"))) == 2

    def test_linear_probe(self, workspace, tmp_path):
        """The probe reports train and test accuracy."""
        out = tmp_path / "probe"
        assert main(run_args(workspace, "linear-probe", "--modality", "vision", "-o", str(out))) == 0
        data = json.loads((out / "probe.json").read_text())
        assert data["num_classes"] == 4
        assert 0.0 <= data["test_accuracy"] <= 1.0

    def test_export_embeddings(self, workspace, tmp_path):
        """Exports carry the trained model digest."""
        out = tmp_path / "export"
        assert main(run_args(workspace, "export-embeddings", "--modality", "vision", "-o", str(out))) == 0
        index = read_embeddings(out / "embeddings_test_vision.gemb")
        assert index.embeddings.shape == (20, 8)
        summary = (workspace / "run" / "summary.txt").read_text()
        assert f"model_digest = {index.model_digest}" in summary

    def test_preview(self, workspace, tmp_path):
        """preview writes a GIF of the categories."""
        out = tmp_path / "preview"
        assert main(["-q", "preview", "--corpus", str(workspace / "corpus"), "--kind", "gif", "-o", str(out)]) == 0
        assert (out / "train_categories.gif").exists()


@pytest.mark.slow
class TestLongRun:
    """A longer S3 run through the command line."""

    def test_staged_run_and_resume(self, workspace, tmp_path):
        """A resume after the stage switch keeps one continuous metrics log."""
        out = tmp_path / "long"
        base = [
            "-q", "pretrain", "--corpus", str(workspace / "corpus"), "--config", str(workspace / "tiny.cfg"),
            "--setting", "S3", "--stage2-start-step", "15", "--checkpoint-interval", "10", "-o", str(out),
        ]
        assert main(base + ["--total-steps", "20"]) == 0
        assert main(base + ["--total-steps", "40", "--resume", str(out / "checkpoints" / "step_000020.gdoc")]) == 0
        records = [json.loads(line) for line in (out / "metrics.jsonl").read_text().splitlines()]
        assert [r["step"] for r in records] == list(range(40))
        assert records[14]["stage"] == 1
        assert records[15]["stage"] == records[-1]["stage"] == 2

# EOF
