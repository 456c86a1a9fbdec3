#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 21:40:12"
# File: ./tests/test_end_to_end.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./tests/test_end_to_end.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Full-length synthetic runs through the command line: retrieval after S1/S2,
few-shot after S3, and bit-identical reruns. Minutes each; marked slow.
"""

import json

import pytest

from docpair.cli import main

pytestmark = pytest.mark.slow


def gen_corpus(out, classes, per_class=200, seed=0):
    args = ["-q", "gen-corpus", "--seed", str(seed), "--classes", str(classes), "--per-class", str(per_class)]
    assert main(args + ["--separability", "1.0", "-o", str(out)]) == 0
    return out


def pretrain(corpus, out, setting, *extra):
    args = [
        "-q", "pretrain", "--corpus", str(corpus), "--setting", setting, "--batch-size", "16",
        "--seed", "0", "--checkpoint-interval", "1000", "-o", str(out), *extra,
    ]
    assert main(args) == 0
    return out / "model.gdoc"


def eval_retrieval(corpus, checkpoint, out):
    args = ["-q", "eval-retrieval", "--corpus", str(corpus), "--checkpoint", str(checkpoint)]
    assert main(args + ["--use-cmae", "true", "-o", str(out)]) == 0
    return json.loads((out / "retrieval.json").read_text())


def eval_fewshot(corpus, out, *extra):
    args = ["-q", "eval-fewshot", "--corpus", str(corpus), "--num-base-classes", "3", "--way", "5", *extra]
    assert main(args + ["-o", str(out)]) == 0
    return json.loads((out / "fewshot.json").read_text())


@pytest.fixture(scope="module")
def retrieval_runs(tmp_path_factory):
    """4 classes x 200 documents; S2 and S1 for 2000 steps each, evaluated with the CMAE."""
    root = tmp_path_factory.mktemp("retrieval")
    corpus = gen_corpus(root / "corpus", classes=4)
    reports = {}
    for setting in ("S1", "S2"):
        checkpoint = pretrain(corpus, root / setting, setting, "--total-steps", "2000")
        reports[setting] = eval_retrieval(corpus, checkpoint, root / f"{setting}-retrieval")
    return reports


@pytest.fixture(scope="module")
def fewshot_runs(tmp_path_factory):
    """6 classes split 3 base / 3 novel; S3 for 2000 steps against the untrained model."""
    root = tmp_path_factory.mktemp("fewshot")
    corpus = gen_corpus(root / "corpus", classes=6)
    checkpoint = pretrain(corpus, root / "S3", "S3", "--total-steps", "2000", "--stage2-start-step", "1000")
    trained = eval_fewshot(corpus, root / "trained", "--checkpoint", str(checkpoint), "--meta-steps", "50")
    untrained = eval_fewshot(corpus, root / "untrained")
    return {"trained": trained, "untrained": untrained}


class TestRetrievalAfterPretraining:
    """S2 aligns the modalities; S1 alone does not."""

    @pytest.mark.parametrize("setting", ["V->L", "L->V"])
    def test_s2_cross_modal(self, retrieval_runs, setting):
        """Cross-modal R@1 reaches 0.90 in both directions (chance is 0.25)."""
        assert retrieval_runs["S2"][setting]["R@1"] >= 0.90

    @pytest.mark.parametrize("setting", ["V->V", "L->L"])
    def test_s2_uni_modal(self, retrieval_runs, setting):
        """Uni-modal R@1 reaches 0.95."""
        assert retrieval_runs["S2"][setting]["R@1"] >= 0.95

    @pytest.mark.parametrize("setting", ["V->L", "L->V"])
    def test_s1_lags_s2_cross_modal(self, retrieval_runs, setting):
        """Without L2U, cross-modal R@1 stays at least 0.3 below S2."""
        assert retrieval_runs["S2"][setting]["R@1"] - retrieval_runs["S1"][setting]["R@1"] >= 0.3


class TestFewShotAfterPretraining:
    """3-way 1-shot episodes on novel classes."""

    def test_trained_accuracy(self, fewshot_runs):
        """The trained S3 model classifies 600 novel episodes at 0.80 or better."""
        result = fewshot_runs["trained"]["pretrained"]["multimodal"]
        assert result["way"] == 3 and result["episodes"] == 600
        assert result["accuracy"] >= 0.80

    def test_margin_over_untrained(self, fewshot_runs):
        """Pretraining beats the untrained model by three confidence half-widths."""
        trained = fewshot_runs["trained"]["pretrained"]["multimodal"]
        untrained = fewshot_runs["untrained"]["pretrained"]["multimodal"]
        assert trained["accuracy"] - untrained["accuracy"] >= 3 * trained["ci95"]
        assert trained["accuracy"] >= 1.0 / 3 + 3 * trained["ci95"]

    def test_meta_training_does_not_hurt(self, fewshot_runs):
        """Episodic fine-tuning on the base classes keeps or improves 1-shot accuracy."""
        data = fewshot_runs["trained"]
        assert data["meta_trained"]["multimodal"]["accuracy"] >= data["pretrained"]["multimodal"]["accuracy"]


class TestDeterminism:
    """Two runs from the same seed write identical bytes."""

    REPORTS = (
        "S3/metrics.jsonl",
        "S3/summary.txt",
        "S3/model.gdoc",
        "fewshot/fewshot.json",
        "fewshot/fewshot.txt",
        "retrieval/retrieval.json",
        "retrieval/retrieval.txt",
    )

    def run_pipeline(self, root):
        corpus = gen_corpus(root / "corpus", classes=6, per_class=40, seed=5)
        checkpoint = pretrain(
            corpus, root / "S3", "S3", "--total-steps", "200", "--stage2-start-step", "100",
            "--deterministic", "true",
        )
        eval_fewshot(
            corpus, root / "fewshot", "--checkpoint", str(checkpoint), "--episodes", "100", "--meta-steps", "5"
        )
        eval_retrieval(corpus, checkpoint, root / "retrieval")

    def test_reruns_are_bit_identical(self, tmp_path):
        """Metrics, checkpoints and reports match byte for byte."""
        self.run_pipeline(tmp_path / "a")
        self.run_pipeline(tmp_path / "b")
        for name in self.REPORTS:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

# EOF
