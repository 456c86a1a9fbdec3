#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 18:47:10"
# File: ./tests/test_trainer.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./tests/test_trainer.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Tests for the schedule, the AdamW optimizer and the staged training loop.
"""

import json
import math

import numpy as np
import pytest

from docpair.autodiff import Tensor, precision
from docpair.encoders import DocPairModel
from docpair.exceptions import ConfigError, InsufficientDataError, NonFiniteError
from docpair.objectives import LossBreakdown, ObjectiveConfig, select_support
from docpair.trainer import (
    AdamState,
    AdamW,
    TrainConfig,
    Trainer,
    clip_gradients,
    gradcheck_queues,
    gradcheck_setting,
    load_model,
    lr_at,
    objective_for,
    optimizer_step,
    tiny_model_config,
    train,
)


def short_config(**overrides):
    values = dict(setting="S2", batch_size=8, total_steps=6, queue_capacity=32, checkpoint_interval=3, seed=11)
    values.update(overrides)
    return TrainConfig(**values)


class TestSchedule:
    """Warmup then linear decay."""

    def test_endpoints(self):
        """First step is peak/warmup, last step is the final rate."""
        config = TrainConfig(total_steps=100, warmup_fraction=0.1, peak_lr=1e-3, final_lr=5e-4)
        assert lr_at(0, config) == pytest.approx(1e-4)
        assert lr_at(9, config) == pytest.approx(1e-3)
        assert lr_at(10, config) == pytest.approx(1e-3)
        assert lr_at(99, config) == pytest.approx(5e-4)

    def test_shape(self):
        """Rates rise during warmup and never rise afterwards."""
        config = TrainConfig(total_steps=50, warmup_fraction=0.2)
        rates = [lr_at(s, config) for s in range(50)]
        warm = config.warmup_steps
        assert all(b > a for a, b in zip(rates[: warm - 1], rates[1:warm]))
        assert all(b <= a for a, b in zip(rates[warm:], rates[warm + 1:]))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"warmup_fraction": 0.0},
            {"warmup_fraction": 1.0},
            {"total_steps": 0},
            {"setting": "S3", "total_steps": 10, "stage2_start_step": 10},
            {"queue_capacity": 0},
        ],
    )
    def test_invalid_config(self, kwargs):
        """Invalid training settings raise ConfigError."""
        with pytest.raises(ConfigError):
            TrainConfig(**kwargs)


class TestOptimizer:
    """AdamW with decoupled weight decay."""

    def test_first_step_is_sign_sized(self):
        """With bias correction the first update is lr * g / |g|."""
        weights = {"w": np.array([[1.0, -1.0]])}
        grads = {"w": np.array([[0.5, -2.0]])}
        new, state = optimizer_step(weights, grads, AdamState(), lr=0.1, weight_decay=0.0)
        np.testing.assert_allclose(new["w"], [[0.9, -0.9]], atol=1e-6)
        assert state.t == 1

    def test_pure(self):
        """Inputs are left untouched."""
        weights = {"w": np.ones((2, 2))}
        state = AdamState()
        optimizer_step(weights, {"w": np.ones((2, 2))}, state, lr=0.1, weight_decay=0.1)
        np.testing.assert_array_equal(weights["w"], np.ones((2, 2)))
        assert state.t == 0 and not state.m

    def test_decay_mask(self):
        """Only masked-in weights shrink under zero gradient."""
        weights = {"w": np.ones((2, 2)), "b": np.ones(2)}
        grads = {"w": np.zeros((2, 2)), "b": np.zeros(2)}
        new, _ = optimizer_step(
            weights, grads, AdamState(), lr=0.1, weight_decay=0.5, decay_mask={"w": True, "b": False}
        )
        np.testing.assert_allclose(new["w"], 0.95)
        np.testing.assert_allclose(new["b"], 1.0)

    def test_non_finite_gradient(self):
        """NaN gradients are refused."""
        with pytest.raises(NonFiniteError):
            optimizer_step({"w": np.ones(2)}, {"w": np.array([np.nan, 0.0])}, AdamState(), 0.1, 0.0)

    def test_gradient_shape(self):
        """Gradients must match their weights."""
        with pytest.raises(ConfigError):
            optimizer_step({"w": np.ones(2)}, {"w": np.ones(3)}, AdamState(), 0.1, 0.0)

    def test_minimises_quadratic(self):
        """AdamW drives a quadratic towards its minimum."""
        target = np.array([1.0, -2.0, 3.0])
        x = Tensor(np.zeros(3), requires_grad=True, dtype=np.float64)
        optimizer = AdamW({"x": x}, weight_decay=0.0)
        for _ in range(500):
            optimizer.zero_grad()
            diff = x - Tensor(target, dtype=np.float64)
            (diff * diff).sum().backward()
            optimizer.step(0.05, optimizer.gradients())
        assert float(np.sum((x.data - target) ** 2)) < 0.1

    def test_moments_round_trip(self):
        """Moments and step count can be reloaded."""
        x = Tensor(np.ones((2, 2)), requires_grad=True)
        optimizer = AdamW({"x": x})
        optimizer.step(0.1, {"x": np.ones((2, 2), dtype=np.float32)})
        other = AdamW({"x": x})
        other.load_moments(optimizer.moments(), t=optimizer.state.t)
        assert other.state.t == 1
        np.testing.assert_array_equal(other.state.m["x"], optimizer.state.m["x"])

    def test_clip(self):
        """Global norm clipping scales every gradient by the same factor."""
        grads = {"a": np.array([3.0]), "b": np.array([4.0])}
        clipped, norm = clip_gradients(grads, 1.0)
        assert norm == pytest.approx(5.0)
        np.testing.assert_allclose([clipped["a"][0], clipped["b"][0]], [0.6, 0.8])
        unchanged, _ = clip_gradients(grads, 10.0)
        np.testing.assert_array_equal(unchanged["a"], grads["a"])


class TestTrainer:
    """Short staged runs on the small corpus."""

    def test_setting_mismatch(self, small_model, small_corpus):
        """Objective and training settings must agree."""
        with pytest.raises(ConfigError):
            Trainer(small_model, ObjectiveConfig(setting="S1"), short_config(), small_corpus["train"])

    def test_corpus_smaller_than_batch(self, small_model, small_corpus):
        """A batch cannot exceed the corpus."""
        tiny = small_corpus["train"].subset(range(4))
        with pytest.raises(InsufficientDataError):
            Trainer(small_model, objective_for(short_config()), short_config(), tiny)

    def test_run_writes_metrics_and_checkpoints(self, small_model, small_corpus, tmp_path):
        """Every step is logged; checkpoints land at the interval and the end."""
        state = train(small_model, short_config(), small_corpus["train"], out_dir=tmp_path)
        assert state.step == 6
        records = [json.loads(line) for line in state.metrics_path.read_text().splitlines()]
        assert [r["step"] for r in records] == list(range(6))
        assert [r["queue_len"] for r in records] == [8, 16, 24, 32, 32, 32]
        for r in records:
            parts = [v for k, v in r.items() if k.startswith("loss_") and k != "loss_total"]
            assert math.fsum(parts) == pytest.approx(r["loss_total"], abs=1e-6)
            assert r["loss_l2u"] > 0 and r["loss_l2r_v"] == 0.0
        assert (tmp_path / "checkpoints" / "step_000003.gdoc").exists()
        assert (tmp_path / "checkpoints" / "step_000006.gdoc").exists()
        assert state.checkpoint_path == tmp_path / "model.gdoc"

    def test_purity_reported_once_queue_fills(self, small_model, small_corpus):
        """The first step falls back to NN(x)=x and has no purity."""
        state = train(small_model, short_config(total_steps=2), small_corpus["train"])
        assert state.history[0]["nn_purity_v"] is None
        assert 0.0 <= state.history[1]["nn_purity_v"] <= 1.0

    def test_s3_stages(self, small_model, small_corpus):
        """S3 mines neighbours at the stage switch and freezes the backbones."""
        config = short_config(setting="S3", stage2_start_step=3, k_mine=2)
        trainer = Trainer(small_model, objective_for(config, num_clusters=4), config, small_corpus["train"])
        for _ in range(3):
            trainer.train_step()
        assert trainer.cluster_heads is None
        frozen = small_model.digest()
        records = [trainer.train_step() for _ in range(3)]
        assert [r["stage"] for r in records] == [2, 2, 2]
        assert trainer.cluster_heads is not None and trainer.cluster_heads.has_tables
        assert all(r["loss_l2r_v"] != 0.0 for r in records)
        assert small_model.digest() == frozen

    def test_s1_trains_only_l2m(self, small_model, small_corpus):
        """S1 records no L2U loss."""
        state = train(small_model, short_config(setting="S1", total_steps=2), small_corpus["train"])
        assert all(r["loss_l2u"] == 0.0 for r in state.history)

    def test_restore_step_weights_and_rng(self, small_model_config, small_corpus, tmp_path):
        """A restored trainer continues from the saved step with the saved generator."""
        config = short_config()
        first = Trainer(DocPairModel(small_model_config), objective_for(config), config, small_corpus["train"])
        for _ in range(3):
            first.train_step()
        path = first.save(tmp_path / "mid.gdoc")
        expected_batch = first.sample_batch()

        second = Trainer(DocPairModel(small_model_config, seed=9), objective_for(config), config, small_corpus["train"])
        second.restore(path)
        assert second.step == 3
        assert second.optimizer.state.t == 3
        assert second.model.digest() == first.model.digest()
        assert len(second.queues[0]) == 0
        np.testing.assert_array_equal(second.sample_batch(), expected_batch)

    def test_resume_appends_metrics(self, small_model_config, small_corpus, tmp_path):
        """Resuming continues the step count and appends to metrics.jsonl."""
        config = short_config()
        train(DocPairModel(small_model_config), config, small_corpus["train"], out_dir=tmp_path)
        resumed = train(
            DocPairModel(small_model_config),
            short_config(total_steps=8),
            small_corpus["train"],
            out_dir=tmp_path,
            resume=tmp_path / "checkpoints" / "step_000006.gdoc",
        )
        assert [r["step"] for r in resumed.history] == [6, 7]
        assert len((tmp_path / "metrics.jsonl").read_text().splitlines()) == 8

    def test_load_model(self, small_model, small_model_config, small_corpus, tmp_path):
        """The final checkpoint rebuilds the trained model."""
        state = train(small_model, short_config(total_steps=2), small_corpus["train"], out_dir=tmp_path)
        restored = load_model(state.checkpoint_path, small_model_config)
        assert restored.digest() == small_model.digest()

    def test_non_finite_streak_halts(self, small_model, small_corpus, monkeypatch):
        """Non-finite steps are skipped, three in a row abort the run."""
        monkeypatch.setattr(
            "docpair.trainer.total_loss", lambda *args, **kwargs: (Tensor(np.nan), LossBreakdown())
        )
        trainer = Trainer(small_model, objective_for(short_config()), short_config(), small_corpus["train"])
        assert trainer.train_step() is None
        assert trainer.train_step() is None
        assert trainer.step == 2
        with pytest.raises(NonFiniteError):
            trainer.train_step()


class TestGradcheckSetting:
    """Finite-difference certification of the full pretext loss."""

    @pytest.mark.parametrize("setting", ["S1", "S2", "S3"])
    def test_settings_pass(self, setting):
        """Each setting's total loss passes at 1e-4."""
        report = gradcheck_setting(setting, dim=8, batch_size=4, max_entries_per_leaf=6)
        assert report.passed, report.format()
        assert report.checked_entries > 0

    def test_full_s3_checks_every_entry(self):
        """By default every parameter entry of the S3 total is checked, with filled queues."""
        report = gradcheck_setting("S3", dim=8, batch_size=4)
        assert report.passed, report.format()
        leaves = DocPairModel(tiny_model_config(8)).num_parameters()
        assert report.checked_entries > leaves

    def test_empty_queues_still_pass(self):
        """With empty queues L2M falls back to NN(x)=x and still passes."""
        report = gradcheck_setting("S1", queue_size=0, max_entries_per_leaf=6)
        assert report.passed, report.format()

    def test_queues_are_filled_with_unit_rows(self):
        """Certification queues hold detached unit rows of the model width."""
        queue_v, queue_t = gradcheck_queues(8, 5, np.random.default_rng(0))
        assert len(queue_v) == len(queue_t) == 5
        np.testing.assert_allclose(np.linalg.norm(queue_v.snapshot(), axis=1), 1.0, atol=1e-12)
        assert queue_t.snapshot().shape == (5, 8)
        assert all(queue.is_empty for queue in gradcheck_queues(8, 0, np.random.default_rng(0)))

    def test_queue_changes_the_certified_loss(self):
        """Filled queues supply neighbours different from the anchors themselves."""
        with precision(np.float64):
            model = DocPairModel(tiny_model_config(8))
            z_v = model.embed_vision(np.random.default_rng(1).uniform(size=(4, 8, 8, 1)))
            queue_v, _ = gradcheck_queues(8, 8, np.random.default_rng(2))
            chosen = select_support(queue_v, z_v)
        assert not chosen.fallback
        assert not np.allclose(chosen.vectors.data, z_v.data)

    def test_soft_targets_pass(self):
        """Soft L2U targets are held fixed and the rest is differentiated through."""
        report = gradcheck_setting("S2", l2u_target_mode="soft", max_entries_per_leaf=6)
        assert report.passed, report.format()

    def test_cluster_heads_are_leaves(self):
        """S3 certifies the cluster heads too."""
        report = gradcheck_setting("S3", max_entries_per_leaf=2)
        assert any(name.startswith("cluster.") for name in report.errors)

# EOF
