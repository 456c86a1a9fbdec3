#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 13:41:26"
# File: ./src/docpair/trainer.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/trainer.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Two-stage self-supervised training.

Stage 1 optimises L2M (S1) or L2M + L2U (S2, S3) while feeding the support
queues. For S3, at ``stage2_start_step`` the training corpus is embedded,
k-NN tables are mined per modality, cluster heads are created and L2R
joins the objective.

Full-scale reference values (documentation only):
    batch 128, 499,600 steps, AdamW, weight decay 1e-2,
    lr warmed up to 1e-4 over the first 10% then linearly decayed to 5e-5,
    temperature 0.07, queue 65,536.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from tqdm import tqdm

from .autodiff import GradcheckReport, Tensor, gradcheck, precision
from .checkpoint import TrainingSnapshot, load_checkpoint, load_state, save_checkpoint
from .datagen import CorpusSplit
from .encoders import (
    CmaeConfig,
    DocPairModel,
    LanguageEncoderConfig,
    ModelConfig,
    VisionEncoderConfig,
    embed_documents,
)
from .exceptions import ConfigError, InsufficientDataError, NonFiniteError
from .objectives import ClusterHeads, LossInputs, ObjectiveConfig, l2u_targets, total_loss
from .support_queue import Modality, SupportQueue

logger = logging.getLogger(__name__)

FULL_SCALE_BATCH_SIZE = 128
FULL_SCALE_TOTAL_STEPS = 499_600
FULL_SCALE_PEAK_LR = 1e-4
FULL_SCALE_FINAL_LR = 5e-5
FULL_SCALE_WEIGHT_DECAY = 1e-2
FULL_SCALE_QUEUE_CAPACITY = 65_536

MAX_CONSECUTIVE_NONFINITE = 3
# gradients below this magnitude are compared in absolute terms
GRADCHECK_FLOOR = 1e-4
GRADCHECK_QUEUE_SIZE = 8


@dataclass
class TrainConfig:
    setting: str = "S2"
    batch_size: int = 16
    total_steps: int = 2000
    warmup_fraction: float = 0.1
    peak_lr: float = 1e-3
    final_lr: float = 5e-4
    weight_decay: float = 1e-2
    temperature: float = 0.07
    queue_capacity: int = 512
    k_mine: int = 5
    entropy_weight: float = 2.0
    stage2_start_step: int = 1000
    seed: int = 0
    deterministic: bool = True
    checkpoint_interval: int = 500
    grad_clip: float = 5.0
    neighbor_refresh_interval: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.warmup_fraction < 1.0:
            raise ConfigError(f"warmup_fraction must lie in (0, 1), got {self.warmup_fraction}")
        if self.total_steps < 1 or self.batch_size < 1:
            raise ConfigError("total_steps and batch_size must be positive")
        if self.setting == "S3" and not 0 <= self.stage2_start_step < self.total_steps:
            raise ConfigError(
                f"stage2_start_step {self.stage2_start_step} must lie in [0, {self.total_steps})"
            )
        if self.queue_capacity < 1:
            raise ConfigError("queue_capacity must be positive")

    @property
    def warmup_steps(self) -> int:
        return max(1, int(round(self.warmup_fraction * self.total_steps)))


# ---- schedule & optimizer -------------------------------------------------
def lr_at(step: int, config: TrainConfig) -> float:
    """
    Linear warmup to ``peak_lr`` then linear decay to ``final_lr``.

    ``lr_at(0) = peak_lr / warmup_steps``; the last warmup step and the
    first decay step both sit at ``peak_lr``; ``lr_at(total_steps - 1) = final_lr``.
    """
    warm = config.warmup_steps
    if step < warm:
        return config.peak_lr * (step + 1) / warm
    span = max(1, config.total_steps - 1 - warm)
    progress = min(1.0, (step - warm) / span)
    return config.peak_lr + (config.final_lr - config.peak_lr) * progress


@dataclass
class AdamState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def optimizer_step(
    weights: Dict[str, np.ndarray],
    grads: Dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    weight_decay: float,
    betas: Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
    decay_mask: Optional[Dict[str, bool]] = None,
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """
    One AdamW update with bias-corrected moments and decoupled weight decay.

    Returns new weight arrays and a new state; the inputs are not modified.
    """
    for name, g in grads.items():
        if weights[name].shape != g.shape:
            raise ConfigError(f"{name}: gradient shape {g.shape} vs weight {weights[name].shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient for {name}")
    b1, b2 = betas
    t = state.t + 1
    new_state = AdamState(m=dict(state.m), v=dict(state.v), t=t)
    new_weights = dict(weights)
    for name, g in grads.items():
        w = weights[name]
        m = b1 * state.m.get(name, np.zeros_like(w)) + (1.0 - b1) * g
        v = b2 * state.v.get(name, np.zeros_like(w)) + (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1**t)
        v_hat = v / (1.0 - b2**t)
        decay = weight_decay if (decay_mask is None or decay_mask.get(name, True)) else 0.0
        new_weights[name] = (w * (1.0 - lr * decay) - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(w.dtype)
        new_state.m[name], new_state.v[name] = m.astype(w.dtype), v.astype(w.dtype)
    return new_weights, new_state


def global_grad_norm(grads: Dict[str, np.ndarray]) -> float:
    return math.sqrt(math.fsum(float(np.sum(g.astype(np.float64) ** 2)) for g in grads.values()))


class AdamW:
    """Stateful wrapper applying ``optimizer_step`` to named Tensors in place."""

    def __init__(
        self,
        parameters: Dict[str, Tensor],
        weight_decay: float = 1e-2,
        betas: Tuple[float, float] = (0.9, 0.999),
        eps: float = 1e-8,
    ):
        self.parameters: Dict[str, Tensor] = dict(parameters)
        self.weight_decay = weight_decay
        self.betas = betas
        self.eps = eps
        self.state = AdamState()

    def add_parameters(self, parameters: Dict[str, Tensor]) -> None:
        self.parameters.update(parameters)

    def zero_grad(self) -> None:
        for p in self.parameters.values():
            p.zero_grad()

    def gradients(self, names: Optional[List[str]] = None) -> Dict[str, np.ndarray]:
        names = list(self.parameters) if names is None else names
        return {
            n: (self.parameters[n].grad if self.parameters[n].grad is not None else np.zeros_like(self.parameters[n].data))
            for n in names
        }

    def step(self, lr: float, grads: Dict[str, np.ndarray]) -> None:
        weights = {n: self.parameters[n].data for n in grads}
        # biases and layer-norm gains are not decayed
        mask = {n: self.parameters[n].ndim >= 2 for n in grads}
        new_weights, self.state = optimizer_step(
            weights, grads, self.state, lr, self.weight_decay, self.betas, self.eps, mask
        )
        for n, w in new_weights.items():
            self.parameters[n].data = w

    def moments(self) -> Dict[str, Dict[str, np.ndarray]]:
        return {"m": dict(self.state.m), "v": dict(self.state.v)}

    def load_moments(self, moments: Dict[str, Dict[str, np.ndarray]], t: int) -> None:
        self.state = AdamState(m=dict(moments.get("m", {})), v=dict(moments.get("v", {})), t=int(t))


def clip_gradients(grads: Dict[str, np.ndarray], max_norm: float) -> Tuple[Dict[str, np.ndarray], float]:
    norm = global_grad_norm(grads)
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        grads = {n: g * scale for n, g in grads.items()}
    return grads, norm


# ---- training -------------------------------------------------------------
@dataclass
class TrainState:
    """Outcome of a run: final step, weights, optimizer state, queues and history."""

    step: int
    model: DocPairModel
    optimizer: AdamW
    queues: Tuple[SupportQueue, SupportQueue]
    rng_state: dict
    history: List[dict] = field(default_factory=list)
    cluster_heads: Optional[ClusterHeads] = None
    metrics_path: Optional[Path] = None
    checkpoint_path: Optional[Path] = None


def _json_float(value: float) -> Optional[float]:
    return None if value is None or not math.isfinite(value) else float(value)


class Trainer:
    """
    Owns model weights, queues and optimizer for one run.

    Parameters
    ----------
    model : DocPairModel
        Model to train in place.
    objective : ObjectiveConfig
        Loss selection; its setting must match ``config.setting``.
    config : TrainConfig
        Schedule and optimizer settings.
    corpus : CorpusSplit
        Training documents.
    out_dir : Path, optional
        Where ``metrics.jsonl`` and checkpoints are written.
    """

    def __init__(
        self,
        model: DocPairModel,
        objective: ObjectiveConfig,
        config: TrainConfig,
        corpus: CorpusSplit,
        out_dir: Optional[Union[str, Path]] = None,
        config_digest: str = "0" * 64,
        progress: bool = False,
    ):
        if objective.setting != config.setting:
            raise ConfigError(
                f"objective setting {objective.setting} differs from training setting {config.setting}"
            )
        if len(corpus) < config.batch_size:
            raise InsufficientDataError(
                f"corpus of {len(corpus)} documents is smaller than batch size {config.batch_size}"
            )
        self.model = model
        self.objective = objective
        self.config = config
        self.corpus = corpus
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.config_digest = config_digest
        self.progress = progress
        self.queues = (
            SupportQueue(config.queue_capacity, Modality.VISION),
            SupportQueue(config.queue_capacity, Modality.LANGUAGE),
        )
        self.rng = np.random.default_rng(config.seed)
        self.optimizer = AdamW(
            {f"model.{n}": p for n, p in model.named_parameters().items()},
            weight_decay=config.weight_decay,
            betas=(config.beta1, config.beta2),
            eps=config.adam_eps,
        )
        self.cluster_heads: Optional[ClusterHeads] = None
        self.step = 0
        self.history: List[dict] = []
        self._nonfinite_streak = 0
        self._metrics_file = None

    # ---- stages ---------------------------------------------------------
    @property
    def uses_stage2(self) -> bool:
        return "l2r" in self.objective.terms

    def stage_at(self, step: int) -> int:
        return 2 if self.uses_stage2 and step >= self.config.stage2_start_step else 1

    def _mine_neighbours(self) -> None:
        use_cmae = self.objective.l2r_source == "cmae"
        z_v, z_t = embed_documents(self.model, self.corpus.images, self.corpus.tokens, use_cmae=use_cmae)
        self.cluster_heads.mine(z_v, z_t)

    def enter_stage2(self) -> None:
        """Embed the corpus, mine neighbour tables and create the cluster heads."""
        if self.config.k_mine >= len(self.corpus):
            raise InsufficientDataError(
                f"k_mine={self.config.k_mine} needs a corpus larger than {len(self.corpus)} documents"
            )
        if self.step == 0:
            logger.warning("stage 2 starts at step 0: neighbours are mined from untrained features")
        cfg = self.model.config
        in_dim = cfg.cmae.hidden_dim if self.objective.l2r_source == "cmae" else cfg.projection_dim
        clusters = self.objective.num_clusters
        self.cluster_heads = ClusterHeads(
            in_dim,
            clusters,
            clusters,
            np.random.default_rng([self.config.seed, 2]),
            entropy_weight=self.config.entropy_weight,
            k_mine=self.config.k_mine,
        )
        self._mine_neighbours()
        self.optimizer.add_parameters(
            {f"cluster.{n}": p for n, p in self.cluster_heads.named_parameters().items()}
        )
        logger.info("stage 2 entered at step %d", self.step)

    def trainable_names(self, stage: int) -> List[str]:
        names = list(self.optimizer.parameters)
        if stage == 2 and self.objective.freeze_backbones_stage2:
            return [n for n in names if n.startswith("cluster.")]
        return names

    # ---- one step -------------------------------------------------------
    def sample_batch(self) -> np.ndarray:
        return np.sort(self.rng.choice(len(self.corpus), size=self.config.batch_size, replace=False))

    def _loss_inputs(self, indices: np.ndarray, stage: int) -> LossInputs:
        images = self.corpus.images[indices]
        tokens = [self.corpus.tokens[i] for i in indices]
        encoded = self.model.encode(images, tokens)
        terms = self.objective.terms if stage == 2 else self.objective.terms - {"l2r"}
        sources = set()
        if "l2m" in terms:
            sources.add(self.objective.l2m_source)
        if "l2u" in terms:
            sources.add(self.objective.l2u_source)
        if "l2r" in terms:
            sources.add(self.objective.l2r_source)
        inputs = LossInputs(labels=self.corpus.labels[indices], corpus_indices=indices)
        if "projection" in sources:
            inputs.projected_v, inputs.projected_t = self.model.project(encoded)
        if "cmae" in sources:
            inputs.fused_v, inputs.fused_t = self.model.fuse(encoded)
        if stage == 2 and self.objective.freeze_backbones_stage2:
            for key in ("projected_v", "projected_t", "fused_v", "fused_t"):
                value = getattr(inputs, key)
                if value is not None:
                    setattr(inputs, key, value.detach())
        return inputs

    def train_step(self) -> Optional[dict]:
        """Run one optimisation step; returns its metrics record, or None if aborted."""
        stage = self.stage_at(self.step)
        if stage == 2 and self.cluster_heads is None:
            self.enter_stage2()
        elif (
            stage == 2
            and self.config.neighbor_refresh_interval > 0
            and self.step > self.config.stage2_start_step
            and (self.step - self.config.stage2_start_step) % self.config.neighbor_refresh_interval == 0
        ):
            self._mine_neighbours()

        indices = self.sample_batch()
        self.optimizer.zero_grad()
        inputs = self._loss_inputs(indices, stage)
        loss, breakdown = total_loss(self.objective, inputs, self.queues, self.cluster_heads, stage=stage)
        lr = lr_at(self.step, self.config)

        grads = None
        if math.isfinite(loss.item()):
            loss.backward()
            grads = self.optimizer.gradients(self.trainable_names(stage))
        if grads is None or not all(np.all(np.isfinite(g)) for g in grads.values()):
            self._nonfinite_streak += 1
            logger.warning(
                "step %d: non-finite loss or gradient, step aborted (%d in a row)",
                self.step,
                self._nonfinite_streak,
            )
            if self._nonfinite_streak >= MAX_CONSECUTIVE_NONFINITE:
                raise NonFiniteError(
                    f"{MAX_CONSECUTIVE_NONFINITE} consecutive non-finite steps, halting at step {self.step}"
                )
            self.step += 1
            return None
        self._nonfinite_streak = 0

        grads, grad_norm = clip_gradients(grads, self.config.grad_clip)
        self.optimizer.step(lr, grads)

        z_v, z_t = inputs.pair(self.objective.l2m_source)
        labels = self.corpus.labels[indices]
        doc_ids = [self.corpus.doc_ids[i] for i in indices]
        self.queues[0].enqueue_batch(z_v.data, labels, doc_ids)
        self.queues[1].enqueue_batch(z_t.data, labels, doc_ids)

        record = {
            "step": self.step,
            "stage": stage,
            "loss_total": breakdown.total,
            **breakdown.components,
            "lr": lr,
            "grad_norm": grad_norm,
            "nn_purity_v": _json_float(breakdown.nn_purity_v),
            "nn_purity_t": _json_float(breakdown.nn_purity_t),
            "queue_len": len(self.queues[0]),
        }
        logger.debug("step %d: %s", self.step, record)
        self.history.append(record)
        if self._metrics_file is not None:
            self._metrics_file.write(json.dumps(record, sort_keys=True) + "\n")
        self.step += 1
        return record

    # ---- persistence ----------------------------------------------------
    def state_blocks(self) -> Dict[str, np.ndarray]:
        return {n: p.data for n, p in self.optimizer.parameters.items()}

    def save(self, path: Union[str, Path]) -> Path:
        snapshot = TrainingSnapshot(
            step=self.step, stage=self.stage_at(self.step), rng_state=self.rng.bit_generator.state
        )
        state = {**snapshot.to_dict(), "optimizer_t": self.optimizer.state.t}
        return save_checkpoint(path, self.state_blocks(), self.config_digest, self.optimizer.moments(), state)

    def restore(self, path: Union[str, Path]) -> None:
        """Restore weights, moments, step and RNG state; queues restart empty."""
        checkpoint = load_checkpoint(path, expected_digest=self.config_digest)
        state = load_state(path)
        snapshot = TrainingSnapshot.from_dict(state)
        params = checkpoint.parameters()
        self.model.load_state_dict(
            {n[len("model."):]: v for n, v in params.items() if n.startswith("model.")}
        )
        self.step = snapshot.step
        if self.uses_stage2 and snapshot.step > self.config.stage2_start_step:
            self.enter_stage2()
            self.cluster_heads.load_state_dict(
                {n[len("cluster."):]: v for n, v in params.items() if n.startswith("cluster.")}
            )
        self.optimizer.load_moments(checkpoint.moments(), state.get("optimizer_t", snapshot.step))
        if snapshot.rng_state:
            self.rng.bit_generator.state = snapshot.rng_state
        logger.info("resumed from %s at step %d (queues start empty)", path, self.step)

    # ---- loop -----------------------------------------------------------
    def run(self) -> TrainState:
        metrics_path = checkpoint_path = None
        if self.out_dir is not None:
            self.out_dir.mkdir(parents=True, exist_ok=True)
            metrics_path = self.out_dir / "metrics.jsonl"
            self._metrics_file = open(metrics_path, "a" if self.step else "w")
        try:
            bar = tqdm(
                range(self.step, self.config.total_steps),
                desc=f"pretrain {self.config.setting}",
                disable=not self.progress,
            )
            for _ in bar:
                record = self.train_step()
                if record is not None:
                    bar.set_postfix(loss=f"{record['loss_total']:.3f}", stage=record["stage"])
                interval = self.config.checkpoint_interval
                if self.out_dir is not None and interval > 0 and self.step % interval == 0:
                    self.save(self.out_dir / "checkpoints" / f"step_{self.step:06d}.gdoc")
            if self.out_dir is not None:
                checkpoint_path = self.save(self.out_dir / "model.gdoc")
        finally:
            if self._metrics_file is not None:
                self._metrics_file.close()
                self._metrics_file = None
        return TrainState(
            step=self.step,
            model=self.model,
            optimizer=self.optimizer,
            queues=self.queues,
            rng_state=self.rng.bit_generator.state,
            history=self.history,
            cluster_heads=self.cluster_heads,
            metrics_path=metrics_path,
            checkpoint_path=checkpoint_path,
        )


def load_model(
    path: Union[str, Path], config: Optional[ModelConfig] = None, expected_digest: Optional[str] = None
) -> DocPairModel:
    """Rebuild a DocPairModel and load the ``model.*`` blocks of a checkpoint."""
    checkpoint = load_checkpoint(path, expected_digest=expected_digest)
    model = DocPairModel(config)
    model.load_state_dict(
        {n[len("model."):]: v for n, v in checkpoint.parameters().items() if n.startswith("model.")}
    )
    return model


def tiny_model_config(dim: int = 8) -> ModelConfig:
    """Smallest useful architecture, for gradient certification."""
    heads = 2 if dim % 2 == 0 else 1
    return ModelConfig(
        vision=VisionEncoderConfig(8, 8, 1, 4, dim, 1, heads),
        language=LanguageEncoderConfig(vocab_size=16, max_sequence_length=8, hidden_dim=dim, num_layers=1, num_heads=heads),
        cmae=CmaeConfig(hidden_dim=dim, num_heads=heads, num_layers=1),
        projection_dim=dim,
        projection_hidden_dim=dim,
        ffn_multiplier=2,
    )


def gradcheck_queues(
    dim: int, size: int, rng: np.random.Generator
) -> Tuple[SupportQueue, SupportQueue]:
    """Two support queues holding ``size`` random unit rows each (empty when size is 0)."""
    queues = (SupportQueue(max(size, 1), Modality.VISION), SupportQueue(max(size, 1), Modality.LANGUAGE))
    if size > 0:
        for queue in queues:
            rows = rng.normal(size=(size, dim))
            queue.enqueue_batch(rows / np.linalg.norm(rows, axis=1, keepdims=True))
    return queues


def gradcheck_setting(
    setting: str = "S3",
    dim: int = 8,
    batch_size: int = 4,
    seed: int = 0,
    tolerance: float = 1e-4,
    max_entries_per_leaf: Optional[int] = None,
    l2u_target_mode: str = "hard",
    queue_size: int = GRADCHECK_QUEUE_SIZE,
) -> GradcheckReport:
    """
    Finite-difference check of the full pretext loss of ``setting``.

    A float64 model of width ``dim`` embeds ``batch_size`` random document
    pairs. L2M draws its neighbours from two support queues pre-filled with
    ``queue_size`` detached unit rows; for S3 the neighbour tables are mined
    on the batch itself and L2R is active. Soft L2U targets are computed once
    and held fixed, since they carry no gradient. Every model and
    cluster-head parameter is a leaf; ``max_entries_per_leaf=None`` checks
    every entry.
    """
    rng = np.random.default_rng(seed)
    with precision(np.float64):
        model = DocPairModel(tiny_model_config(dim), seed=seed)
        images = rng.uniform(0.0, 1.0, size=(batch_size, 8, 8, 1))
        tokens = [rng.integers(3, 16, size=int(rng.integers(2, 6))) for _ in range(batch_size)]
        queues = gradcheck_queues(dim, queue_size, rng)
        objective = ObjectiveConfig(
            setting=setting, k_mine=1, num_clusters=3, l2u_target_mode=l2u_target_mode
        )
        leaves = {f"model.{n}": p for n, p in model.named_parameters().items()}
        heads = None
        if "l2r" in objective.terms:
            heads = ClusterHeads(dim, 3, 3, np.random.default_rng([seed, 2]), k_mine=1)
            fused_v, fused_t = model.embed_batch(images, tokens, use_cmae=True)
            heads.mine(fused_v.data, fused_t.data)
            leaves.update({f"cluster.{n}": p for n, p in heads.named_parameters().items()})
        corpus_indices = np.arange(batch_size)

        def batch_inputs() -> LossInputs:
            encoded = model.encode(images, tokens)
            inputs = LossInputs(corpus_indices=corpus_indices)
            inputs.projected_v, inputs.projected_t = model.project(encoded)
            inputs.fused_v, inputs.fused_t = model.fuse(encoded)
            return inputs

        fixed_targets = None
        if "l2u" in objective.terms:
            f_v, f_t = batch_inputs().pair(objective.l2u_source)
            fixed_targets = l2u_targets(f_v, f_t, l2u_target_mode, objective.l2u_temperature)

        def loss() -> Tensor:
            inputs = batch_inputs()
            inputs.l2u_targets = fixed_targets
            value, _ = total_loss(objective, inputs, queues, heads)
            return value

        report = gradcheck(
            loss,
            leaves,
            tolerance=tolerance,
            max_entries_per_leaf=max_entries_per_leaf,
            seed=seed,
            floor=GRADCHECK_FLOOR,
        )
    logger.info(
        "gradcheck %s dim=%d queue=%d: max rel err %.3e over %d entries",
        setting, dim, queue_size, report.max_error, report.checked_entries,
    )
    return report


def objective_for(config: TrainConfig, **overrides) -> ObjectiveConfig:
    """ObjectiveConfig consistent with a TrainConfig's shared fields."""
    values = dict(
        setting=config.setting,
        temperature=config.temperature,
        k_mine=config.k_mine,
        entropy_weight=config.entropy_weight,
    )
    values.update(overrides)
    return ObjectiveConfig(**values)


def train(
    model: DocPairModel,
    config: TrainConfig,
    corpus: CorpusSplit,
    objective: Optional[ObjectiveConfig] = None,
    out_dir: Optional[Union[str, Path]] = None,
    resume: Optional[Union[str, Path]] = None,
    config_digest: str = "0" * 64,
    progress: bool = False,
) -> TrainState:
    """Train ``model`` on ``corpus``; see ``Trainer``."""
    trainer = Trainer(
        model,
        objective or objective_for(config),
        config,
        corpus,
        out_dir=out_dir,
        config_digest=config_digest,
        progress=progress,
    )
    if resume is not None:
        trainer.restore(resume)
    return trainer.run()


# EOF
