#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 11:47:02"
# File: ./src/docpair/objectives.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/objectives.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Pretext losses: learning-to-mine (L2M), learning-to-unify (L2U) and
learning-to-reorganize (L2R), plus their staged sum.

All losses take unit-norm embeddings as autodiff Tensors and return a
scalar Tensor. Support queues only ever contribute constants.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Set, Tuple

import numpy as np

from .autodiff import (
    Tensor,
    clamp_min,
    log,
    log_row_softmax,
    logsumexp,
    mean,
    row_softmax,
    tsum,
)
from .encoders import Linear, Module
from .exceptions import (
    ConfigError,
    DegenerateInputError,
    DimensionError,
    InsufficientDataError,
    StagedTrainingError,
)
from .support_queue import (
    Modality,
    SupportQueue,
    mine_neighbor_table,
    nearest_neighbors_batch,
    neighbor_purity,
)

logger = logging.getLogger(__name__)

SETTINGS = {
    "S1": ("l2m",),
    "S2": ("l2m", "l2u"),
    "S3": ("l2m", "l2u", "l2r"),
}
SOURCES = ("projection", "cmae")
ASSIGNMENT_LOG_FLOOR = 1e-12
UNIT_TOLERANCE = 1e-4


@dataclass
class ObjectiveConfig:
    """
    Loss selection and loss hyper-parameters.

    ``entropy_sign="maximize"`` keeps the cluster-balance term as
    ``+lambda * sum(p log p)``, whose minimisation spreads the batch over
    clusters; ``"minimize"`` flips its sign.
    """

    setting: str = "S2"
    temperature: float = 0.07
    nn_in_denominator: bool = False
    l2u_target_mode: str = "hard"
    l2u_temperature: float = 1.0
    entropy_weight: float = 2.0
    entropy_sign: str = "maximize"
    k_mine: int = 5
    num_clusters: int = 16
    l2m_source: str = "projection"
    l2u_source: str = "cmae"
    l2r_source: str = "cmae"
    freeze_backbones_stage2: bool = True
    disabled_terms: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ConfigError(f"setting must be one of {sorted(SETTINGS)}, got {self.setting!r}")
        if not self.temperature > 0 or not self.l2u_temperature > 0:
            raise ConfigError("temperatures must be > 0")
        if self.l2u_target_mode not in ("hard", "soft"):
            raise ConfigError(f"l2u_target_mode must be hard|soft, got {self.l2u_target_mode!r}")
        if self.entropy_sign not in ("maximize", "minimize"):
            raise ConfigError(f"entropy_sign must be maximize|minimize, got {self.entropy_sign!r}")
        for key in ("l2m_source", "l2u_source", "l2r_source"):
            if getattr(self, key) not in SOURCES:
                raise ConfigError(f"{key} must be one of {SOURCES}, got {getattr(self, key)!r}")
        if self.k_mine < 1 or self.num_clusters < 1:
            raise ConfigError("k_mine and num_clusters must be positive")
        unknown = set(self.disabled_terms) - {"l2m", "l2u", "l2r"}
        if unknown:
            raise ConfigError(f"unknown loss terms in disabled_terms: {sorted(unknown)}")

    @property
    def terms(self) -> Set[str]:
        return set(SETTINGS[self.setting]) - set(self.disabled_terms)


# ---- batch ----------------------------------------------------------------
def _check_unit(x: Tensor, what: str) -> None:
    norms = np.linalg.norm(x.data.astype(np.float64), axis=-1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOLERANCE):
        raise DegenerateInputError(f"{what} must hold unit-norm rows")


@dataclass
class ContrastiveBatch:
    """M paired unit vectors; row i of ``z_v`` belongs with row i of ``z_t``."""

    z_v: Tensor
    z_t: Tensor
    temperature: float = 0.07
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.z_v.ndim != 2 or self.z_v.shape != self.z_t.shape:
            raise DimensionError(f"paired batch shapes differ: {self.z_v.shape} vs {self.z_t.shape}")
        if not self.temperature > 0:
            raise DegenerateInputError(f"temperature must be > 0, got {self.temperature}")
        _check_unit(self.z_v, "z_v")
        _check_unit(self.z_t, "z_t")

    def __len__(self) -> int:
        return self.z_v.shape[0]


# ---- L2M ------------------------------------------------------------------
@dataclass
class SupportSelection:
    """Neighbour vectors for a batch, plus the queue rows they came from."""

    vectors: Tensor
    indices: Optional[np.ndarray] = None

    @property
    def fallback(self) -> bool:
        return self.indices is None


def select_support(queue: Optional[SupportQueue], anchors: Tensor) -> SupportSelection:
    """NN(x, queue) for every row of ``anchors``; NN(x)=x when the queue is empty."""
    if queue is None or queue.is_empty:
        logger.debug("support queue empty, using NN(x)=x for %d anchors", anchors.shape[0])
        return SupportSelection(vectors=anchors)
    bank = queue.snapshot()
    indices = nearest_neighbors_batch(queue, anchors.data)
    return SupportSelection(vectors=Tensor(bank[indices]), indices=indices)


def _nn_contrastive_term(
    neighbours: Tensor,
    positives: Tensor,
    anchors: Tensor,
    tau: float,
    nn_in_denominator: bool,
) -> Tensor:
    """mean_i [ -<NN_i, p_i>/tau + log sum_k exp(<a_i, p_k>/tau) ]."""
    numerator = tsum(neighbours * positives, axis=-1) / tau
    source = neighbours if nn_in_denominator else anchors
    logits = (source @ positives.T) / tau
    return mean(logsumexp(logits, axis=-1) - numerator)


def _l2m_inter(batch, nn_v: Tensor, nn_t: Tensor, nn_in_denominator: bool) -> Tensor:
    tau = batch.temperature
    return _nn_contrastive_term(nn_v, batch.z_t, batch.z_v, tau, nn_in_denominator) + _nn_contrastive_term(
        nn_t, batch.z_v, batch.z_t, tau, nn_in_denominator
    )


def _l2m_intra(batch, nn_v: Tensor, nn_t: Tensor, nn_in_denominator: bool) -> Tensor:
    tau = batch.temperature
    return _nn_contrastive_term(nn_v, batch.z_v, batch.z_v, tau, nn_in_denominator) + _nn_contrastive_term(
        nn_t, batch.z_t, batch.z_t, tau, nn_in_denominator
    )


def l2m_inter(
    batch: ContrastiveBatch,
    queue_v: Optional[SupportQueue],
    queue_t: Optional[SupportQueue],
    nn_in_denominator: bool = False,
) -> Tensor:
    """
    Inter-modal L2M: vision neighbours pulled towards the paired text and
    text neighbours towards the paired image. Denominators run over the
    anchor's similarities to the whole batch of the other modality.
    """
    nn_v = select_support(queue_v, batch.z_v).vectors
    nn_t = select_support(queue_t, batch.z_t).vectors
    return _l2m_inter(batch, nn_v, nn_t, nn_in_denominator)


def l2m_intra(
    batch: ContrastiveBatch,
    queue_v: Optional[SupportQueue],
    queue_t: Optional[SupportQueue],
    nn_in_denominator: bool = False,
) -> Tensor:
    """Intra-modal L2M: the same construction inside each modality."""
    nn_v = select_support(queue_v, batch.z_v).vectors
    nn_t = select_support(queue_t, batch.z_t).vectors
    return _l2m_intra(batch, nn_v, nn_t, nn_in_denominator)


# ---- L2U ------------------------------------------------------------------
def l2u_targets(fused_v: Tensor, fused_t: Tensor, target_mode: str = "hard", temperature: float = 1.0):
    """
    Identity targets, or row-normalised averaged intra-modal similarity.

    Both kinds are constants: soft targets are computed from detached
    embeddings, so no gradient reaches the embeddings through them.
    """
    m = fused_v.shape[0]
    if target_mode == "hard":
        return Tensor(np.eye(m))
    if target_mode == "soft":
        v, t = fused_v.detach(), fused_t.detach()
        return row_softmax((t @ t.T + v @ v.T) / 2.0, temperature).detach()
    raise ConfigError(f"l2u target_mode must be hard|soft, got {target_mode!r}")


def l2u_loss(
    fused_v: Tensor,
    fused_t: Tensor,
    target_mode: str = "hard",
    temperature: float = 1.0,
    targets: Optional[Tensor] = None,
) -> Tensor:
    """
    Two-direction matching loss over the M x M similarity <t_i, v_j>.

    Rows of the text->vision softmax give P(t_i -> v_j); rows of the
    transposed matrix give P(v_i -> t_j). Hard targets are the diagonal.
    ``targets`` overrides the ones ``l2u_targets`` would build.
    """
    if fused_v.shape != fused_t.shape or fused_v.ndim != 2:
        raise DimensionError(f"l2u needs paired (M, d) inputs, got {fused_v.shape} / {fused_t.shape}")
    m = fused_v.shape[0]
    if m < 2:
        raise InsufficientDataError(f"l2u needs at least 2 pairs, got {m}")
    similarity = fused_t @ fused_v.T
    log_t2v = log_row_softmax(similarity, temperature)
    log_v2t = log_row_softmax(similarity.T, temperature)
    if targets is None:
        targets = l2u_targets(fused_v, fused_t, target_mode, temperature)
    elif targets.shape != (m, m):
        raise DimensionError(f"l2u targets must be ({m}, {m}), got {targets.shape}")
    return -(tsum(targets * log_t2v) + tsum(targets * log_v2t)) / float(m)


# ---- L2R ------------------------------------------------------------------
def _check_distributions(p: Tensor, what: str, tolerance: float = 1e-5) -> None:
    rows = p.data.astype(np.float64)
    if np.any(rows < -tolerance) or np.any(np.abs(rows.sum(axis=-1) - 1.0) > tolerance):
        raise DegenerateInputError(f"{what}: rows must be probability distributions")


def l2r_terms(
    anchors: Tensor,
    neighbours: Tensor,
    entropy_weight: float = 2.0,
    entropy_sign: str = "maximize",
) -> Tuple[Tensor, Tensor]:
    """
    (consistency, balance) terms of the clustering objective.

    anchors: (M, C) soft assignments; neighbours: (M, K, C) assignments of
    each anchor's mined neighbours.
    """
    if anchors.ndim != 2 or neighbours.ndim != 3 or neighbours.shape[::2] != anchors.shape:
        raise DimensionError(f"l2r shapes: anchors {anchors.shape}, neighbours {neighbours.shape}")
    _check_distributions(anchors, "anchor assignments")
    _check_distributions(neighbours, "neighbour assignments")
    m, _, c = neighbours.shape
    agreement = tsum(anchors.reshape(m, 1, c) * neighbours, axis=-1)
    consistency = -tsum(log(clamp_min(agreement, ASSIGNMENT_LOG_FLOOR))) / float(m)
    batch_mean = mean(anchors, axis=0)
    neg_entropy = tsum(batch_mean * log(clamp_min(batch_mean, ASSIGNMENT_LOG_FLOOR)))
    sign = 1.0 if entropy_sign == "maximize" else -1.0
    return consistency, neg_entropy * (sign * entropy_weight)


def l2r_loss(
    anchors: Tensor,
    neighbours: Tensor,
    entropy_weight: float = 2.0,
    entropy_sign: str = "maximize",
) -> Tensor:
    consistency, balance = l2r_terms(anchors, neighbours, entropy_weight, entropy_sign)
    return consistency + balance


class ClusterHeads(Module):
    """
    Linear + softmax cluster assignment heads for both modalities, and the
    neighbour tables mined over the training corpus.
    """

    def __init__(
        self,
        in_dim: int,
        num_clusters_vision: int,
        num_clusters_language: int,
        rng: np.random.Generator,
        entropy_weight: float = 2.0,
        k_mine: int = 5,
    ):
        self.vision = Linear(in_dim, num_clusters_vision, rng)
        self.language = Linear(in_dim, num_clusters_language, rng)
        self._entropy_weight = float(entropy_weight)
        self._k_mine = int(k_mine)
        self._tables: Dict[Modality, np.ndarray] = {}
        self._features: Dict[Modality, np.ndarray] = {}

    @property
    def entropy_weight(self) -> float:
        return self._entropy_weight

    @property
    def k_mine(self) -> int:
        return self._k_mine

    @property
    def has_tables(self) -> bool:
        return Modality.VISION in self._tables and Modality.LANGUAGE in self._tables

    def table(self, modality: Modality) -> np.ndarray:
        return self._tables[Modality(modality)]

    def head(self, modality: Modality) -> Linear:
        return self.vision if Modality(modality) is Modality.VISION else self.language

    def assign(self, modality: Modality, features: Tensor) -> Tensor:
        return row_softmax(self.head(modality)(features))

    def mine(self, features_v: np.ndarray, features_t: np.ndarray) -> None:
        """Mine k-NN tables per modality and keep the features they index."""
        for modality, features in ((Modality.VISION, features_v), (Modality.LANGUAGE, features_t)):
            features = np.asarray(features)
            self._tables[modality] = mine_neighbor_table(features, self._k_mine)
            self._features[modality] = features.copy()
        logger.info(
            "mined %d-NN tables over %d documents", self._k_mine, len(self._features[Modality.VISION])
        )

    def neighbour_assignments(self, modality: Modality, corpus_indices: np.ndarray) -> Tensor:
        """(M, K, C) assignments of the mined neighbours of each corpus index."""
        modality = Modality(modality)
        if modality not in self._tables:
            raise StagedTrainingError("neighbour tables have not been mined yet")
        neighbours = self._tables[modality][np.asarray(corpus_indices)]
        return self.assign(modality, Tensor(self._features[modality][neighbours]))


# ---- total ----------------------------------------------------------------
@dataclass
class LossInputs:
    """Embeddings of one batch from both paths, plus bookkeeping."""

    projected_v: Optional[Tensor] = None
    projected_t: Optional[Tensor] = None
    fused_v: Optional[Tensor] = None
    fused_t: Optional[Tensor] = None
    labels: Optional[np.ndarray] = None
    corpus_indices: Optional[np.ndarray] = None
    # fixed L2U targets; None recomputes them from the batch
    l2u_targets: Optional[Tensor] = None

    def pair(self, source: str) -> Tuple[Tensor, Tensor]:
        v, t = (
            (self.projected_v, self.projected_t) if source == "projection" else (self.fused_v, self.fused_t)
        )
        if v is None or t is None:
            raise ConfigError(f"loss source {source!r} requested but no {source} embeddings were computed")
        return v, t


@dataclass
class LossBreakdown:
    l2m_inter: float = 0.0
    l2m_intra: float = 0.0
    l2u: float = 0.0
    l2r_v: float = 0.0
    l2r_t: float = 0.0
    nn_purity_v: float = float("nan")
    nn_purity_t: float = float("nan")
    terms: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def components(self) -> Dict[str, float]:
        return {
            "loss_l2m_inter": self.l2m_inter,
            "loss_l2m_intra": self.l2m_intra,
            "loss_l2u": self.l2u,
            "loss_l2r_v": self.l2r_v,
            "loss_l2r_t": self.l2r_t,
        }

    @property
    def total(self) -> float:
        return math.fsum(self.components.values())


def active_terms(config: ObjectiveConfig, stage: Optional[int] = None) -> Set[str]:
    """Terms of ``config`` active in ``stage`` (stage 1 holds L2R back)."""
    terms = config.terms
    if stage == 1:
        terms = terms - {"l2r"}
    return terms


def total_loss(
    config: ObjectiveConfig,
    inputs: LossInputs,
    queues: Tuple[Optional[SupportQueue], Optional[SupportQueue]],
    cluster_heads: Optional[ClusterHeads] = None,
    stage: Optional[int] = None,
) -> Tuple[Tensor, LossBreakdown]:
    """
    Sum of the enabled pretext losses and a per-term breakdown.

    ``stage=1`` drops L2R from an S3 configuration; otherwise every term
    of the setting is required, and L2R without mined neighbours raises
    ``StagedTrainingError``.
    """
    terms = active_terms(config, stage)
    if not terms:
        raise ConfigError("no pretext objective enabled")
    if "l2r" in terms and (cluster_heads is None or not cluster_heads.has_tables):
        raise StagedTrainingError("L2R requested before neighbour tables were mined")

    queue_v, queue_t = queues
    breakdown = LossBreakdown(terms=tuple(sorted(terms)))
    parts = []

    if "l2m" in terms:
        z_v, z_t = inputs.pair(config.l2m_source)
        batch = ContrastiveBatch(z_v, z_t, config.temperature, inputs.labels)
        sel_v = select_support(queue_v, z_v)
        sel_t = select_support(queue_t, z_t)
        inter = _l2m_inter(batch, sel_v.vectors, sel_t.vectors, config.nn_in_denominator)
        intra = _l2m_intra(batch, sel_v.vectors, sel_t.vectors, config.nn_in_denominator)
        breakdown.l2m_inter, breakdown.l2m_intra = inter.item(), intra.item()
        parts += [inter, intra]
        if inputs.labels is not None:
            if not sel_v.fallback:
                breakdown.nn_purity_v = neighbor_purity(queue_v, sel_v.indices, inputs.labels)
            if not sel_t.fallback:
                breakdown.nn_purity_t = neighbor_purity(queue_t, sel_t.indices, inputs.labels)

    if "l2u" in terms:
        f_v, f_t = inputs.pair(config.l2u_source)
        unify = l2u_loss(
            f_v, f_t, config.l2u_target_mode, config.l2u_temperature, targets=inputs.l2u_targets
        )
        breakdown.l2u = unify.item()
        parts.append(unify)

    if "l2r" in terms:
        if inputs.corpus_indices is None:
            raise StagedTrainingError("L2R needs the corpus indices of the batch")
        r_v, r_t = inputs.pair(config.l2r_source)
        for modality, features in ((Modality.VISION, r_v), (Modality.LANGUAGE, r_t)):
            loss = l2r_loss(
                cluster_heads.assign(modality, features),
                cluster_heads.neighbour_assignments(modality, inputs.corpus_indices),
                cluster_heads.entropy_weight,
                config.entropy_sign,
            )
            if modality is Modality.VISION:
                breakdown.l2r_v = loss.item()
            else:
                breakdown.l2r_t = loss.item()
            parts.append(loss)

    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total, breakdown


# EOF
