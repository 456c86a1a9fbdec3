#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 14:52:37"
# File: ./src/docpair/evaluation.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/evaluation.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Downstream evaluations on frozen (or meta-finetuned) embeddings.

- Episodic few-shot classification with class prototypes.
- Content-based retrieval with Recall@K, uni-modal, cross-modal and
  multimodal.
- A linear probe standing in for full classification fine-tuning.

Embedding export layout (little-endian)::

    b"GEMB", u32 count, u32 dim, u8 modality (0 vision, 1 language,
    2 multimodal), 32-byte raw model digest,
    count * dim <f4 rows, count * <u4 labels,
    count times (u32 length, utf-8 doc_id)
"""

import logging
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from .autodiff import (
    Tensor,
    clamp_min,
    getitem,
    l2_normalize,
    log,
    log_row_softmax,
    logsumexp,
    mean,
    row_softmax,
    sqrt,
    stack,
    tsum,
)
from .datagen import CorpusSplit
from .encoders import DocPairModel, Linear, embed_documents
from .exceptions import (
    CheckpointError,
    ConfigError,
    DegenerateInputError,
    DimensionError,
    InsufficientDataError,
)
from .support_queue import Modality
from .trainer import AdamW
from .utils import resolve_threads

logger = logging.getLogger(__name__)

DISTANCE_FLOOR = 1e-12
CI_Z = 1.96
DEFAULT_KS = (1, 5, 10)
RETRIEVAL_SETTINGS = (
    ("V->V", Modality.VISION, Modality.VISION),
    ("L->L", Modality.LANGUAGE, Modality.LANGUAGE),
    ("V->L", Modality.VISION, Modality.LANGUAGE),
    ("L->V", Modality.LANGUAGE, Modality.VISION),
    ("M->M", Modality.MULTIMODAL, Modality.MULTIMODAL),
)
GEMB_MAGIC = b"GEMB"
MODALITY_CODES = {Modality.VISION: 0, Modality.LANGUAGE: 1, Modality.MULTIMODAL: 2}
UNIT_TOLERANCE = 1e-4


# ---- embedding ------------------------------------------------------------
def fuse_multimodal(z_v: np.ndarray, z_t: np.ndarray) -> np.ndarray:
    """Renormalised mean of the vision and language embeddings."""
    mixed = (np.asarray(z_v, dtype=np.float64) + np.asarray(z_t, dtype=np.float64)) / 2.0
    norms = np.linalg.norm(mixed, axis=-1, keepdims=True)
    if np.any(norms <= 1e-12):
        raise DegenerateInputError("vision and language embeddings cancel; cannot fuse")
    return (mixed / norms).astype(np.asarray(z_v).dtype)


@dataclass
class EmbeddedSplit:
    """Frozen per-document embeddings of one split."""

    z_v: np.ndarray
    z_t: np.ndarray
    labels: np.ndarray
    doc_ids: List[str]

    def get(self, modality: Union[str, Modality]) -> np.ndarray:
        modality = Modality(modality)
        if modality is Modality.VISION:
            return self.z_v
        if modality is Modality.LANGUAGE:
            return self.z_t
        return fuse_multimodal(self.z_v, self.z_t)

    def subset(self, indices: Sequence[int]) -> "EmbeddedSplit":
        indices = np.asarray(indices, dtype=np.int64)
        return EmbeddedSplit(
            self.z_v[indices], self.z_t[indices], self.labels[indices], [self.doc_ids[i] for i in indices]
        )


def embed_split(
    model: DocPairModel,
    split: CorpusSplit,
    use_cmae: bool = False,
    batch_size: int = 64,
    deterministic: bool = True,
) -> EmbeddedSplit:
    """
    Embed every document of ``split``.

    Without ``deterministic`` the chunks are embedded on a thread pool of
    ``resolve_threads()`` workers; chunk results are concatenated in order.
    """
    starts = list(range(0, len(split), batch_size))

    def chunk(start: int) -> Tuple[np.ndarray, np.ndarray]:
        stop = start + batch_size
        return embed_documents(
            model, split.images[start:stop], split.tokens[start:stop], use_cmae=use_cmae, batch_size=batch_size
        )

    workers = 1 if deterministic else resolve_threads()
    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk, starts))
    else:
        parts = [chunk(s) for s in starts]
    return EmbeddedSplit(
        z_v=np.concatenate([p[0] for p in parts]),
        z_t=np.concatenate([p[1] for p in parts]),
        labels=split.labels.copy(),
        doc_ids=list(split.doc_ids),
    )


# ---- episodes -------------------------------------------------------------
@dataclass
class Episode:
    """One K-way C-shot task; ``*_y`` are relabelled 0..K-1 in sampled order."""

    way: int
    shot: int
    query_per_class: int
    classes: np.ndarray
    support: np.ndarray
    support_y: np.ndarray
    query: np.ndarray
    query_y: np.ndarray

    def leaked_doc_ids(self, doc_ids: Sequence[str]) -> set:
        return {doc_ids[i] for i in self.support} & {doc_ids[i] for i in self.query}


class EpisodeSampler:
    """
    Draws episodes from a labelled pool with its own seeded generator.

    Parameters
    ----------
    labels : array of int
        Category of each pool item.
    way, shot, query_per_class : int
        Episode shape.
    seed : int
        Generator seed; equal seeds give equal episode sequences.
    """

    def __init__(self, labels: np.ndarray, way: int, shot: int, query_per_class: int = 15, seed: int = 0):
        self.labels = np.asarray(labels)
        self.way, self.shot, self.query_per_class = int(way), int(shot), int(query_per_class)
        if self.way < 1 or self.shot < 1 or self.query_per_class < 1:
            raise ConfigError("way, shot and query_per_class must be positive")
        self.classes = np.unique(self.labels)
        if len(self.classes) < self.way:
            raise InsufficientDataError(
                f"{self.way}-way episodes need {self.way} classes, pool has {len(self.classes)}"
            )
        need = self.shot + self.query_per_class
        self._members = {int(c): np.flatnonzero(self.labels == c) for c in self.classes}
        short = {c: len(m) for c, m in self._members.items() if len(m) < need}
        if short:
            raise InsufficientDataError(
                f"each class needs {need} samples (shot + query); short classes: {short}"
            )
        self.rng = np.random.default_rng(seed)

    def sample(self) -> Episode:
        classes = self.rng.choice(self.classes, size=self.way, replace=False)
        support, support_y, query, query_y = [], [], [], []
        for k, c in enumerate(classes):
            picked = self.rng.permutation(self._members[int(c)])[: self.shot + self.query_per_class]
            support.extend(picked[: self.shot])
            query.extend(picked[self.shot:])
            support_y += [k] * self.shot
            query_y += [k] * self.query_per_class
        return Episode(
            way=self.way,
            shot=self.shot,
            query_per_class=self.query_per_class,
            classes=np.asarray(classes),
            support=np.asarray(support, dtype=np.int64),
            support_y=np.asarray(support_y, dtype=np.int64),
            query=np.asarray(query, dtype=np.int64),
            query_y=np.asarray(query_y, dtype=np.int64),
        )

    def episodes(self, n: int):
        for _ in range(n):
            yield self.sample()


# ---- prototypes -----------------------------------------------------------
def compute_prototypes(embeddings, labels: Sequence[int], num_classes: Optional[int] = None) -> Tensor:
    """Class centroids c_k = mean of the support embeddings labelled k."""
    embeddings = embeddings if isinstance(embeddings, Tensor) else Tensor(embeddings)
    labels = np.asarray(labels)
    k_total = int(labels.max()) + 1 if num_classes is None else num_classes
    rows = []
    for k in range(k_total):
        members = np.flatnonzero(labels == k)
        if members.size == 0:
            raise InsufficientDataError(f"class {k} has no support sample")
        rows.append(mean(getitem(embeddings, members), axis=0))
    return stack(rows)


def prototype_distances(queries: Tensor, prototypes: Tensor, squared: bool = True) -> Tensor:
    """(Q, K) Euclidean distances, squared unless ``squared`` is False."""
    q, p = queries, prototypes
    if q.ndim == 1:
        q = q.reshape(1, -1)
    if q.shape[-1] != p.shape[-1]:
        raise DimensionError(f"query dim {q.shape[-1]} vs prototype dim {p.shape[-1]}")
    diff = q.reshape(q.shape[0], 1, q.shape[1]) - p.reshape(1, *p.shape)
    d2 = tsum(diff * diff, axis=-1)
    return d2 if squared else sqrt(clamp_min(d2, DISTANCE_FLOOR))


def classify_query(query_embedding, prototypes, squared: bool = True) -> np.ndarray:
    """
    softmax(-d(q, c_k)) over the K prototypes.

    One query gives a (K,) vector, a (Q, d) block a (Q, K) matrix.
    The prediction is ``np.argmax`` (lowest class index on ties).
    """
    query = query_embedding if isinstance(query_embedding, Tensor) else Tensor(query_embedding)
    protos = prototypes if isinstance(prototypes, Tensor) else Tensor(prototypes)
    probs = row_softmax(-prototype_distances(query, protos, squared)).data
    return probs[0] if query.ndim == 1 else probs


def meta_loss(
    query_embeddings: Tensor,
    query_y: np.ndarray,
    prototypes: Tensor,
    variant: str = "log_distance",
    squared: bool = True,
) -> Tensor:
    """
    Episode loss, averaged over queries.

    ``log_distance``: d(q, c_y) + log sum_k d(q, c_k), distances floored at 1e-12.
    ``prototypical``: d(q, c_y) + log sum_k exp(-d(q, c_k)).
    """
    d = clamp_min(prototype_distances(query_embeddings, prototypes, squared), DISTANCE_FLOOR)
    q = d.shape[0]
    onehot = np.zeros(d.shape)
    onehot[np.arange(q), np.asarray(query_y)] = 1.0
    own = tsum(d * Tensor(onehot), axis=-1)
    if variant == "log_distance":
        rest = log(tsum(d, axis=-1))
    elif variant == "prototypical":
        rest = logsumexp(-d, axis=-1)
    else:
        raise ConfigError(f"meta_loss must be log_distance|prototypical, got {variant!r}")
    return mean(own + rest)


def _episode_embeddings(model: DocPairModel, split: CorpusSplit, indices: np.ndarray, mode: Modality, use_cmae: bool):
    z_v, z_t = model.embed_batch(
        split.images[indices], [split.tokens[i] for i in indices], use_cmae=use_cmae
    )
    if mode is Modality.VISION:
        return z_v
    if mode is Modality.LANGUAGE:
        return z_t
    return l2_normalize((z_v + z_t) / 2.0)


@dataclass
class MetaTrainResult:
    losses: List[float] = field(default_factory=list)

    @property
    def improved(self) -> bool:
        return len(self.losses) > 1 and self.losses[-1] <= self.losses[0]


def meta_finetune(
    model: DocPairModel,
    base_split: CorpusSplit,
    way: int = 5,
    shot: int = 1,
    query_per_class: int = 5,
    steps: int = 100,
    lr: float = 1e-4,
    seed: int = 0,
    modality: Union[str, Modality] = Modality.MULTIMODAL,
    use_cmae: bool = False,
    variant: str = "log_distance",
    squared: bool = True,
    weight_decay: float = 0.0,
    progress: bool = False,
) -> MetaTrainResult:
    """Episodic fine-tuning of ``model`` in place on the base classes."""
    if len(np.unique(base_split.labels)) < way:
        raise InsufficientDataError(
            f"base split has {len(np.unique(base_split.labels))} classes, {way}-way episodes need {way}"
        )
    sampler = EpisodeSampler(base_split.labels, way, shot, query_per_class, seed=seed)
    optimizer = AdamW(model.named_parameters(), weight_decay=weight_decay)
    mode = Modality(modality)
    result = MetaTrainResult()
    for _ in tqdm(range(steps), desc="meta-train", disable=not progress):
        episode = sampler.sample()
        optimizer.zero_grad()
        support = _episode_embeddings(model, base_split, episode.support, mode, use_cmae)
        query = _episode_embeddings(model, base_split, episode.query, mode, use_cmae)
        prototypes = compute_prototypes(support, episode.support_y, episode.way)
        loss = meta_loss(query, episode.query_y, prototypes, variant, squared)
        value = loss.item()
        if not math.isfinite(value):
            logger.warning("meta-train: non-finite episode loss, skipped")
            continue
        loss.backward()
        optimizer.step(lr, optimizer.gradients())
        result.losses.append(value)
    if result.losses:
        logger.info(
            "meta-train: %d episodes, loss %.4f -> %.4f", steps, result.losses[0], result.losses[-1]
        )
    return result


# ---- few-shot evaluation --------------------------------------------------
def episode_accuracy(embeddings: np.ndarray, episode: Episode, squared: bool = True) -> float:
    protos = compute_prototypes(embeddings[episode.support], episode.support_y, episode.way)
    probs = classify_query(embeddings[episode.query], protos, squared)
    return float(np.mean(np.argmax(probs, axis=1) == episode.query_y))


def confidence_interval(values: Sequence[float]) -> float:
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        return 0.0
    return float(CI_Z * values.std(ddof=1) / math.sqrt(len(values)))


@dataclass
class FewShotResult:
    modality: str
    way: int
    shot: int
    episodes: int
    mean: float
    ci95: float
    accuracies: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "modality": self.modality,
            "way": self.way,
            "shot": self.shot,
            "episodes": self.episodes,
            "accuracy": self.mean,
            "ci95": self.ci95,
        }


@dataclass
class FewShotReport:
    results: Dict[str, FewShotResult]

    def format(self) -> str:
        lines = [f"{'modality':<12} {'way':>4} {'shot':>5} {'episodes':>9} {'accuracy':>10} {'ci95':>8}"]
        for name, r in self.results.items():
            lines.append(
                f"{name:<12} {r.way:>4} {r.shot:>5} {r.episodes:>9} {100 * r.mean:>9.2f}% {100 * r.ci95:>7.2f}"
            )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {name: r.to_dict() for name, r in self.results.items()}


def evaluate_episodes(
    embeddings: Dict[str, np.ndarray],
    labels: np.ndarray,
    way: int,
    shot: int,
    query_per_class: int = 15,
    episodes: int = 600,
    seed: int = 0,
    squared: bool = True,
    doc_ids: Optional[Sequence[str]] = None,
    progress: bool = False,
) -> FewShotReport:
    """Mean accuracy and 95% CI per embedding; every embedding sees the same episodes."""
    results = {}
    for name, matrix in embeddings.items():
        sampler = EpisodeSampler(labels, way, shot, query_per_class, seed=seed)
        accuracies = []
        for episode in tqdm(sampler.episodes(episodes), total=episodes, desc=f"few-shot {name}", disable=not progress):
            if doc_ids is not None and episode.leaked_doc_ids(doc_ids):
                raise InsufficientDataError("episode support and query share a document")
            accuracies.append(episode_accuracy(matrix, episode, squared))
        results[name] = FewShotResult(
            modality=name,
            way=way,
            shot=shot,
            episodes=episodes,
            mean=float(np.mean(accuracies)),
            ci95=confidence_interval(accuracies),
            accuracies=accuracies,
        )
    return FewShotReport(results)


def run_fewshot_eval(
    model: DocPairModel,
    novel_split: CorpusSplit,
    way: int = 5,
    shot: int = 1,
    query_per_class: int = 15,
    episodes: int = 600,
    seed: int = 0,
    use_cmae: bool = False,
    squared: bool = True,
    modalities: Sequence[Union[str, Modality]] = (Modality.VISION, Modality.LANGUAGE, Modality.MULTIMODAL),
    embedded: Optional[EmbeddedSplit] = None,
    progress: bool = False,
) -> FewShotReport:
    """Few-shot accuracy on the novel classes for each embedding modality."""
    embedded = embedded or embed_split(model, novel_split, use_cmae=use_cmae)
    matrices = {Modality(m).value: embedded.get(m) for m in modalities}
    return evaluate_episodes(
        matrices,
        embedded.labels,
        way,
        shot,
        query_per_class,
        episodes,
        seed,
        squared,
        doc_ids=embedded.doc_ids,
        progress=progress,
    )


# ---- retrieval ------------------------------------------------------------
@dataclass
class RetrievalIndex:
    """Unit-norm document embeddings of one modality."""

    modality: Modality
    embeddings: np.ndarray
    labels: np.ndarray
    doc_ids: List[str]
    model_digest: str = "0" * 64

    def __post_init__(self):
        self.modality = Modality(self.modality)
        self.embeddings = np.asarray(self.embeddings)
        self.labels = np.asarray(self.labels)
        if not (len(self.embeddings) == len(self.labels) == len(self.doc_ids)):
            raise DimensionError("index embeddings, labels and doc_ids differ in length")
        norms = np.linalg.norm(self.embeddings.astype(np.float64), axis=-1)
        if len(norms) and np.any(np.abs(norms - 1.0) > UNIT_TOLERANCE):
            raise DegenerateInputError("index embeddings must be unit-norm")
        self._position = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
        self._ids = np.asarray(self.doc_ids)

    def __len__(self) -> int:
        return len(self.doc_ids)

    def position(self, doc_id: Optional[str]) -> Optional[int]:
        return None if doc_id is None else self._position.get(doc_id)


def build_index(
    model: DocPairModel,
    split: CorpusSplit,
    modality: Union[str, Modality],
    use_cmae: bool = False,
    embedded: Optional[EmbeddedSplit] = None,
    deterministic: bool = True,
) -> RetrievalIndex:
    """Embed every document of ``split`` in ``modality`` with frozen weights."""
    try:
        modality = Modality(modality)
    except ValueError as e:
        raise ConfigError(f"unknown modality {modality!r}") from e
    embedded = embedded or embed_split(model, split, use_cmae=use_cmae, deterministic=deterministic)
    return RetrievalIndex(
        modality=modality,
        embeddings=embedded.get(modality),
        labels=embedded.labels,
        doc_ids=embedded.doc_ids,
        model_digest=model.digest(),
    )


def _rank(index: RetrievalIndex, scores: np.ndarray, top_k: int, exclude: Optional[int]) -> np.ndarray:
    available = len(index) - (0 if exclude is None else 1)
    if top_k > available:
        raise InsufficientDataError(f"top_k={top_k} exceeds the {available} retrievable documents")
    order = np.lexsort((index._ids, -scores))
    if exclude is not None:
        order = order[order != exclude]
    return order[:top_k]


def retrieve_indices(
    index: RetrievalIndex, query_embedding: np.ndarray, top_k: int, query_doc_id: Optional[str] = None
) -> np.ndarray:
    query = np.asarray(query_embedding, dtype=np.float64)
    if query.shape != index.embeddings.shape[1:]:
        raise DimensionError(f"query shape {query.shape} vs index rows {index.embeddings.shape[1:]}")
    if abs(np.linalg.norm(query) - 1.0) > UNIT_TOLERANCE:
        raise DegenerateInputError("retrieval query must be unit-norm")
    scores = index.embeddings.astype(np.float64) @ query
    return _rank(index, scores, top_k, index.position(query_doc_id))


def retrieve(
    index: RetrievalIndex, query_embedding: np.ndarray, top_k: int, query_doc_id: Optional[str] = None
) -> List[str]:
    """
    doc_ids by descending inner product, ties broken by doc_id.

    The query's own document is skipped when ``query_doc_id`` is indexed.
    """
    return [index.doc_ids[i] for i in retrieve_indices(index, query_embedding, top_k, query_doc_id)]


def recall_hits(ranked_labels: Sequence[int], query_label: int, ks: Sequence[int] = DEFAULT_KS) -> Dict[int, int]:
    """1 for each K where a same-label document appears in the top K."""
    ranked = np.asarray(ranked_labels)
    if ranked.size == 0:
        raise InsufficientDataError("cannot score an empty ranking")
    matches = np.flatnonzero(ranked == query_label)
    first = int(matches[0]) if matches.size else None
    return {k: int(first is not None and first < k) for k in ks}


def recall_at_k(
    rankings: Sequence[Sequence[int]], query_labels: Sequence[int], ks: Sequence[int] = DEFAULT_KS
) -> Dict[int, float]:
    """Fraction of queries with a hit in the top K, per K."""
    if len(rankings) == 0:
        raise InsufficientDataError("no queries to score")
    totals = {k: 0 for k in ks}
    for ranked, label in zip(rankings, query_labels):
        for k, hit in recall_hits(ranked, label, ks).items():
            totals[k] += hit
    return {k: totals[k] / len(rankings) for k in ks}


@dataclass
class RetrievalReport:
    rows: Dict[str, Dict[int, float]]
    ks: Tuple[int, ...] = DEFAULT_KS

    def format(self) -> str:
        header = f"{'setting':<8}" + "".join(f" {'R@' + str(k):>8}" for k in self.ks)
        lines = [header]
        for name, row in self.rows.items():
            lines.append(f"{name:<8}" + "".join(f" {100 * row[k]:>7.2f}%" for k in self.ks))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {name: {f"R@{k}": v for k, v in row.items()} for name, row in self.rows.items()}


def evaluate_retrieval(
    embedded: EmbeddedSplit,
    ks: Sequence[int] = DEFAULT_KS,
    settings=RETRIEVAL_SETTINGS,
    model_digest: str = "0" * 64,
) -> RetrievalReport:
    """R@K for each (name, query modality, index modality) setting; every document queries once."""
    ks = tuple(sorted(ks))
    depth = min(max(ks), len(embedded.labels) - 1)
    rows = {}
    for name, query_modality, index_modality in settings:
        index = RetrievalIndex(
            index_modality, embedded.get(index_modality), embedded.labels, embedded.doc_ids, model_digest
        )
        queries = embedded.get(query_modality).astype(np.float64)
        scores = queries @ index.embeddings.astype(np.float64).T
        rankings = [
            index.labels[_rank(index, scores[i], depth, index.position(embedded.doc_ids[i]))]
            for i in range(len(queries))
        ]
        rows[name] = recall_at_k(rankings, embedded.labels, ks)
    return RetrievalReport(rows, ks)


# ---- export ---------------------------------------------------------------
def encode_embeddings(index: RetrievalIndex) -> bytes:
    rows = np.asarray(index.embeddings, dtype="<f4")
    count, dim = rows.shape if rows.ndim == 2 else (0, 0)
    chunks = [
        GEMB_MAGIC,
        struct.pack("<IIB", count, dim, MODALITY_CODES[index.modality]),
        bytes.fromhex(index.model_digest),
        rows.tobytes(),
        np.asarray(index.labels, dtype="<u4").tobytes(),
    ]
    for doc_id in index.doc_ids:
        encoded = doc_id.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)) + encoded)
    return b"".join(chunks)


def export_embeddings(index: RetrievalIndex, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_embeddings(index))
    return path


def read_embeddings(path: Union[str, Path]) -> RetrievalIndex:
    payload = Path(path).read_bytes()
    header = 4 + 9 + 32
    if len(payload) < header or payload[:4] != GEMB_MAGIC:
        raise CheckpointError(f"{path}: not an embedding export")
    count, dim, code = struct.unpack("<IIB", payload[4:13])
    modality = {v: k for k, v in MODALITY_CODES.items()}.get(code)
    if modality is None:
        raise CheckpointError(f"{path}: unknown modality code {code}")
    digest = payload[13:45].hex()
    offset = header
    rows_end = offset + 4 * count * dim
    labels_end = rows_end + 4 * count
    if labels_end > len(payload):
        raise CheckpointError(f"{path}: truncated embedding block")
    rows = np.frombuffer(payload[offset:rows_end], dtype="<f4").reshape(count, dim).copy()
    labels = np.frombuffer(payload[rows_end:labels_end], dtype="<u4").astype(np.int64)
    offset, doc_ids = labels_end, []
    for _ in range(count):
        if offset + 4 > len(payload):
            raise CheckpointError(f"{path}: truncated doc_id block")
        (length,) = struct.unpack("<I", payload[offset:offset + 4])
        doc_ids.append(payload[offset + 4:offset + 4 + length].decode("utf-8"))
        offset += 4 + length
    return RetrievalIndex(modality, rows, labels, doc_ids, digest)


# ---- linear probe ---------------------------------------------------------
@dataclass
class ProbeResult:
    train_accuracy: float
    test_accuracy: float
    num_classes: int


def linear_probe(
    train_embeddings: np.ndarray,
    train_labels: np.ndarray,
    test_embeddings: np.ndarray,
    test_labels: np.ndarray,
    steps: int = 300,
    lr: float = 1e-2,
    seed: int = 0,
    weight_decay: float = 0.0,
) -> ProbeResult:
    """Single linear layer + softmax on frozen embeddings, trained with AdamW."""
    classes = np.unique(train_labels)
    if len(classes) < 2:
        raise InsufficientDataError("linear probe needs at least two classes in the training split")
    lookup = {int(c): i for i, c in enumerate(classes)}
    y_train = np.array([lookup[int(c)] for c in train_labels])
    y_test = np.array([lookup.get(int(c), -1) for c in test_labels])
    layer = Linear(train_embeddings.shape[1], len(classes), np.random.default_rng(seed))
    optimizer = AdamW(layer.named_parameters(), weight_decay=weight_decay)
    x = Tensor(train_embeddings)
    onehot = np.zeros((len(y_train), len(classes)))
    onehot[np.arange(len(y_train)), y_train] = 1.0
    target = Tensor(onehot)
    for _ in range(steps):
        optimizer.zero_grad()
        loss = -mean(tsum(target * log_row_softmax(layer(x)), axis=-1))
        loss.backward()
        optimizer.step(lr, optimizer.gradients())

    def accuracy(embeddings: np.ndarray, y: np.ndarray) -> float:
        predicted = np.argmax(layer(Tensor(embeddings)).data, axis=1)
        return float(np.mean(predicted == y))

    return ProbeResult(
        train_accuracy=accuracy(train_embeddings, y_train),
        test_accuracy=accuracy(test_embeddings, y_test),
        num_classes=len(classes),
    )


# EOF
