#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 10:21:55"
# File: ./src/docpair/support_queue.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/support_queue.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Support queues of past embeddings and the nearest-neighbour operators.

A queue holds detached copies only: no gradient ever reaches queued
history. Selection is a brute-force scan over the frozen snapshot taken
when a training step starts. Labels are stored for diagnostics
(neighbour purity) and never take part in selection.
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Deque, Iterable, List, Optional, Sequence

import numpy as np

from .exceptions import DegenerateInputError, DimensionError, EmptySupportError, InsufficientDataError

logger = logging.getLogger(__name__)

UNIT_TOLERANCE = 1e-4


class Modality(str, Enum):
    VISION = "vision"
    LANGUAGE = "language"
    MULTIMODAL = "multimodal"


@dataclass
class EmbeddingRecord:
    """One unit-norm projection-space vector."""

    vector: np.ndarray
    modality: Modality
    label: Optional[int] = None
    doc_id: Optional[str] = None
    seq: Optional[int] = None

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


def _check_unit_rows(matrix: np.ndarray, tolerance: float = UNIT_TOLERANCE) -> None:
    norms = np.linalg.norm(matrix.astype(np.float64), axis=-1)
    if np.any(np.abs(norms - 1.0) > tolerance):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise DegenerateInputError(f"embeddings must be unit-norm (worst deviation {worst:.2e})")


class SupportQueue:
    """
    Fixed-capacity FIFO of embeddings for one modality.

    Parameters
    ----------
    capacity : int
        Maximum number of entries; inserting beyond it evicts the oldest.
    modality : Modality
        Which modality the queue stores.
    """

    def __init__(self, capacity: int, modality: Modality = Modality.VISION):
        if capacity < 1:
            raise DegenerateInputError(f"queue capacity must be positive, got {capacity}")
        self.capacity = int(capacity)
        self.modality = Modality(modality)
        self.entries: Deque[EmbeddingRecord] = deque(maxlen=self.capacity)
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def enqueue_batch(
        self,
        embeddings: np.ndarray,
        labels: Optional[Sequence[int]] = None,
        doc_ids: Optional[Sequence[str]] = None,
    ) -> "SupportQueue":
        """Append a batch of unit vectors (rows), evicting the oldest entries."""
        embeddings = np.asarray(embeddings)
        if embeddings.size == 0:
            return self
        if embeddings.ndim == 1:
            embeddings = embeddings[None, :]
        _check_unit_rows(embeddings)
        for i, row in enumerate(embeddings):
            self.entries.append(
                EmbeddingRecord(
                    vector=np.array(row, copy=True),
                    modality=self.modality,
                    label=None if labels is None else int(labels[i]),
                    doc_id=None if doc_ids is None else doc_ids[i],
                    seq=self._next_seq,
                )
            )
            self._next_seq += 1
        return self

    def snapshot(self) -> np.ndarray:
        """Entries as an (n, d) matrix, oldest first."""
        if not self.entries:
            raise EmptySupportError(f"{self.modality.value} support queue is empty")
        return np.stack([e.vector for e in self.entries])

    def labels(self) -> np.ndarray:
        return np.array([-1 if e.label is None else e.label for e in self.entries])

    def clear(self) -> None:
        self.entries.clear()


def _nearest_indices(bank: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """
    Index of the closest bank row for every query row.

    Selection is argmin of L2 distance (first index on ties). For unit
    vectors it must agree with argmax of the inner product; a disagreement
    is tolerated only when the two candidates are tied to rounding.
    """
    bank64 = bank.astype(np.float64)
    q64 = queries.astype(np.float64)
    sq = np.sum((q64[:, None, :] - bank64[None, :, :]) ** 2, axis=-1)
    by_distance = np.argmin(sq, axis=1)
    dots = q64 @ bank64.T
    by_dot = np.argmax(dots, axis=1)
    rows = np.arange(len(q64))
    mismatch = by_distance != by_dot
    if np.any(mismatch):
        gap = np.abs(dots[rows, by_distance] - dots[rows, by_dot])[mismatch]
        if np.any(gap > 1e-9):
            raise DegenerateInputError(
                "argmin-L2 and argmax-dot selections disagree; queue entries are not unit-norm"
            )
        logger.debug("nearest neighbour: %d rounding-level ties resolved by distance", int(mismatch.sum()))
    return by_distance


def nearest_neighbor(queue: SupportQueue, query: np.ndarray) -> EmbeddingRecord:
    """Entry closest to ``query`` in L2 distance; oldest entry wins ties."""
    bank = queue.snapshot()
    query = np.asarray(query)
    if query.shape != bank.shape[1:]:
        raise DimensionError(f"query shape {query.shape} vs queue entries {bank.shape[1:]}")
    return queue.entries[int(_nearest_indices(bank, query[None, :])[0])]


def nearest_neighbors_batch(queue: SupportQueue, queries: np.ndarray) -> np.ndarray:
    """Queue indices of the nearest entry for each query row."""
    bank = queue.snapshot()
    queries = np.asarray(queries)
    if queries.ndim != 2 or queries.shape[1] != bank.shape[1]:
        raise DimensionError(f"queries shape {queries.shape} vs queue entries {bank.shape[1:]}")
    return _nearest_indices(bank, queries)


def k_nearest_neighbors(
    index: np.ndarray,
    query: np.ndarray,
    k: int,
    exclude: Optional[int] = None,
) -> List[int]:
    """
    Indices of the ``k`` rows of ``index`` closest to ``query``.

    Sorted by ascending L2 distance, ties by index. ``exclude`` drops one
    row (the query itself when mining over a corpus containing it).
    """
    index = np.asarray(index, dtype=np.float64)
    query = np.asarray(query, dtype=np.float64)
    available = len(index) - (0 if exclude is None else 1)
    if k > available:
        raise InsufficientDataError(f"k={k} exceeds the {available} available entries")
    if k < 1:
        return []
    dist = np.sum((index - query[None, :]) ** 2, axis=1)
    order = np.argsort(dist, kind="stable")
    if exclude is not None:
        order = order[order != exclude]
    return [int(i) for i in order[:k]]


def mine_neighbor_table(embeddings: np.ndarray, k: int) -> np.ndarray:
    """(n, k) table of each row's k nearest other rows."""
    embeddings = np.asarray(embeddings)
    if k >= len(embeddings):
        raise InsufficientDataError(
            f"cannot mine {k} neighbours from a corpus of {len(embeddings)} documents"
        )
    return np.array(
        [k_nearest_neighbors(embeddings, embeddings[i], k, exclude=i) for i in range(len(embeddings))],
        dtype=np.int64,
    )


def neighbor_purity(queue: SupportQueue, indices: np.ndarray, labels: Iterable[int]) -> float:
    """Fraction of selected entries whose diagnostic label matches the anchor's."""
    queue_labels = queue.labels()
    labels = np.asarray(list(labels))
    if len(indices) == 0 or np.all(queue_labels < 0):
        return float("nan")
    return float(np.mean(queue_labels[np.asarray(indices)] == labels))


# EOF
