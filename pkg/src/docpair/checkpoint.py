#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 12:58:13"
# File: ./src/docpair/checkpoint.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/checkpoint.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Binary checkpoint format.

    b"GDOC"                     magic
    u32 version                 currently 1
    32 bytes                    raw sha256 digest of the run config
    u32 block_count
    block_count times:
        u32 name_length, name (utf-8)
        u32 rank, rank * u32 dims
        prod(dims) * <f4 values

All integers are little-endian. Optimizer moments are stored as ordinary
blocks named ``optim.m.<param>`` and ``optim.v.<param>``. Step counter and
RNG state live in a ``<checkpoint>.state.json`` sidecar. Support queues
are never saved; a resumed run starts with empty queues.
"""

import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from .exceptions import CheckpointError

logger = logging.getLogger(__name__)

MAGIC = b"GDOC"
VERSION = 1
DIGEST_BYTES = 32


@dataclass
class Checkpoint:
    blocks: Dict[str, np.ndarray]
    config_digest: str = "0" * 64
    version: int = VERSION

    def parameters(self) -> Dict[str, np.ndarray]:
        return {k: v for k, v in self.blocks.items() if not k.startswith("optim.")}

    def moments(self) -> Dict[str, Dict[str, np.ndarray]]:
        out: Dict[str, Dict[str, np.ndarray]] = {"m": {}, "v": {}}
        for name, value in self.blocks.items():
            if name.startswith("optim.m."):
                out["m"][name[len("optim.m."):]] = value
            elif name.startswith("optim.v."):
                out["v"][name[len("optim.v."):]] = value
        return out


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    try:
        digest = bytes.fromhex(checkpoint.config_digest)
    except ValueError as e:
        raise CheckpointError(f"config digest is not hex: {checkpoint.config_digest!r}") from e
    if len(digest) != DIGEST_BYTES:
        raise CheckpointError(f"config digest must be {DIGEST_BYTES} bytes, got {len(digest)}")
    chunks = [MAGIC, struct.pack("<I", checkpoint.version), digest, struct.pack("<I", len(checkpoint.blocks))]
    for name, value in checkpoint.blocks.items():
        encoded = name.encode("utf-8")
        value = np.asarray(value, dtype="<f4")
        chunks.append(struct.pack("<I", len(encoded)) + encoded)
        chunks.append(struct.pack(f"<I{value.ndim}I", value.ndim, *value.shape))
        chunks.append(value.tobytes())
    return b"".join(chunks)


def decode_checkpoint(payload: bytes, source: str = "<bytes>") -> Checkpoint:
    view = memoryview(payload)
    offset = 0

    def take(n: int) -> bytes:
        nonlocal offset
        if offset + n > len(view):
            raise CheckpointError(f"{source}: truncated at byte {offset}")
        chunk = bytes(view[offset:offset + n])
        offset += n
        return chunk

    if take(4) != MAGIC:
        raise CheckpointError(f"{source}: bad magic, not a docpair checkpoint")
    (version,) = struct.unpack("<I", take(4))
    if version != VERSION:
        raise CheckpointError(f"{source}: unsupported checkpoint version {version}")
    digest = take(DIGEST_BYTES).hex()
    (count,) = struct.unpack("<I", take(4))
    blocks: Dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_length,) = struct.unpack("<I", take(4))
        name = take(name_length).decode("utf-8")
        (rank,) = struct.unpack("<I", take(4))
        dims = struct.unpack(f"<{rank}I", take(4 * rank)) if rank else ()
        size = int(np.prod(dims)) if rank else 1
        blocks[name] = np.frombuffer(take(4 * size), dtype="<f4").reshape(dims).copy()
    if offset != len(view):
        raise CheckpointError(f"{source}: {len(view) - offset} trailing bytes")
    return Checkpoint(blocks=blocks, config_digest=digest, version=version)


def save_checkpoint(
    path: Union[str, Path],
    parameters: Dict[str, np.ndarray],
    config_digest: str,
    moments: Optional[Dict[str, Dict[str, np.ndarray]]] = None,
    state: Optional[dict] = None,
) -> Path:
    """Write a checkpoint and, when ``state`` is given, its JSON sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blocks = dict(parameters)
    for kind, table in (moments or {}).items():
        for name, value in table.items():
            blocks[f"optim.{kind}.{name}"] = value
    path.write_bytes(encode_checkpoint(Checkpoint(blocks=blocks, config_digest=config_digest)))
    if state is not None:
        state_path(path).write_text(json.dumps(state, indent=2, sort_keys=True) + "\n")
    logger.debug("checkpoint %s: %d blocks", path, len(blocks))
    return path


def load_checkpoint(path: Union[str, Path], expected_digest: Optional[str] = None) -> Checkpoint:
    path = Path(path)
    if not path.exists():
        raise CheckpointError(f"checkpoint not found: {path}")
    checkpoint = decode_checkpoint(path.read_bytes(), source=str(path))
    if expected_digest is not None and checkpoint.config_digest != expected_digest:
        logger.warning(
            "checkpoint %s was written with config digest %s, current config is %s",
            path,
            checkpoint.config_digest[:12],
            expected_digest[:12],
        )
    return checkpoint


def state_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".state.json")


def load_state(path: Union[str, Path]) -> dict:
    sidecar = state_path(path)
    if not sidecar.exists():
        raise CheckpointError(f"resume needs {sidecar}, which does not exist")
    try:
        return json.loads(sidecar.read_text())
    except json.JSONDecodeError as e:
        raise CheckpointError(f"{sidecar}: {e}") from e


@dataclass
class TrainingSnapshot:
    """What a resumed run restores: step, stage and generator state."""

    step: int
    stage: int = 1
    rng_state: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"step": self.step, "stage": self.stage, "rng_state": self.rng_state}

    @classmethod
    def from_dict(cls, data: dict) -> "TrainingSnapshot":
        try:
            return cls(step=int(data["step"]), stage=int(data.get("stage", 1)), rng_state=data.get("rng_state", {}))
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError(f"malformed training state: {e}") from e


# EOF
