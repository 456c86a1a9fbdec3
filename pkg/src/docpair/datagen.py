#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 12:30:48"
# File: ./src/docpair/datagen.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/datagen.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Synthetic paired-document corpus: generator and on-disk format.

Every document is an image grid plus a token body drawn from the same
category parameters. ``separability`` mixes each category's own motif and
vocabulary block with distributions shared by all categories: 1 gives
distinct motifs and disjoint vocabularies, 0 gives identical
distributions.

Randomness comes from a counter-based SplitMix64 stream so a corpus is a
pure function of its parameters on every platform:

    state_k = seed + k * 0x9E3779B97F4A7C15            (mod 2**64)
    z = state_k
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_k = z ^ (z >> 31)
    uniform_k = (out_k >> 11) * 2**-53

Layout of a corpus directory::

    manifest.json               parameters, counts, per-file sha256, digest
    <split>/images.bin          per record: u32 H, u32 W, u32 C, H*W*C <f4
    <split>/tokens.bin          per record: u32 length, length * <u4 ids
    <split>/labels.bin          one <u4 per record
    <split>/doc_ids.txt         one id per line
"""

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Union

import numpy as np

from .exceptions import ConfigError, CorpusError, DigestMismatchError
from .utils import format_config_lines, sha256_bytes, sha256_file, write_config_echo

logger = logging.getLogger(__name__)

FORMAT_NAME = "docpair-corpus"
FORMAT_VERSION = 1
GENERATOR_VERSION = "1"
SPLITS = ("train", "test")
SPLIT_FILES = ("images.bin", "tokens.bin", "labels.bin", "doc_ids.txt")

NUM_SPECIAL_TOKENS = 3  # PAD=0, CLS=1, SEP=2
MOTIFS = ("band", "checker", "blob")
NOISE_SIGMA = 0.05

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)
MASK_64 = (1 << 64) - 1


# ---- PRNG -----------------------------------------------------------------
def _mix(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * MIX_1
        z = (z ^ (z >> np.uint64(27))) * MIX_2
        return z ^ (z >> np.uint64(31))


def stream_seed(seed: int, *keys: int) -> int:
    """Derive an independent stream seed from ``seed`` and integer keys."""
    state = np.array([seed & MASK_64], dtype=np.uint64)
    for key in keys:
        with np.errstate(over="ignore"):
            state = _mix(state ^ _mix(np.array([(key + 1) & MASK_64], dtype=np.uint64) * GAMMA))
    return int(state[0])


class SplitMix64:
    """Counter-based SplitMix64 generator, vectorised over numpy uint64."""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK_64
        self.counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        counters = np.arange(self.counter + 1, self.counter + 1 + n, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return _mix(np.uint64(self.seed) + counters * GAMMA)

    def uniform(self, n: int) -> np.ndarray:
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (2.0**-53)

    def integers(self, high: int, n: int) -> np.ndarray:
        """Integers in [0, high)."""
        return np.minimum((self.uniform(n) * high).astype(np.int64), high - 1)

    def normal(self, n: int) -> np.ndarray:
        """Box-Muller standard normals."""
        u1 = self.uniform(n)
        u2 = self.uniform(n)
        return np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)

    def permutation(self, n: int) -> np.ndarray:
        return np.argsort(self.uniform(n), kind="stable")


# ---- domain types ---------------------------------------------------------
@dataclass
class DocumentPair:
    """One synthetic page: H x W x C image in [0, 1], token body, category."""

    image: np.ndarray
    tokens: np.ndarray
    label: int
    doc_id: str


@dataclass
class CorpusParams:
    seed: int = 0
    num_categories: int = 16
    per_class: int = 50
    separability: float = 1.0
    image_size: int = 32
    channels: int = 1
    vocab_size: int = 64
    test_fraction: float = 0.25
    min_tokens: int = 12
    max_tokens: int = 28

    def __post_init__(self):
        if self.per_class < 1:
            raise ConfigError(f"per_class must be >= 1, got {self.per_class}")
        if self.num_categories < 1:
            raise ConfigError(f"num_categories must be >= 1, got {self.num_categories}")
        if not 0.0 <= self.separability <= 1.0:
            raise ConfigError(f"separability must lie in [0, 1], got {self.separability}")
        if not 0.0 <= self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in [0, 1), got {self.test_fraction}")
        if self.image_size < 4 or self.channels < 1:
            raise ConfigError("image_size must be >= 4 and channels >= 1")
        if not 1 <= self.min_tokens <= self.max_tokens:
            raise ConfigError("need 1 <= min_tokens <= max_tokens")
        if self.block_size < 1:
            raise ConfigError(
                f"vocab_size {self.vocab_size} leaves no token block for {self.num_categories} categories"
            )

    @property
    def block_size(self) -> int:
        return (self.vocab_size - NUM_SPECIAL_TOKENS) // self.num_categories

    @property
    def test_per_class(self) -> int:
        return int(round(self.per_class * self.test_fraction))

    def to_text(self) -> str:
        return format_config_lines(asdict(self))

    def echo(self, directory: Union[str, Path]) -> Path:
        """Write the generation parameters into ``directory``."""
        path = write_config_echo(directory, self.to_text())
        logger.debug("corpus parameters echoed to %s", path)
        return path


@dataclass
class CorpusManifest:
    """Parameters, counts and digests of a corpus directory."""

    params: CorpusParams
    counts: Dict[str, int] = field(default_factory=dict)
    files: Dict[str, Dict[str, str]] = field(default_factory=dict)
    digest: str = ""
    format: str = FORMAT_NAME
    format_version: int = FORMAT_VERSION
    generator_version: str = GENERATOR_VERSION

    @property
    def num_categories(self) -> int:
        return self.params.num_categories

    @property
    def seed(self) -> int:
        return self.params.seed

    def compute_digest(self) -> str:
        return sha256_bytes(json.dumps(self.files, sort_keys=True).encode())

    def to_dict(self) -> dict:
        return {
            "format": self.format,
            "format_version": self.format_version,
            "generator_version": self.generator_version,
            "params": asdict(self.params),
            "prng": {
                "name": "splitmix64",
                "gamma": "0x9E3779B97F4A7C15",
                "mix": ["0xBF58476D1CE4E5B9", "0x94D049BB133111EB"],
                "shifts": [30, 27, 31],
            },
            "counts": self.counts,
            "files": self.files,
            "digest": self.digest,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusManifest":
        try:
            if data.get("format") != FORMAT_NAME:
                raise CorpusError(f"not a corpus manifest (format={data.get('format')!r})")
            return cls(
                params=CorpusParams(**data["params"]),
                counts={k: int(v) for k, v in data["counts"].items()},
                files=data["files"],
                digest=data["digest"],
                format_version=int(data["format_version"]),
                generator_version=str(data["generator_version"]),
            )
        except (KeyError, TypeError) as e:
            raise CorpusError(f"malformed manifest: {e}") from e


# ---- rendering ------------------------------------------------------------
@dataclass
class CategoryStyle:
    motif: str
    values: np.ndarray
    vocabulary: np.ndarray


def _grid(size: int):
    y, x = np.mgrid[0:size, 0:size].astype(np.float64) / size
    return y, x


def _render_motif(motif: str, values: np.ndarray, size: int, shift: float) -> np.ndarray:
    y, x = _grid(size)
    if motif == "band":
        vertical, position, width = values[0] > 0.5, 0.2 + 0.6 * values[1], 0.1 + 0.15 * values[2]
        axis = x if vertical else y
        return (np.abs(axis - position - shift) < width / 2).astype(np.float64)
    if motif == "checker":
        cell = (2, 4, 8)[int(values[0] * 3) % 3] / size
        phase = values[1] > 0.5
        pattern = (np.floor((y + shift) / cell) + np.floor(x / cell) + phase) % 2
        return pattern.astype(np.float64)
    cy, cx, radius = 0.25 + 0.5 * values[0], 0.25 + 0.5 * values[1], 0.1 + 0.15 * values[2]
    return np.exp(-((y - cy - shift) ** 2 + (x - cx) ** 2) / (2 * radius**2))


def _shared_template(size: int) -> np.ndarray:
    y, x = _grid(size)
    return 0.5 * y + 0.25 * x


def category_styles(params: CorpusParams) -> List[CategoryStyle]:
    styles = []
    for c in range(params.num_categories):
        rng = SplitMix64(stream_seed(params.seed, 0, c))
        start = NUM_SPECIAL_TOKENS + c * params.block_size
        styles.append(
            CategoryStyle(
                motif=MOTIFS[c % len(MOTIFS)],
                values=rng.uniform(4),
                vocabulary=np.arange(start, start + params.block_size),
            )
        )
    return styles


def _make_pair(params: CorpusParams, style: CategoryStyle, label: int, index: int) -> DocumentPair:
    rng = SplitMix64(stream_seed(params.seed, 1, label, index))
    s, size = params.separability, params.image_size
    # one variant latent drives both the image jitter and the body length
    variant = rng.uniform(1)[0]
    motif = _render_motif(style.motif, style.values, size, shift=0.08 * (variant - 0.5))
    clean = 0.1 + 0.8 * (s * motif + (1.0 - s) * _shared_template(size))
    noise = NOISE_SIGMA * rng.normal(size * size * params.channels).reshape(size, size, params.channels)
    image = np.clip(clean[:, :, None] + noise, 0.0, 1.0).astype(np.float32)

    span = params.max_tokens - params.min_tokens
    length = params.min_tokens + int(round(variant * span))
    from_category = rng.uniform(length) < s
    own = style.vocabulary[rng.integers(len(style.vocabulary), length)]
    shared = NUM_SPECIAL_TOKENS + rng.integers(params.vocab_size - NUM_SPECIAL_TOKENS, length)
    tokens = np.where(from_category, own, shared).astype(np.int64)
    return DocumentPair(image=image, tokens=tokens, label=label, doc_id=f"c{label:02d}-{index:05d}")


def generate_pairs(params: CorpusParams) -> Dict[str, List[DocumentPair]]:
    """All documents of a corpus, split by index within each category."""
    styles = category_styles(params)
    n_test = params.test_per_class
    splits: Dict[str, List[DocumentPair]] = {name: [] for name in SPLITS}
    for label, style in enumerate(styles):
        for index in range(params.per_class):
            split = "train" if index < params.per_class - n_test else "test"
            splits[split].append(_make_pair(params, style, label, index))
    return splits


# ---- writing --------------------------------------------------------------
def _encode_images(pairs: Sequence[DocumentPair]) -> bytes:
    chunks = []
    for p in pairs:
        image = np.asarray(p.image, dtype="<f4")
        chunks.append(np.array(image.shape, dtype="<u4").tobytes())
        chunks.append(image.tobytes())
    return b"".join(chunks)


def _encode_tokens(pairs: Sequence[DocumentPair]) -> bytes:
    chunks = []
    for p in pairs:
        chunks.append(np.array([len(p.tokens)], dtype="<u4").tobytes())
        chunks.append(np.asarray(p.tokens, dtype="<u4").tobytes())
    return b"".join(chunks)


def write_split(directory: Union[str, Path], pairs: Sequence[DocumentPair]) -> Dict[str, str]:
    """Write one split and return the sha256 of each file."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payloads = {
        "images.bin": _encode_images(pairs),
        "tokens.bin": _encode_tokens(pairs),
        "labels.bin": np.array([p.label for p in pairs], dtype="<u4").tobytes(),
        "doc_ids.txt": "".join(f"{p.doc_id}\n" for p in pairs).encode(),
    }
    for name, payload in payloads.items():
        (directory / name).write_bytes(payload)
    return {name: sha256_bytes(payload) for name, payload in payloads.items()}


def generate_corpus(
    out: Union[str, Path],
    seed: int = 0,
    num_categories: int = 16,
    per_class: int = 50,
    separability: float = 1.0,
    **kwargs,
) -> CorpusManifest:
    """
    Generate a corpus and write it to ``out``.

    Extra keyword arguments are forwarded to ``CorpusParams``
    (image_size, channels, vocab_size, test_fraction, min/max_tokens).
    """
    params = CorpusParams(
        seed=seed, num_categories=num_categories, per_class=per_class, separability=separability, **kwargs
    )
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = CorpusManifest(params=params)
    for split, pairs in generate_pairs(params).items():
        manifest.files[split] = write_split(out / split, pairs)
        manifest.counts[split] = len(pairs)
    manifest.digest = manifest.compute_digest()
    (out / "manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n")
    logger.info(
        "wrote corpus %s: %s documents, digest %s", out, manifest.counts, manifest.digest[:12]
    )
    return manifest


# ---- reading --------------------------------------------------------------
def read_manifest(path: Union[str, Path]) -> CorpusManifest:
    path = Path(path)
    manifest_path = path / "manifest.json"
    if not manifest_path.exists():
        raise CorpusError(f"no manifest.json in {path}")
    try:
        data = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as e:
        raise CorpusError(f"{manifest_path}: {e}") from e
    manifest = CorpusManifest.from_dict(data)
    if manifest.compute_digest() != manifest.digest:
        raise DigestMismatchError(f"{manifest_path}: manifest digest does not match its file table")
    return manifest


def verify_split(path: Union[str, Path], split: str, manifest: Optional[CorpusManifest] = None) -> CorpusManifest:
    """Check every file of ``split`` against the manifest digests."""
    path = Path(path)
    manifest = manifest or read_manifest(path)
    if split not in manifest.files:
        raise CorpusError(f"split {split!r} not in corpus {path} (have {sorted(manifest.files)})")
    for name, expected in manifest.files[split].items():
        file_path = path / split / name
        if not file_path.exists():
            raise CorpusError(f"missing corpus file {file_path}")
        if sha256_file(file_path) != expected:
            raise DigestMismatchError(f"checksum mismatch for {file_path}")
    return manifest


def _read_u32(buffer: bytes, offset: int, count: int, where: str) -> np.ndarray:
    end = offset + 4 * count
    if end > len(buffer):
        raise CorpusError(f"{where}: truncated record at byte {offset}")
    return np.frombuffer(buffer, dtype="<u4", count=count, offset=offset)


def _iter_records(directory: Path, count: int) -> Iterator[DocumentPair]:
    images = (directory / "images.bin").read_bytes()
    tokens = (directory / "tokens.bin").read_bytes()
    labels = np.frombuffer((directory / "labels.bin").read_bytes(), dtype="<u4")
    doc_ids = (directory / "doc_ids.txt").read_text().splitlines()
    if len(labels) != count or len(doc_ids) != count:
        raise CorpusError(f"{directory}: record counts disagree with the manifest")
    i_off = t_off = 0
    for i in range(count):
        shape = tuple(int(v) for v in _read_u32(images, i_off, 3, "images.bin"))
        i_off += 12
        size = int(np.prod(shape))
        if i_off + 4 * size > len(images):
            raise CorpusError(f"images.bin: truncated record {i}")
        image = np.frombuffer(images, dtype="<f4", count=size, offset=i_off).reshape(shape)
        i_off += 4 * size
        length = int(_read_u32(tokens, t_off, 1, "tokens.bin")[0])
        t_off += 4
        ids = _read_u32(tokens, t_off, length, "tokens.bin").astype(np.int64)
        t_off += 4 * length
        yield DocumentPair(
            image=image.astype(np.float32), tokens=ids, label=int(labels[i]), doc_id=doc_ids[i]
        )


def load_corpus(path: Union[str, Path], split: str = "train") -> Iterator[DocumentPair]:
    """Stream the documents of one split in stored order after verifying digests."""
    path = Path(path)
    manifest = verify_split(path, split)
    yield from _iter_records(path / split, manifest.counts[split])


@dataclass
class CorpusSplit:
    """A split held in memory as stacked arrays."""

    images: np.ndarray
    tokens: List[np.ndarray]
    labels: np.ndarray
    doc_ids: List[str]
    name: str = "train"

    @classmethod
    def from_pairs(cls, pairs: Sequence[DocumentPair], name: str = "train") -> "CorpusSplit":
        if not pairs:
            raise CorpusError(f"split {name!r} is empty")
        return cls(
            images=np.stack([p.image for p in pairs]).astype(np.float32),
            tokens=[np.asarray(p.tokens) for p in pairs],
            labels=np.array([p.label for p in pairs], dtype=np.int64),
            doc_ids=[p.doc_id for p in pairs],
            name=name,
        )

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)

    def pair(self, i: int) -> DocumentPair:
        return DocumentPair(self.images[i], self.tokens[i], int(self.labels[i]), self.doc_ids[i])

    def pairs(self) -> Iterator[DocumentPair]:
        for i in range(len(self)):
            yield self.pair(i)

    def subset(self, indices: Sequence[int], name: Optional[str] = None) -> "CorpusSplit":
        indices = np.asarray(indices, dtype=np.int64)
        return CorpusSplit(
            images=self.images[indices],
            tokens=[self.tokens[i] for i in indices],
            labels=self.labels[indices],
            doc_ids=[self.doc_ids[i] for i in indices],
            name=name or self.name,
        )

    def by_classes(self, classes: Sequence[int], name: Optional[str] = None) -> "CorpusSplit":
        keep = np.flatnonzero(np.isin(self.labels, np.asarray(classes)))
        return self.subset(keep, name)

    def permutation(self, seed: int) -> np.ndarray:
        """Seeded shuffle order; the stored order never changes."""
        return SplitMix64(stream_seed(seed, 2)).permutation(len(self))


def load_split(path: Union[str, Path], split: str = "train") -> CorpusSplit:
    return CorpusSplit.from_pairs(list(load_corpus(path, split)), name=split)


def split_classes(classes: Sequence[int], num_base: int) -> Dict[str, np.ndarray]:
    """Partition categories into base (meta-training) and novel (evaluation) sets."""
    classes = np.sort(np.asarray(classes))
    if not 0 < num_base < len(classes):
        raise ConfigError(f"num_base_classes must lie in [1, {len(classes) - 1}], got {num_base}")
    return {"base": classes[:num_base], "novel": classes[num_base:]}


# EOF
