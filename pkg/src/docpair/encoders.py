#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 11:03:29"
# File: ./src/docpair/encoders.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/encoders.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Dual encoders, projection heads and the cross-modal attention encoder.

Shapes follow (batch, sequence, feature). Every attention sub-layer is
post-norm: ``layer_norm(x + sublayer(x))``. Positional encodings are fixed
sinusoids; nothing positional is learned.

Full-scale reference sizes, for documentation only:
    vision   (H, W) = (224, 224), C = 3, P = 16 -> N = 196, d_visn = 768
    language n = 256 tokens, d_lang = 768
"""

import hashlib
import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .autodiff import (
    Tensor,
    embedding_lookup,
    gelu,
    l2_normalize,
    layer_norm,
    mean_pool,
    row_softmax,
    transpose,
)
from .exceptions import ConfigError, DimensionError, VocabularyError
from .support_queue import EmbeddingRecord, Modality

logger = logging.getLogger(__name__)

MASK_BIAS = -1e9
LANGUAGE_POOLINGS = ("cls", "mean")


# ---- configs --------------------------------------------------------------
@dataclass
class VisionEncoderConfig:
    image_height: int = 32
    image_width: int = 32
    channels: int = 1
    patch_size: int = 8
    hidden_dim: int = 64
    num_layers: int = 2
    num_heads: int = 4

    def __post_init__(self):
        p = self.patch_size
        if p < 1 or self.image_height % p or self.image_width % p:
            raise ConfigError(
                f"image {self.image_height}x{self.image_width} is not divisible by patch size {p}"
            )
        if self.hidden_dim % self.num_heads:
            raise ConfigError(
                f"vision hidden_dim {self.hidden_dim} not divisible by {self.num_heads} heads"
            )

    @property
    def num_patches(self) -> int:
        return (self.image_height * self.image_width) // (self.patch_size**2)

    @property
    def patch_dim(self) -> int:
        return self.patch_size * self.patch_size * self.channels


@dataclass
class LanguageEncoderConfig:
    vocab_size: int = 64
    max_sequence_length: int = 32
    hidden_dim: int = 64
    num_layers: int = 2
    num_heads: int = 4
    pad_id: int = 0
    cls_id: int = 1
    sep_id: int = 2

    def __post_init__(self):
        if self.max_sequence_length < 2:
            raise ConfigError("max_sequence_length must leave room for [CLS] and [SEP]")
        if self.hidden_dim % self.num_heads:
            raise ConfigError(
                f"language hidden_dim {self.hidden_dim} not divisible by {self.num_heads} heads"
            )
        specials = {self.pad_id, self.cls_id, self.sep_id}
        if len(specials) != 3 or max(specials) >= self.vocab_size or min(specials) < 0:
            raise ConfigError("special token ids must be distinct and inside the vocabulary")


@dataclass
class CmaeConfig:
    hidden_dim: int = 64
    num_heads: int = 4
    num_layers: int = 1
    shared_parameters: bool = True
    # "cls" reads the fused language sequence where the encoder pools it; "mean" averages it
    language_pooling: str = "cls"

    def __post_init__(self):
        if self.num_heads < 1 or self.hidden_dim % self.num_heads:
            raise ConfigError(
                f"cmae hidden_dim {self.hidden_dim} not divisible by {self.num_heads} heads"
            )
        if self.num_layers < 0:
            raise ConfigError(f"cmae num_layers must be >= 0, got {self.num_layers}")
        if self.language_pooling not in LANGUAGE_POOLINGS:
            raise ConfigError(
                f"cmae language_pooling must be one of {LANGUAGE_POOLINGS}, "
                f"got {self.language_pooling!r}"
            )

    @property
    def key_dim(self) -> int:
        return self.hidden_dim // self.num_heads


@dataclass
class ModelConfig:
    vision: VisionEncoderConfig = field(default_factory=VisionEncoderConfig)
    language: LanguageEncoderConfig = field(default_factory=LanguageEncoderConfig)
    cmae: CmaeConfig = field(default_factory=CmaeConfig)
    projection_dim: int = 32
    projection_hidden_dim: int = 64
    ffn_multiplier: int = 2

    def digest(self) -> str:
        return hashlib.sha256(repr(sorted(_flatten(asdict(self)).items())).encode()).hexdigest()


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


# ---- module plumbing ------------------------------------------------------
class Module:
    """Parameter container: attributes that are Tensors, Modules or lists of Modules."""

    def _children(self) -> Iterator[Tuple[str, object]]:
        for key, value in vars(self).items():
            if key.startswith("_"):
                continue
            if isinstance(value, (Tensor, Module)):
                yield key, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, (Tensor, Module)):
                        yield f"{key}.{i}", item

    def named_parameters(self, prefix: str = "", _seen: Optional[set] = None) -> Dict[str, Tensor]:
        seen = set() if _seen is None else _seen
        params: Dict[str, Tensor] = {}
        for key, value in self._children():
            name = f"{prefix}{key}"
            if isinstance(value, Tensor):
                if value.requires_grad and id(value) not in seen:
                    seen.add(id(value))
                    params[name] = value
            else:
                params.update(value.named_parameters(name + ".", seen))
        return params

    def parameters(self) -> List[Tensor]:
        return list(self.named_parameters().values())

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters().items()}

    def load_state_dict(self, state: Dict[str, np.ndarray], strict: bool = True) -> None:
        params = self.named_parameters()
        missing = set(params) - set(state)
        if strict and missing:
            raise DimensionError(f"state is missing parameters: {sorted(missing)[:5]}")
        for name, p in params.items():
            if name not in state:
                continue
            value = np.asarray(state[name])
            if value.shape != p.shape:
                raise DimensionError(f"{name}: state shape {value.shape} vs parameter {p.shape}")
            p.data = value.astype(p.dtype).copy()

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters()))


def _param(values: np.ndarray) -> Tensor:
    return Tensor(values, requires_grad=True)


class Linear(Module):
    """x @ weight + bias, weight drawn from N(0, 1/fan_in)."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, bias: bool = True):
        self.weight = _param(rng.normal(0.0, 1.0 / np.sqrt(in_dim), size=(in_dim, out_dim)))
        self.bias = _param(np.zeros(out_dim)) if bias else None

    def __call__(self, x: Tensor) -> Tensor:
        out = x @ self.weight
        return out + self.bias if self.bias is not None else out


class LayerNorm(Module):
    def __init__(self, dim: int):
        self.gain = _param(np.ones(dim))
        self.bias = _param(np.zeros(dim))

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gain, self.bias)


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    positions = np.arange(length)[:, None]
    rates = 1.0 / np.power(10000.0, (2 * (np.arange(dim) // 2)) / dim)
    angles = positions * rates[None, :]
    table = np.zeros((length, dim))
    table[:, 0::2] = np.sin(angles[:, 0::2])
    table[:, 1::2] = np.cos(angles[:, 1::2])
    return table


def _batched(x: Tensor) -> Tuple[Tensor, bool]:
    if x.ndim == 2:
        return x.reshape(1, *x.shape), True
    return x, False


# ---- attention ------------------------------------------------------------
class MultiHeadAttention(Module):
    """Q from one sequence, K and V from another, ``num_heads`` heads."""

    def __init__(self, dim: int, num_heads: int, rng: np.random.Generator):
        if dim % num_heads:
            raise ConfigError(f"attention dim {dim} not divisible by {num_heads} heads")
        self.dim = dim
        self.num_heads = num_heads
        self.query = Linear(dim, dim, rng)
        self.key = Linear(dim, dim, rng)
        self.value = Linear(dim, dim, rng)
        self.output = Linear(dim, dim, rng)

    def _split(self, x: Tensor) -> Tensor:
        b, m, _ = x.shape
        return transpose(x.reshape(b, m, self.num_heads, self.dim // self.num_heads), (0, 2, 1, 3))

    def attend(
        self, queries_from: Tensor, keys_values_from: Tensor, key_mask: Optional[np.ndarray] = None
    ) -> Tuple[Tensor, Tensor]:
        """Return (output, attention weights of shape (b, heads, m, m'))."""
        q = self._split(self.query(queries_from))
        k = self._split(self.key(keys_values_from))
        v = self._split(self.value(keys_values_from))
        scores = (q @ transpose(k, (0, 1, 3, 2))) / float(np.sqrt(self.dim // self.num_heads))
        if key_mask is not None:
            bias = np.where(np.asarray(key_mask) > 0, 0.0, MASK_BIAS)[:, None, None, :]
            scores = scores + Tensor(bias, dtype=scores.dtype)
        weights = row_softmax(scores)
        b, _, m, _ = weights.shape
        merged = transpose(weights @ v, (0, 2, 1, 3)).reshape(b, m, self.dim)
        return self.output(merged), weights


class AttentionBlock(Module):
    """Attention sub-layer wrapped in residual + layer norm."""

    def __init__(self, dim: int, num_heads: int, rng: np.random.Generator):
        self.attention = MultiHeadAttention(dim, num_heads, rng)
        self.norm = LayerNorm(dim)

    def __call__(self, x: Tensor, kv: Tensor, key_mask: Optional[np.ndarray] = None) -> Tensor:
        attended, _ = self.attention.attend(x, kv, key_mask)
        return self.norm(x + attended)


class FeedForwardBlock(Module):
    """Position-wise feed-forward sub-layer wrapped in residual + layer norm."""

    def __init__(self, dim: int, hidden: int, rng: np.random.Generator):
        self.inner = Linear(dim, hidden, rng)
        self.outer = Linear(hidden, dim, rng)
        self.norm = LayerNorm(dim)

    def __call__(self, x: Tensor) -> Tensor:
        return self.norm(x + self.outer(gelu(self.inner(x))))


class TransformerBlock(Module):
    def __init__(self, dim: int, num_heads: int, ffn_dim: int, rng: np.random.Generator):
        self.attention = AttentionBlock(dim, num_heads, rng)
        self.feed_forward = FeedForwardBlock(dim, ffn_dim, rng)

    def __call__(self, x: Tensor, key_mask: Optional[np.ndarray] = None) -> Tensor:
        return self.feed_forward(self.attention(x, x, key_mask))


def cross_attention(
    queries_from: Tensor,
    keys_values_from: Tensor,
    weights: AttentionBlock,
    key_mask: Optional[np.ndarray] = None,
) -> Tensor:
    """
    Multi-head cross-attention with residual + layer norm.

    Accepts (m, d) / (m', d) or batched (b, m, d) / (b, m', d) inputs.
    """
    if queries_from.shape[-1] != keys_values_from.shape[-1]:
        raise DimensionError(
            f"cross_attention feature mismatch: {queries_from.shape} vs {keys_values_from.shape}"
        )
    if queries_from.shape[-1] != weights.attention.dim:
        raise DimensionError(
            f"inputs have dim {queries_from.shape[-1]}, weights expect {weights.attention.dim}"
        )
    q, squeeze = _batched(queries_from)
    kv, _ = _batched(keys_values_from)
    mask = None if key_mask is None else np.atleast_2d(key_mask)
    out = weights(q, kv, mask)
    return out.reshape(*out.shape[1:]) if squeeze else out


def self_attention(x: Tensor, weights: AttentionBlock, key_mask: Optional[np.ndarray] = None) -> Tensor:
    return cross_attention(x, x, weights, key_mask)


# ---- encoders -------------------------------------------------------------
class VisionEncoder(Module):
    """Patch embedding + sinusoidal positions + transformer blocks."""

    def __init__(self, config: VisionEncoderConfig, rng: np.random.Generator, ffn_multiplier: int = 2):
        self._config = config
        d = config.hidden_dim
        self.patch_projection = Linear(config.patch_dim, d, rng)
        self._positions = sinusoidal_positions(config.num_patches, d)
        self.blocks = [
            TransformerBlock(d, config.num_heads, ffn_multiplier * d, rng)
            for _ in range(config.num_layers)
        ]

    @property
    def config(self) -> VisionEncoderConfig:
        return self._config

    def patchify(self, images: np.ndarray) -> np.ndarray:
        """(b, H, W, C) -> (b, N, P*P*C), patches in row-major order."""
        cfg = self._config
        images = np.asarray(images)
        if images.ndim == 2 and cfg.channels == 1:
            images = images[None, :, :, None]
        elif images.ndim == 3:
            images = images[None] if images.shape[-1] == cfg.channels else images[..., None]
        expected = (cfg.image_height, cfg.image_width, cfg.channels)
        if images.ndim != 4 or images.shape[1:] != expected:
            raise DimensionError(f"image shape {images.shape[1:]} does not match config {expected}")
        b, p = images.shape[0], cfg.patch_size
        grid = images.reshape(b, cfg.image_height // p, p, cfg.image_width // p, p, cfg.channels)
        return grid.transpose(0, 1, 3, 2, 4, 5).reshape(b, cfg.num_patches, cfg.patch_dim)

    def __call__(self, images: np.ndarray) -> Tuple[Tensor, Tensor]:
        patches = Tensor(self.patchify(images))
        x = self.patch_projection(patches) + Tensor(self._positions)
        for block in self.blocks:
            x = block(x)
        return x, mean_pool(x)


@dataclass
class FramedTokens:
    ids: np.ndarray
    mask: np.ndarray


class LanguageEncoder(Module):
    """Token embedding + sinusoidal positions + masked transformer blocks."""

    def __init__(self, config: LanguageEncoderConfig, rng: np.random.Generator, ffn_multiplier: int = 2):
        self._config = config
        d = config.hidden_dim
        self.token_embedding = _param(rng.normal(0.0, 1.0 / np.sqrt(d), size=(config.vocab_size, d)))
        self._positions = sinusoidal_positions(config.max_sequence_length, d)
        self.blocks = [
            TransformerBlock(d, config.num_heads, ffn_multiplier * d, rng)
            for _ in range(config.num_layers)
        ]

    @property
    def config(self) -> LanguageEncoderConfig:
        return self._config

    def frame(self, sequences: Sequence[Sequence[int]]) -> FramedTokens:
        """[CLS] body [SEP] [PAD]..., truncated/padded to exactly n positions."""
        cfg = self._config
        n = cfg.max_sequence_length
        ids = np.full((len(sequences), n), cfg.pad_id, dtype=np.int64)
        mask = np.zeros((len(sequences), n))
        for row, body in enumerate(sequences):
            body = np.asarray(body, dtype=np.int64)
            if body.size and (body.min() < 0 or body.max() >= cfg.vocab_size):
                raise VocabularyError(
                    f"token id outside vocabulary of size {cfg.vocab_size}: "
                    f"range [{body.min()}, {body.max()}]"
                )
            body = body[: n - 2]
            framed = np.concatenate([[cfg.cls_id], body, [cfg.sep_id]])
            ids[row, : len(framed)] = framed
            mask[row, : len(framed)] = 1.0
        return FramedTokens(ids=ids, mask=mask)

    def encode_ids(self, ids: np.ndarray, mask: np.ndarray) -> Tuple[Tensor, Tensor]:
        """Encode already framed ids; positions with mask 0 are never attended to."""
        x = embedding_lookup(self.token_embedding, ids) + Tensor(self._positions)
        for block in self.blocks:
            x = block(x, mask)
        return x, x[:, 0, :]

    def __call__(self, sequences: Sequence[Sequence[int]]) -> Tuple[Tensor, Tensor, np.ndarray]:
        framed = self.frame(sequences)
        seq, pooled = self.encode_ids(framed.ids, framed.mask)
        return seq, pooled, framed.mask


class ProjectionHead(Module):
    """One-hidden-layer MLP into the projection space (normalised by the caller)."""

    def __init__(self, in_dim: int, hidden_dim: int, out_dim: int, rng: np.random.Generator):
        self.hidden = Linear(in_dim, hidden_dim, rng)
        self.out = Linear(hidden_dim, out_dim, rng)

    def __call__(self, x: Tensor) -> Tensor:
        return self.out(gelu(self.hidden(x)))


# ---- cross-modal attention encoder ----------------------------------------
class CmaeBranch(Module):
    """Cross-attention, self-attention and feed-forward weights for one direction."""

    def __init__(self, config: CmaeConfig, rng: np.random.Generator, ffn_multiplier: int):
        d = config.hidden_dim
        self.cross = AttentionBlock(d, config.num_heads, rng)
        self.self_attention = AttentionBlock(d, config.num_heads, rng)
        self.feed_forward = FeedForwardBlock(d, ffn_multiplier * d, rng)


class CmaeLayer(Module):
    def __init__(self, config: CmaeConfig, rng: np.random.Generator, ffn_multiplier: int):
        self.vision_branch = CmaeBranch(config, rng, ffn_multiplier)
        self.language_branch = (
            self.vision_branch if config.shared_parameters else CmaeBranch(config, rng, ffn_multiplier)
        )

    def __call__(self, v: Tensor, t: Tensor, t_mask: Optional[np.ndarray]) -> Tuple[Tensor, Tensor]:
        vb, tb = self.vision_branch, self.language_branch
        # V->T updates the language branch, T->V the vision branch, both from the layer inputs
        t_new = cross_attention(t, v, tb.cross)
        v_new = cross_attention(v, t, vb.cross, key_mask=t_mask)
        v_out = vb.feed_forward(self_attention(v_new, vb.self_attention))
        t_out = tb.feed_forward(self_attention(t_new, tb.self_attention, key_mask=t_mask))
        return v_out, t_out


class CrossModalEncoder(Module):
    """
    Stack of CMAE layers followed by pooling and L2 normalisation.

    The vision branch is mean-pooled over patches. The language branch is
    pooled the way the language encoder pools (CLS position by default), so
    a zero-layer stack returns the normalised encoder outputs unchanged.
    """

    def __init__(
        self,
        config: CmaeConfig,
        vision_dim: int,
        language_dim: int,
        rng: np.random.Generator,
        ffn_multiplier: int = 2,
    ):
        self._config = config
        d = config.hidden_dim
        self.vision_adapter = Linear(vision_dim, d, rng) if vision_dim != d else None
        self.language_adapter = Linear(language_dim, d, rng) if language_dim != d else None
        self.layers = [CmaeLayer(config, rng, ffn_multiplier) for _ in range(config.num_layers)]

    @property
    def config(self) -> CmaeConfig:
        return self._config

    def __call__(
        self, v_seq: Tensor, t_seq: Tensor, t_mask: Optional[np.ndarray] = None
    ) -> Tuple[Tensor, Tensor]:
        v, squeeze = _batched(v_seq)
        t, _ = _batched(t_seq)
        if t_mask is not None:
            t_mask = np.atleast_2d(t_mask)
        if self.vision_adapter is not None:
            v = self.vision_adapter(v)
        if self.language_adapter is not None:
            t = self.language_adapter(t)
        if v.shape[-1] != self._config.hidden_dim or t.shape[-1] != self._config.hidden_dim:
            raise DimensionError(
                f"cmae expects dim {self._config.hidden_dim}, got {v.shape[-1]} / {t.shape[-1]}"
            )
        for layer in self.layers:
            v, t = layer(v, t, t_mask)
        fused_v = l2_normalize(mean_pool(v))
        if self._config.language_pooling == "cls":
            fused_t = l2_normalize(t[:, 0, :])
        else:
            fused_t = l2_normalize(mean_pool(t, t_mask))
        if squeeze:
            return fused_v.reshape(-1), fused_t.reshape(-1)
        return fused_v, fused_t


def cmae_forward(
    v_seq: Tensor, t_seq: Tensor, encoder: CrossModalEncoder, t_mask: Optional[np.ndarray] = None
) -> Tuple[Tensor, Tensor]:
    return encoder(v_seq, t_seq, t_mask)


# ---- full model -----------------------------------------------------------
@dataclass
class EncodedBatch:
    v_seq: Tensor
    v_pooled: Tensor
    t_seq: Tensor
    t_pooled: Tensor
    t_mask: np.ndarray


class DocPairModel(Module):
    """
    Vision and language encoders, their projection heads and the CMAE.

    Parameters
    ----------
    config : ModelConfig
        Architecture sizes.
    seed : int
        Seed of the initialisation generator.
    """

    def __init__(self, config: Optional[ModelConfig] = None, seed: int = 0):
        self._config = config or ModelConfig()
        cfg = self._config
        rng = np.random.default_rng(seed)
        self.vision = VisionEncoder(cfg.vision, rng, cfg.ffn_multiplier)
        self.language = LanguageEncoder(cfg.language, rng, cfg.ffn_multiplier)
        self.vision_head = ProjectionHead(
            cfg.vision.hidden_dim, cfg.projection_hidden_dim, cfg.projection_dim, rng
        )
        self.language_head = ProjectionHead(
            cfg.language.hidden_dim, cfg.projection_hidden_dim, cfg.projection_dim, rng
        )
        self.cmae = CrossModalEncoder(
            cfg.cmae, cfg.vision.hidden_dim, cfg.language.hidden_dim, rng, cfg.ffn_multiplier
        )

    @property
    def config(self) -> ModelConfig:
        return self._config

    def backbone_parameters(self) -> Dict[str, Tensor]:
        return self.named_parameters()

    def encode(self, images: np.ndarray, sequences: Sequence[Sequence[int]]) -> EncodedBatch:
        v_seq, v_pooled = self.vision(images)
        t_seq, t_pooled, t_mask = self.language(sequences)
        return EncodedBatch(v_seq, v_pooled, t_seq, t_pooled, t_mask)

    def project(self, encoded: EncodedBatch) -> Tuple[Tensor, Tensor]:
        return (
            l2_normalize(self.vision_head(encoded.v_pooled)),
            l2_normalize(self.language_head(encoded.t_pooled)),
        )

    def fuse(self, encoded: EncodedBatch) -> Tuple[Tensor, Tensor]:
        return self.cmae(encoded.v_seq, encoded.t_seq, encoded.t_mask)

    def embed_vision(self, images: np.ndarray) -> Tensor:
        """Uni-modal vision path: encoder -> projection head -> unit sphere."""
        _, pooled = self.vision(images)
        return l2_normalize(self.vision_head(pooled))

    def embed_language(self, sequences: Sequence[Sequence[int]]) -> Tensor:
        _, pooled, _ = self.language(sequences)
        return l2_normalize(self.language_head(pooled))

    def embed_batch(
        self, images: np.ndarray, sequences: Sequence[Sequence[int]], use_cmae: bool = False
    ) -> Tuple[Tensor, Tensor]:
        encoded = self.encode(images, sequences)
        return self.fuse(encoded) if use_cmae else self.project(encoded)

    def embed_pair(self, pair, use_cmae: bool = False) -> Tuple[EmbeddingRecord, EmbeddingRecord]:
        """Unit-norm (z_v, z_t) records for one DocumentPair."""
        z_v, z_t = self.embed_batch(pair.image[None], [pair.tokens], use_cmae=use_cmae)
        return (
            EmbeddingRecord(z_v.data[0].copy(), Modality.VISION, pair.label, pair.doc_id),
            EmbeddingRecord(z_t.data[0].copy(), Modality.LANGUAGE, pair.label, pair.doc_id),
        )

    def digest(self) -> str:
        """sha256 over parameter names, shapes and float32 bytes."""
        h = hashlib.sha256()
        for name, p in self.named_parameters().items():
            h.update(name.encode())
            h.update(str(p.shape).encode())
            h.update(np.ascontiguousarray(p.data, dtype="<f4").tobytes())
        return h.hexdigest()


def embed_pair(model: DocPairModel, pair, use_cmae: bool = False) -> Tuple[EmbeddingRecord, EmbeddingRecord]:
    return model.embed_pair(pair, use_cmae=use_cmae)


def embed_documents(
    model: DocPairModel,
    images: np.ndarray,
    tokens: Sequence[Sequence[int]],
    use_cmae: bool = False,
    batch_size: int = 64,
) -> Tuple[np.ndarray, np.ndarray]:
    """Embed a stack of documents in fixed-size chunks; returns (z_v, z_t) arrays."""
    zs_v, zs_t = [], []
    for start in range(0, len(images), batch_size):
        stop = start + batch_size
        z_v, z_t = model.embed_batch(images[start:stop], tokens[start:stop], use_cmae=use_cmae)
        zs_v.append(z_v.data)
        zs_t.append(z_t.data)
    if not zs_v:
        d = model.config.cmae.hidden_dim if use_cmae else model.config.projection_dim
        return np.zeros((0, d)), np.zeros((0, d))
    return np.concatenate(zs_v), np.concatenate(zs_t)


# EOF
