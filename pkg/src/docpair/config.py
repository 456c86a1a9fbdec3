#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 15:20:04"
# File: ./src/docpair/config.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/config.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Flat run configuration.

One ``key=value`` per line, ``#`` starts a comment::

    setting = S3
    total_steps = 4000   # longer run
    cmae_shared = no

Resolution order, later wins: defaults, config file, ``--set`` overrides,
explicit command-line flags.
"""

import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Union

from .encoders import CmaeConfig, LanguageEncoderConfig, ModelConfig, VisionEncoderConfig
from .exceptions import ConfigError
from .objectives import ObjectiveConfig
from .trainer import TrainConfig
from .utils import CONFIG_FILENAME, format_config_lines, sha256_bytes, write_config_echo

logger = logging.getLogger(__name__)

TRUE_WORDS = ("true", "1", "yes", "on")
FALSE_WORDS = ("false", "0", "no", "off")


@dataclass(frozen=True)
class RunConfig:
    # model
    image_size: int = 32
    channels: int = 1
    patch_size: int = 8
    vision_hidden_dim: int = 64
    vision_layers: int = 2
    vision_heads: int = 4
    vocab_size: int = 64
    max_sequence_length: int = 32
    language_hidden_dim: int = 64
    language_layers: int = 2
    language_heads: int = 4
    cmae_hidden_dim: int = 64
    cmae_heads: int = 4
    cmae_layers: int = 1
    cmae_shared: bool = True
    cmae_language_pooling: str = "cls"
    projection_dim: int = 32
    projection_hidden_dim: int = 64
    ffn_multiplier: int = 2
    # objective
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
    disabled_terms: str = ""
    # training
    batch_size: int = 16
    total_steps: int = 2000
    warmup_fraction: float = 0.1
    peak_lr: float = 1e-3
    final_lr: float = 5e-4
    weight_decay: float = 1e-2
    queue_capacity: int = 512
    stage2_start_step: int = 1000
    seed: int = 0
    deterministic: bool = True
    checkpoint_interval: int = 500
    grad_clip: float = 5.0
    neighbor_refresh_interval: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    # evaluation
    way: int = 5
    shot: int = 1
    query_per_class: int = 15
    episodes: int = 600
    num_base_classes: int = 9
    use_cmae: bool = False
    squared_distance: bool = True
    meta_steps: int = 0
    meta_lr: float = 1e-4
    meta_loss: str = "log_distance"
    probe_steps: int = 300
    probe_lr: float = 1e-2
    embedding_batch_size: int = 64

    # ---- parsing --------------------------------------------------------
    @classmethod
    def keys(cls) -> Dict[str, type]:
        return {f.name: type(f.default) for f in fields(cls)}

    @classmethod
    def coerce(cls, key: str, raw) -> object:
        """Convert ``raw`` to the type of field ``key``."""
        kinds = cls.keys()
        if key not in kinds:
            raise ConfigError(f"unknown config key {key!r}")
        kind = kinds[key]
        if not isinstance(raw, str):
            if kind is float and isinstance(raw, int) and not isinstance(raw, bool):
                return float(raw)
            if isinstance(raw, kind):
                return raw
            raw = str(raw)
        text = raw.strip()
        if kind is bool:
            if text.lower() in TRUE_WORDS:
                return True
            if text.lower() in FALSE_WORDS:
                return False
            raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        try:
            return kind(text)
        except ValueError as e:
            raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}") from e

    @classmethod
    def parse_lines(cls, lines: Iterable[str], source: str = "<config>") -> Dict[str, object]:
        values: Dict[str, object] = {}
        for number, line in enumerate(lines, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{number}: expected key=value, got {line!r}")
            key, raw = (part.strip() for part in line.split("=", 1))
            try:
                values[key] = cls.coerce(key, raw)
            except ConfigError as e:
                raise ConfigError(f"{source}:{number}: {e}") from e
        return values

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        return cls().merged(cls.read(path))

    @classmethod
    def read(cls, path: Union[str, Path]) -> Dict[str, object]:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        return cls.parse_lines(path.read_text().splitlines(), source=str(path))

    @classmethod
    def parse_overrides(cls, items: Iterable[str]) -> Dict[str, object]:
        """``["key=value", ...]`` as given to ``--set``."""
        return cls.parse_lines(items, source="--set")

    @classmethod
    def resolve(
        cls,
        path: Optional[Union[str, Path]] = None,
        overrides: Iterable[str] = (),
        flags: Optional[Mapping[str, object]] = None,
    ) -> "RunConfig":
        """Defaults < file < ``--set`` < flags; flags set to None are ignored."""
        config = cls()
        if path is not None:
            config = config.merged(cls.read(path))
        config = config.merged(cls.parse_overrides(overrides))
        explicit = {k: v for k, v in (flags or {}).items() if v is not None}
        return config.merged({k: cls.coerce(k, v) for k, v in explicit.items()})

    def merged(self, values: Mapping[str, object]) -> "RunConfig":
        unknown = set(values) - set(self.keys())
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        return replace(self, **values)

    # ---- output ---------------------------------------------------------
    def to_text(self) -> str:
        return format_config_lines({f.name: getattr(self, f.name) for f in fields(self)})

    def digest(self) -> str:
        return sha256_bytes(self.to_text().encode("utf-8"))

    def echo(self, directory: Union[str, Path]) -> Path:
        """Write the resolved config into ``directory`` for provenance."""
        path = write_config_echo(directory, self.to_text())
        logger.debug("config echoed to %s (digest %s)", path, self.digest()[:12])
        return path

    # ---- builders -------------------------------------------------------
    def vision_config(self) -> VisionEncoderConfig:
        return VisionEncoderConfig(
            image_height=self.image_size,
            image_width=self.image_size,
            channels=self.channels,
            patch_size=self.patch_size,
            hidden_dim=self.vision_hidden_dim,
            num_layers=self.vision_layers,
            num_heads=self.vision_heads,
        )

    def language_config(self) -> LanguageEncoderConfig:
        return LanguageEncoderConfig(
            vocab_size=self.vocab_size,
            max_sequence_length=self.max_sequence_length,
            hidden_dim=self.language_hidden_dim,
            num_layers=self.language_layers,
            num_heads=self.language_heads,
        )

    def cmae_config(self) -> CmaeConfig:
        return CmaeConfig(
            hidden_dim=self.cmae_hidden_dim,
            num_heads=self.cmae_heads,
            num_layers=self.cmae_layers,
            shared_parameters=self.cmae_shared,
            language_pooling=self.cmae_language_pooling,
        )

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            vision=self.vision_config(),
            language=self.language_config(),
            cmae=self.cmae_config(),
            projection_dim=self.projection_dim,
            projection_hidden_dim=self.projection_hidden_dim,
            ffn_multiplier=self.ffn_multiplier,
        )

    def objective_config(self) -> ObjectiveConfig:
        disabled = tuple(t.strip() for t in self.disabled_terms.split(",") if t.strip())
        return ObjectiveConfig(
            setting=self.setting,
            temperature=self.temperature,
            nn_in_denominator=self.nn_in_denominator,
            l2u_target_mode=self.l2u_target_mode,
            l2u_temperature=self.l2u_temperature,
            entropy_weight=self.entropy_weight,
            entropy_sign=self.entropy_sign,
            k_mine=self.k_mine,
            num_clusters=self.num_clusters,
            l2m_source=self.l2m_source,
            l2u_source=self.l2u_source,
            l2r_source=self.l2r_source,
            freeze_backbones_stage2=self.freeze_backbones_stage2,
            disabled_terms=disabled,
        )

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            setting=self.setting,
            batch_size=self.batch_size,
            total_steps=self.total_steps,
            warmup_fraction=self.warmup_fraction,
            peak_lr=self.peak_lr,
            final_lr=self.final_lr,
            weight_decay=self.weight_decay,
            temperature=self.temperature,
            queue_capacity=self.queue_capacity,
            k_mine=self.k_mine,
            entropy_weight=self.entropy_weight,
            stage2_start_step=self.stage2_start_step,
            seed=self.seed,
            deterministic=self.deterministic,
            checkpoint_interval=self.checkpoint_interval,
            grad_clip=self.grad_clip,
            neighbor_refresh_interval=self.neighbor_refresh_interval,
            beta1=self.beta1,
            beta2=self.beta2,
            adam_eps=self.adam_eps,
        )

    def for_corpus(self, image_size: int, channels: int, vocab_size: int) -> "RunConfig":
        """Adopt a corpus' image and vocabulary sizes, logging any change."""
        wanted = {"image_size": image_size, "channels": channels, "vocab_size": vocab_size}
        changed = {k: v for k, v in wanted.items() if getattr(self, k) != v}
        for key, value in changed.items():
            logger.warning("%s=%s taken from the corpus (config had %s)", key, value, getattr(self, key))
        return replace(self, **changed) if changed else self


# EOF
