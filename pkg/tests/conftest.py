"""
Pytest configuration for docpair tests.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src"))

from docpair.datagen import CorpusParams, CorpusSplit, generate_corpus, generate_pairs
from docpair.encoders import CmaeConfig, DocPairModel, LanguageEncoderConfig, ModelConfig, VisionEncoderConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_model_config():
    """16x16 images, width 16; fast enough for a few dozen training steps."""
    return ModelConfig(
        vision=VisionEncoderConfig(16, 16, 1, 4, 16, 1, 2),
        language=LanguageEncoderConfig(vocab_size=32, max_sequence_length=16, hidden_dim=16, num_layers=1, num_heads=2),
        cmae=CmaeConfig(hidden_dim=16, num_heads=2, num_layers=1),
        projection_dim=8,
        projection_hidden_dim=16,
    )


@pytest.fixture
def small_model(small_model_config):
    return DocPairModel(small_model_config, seed=0)


@pytest.fixture
def small_params():
    return CorpusParams(
        seed=3, num_categories=4, per_class=20, image_size=16, vocab_size=32, min_tokens=4, max_tokens=10
    )


@pytest.fixture
def small_corpus(small_params):
    """In-memory train/test splits of a 4-category corpus."""
    pairs = generate_pairs(small_params)
    return {name: CorpusSplit.from_pairs(p, name) for name, p in pairs.items()}


@pytest.fixture
def corpus_dir(tmp_path, small_params):
    """The same 4-category corpus written to disk."""
    out = tmp_path / "corpus"
    generate_corpus(
        out,
        seed=small_params.seed,
        num_categories=small_params.num_categories,
        per_class=small_params.per_class,
        image_size=small_params.image_size,
        vocab_size=small_params.vocab_size,
        min_tokens=small_params.min_tokens,
        max_tokens=small_params.max_tokens,
    )
    return out
