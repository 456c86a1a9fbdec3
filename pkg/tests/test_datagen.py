#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 17:55:49"
# File: ./tests/test_datagen.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./tests/test_datagen.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Tests for the synthetic paired-document corpus.
"""

import json

import numpy as np
import pytest

from docpair.datagen import (
    CorpusParams,
    CorpusSplit,
    SplitMix64,
    generate_corpus,
    generate_pairs,
    load_corpus,
    load_split,
    read_manifest,
    split_classes,
    stream_seed,
    verify_split,
)
from docpair.exceptions import ConfigError, CorpusError, DigestMismatchError


class TestSplitMix64:
    """Counter-based generator."""

    def test_reference_outputs(self):
        """Seed 0 reproduces the published SplitMix64 sequence."""
        values = SplitMix64(0).next_u64(3)
        assert [int(v) for v in values] == [
            0xE220A8397B1DCDAF,
            0x6E789E6AA1B965F4,
            0x06C45D188009454F,
        ]

    def test_chunking_does_not_matter(self):
        """Drawing 2+3 values equals drawing 5."""
        a = SplitMix64(42)
        b = SplitMix64(42)
        np.testing.assert_array_equal(np.concatenate([a.next_u64(2), a.next_u64(3)]), b.next_u64(5))

    def test_ranges(self):
        """uniform in [0, 1), integers in [0, high)."""
        rng = SplitMix64(7)
        u = rng.uniform(1000)
        assert u.min() >= 0.0 and u.max() < 1.0
        k = rng.integers(5, 1000)
        assert set(np.unique(k)) <= set(range(5))
        assert sorted(rng.permutation(10)) == list(range(10))

    def test_stream_seeds_differ(self):
        """Different keys give different streams."""
        assert stream_seed(1, 0, 0) != stream_seed(1, 0, 1)
        assert stream_seed(1, 0, 0) == stream_seed(1, 0, 0)


class TestCorpusParams:
    """Parameter validation."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"per_class": 0},
            {"separability": 1.5},
            {"test_fraction": 1.0},
            {"image_size": 2},
            {"min_tokens": 5, "max_tokens": 4},
            {"num_categories": 80, "vocab_size": 64},
        ],
    )
    def test_invalid(self, kwargs):
        """Out-of-range parameters raise ConfigError."""
        with pytest.raises(ConfigError):
            CorpusParams(**kwargs)

    def test_echo(self, tmp_path, small_params):
        """Parameters are echoed as key = value lines, one per field."""
        path = small_params.echo(tmp_path / "out")
        assert path.name == "config.cfg"
        lines = path.read_text().splitlines()
        assert "seed = 3" in lines and "num_categories = 4" in lines
        assert "separability = 1.0" in lines
        assert len(lines) == 10


class TestGeneratePairs:
    """In-memory generation."""

    def test_counts_and_ids(self, small_params):
        """Each category contributes per_class documents, split by index."""
        pairs = generate_pairs(small_params)
        assert len(pairs["train"]) == 4 * 15
        assert len(pairs["test"]) == 4 * 5
        assert pairs["train"][0].doc_id == "c00-00000"
        assert pairs["test"][0].doc_id == "c00-00015"

    def test_shapes_and_ranges(self, small_params):
        """Images are float32 in [0, 1]; tokens avoid special ids."""
        for pair in generate_pairs(small_params)["train"]:
            assert pair.image.shape == (16, 16, 1)
            assert pair.image.dtype == np.float32
            assert 0.0 <= pair.image.min() and pair.image.max() <= 1.0
            assert 4 <= len(pair.tokens) <= 10
            assert pair.tokens.min() >= 3 and pair.tokens.max() < 32

    def test_deterministic(self, small_params):
        """The same parameters give identical documents."""
        a = generate_pairs(small_params)["test"]
        b = generate_pairs(small_params)["test"]
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.image, y.image)
            np.testing.assert_array_equal(x.tokens, y.tokens)

    def test_seed_changes_content(self, small_params):
        """A different seed gives different images."""
        other = CorpusParams(**{**small_params.__dict__, "seed": 4})
        a = generate_pairs(small_params)["train"][0]
        b = generate_pairs(other)["train"][0]
        assert not np.array_equal(a.image, b.image)

    def test_full_separability_uses_category_tokens(self, small_params):
        """At separability 1 every token comes from the category block."""
        block = small_params.block_size
        for pair in generate_pairs(small_params)["train"]:
            start = 3 + pair.label * block
            assert np.all((pair.tokens >= start) & (pair.tokens < start + block))

    def test_zero_separability_images_share_template(self):
        """Without category signal the class means of images nearly coincide."""
        params = CorpusParams(seed=1, num_categories=3, per_class=40, separability=0.0, image_size=8, vocab_size=16)
        split = CorpusSplit.from_pairs(generate_pairs(params)["train"])
        means = [split.images[split.labels == c].mean(axis=0) for c in split.classes]
        assert np.max(np.abs(means[0] - means[1])) < 0.1


class TestCorpusOnDisk:
    """Writing, verifying and reading corpus directories."""

    def test_layout(self, corpus_dir):
        """Manifest plus four files per split."""
        assert (corpus_dir / "manifest.json").exists()
        for split in ("train", "test"):
            for name in ("images.bin", "tokens.bin", "labels.bin", "doc_ids.txt"):
                assert (corpus_dir / split / name).exists()

    def test_reads_back_generated_documents(self, corpus_dir, small_corpus):
        """Stored documents equal the in-memory generation."""
        loaded = load_split(corpus_dir, "test")
        expected = small_corpus["test"]
        assert loaded.doc_ids == expected.doc_ids
        np.testing.assert_array_equal(loaded.labels, expected.labels)
        np.testing.assert_array_equal(loaded.images, expected.images)
        for a, b in zip(loaded.tokens, expected.tokens):
            np.testing.assert_array_equal(a, b)

    def test_streaming(self, corpus_dir):
        """load_corpus yields documents in stored order."""
        ids = [p.doc_id for p in load_corpus(corpus_dir, "train")]
        assert ids == sorted(ids)
        assert len(ids) == 60

    def test_manifest_counts(self, corpus_dir):
        """Counts and parameters are recorded."""
        manifest = read_manifest(corpus_dir)
        assert manifest.counts == {"train": 60, "test": 20}
        assert manifest.num_categories == 4
        assert manifest.seed == 3

    def test_tampered_file(self, corpus_dir):
        """A changed split file fails verification."""
        labels = corpus_dir / "train" / "labels.bin"
        payload = bytearray(labels.read_bytes())
        payload[0] ^= 1
        labels.write_bytes(bytes(payload))
        with pytest.raises(DigestMismatchError):
            verify_split(corpus_dir, "train")
        verify_split(corpus_dir, "test")

    def test_tampered_manifest(self, corpus_dir):
        """Editing the file table without the digest is detected."""
        path = corpus_dir / "manifest.json"
        data = json.loads(path.read_text())
        data["files"]["train"]["labels.bin"] = "0" * 64
        path.write_text(json.dumps(data))
        with pytest.raises(DigestMismatchError):
            read_manifest(corpus_dir)

    def test_missing_manifest(self, tmp_path):
        """A directory without a manifest is not a corpus."""
        with pytest.raises(CorpusError):
            read_manifest(tmp_path)

    def test_unknown_split(self, corpus_dir):
        """Only recorded splits can be verified."""
        with pytest.raises(CorpusError):
            verify_split(corpus_dir, "validation")

    def test_regeneration_is_byte_identical(self, tmp_path, small_params):
        """Two generations with the same seed share every digest."""
        kwargs = dict(image_size=16, vocab_size=32, min_tokens=4, max_tokens=10)
        a = generate_corpus(tmp_path / "a", seed=3, num_categories=4, per_class=20, **kwargs)
        b = generate_corpus(tmp_path / "b", seed=3, num_categories=4, per_class=20, **kwargs)
        assert a.digest == b.digest
        assert (tmp_path / "a" / "train" / "images.bin").read_bytes() == (
            tmp_path / "b" / "train" / "images.bin"
        ).read_bytes()


class TestCorpusSplit:
    """In-memory split helpers."""

    def test_by_classes(self, small_corpus):
        """Class filtering keeps only the requested labels."""
        subset = small_corpus["train"].by_classes([1, 3], name="novel")
        assert set(subset.classes) == {1, 3}
        assert len(subset) == 30
        assert subset.name == "novel"

    def test_permutation_is_seeded(self, small_corpus):
        """Shuffle order depends only on the seed."""
        split = small_corpus["train"]
        np.testing.assert_array_equal(split.permutation(5), split.permutation(5))
        assert not np.array_equal(split.permutation(5), split.permutation(6))
        assert sorted(split.permutation(5)) == list(range(len(split)))

    def test_empty_split(self):
        """A split needs at least one document."""
        with pytest.raises(CorpusError):
            CorpusSplit.from_pairs([])

    def test_split_classes(self):
        """Sorted classes split into base and novel."""
        parts = split_classes([4, 1, 3, 0, 2], 3)
        np.testing.assert_array_equal(parts["base"], [0, 1, 2])
        np.testing.assert_array_equal(parts["novel"], [3, 4])
        with pytest.raises(ConfigError):
            split_classes([0, 1], 2)

# EOF
