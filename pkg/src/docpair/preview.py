#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 15:44:10"
# File: ./src/docpair/preview.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/preview.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
Image previews of a corpus and of retrieval results.
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from PIL import Image, ImageDraw

from .datagen import CorpusSplit
from .evaluation import EmbeddedSplit, RetrievalIndex, retrieve_indices
from .exceptions import InsufficientDataError
from .support_queue import Modality

logger = logging.getLogger(__name__)

MATCH_COLOUR = (40, 170, 60)
MISMATCH_COLOUR = (200, 40, 40)
QUERY_COLOUR = (60, 90, 200)


def to_pil(image: np.ndarray, scale: int = 4) -> Image.Image:
    """(H, W, C) floats in [0, 1] -> RGB PIL image enlarged ``scale`` times."""
    array = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    if array.ndim == 3 and array.shape[-1] == 1:
        array = array[..., 0]
    pixels = (array * 255).round().astype(np.uint8)
    img = Image.fromarray(pixels).convert("RGB")
    if scale > 1:
        img = img.resize((img.width * scale, img.height * scale), Image.NEAREST)
    return img


def _bordered(img: Image.Image, colour, width: int = 3) -> Image.Image:
    framed = Image.new("RGB", (img.width + 2 * width, img.height + 2 * width), colour)
    framed.paste(img, (width, width))
    return framed


def _grid(tiles: Sequence[Sequence[Image.Image]], gap: int = 2) -> Image.Image:
    rows = [row for row in tiles if row]
    tile_w = max(t.width for row in rows for t in row)
    tile_h = max(t.height for row in rows for t in row)
    cols = max(len(row) for row in rows)
    sheet = Image.new("RGB", (cols * (tile_w + gap) + gap, len(rows) * (tile_h + gap) + gap), "white")
    for r, row in enumerate(rows):
        for c, tile in enumerate(row):
            sheet.paste(tile, (gap + c * (tile_w + gap), gap + r * (tile_h + gap)))
    return sheet


def contact_sheet(
    split: CorpusSplit,
    output_path: Union[str, Path],
    per_class: int = 8,
    scale: int = 3,
) -> Path:
    """PNG with one row per category and ``per_class`` samples per row."""
    rows = []
    for label in split.classes:
        members = np.flatnonzero(split.labels == label)[:per_class]
        rows.append([to_pil(split.images[i], scale) for i in members])
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    _grid(rows).save(output_path, format="PNG")
    logger.info("contact sheet %s: %d categories x %d samples", output_path, len(rows), per_class)
    return output_path


def category_gif(
    split: CorpusSplit,
    output_path: Union[str, Path],
    per_class: int = 4,
    scale: int = 4,
    duration: float = 0.5,
    loop: int = 0,
    optimize: bool = True,
) -> Path:
    """Animated GIF cycling through the categories, ``per_class`` samples per frame."""
    frames: List[Image.Image] = []
    for label in split.classes:
        members = np.flatnonzero(split.labels == label)[:per_class]
        frames.append(_grid([[to_pil(split.images[i], scale) for i in members]]))
    if not frames:
        raise InsufficientDataError("no documents to animate")
    target = frames[0].size
    frames = [f if f.size == target else f.resize(target, Image.NEAREST) for f in frames]
    output_path = Path(output_path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    frames[0].save(
        str(output_path),
        format="GIF",
        save_all=True,
        append_images=frames[1:],
        duration=int(duration * 1000),
        loop=loop,
        optimize=optimize,
    )
    logger.info(
        "category GIF %s: %d frames, %.1fKB", output_path, len(frames), output_path.stat().st_size / 1024
    )
    return output_path


def retrieval_panel(
    split: CorpusSplit,
    index: RetrievalIndex,
    query_embedding: np.ndarray,
    query_position: int,
    top_k: int = 5,
    scale: int = 3,
) -> Image.Image:
    """Query image followed by its top-k results; green border = same category."""
    ranked = retrieve_indices(index, query_embedding, top_k, split.doc_ids[query_position])
    query_label = split.labels[query_position]
    row = [_bordered(to_pil(split.images[query_position], scale), QUERY_COLOUR)]
    for i in ranked:
        colour = MATCH_COLOUR if index.labels[i] == query_label else MISMATCH_COLOUR
        row.append(_bordered(to_pil(split.images[i], scale), colour))
    return _grid([row], gap=4)


def retrieval_panels(
    split: CorpusSplit,
    embedded: EmbeddedSplit,
    output_dir: Union[str, Path],
    count: int = 4,
    top_k: int = 5,
    query_modality: Union[str, Modality] = Modality.VISION,
    index_modality: Union[str, Modality] = Modality.VISION,
    seed: int = 0,
    model_digest: Optional[str] = None,
) -> List[Path]:
    """Write ``count`` panels for seeded random queries of ``split``."""
    index = RetrievalIndex(
        Modality(index_modality),
        embedded.get(index_modality),
        embedded.labels,
        embedded.doc_ids,
        model_digest or "0" * 64,
    )
    queries = embedded.get(query_modality)
    picks = np.random.default_rng(seed).choice(len(split), size=min(count, len(split)), replace=False)
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    tag = f"{Modality(query_modality).value[0]}2{Modality(index_modality).value[0]}"
    paths = []
    for n, position in enumerate(sorted(picks)):
        panel = retrieval_panel(split, index, queries[position], int(position), top_k)
        path = output_dir / f"panel_{tag}_{n:02d}_{split.doc_ids[position]}.png"
        panel.save(path, format="PNG")
        paths.append(path)
    logger.info("wrote %d retrieval panels to %s", len(paths), output_dir)
    return paths


# EOF
