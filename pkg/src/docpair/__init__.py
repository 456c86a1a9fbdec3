#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
docpair - cross-modal self-supervised pretraining for paired document data
A desk-scale, numpy-only framework: image + token-sequence pairs, two
encoders, a cross-modal attention encoder, and contrastive / matching /
clustering pretext objectives.

Features:
- From-scratch reverse-mode autodiff with finite-difference certification
- Nearest-neighbour support queues for contrastive learning
- Two-stage training (S1, S2, S3) with checkpoints and resume
- Synthetic paired corpus with controllable separability
- Few-shot classification, Recall@K retrieval and linear probing

Usage:
    import docpair

    docpair.generate("corpus/", num_categories=4, per_class=200)
    corpus = docpair.load_split("corpus/", "train")
    model = docpair.DocPairModel()
    state = docpair.pretrain(model, docpair.TrainConfig(setting="S2"), corpus)

    test = docpair.load_split("corpus/", "test")
    print(docpair.retrieval(docpair.embed_split(model, test)).format())
"""

from .autodiff import Tensor, gradcheck, precision
from .config import RunConfig
from .datagen import (
    CorpusSplit,
    DocumentPair,
    generate_corpus,
    load_corpus,
    load_split,
    split_classes,
)
from .encoders import DocPairModel, ModelConfig, embed_documents, embed_pair
from .evaluation import (
    EmbeddedSplit,
    build_index,
    compute_prototypes,
    classify_query,
    embed_split,
    evaluate_retrieval,
    export_embeddings,
    linear_probe,
    meta_finetune,
    read_embeddings,
    recall_at_k,
    retrieve,
    run_fewshot_eval,
)
from .exceptions import DocPairError
from .objectives import ObjectiveConfig, l2m_inter, l2m_intra, l2r_loss, l2u_loss, total_loss
from .preview import category_gif, contact_sheet, retrieval_panels
from .session import session
from .support_queue import Modality, SupportQueue
from .trainer import TrainConfig, gradcheck_setting, load_model, train

# Convenience aliases - these are the main public API
generate = generate_corpus
pretrain = train
fewshot = run_fewshot_eval
retrieval = evaluate_retrieval

__version__ = "0.1.0"

__all__ = [
    "generate",
    "pretrain",
    "fewshot",
    "retrieval",
    "Tensor",
    "gradcheck",
    "gradcheck_setting",
    "precision",
    "RunConfig",
    "ModelConfig",
    "ObjectiveConfig",
    "TrainConfig",
    "DocPairModel",
    "DocPairError",
    "DocumentPair",
    "CorpusSplit",
    "EmbeddedSplit",
    "Modality",
    "SupportQueue",
    "generate_corpus",
    "load_corpus",
    "load_split",
    "split_classes",
    "embed_pair",
    "embed_documents",
    "embed_split",
    "l2m_inter",
    "l2m_intra",
    "l2u_loss",
    "l2r_loss",
    "total_loss",
    "train",
    "load_model",
    "compute_prototypes",
    "classify_query",
    "meta_finetune",
    "run_fewshot_eval",
    "build_index",
    "retrieve",
    "recall_at_k",
    "evaluate_retrieval",
    "export_embeddings",
    "read_embeddings",
    "linear_probe",
    "contact_sheet",
    "category_gif",
    "retrieval_panels",
    "session",
]
