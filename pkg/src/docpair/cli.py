#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# Timestamp: "2026-10-18 16:02:55"
# File: ./src/docpair/cli.py
# ----------------------------------------
from __future__ import annotations
import os
__FILE__ = (
    "./src/docpair/cli.py"
)
__DIR__ = os.path.dirname(__FILE__)
# ----------------------------------------
"""
CLI for docpair - paired document pretraining at desk scale
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

EXAMPLES = """
Examples:
  docpair gen-corpus --classes 4 --per-class 200 --out corpus/
  docpair pretrain --corpus corpus/ --setting S2 --out runs/s2
  docpair pretrain --corpus corpus/ --config s3.cfg --seed 7 --out runs/s3
  docpair pretrain --corpus corpus/ --resume runs/s3/checkpoints/step_000500.gdoc
  docpair eval-retrieval --corpus corpus/ --checkpoint runs/s2/model.gdoc --panels 4
  docpair eval-fewshot --corpus corpus/ --checkpoint runs/s3/model.gdoc --set num_base_classes=3
  docpair linear-probe --corpus corpus/ --checkpoint runs/s2/model.gdoc
  docpair export-embeddings --corpus corpus/ --checkpoint runs/s2/model.gdoc --modality vision
  docpair gradcheck --setting S3 --dim 8
  docpair preview --corpus corpus/ --kind gif
"""

TRAIN_KEYS = (
    "setting", "batch_size", "total_steps", "warmup_fraction", "peak_lr", "final_lr",
    "weight_decay", "temperature", "queue_capacity", "k_mine", "entropy_weight",
    "stage2_start_step", "seed", "deterministic", "checkpoint_interval", "grad_clip",
    "neighbor_refresh_interval", "beta1", "beta2", "adam_eps",
)
EMBED_KEYS = ("use_cmae", "embedding_batch_size", "deterministic")
FEWSHOT_KEYS = EMBED_KEYS + (
    "way", "shot", "query_per_class", "episodes", "seed", "num_base_classes",
    "squared_distance", "meta_steps", "meta_lr", "meta_loss",
)
PROBE_KEYS = EMBED_KEYS + ("probe_steps", "probe_lr", "seed")

logger = logging.getLogger("docpair.cli")


class DocPairArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"❌ {self.prog}: {message}\n")


def _say(args, message: str) -> None:
    if not getattr(args, "quiet", False):
        print(message)


def _add_config_flags(parser: argparse.ArgumentParser, keys: Sequence[str]) -> None:
    from .config import RunConfig

    kinds = RunConfig.keys()
    group = parser.add_argument_group("config overrides")
    for key in keys:
        default = getattr(RunConfig(), key)
        group.add_argument(
            f"--{key.replace('_', '-')}",
            dest=key,
            default=None,
            metavar=kinds[key].__name__.upper(),
            help=f"(default: {default})",
        )


def _add_common(parser: argparse.ArgumentParser, keys: Sequence[str] = ()) -> None:
    parser.add_argument("--config", type=str, help="Flat key=value config file")
    parser.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="Override one config key (repeatable)",
    )
    parser.add_argument("-o", "--out", type=str, help="Output directory")
    parser.add_argument("-m", "--message", type=str, help="Optional message for the output dir name")
    if keys:
        _add_config_flags(parser, keys)


def _add_model_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", type=str, required=True, help="Corpus directory")
    parser.add_argument(
        "--checkpoint", type=str,
        help="Trained checkpoint (.gdoc); without it an untrained model is evaluated",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = DocPairArgumentParser(
        prog="docpair",
        description="docpair - cross-modal self-supervised pretraining for paired document data",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EXAMPLES,
    )
    parser.add_argument("-q", "--quiet", action="store_true", help="Quiet mode")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("gen-corpus", help="Generate a synthetic paired corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--classes", type=int, default=16, help="Number of categories")
    p.add_argument("--per-class", type=int, default=50, help="Documents per category")
    p.add_argument("--separability", type=float, default=1.0, help="0 = indistinguishable, 1 = clean")
    p.add_argument("--image-size", type=int, default=32)
    p.add_argument("--channels", type=int, default=1)
    p.add_argument("--vocab", type=int, default=64, help="Vocabulary size")
    p.add_argument("--test-fraction", type=float, default=0.25)
    p.add_argument("-o", "--out", type=str, help="Corpus directory")

    p = sub.add_parser("pretrain", help="Self-supervised pretraining (S1, S2, S3)")
    p.add_argument("--corpus", type=str, required=True, help="Corpus directory")
    p.add_argument("--resume", type=str, help="Checkpoint to resume from")
    _add_common(p, TRAIN_KEYS)

    p = sub.add_parser("eval-fewshot", help="Episodic few-shot classification on novel classes")
    _add_model_source(p)
    _add_common(p, FEWSHOT_KEYS)

    p = sub.add_parser("eval-retrieval", help="Recall@K for uni-, cross- and multimodal retrieval")
    _add_model_source(p)
    p.add_argument("--split", choices=("train", "test", "all"), default="test")
    p.add_argument("--panels", type=int, default=0, help="Write N qualitative retrieval panels")
    p.add_argument(
        "--panel-setting", choices=("V->V", "L->L", "V->L", "L->V", "M->M"), default="V->V"
    )
    _add_common(p, EMBED_KEYS)

    p = sub.add_parser("linear-probe", help="Linear classifier on frozen embeddings")
    _add_model_source(p)
    p.add_argument(
        "--modality", choices=("vision", "language", "multimodal"), default="multimodal"
    )
    _add_common(p, PROBE_KEYS)

    p = sub.add_parser("export-embeddings", help="Write a GEMB embedding file")
    _add_model_source(p)
    p.add_argument("--split", choices=("train", "test", "all"), default="test")
    p.add_argument(
        "--modality", choices=("vision", "language", "multimodal"), action="append",
        help="Modality to export (repeatable, default: all three)",
    )
    _add_common(p, EMBED_KEYS)

    p = sub.add_parser("gradcheck", help="Finite-difference certification of the pretext losses")
    p.add_argument("--setting", choices=("S1", "S2", "S3"), default="S3")
    p.add_argument("--dim", type=int, default=8, help="Model width")
    p.add_argument("--batch", type=int, default=4, help="Pairs per batch")
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--l2u-target", choices=("hard", "soft"), default="hard")
    p.add_argument("--entries", type=int, default=0, help="Checked entries per parameter (0 = all)")
    p.add_argument(
        "--queue", type=int, default=8, help="Unit rows pre-filled into each support queue (0 = empty)"
    )
    p.add_argument("-o", "--out", type=str, help="Output directory")

    p = sub.add_parser("preview", help="Contact sheet or animated GIF of a corpus")
    p.add_argument("--corpus", type=str, required=True, help="Corpus directory")
    p.add_argument("--split", choices=("train", "test"), default="train")
    p.add_argument("--kind", choices=("sheet", "gif"), default="sheet")
    p.add_argument("--per-class", type=int, default=8)
    p.add_argument("--duration", type=float, default=0.5, help="Seconds per GIF frame")
    p.add_argument("-o", "--out", type=str, help="Output directory")
    return parser


# ---- helpers --------------------------------------------------------------
def _flags(args, keys: Sequence[str]) -> Dict[str, object]:
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def _config_path(args) -> Optional[Path]:
    """--config, else the config.cfg echoed next to (or above) --checkpoint."""
    if args.config:
        return Path(args.config)
    checkpoint = getattr(args, "checkpoint", None)
    if checkpoint:
        for directory in (Path(checkpoint).parent, Path(checkpoint).parent.parent):
            if (directory / "config.cfg").exists():
                return directory / "config.cfg"
    return None


def _resolve_config(args, keys: Sequence[str]):
    from .config import RunConfig
    from .datagen import read_manifest

    config = RunConfig.resolve(_config_path(args), args.overrides, _flags(args, keys))
    params = read_manifest(args.corpus).params
    return config.for_corpus(params.image_size, params.channels, params.vocab_size)


def _load_split(corpus: str, split: str):
    from .datagen import CorpusSplit, load_corpus, load_split

    if split == "all":
        pairs = list(load_corpus(corpus, "train")) + list(load_corpus(corpus, "test"))
        return CorpusSplit.from_pairs(pairs, name="all")
    return load_split(corpus, split)


def _model(args, config):
    from .encoders import DocPairModel
    from .trainer import load_model

    if args.checkpoint:
        return load_model(args.checkpoint, config.model_config(), expected_digest=config.digest())
    logger.warning("no --checkpoint given, evaluating an untrained model")
    return DocPairModel(config.model_config(), seed=config.seed)


# ---- commands -------------------------------------------------------------
def cmd_gen_corpus(args) -> int:
    from dataclasses import asdict

    from .datagen import CorpusParams, generate_corpus
    from .session import RunSession

    params = CorpusParams(
        seed=args.seed,
        num_categories=args.classes,
        per_class=args.per_class,
        separability=args.separability,
        image_size=args.image_size,
        channels=args.channels,
        vocab_size=args.vocab,
        test_fraction=args.test_fraction,
    )
    with RunSession("gen-corpus", params, args.out) as run:
        _say(args, f"📦 Generating corpus ({args.classes} classes x {args.per_class} docs)...")
        manifest = generate_corpus(run.out_dir, **asdict(params))
    _say(args, f"✅ {run.out_dir} ({manifest.counts}, digest {manifest.digest[:12]})")
    return 0


def cmd_pretrain(args) -> int:
    from .datagen import load_split
    from .encoders import DocPairModel
    from .session import RunSession
    from .trainer import train

    config = _resolve_config(args, TRAIN_KEYS)
    corpus = load_split(args.corpus, "train")
    with RunSession("pretrain", config, args.out, args.message) as run:
        model = DocPairModel(config.model_config(), seed=config.seed)
        _say(
            args,
            f"🧠 Pretraining {config.setting}: {model.num_parameters():,} parameters, "
            f"{len(corpus)} documents, {config.total_steps} steps",
        )
        state = train(
            model,
            config.train_config(),
            corpus,
            objective=config.objective_config(),
            out_dir=run.out_dir,
            resume=args.resume,
            config_digest=config.digest(),
            progress=not args.quiet,
        )
        last = state.history[-1] if state.history else {}
        summary = [f"setting = {config.setting}", f"steps = {state.step}", f"model_digest = {model.digest()}"]
        summary += [f"{k} = {v}" for k, v in sorted(last.items()) if k.startswith("loss_")]
        run.write_report("summary", "\n".join(summary))
    _say(args, f"✅ {state.checkpoint_path}")
    return 0


def cmd_eval_fewshot(args) -> int:
    from .datagen import split_classes
    from .evaluation import meta_finetune, run_fewshot_eval
    from .session import RunSession

    config = _resolve_config(args, FEWSHOT_KEYS)
    model = _model(args, config)
    pool = _load_split(args.corpus, "all")
    groups = split_classes(pool.classes, config.num_base_classes)
    novel = pool.by_classes(groups["novel"], name="novel")
    way = min(config.way, len(groups["novel"]))
    if way != config.way:
        logger.warning("only %d novel classes, running %d-way episodes", way, way)
    evaluate = dict(
        way=way,
        shot=config.shot,
        query_per_class=config.query_per_class,
        episodes=config.episodes,
        seed=config.seed,
        use_cmae=config.use_cmae,
        squared=config.squared_distance,
        progress=not args.quiet,
    )
    with RunSession("eval-fewshot", config, args.out, args.message) as run:
        _say(args, f"🎯 {way}-way {config.shot}-shot, {config.episodes} episodes on {len(groups['novel'])} novel classes")
        report = run_fewshot_eval(model, novel, **evaluate)
        sections = [f"# {way}-way {config.shot}-shot\n" + report.format()]
        data = {"pretrained": report.to_dict()}
        if config.meta_steps > 0:
            base = pool.by_classes(groups["base"], name="base")
            meta_finetune(
                model,
                base,
                way=min(config.way, len(groups["base"])),
                shot=config.shot,
                query_per_class=min(config.query_per_class, 5),
                steps=config.meta_steps,
                lr=config.meta_lr,
                seed=config.seed,
                use_cmae=config.use_cmae,
                variant=config.meta_loss,
                squared=config.squared_distance,
                progress=not args.quiet,
            )
            tuned = run_fewshot_eval(model, novel, **evaluate)
            sections.append("# w/ meta-train\n" + tuned.format())
            data["meta_trained"] = tuned.to_dict()
        path = run.write_report("fewshot", "\n\n".join(sections), data)
    _say(args, "\n\n".join(sections))
    _say(args, f"✅ {path}")
    return 0


def cmd_eval_retrieval(args) -> int:
    from .evaluation import RETRIEVAL_SETTINGS, embed_split, evaluate_retrieval
    from .preview import retrieval_panels
    from .session import RunSession

    config = _resolve_config(args, EMBED_KEYS)
    model = _model(args, config)
    split = _load_split(args.corpus, args.split)
    with RunSession("eval-retrieval", config, args.out, args.message) as run:
        _say(args, f"🔎 Indexing {len(split)} documents ({args.split})")
        embedded = embed_split(
            model, split, config.use_cmae, config.embedding_batch_size, config.deterministic
        )
        report = evaluate_retrieval(embedded, model_digest=model.digest())
        path = run.write_report("retrieval", report.format(), report.to_dict())
        if args.panels > 0:
            _, query_modality, index_modality = next(s for s in RETRIEVAL_SETTINGS if s[0] == args.panel_setting)
            panels = retrieval_panels(
                split, embedded, run.path("panels"), args.panels,
                query_modality=query_modality, index_modality=index_modality, seed=config.seed,
            )
            _say(args, f"🖼️  {len(panels)} panels in {run.path('panels')}")
    _say(args, report.format())
    _say(args, f"✅ {path}")
    return 0


def cmd_linear_probe(args) -> int:
    from .evaluation import embed_split, linear_probe
    from .session import RunSession

    config = _resolve_config(args, PROBE_KEYS)
    model = _model(args, config)
    train_split, test_split = _load_split(args.corpus, "train"), _load_split(args.corpus, "test")
    with RunSession("linear-probe", config, args.out, args.message) as run:
        train_emb = embed_split(model, train_split, config.use_cmae, config.embedding_batch_size, config.deterministic)
        test_emb = embed_split(model, test_split, config.use_cmae, config.embedding_batch_size, config.deterministic)
        result = linear_probe(
            train_emb.get(args.modality),
            train_emb.labels,
            test_emb.get(args.modality),
            test_emb.labels,
            steps=config.probe_steps,
            lr=config.probe_lr,
            seed=config.seed,
        )
        text = (
            f"modality = {args.modality}\nclasses = {result.num_classes}\n"
            f"train_accuracy = {result.train_accuracy:.4f}\ntest_accuracy = {result.test_accuracy:.4f}"
        )
        path = run.write_report("probe", text, {"modality": args.modality, **vars(result)})
    _say(args, f"✅ linear probe ({args.modality}): {100 * result.test_accuracy:.2f}% -> {path}")
    return 0


def cmd_export_embeddings(args) -> int:
    from .evaluation import build_index, embed_split, export_embeddings
    from .session import RunSession

    config = _resolve_config(args, EMBED_KEYS)
    model = _model(args, config)
    split = _load_split(args.corpus, args.split)
    modalities: List[str] = args.modality or ["vision", "language", "multimodal"]
    with RunSession("export-embeddings", config, args.out, args.message) as run:
        embedded = embed_split(model, split, config.use_cmae, config.embedding_batch_size, config.deterministic)
        for modality in modalities:
            index = build_index(model, split, modality, embedded=embedded)
            path = export_embeddings(index, run.path(f"embeddings_{args.split}_{modality}.gemb"))
            _say(args, f"✅ {path} ({len(index)} x {index.embeddings.shape[1]})")
    return 0


def cmd_gradcheck(args) -> int:
    from .exceptions import GradcheckFailure
    from .session import RunSession
    from .trainer import gradcheck_setting

    with RunSession("gradcheck", out=args.out) as run:
        _say(args, f"🧮 gradcheck {args.setting} (dim {args.dim}, batch {args.batch}, float64)")
        report = gradcheck_setting(
            args.setting,
            dim=args.dim,
            batch_size=args.batch,
            seed=args.seed,
            tolerance=args.tolerance,
            max_entries_per_leaf=args.entries or None,
            l2u_target_mode=args.l2u_target,
            queue_size=args.queue,
        )
        run.write_report(
            "gradcheck",
            report.format(),
            {
                "setting": args.setting,
                "passed": report.passed,
                "max_error": report.max_error,
                "checked_entries": report.checked_entries,
                "queue_size": args.queue,
                "errors": report.errors,
            },
        )
    if not report.passed:
        worst = max(report.errors, key=report.errors.get)
        raise GradcheckFailure(
            f"{worst}: relative error {report.errors[worst]:.3e} exceeds {args.tolerance:g}"
        )
    _say(args, f"✅ passed, max relative error {report.max_error:.3e} over {report.checked_entries} entries")
    return 0


def cmd_preview(args) -> int:
    from .datagen import load_split
    from .preview import category_gif, contact_sheet
    from .session import RunSession

    split = load_split(args.corpus, args.split)
    with RunSession("preview", out=args.out) as run:
        if args.kind == "sheet":
            path = contact_sheet(split, run.path(f"{args.split}_sheet.png"), per_class=args.per_class)
        else:
            path = category_gif(
                split, run.path(f"{args.split}_categories.gif"), per_class=args.per_class, duration=args.duration
            )
    _say(args, f"📹 {path}")
    return 0


COMMANDS = {
    "gen-corpus": cmd_gen_corpus,
    "pretrain": cmd_pretrain,
    "eval-fewshot": cmd_eval_fewshot,
    "eval-retrieval": cmd_eval_retrieval,
    "linear-probe": cmd_linear_probe,
    "export-embeddings": cmd_export_embeddings,
    "gradcheck": cmd_gradcheck,
    "preview": cmd_preview,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    # the run.log handler lowers the package level; stderr keeps its own
    console = logging.StreamHandler()
    console.setLevel(logging.DEBUG if args.verbose else (logging.ERROR if args.quiet else logging.WARNING))
    logging.basicConfig(level=console.level, format="%(levelname)s %(name)s: %(message)s", handlers=[console])

    from .exceptions import DocPairError

    try:
        return COMMANDS[args.command](args)
    except DocPairError as e:
        print(f"❌ {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except KeyboardInterrupt:
        print("\n⚠️  Interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())

# EOF
