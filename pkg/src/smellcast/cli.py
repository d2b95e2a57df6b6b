"""Command-line interface.

Each pipeline phase is its own subcommand so intermediate artifacts can
be produced, inspected, and fed back in.  ``pipeline`` chains them all.
Exit codes: 0 success, 1 invalid arguments or configuration, 2 broken
or degenerate input data.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .classifier import TrainConfig, load_model, predict, save_model, train
from .dataset import (
    Dataset,
    Instance,
    build_test_set,
    build_training_set,
    label_for_evaluation,
    load_dataset,
    save_dataset,
)
from .content import load_corpus
from .errors import DataError, ValidationError
from .evaluation import edge_metrics, smell_metrics
from .features import select_features
from .graph import GRAPH_FORMATS, load_graph, save_graph
from .pipeline import SMELL_CHOICES, load_config_file, make_config, run_pipeline
from .reporting import (
    load_predictions,
    save_combined_metrics,
    save_metrics,
    save_predictions,
    save_smells,
)
from .smells import DEFAULT_FRACTION, DEFAULT_MAX_CYCLES, cycle_filter, hub_filter


def _add_graph_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--graph-format",
        choices=GRAPH_FORMATS,
        default="edge-list",
        help="format of the input graph files (default: edge-list)",
    )


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=42, help="seed recorded in report headers")


def _cmd_convert(args: argparse.Namespace) -> int:
    g = load_graph(args.input, args.graph_format, version_id=args.version_id)
    save_graph(g, args.output)
    print(f"wrote {args.output} ({len(g.nodes)} nodes, {len(g.edges)} edges)")
    return 0


def _cmd_features(args: argparse.Namespace) -> int:
    corpus_prev = load_corpus(args.corpus_prev) if args.corpus_prev else None
    corpus_curr = load_corpus(args.corpus_curr) if args.corpus_curr else None
    g_curr = load_graph(args.curr, args.graph_format)
    if args.prev:
        g_prev = load_graph(args.prev, args.graph_format)
        ds = build_training_set(g_prev, g_curr, corpus_prev, hierarchy=args.hierarchy)
    else:
        ds = build_test_set(g_curr, corpus_curr, hierarchy=args.hierarchy)
    save_dataset(ds, args.out, extra_annotations={"seed": str(args.seed)})
    print(f"wrote {args.out} ({len(ds.instances)} instances, {len(ds.feature_names)} features)")
    return 0


def _cmd_train(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data)
    if args.top_k is not None or args.min_gain is not None:
        ds = select_features(ds, top_k=args.top_k, min_gain=args.min_gain, bins=args.bins)
    config = TrainConfig(
        l2_lambda=args.l2_lambda,
        max_iters=args.max_iters,
        tolerance=args.tolerance,
        class_weight_mode=args.class_weight_mode,
        threshold=args.threshold,
        seed=args.seed,
    )
    model = train(ds, config)
    save_model(model, args.out)
    print(f"wrote {args.out} ({model.iterations} iterations, final loss {model.final_loss!r})")
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    ds = load_dataset(args.data)
    if ds.feature_names != model.feature_names and set(model.feature_names) <= set(ds.feature_names):
        indices = [ds.feature_names.index(name) for name in model.feature_names]
        ds = ds.project(indices)
    pred = predict(model, ds)
    save_predictions(pred, args.out, seed=args.seed)
    print(f"wrote {args.out} ({len(pred.predicted_edges())} of {len(pred.pairs)} pairs predicted)")
    return 0


def _smell_reports(args: argparse.Namespace, g_curr, predicted_edges, model_id: str) -> dict:
    reports = {}
    if args.smell in ("cycles", "all"):
        reports["cycles"] = cycle_filter(
            g_curr, predicted_edges, args.max_cycles, model_id=model_id
        )
    if args.smell in ("hubs", "all"):
        reports["hubs"] = hub_filter(g_curr, predicted_edges, args.fraction, model_id=model_id)
    return reports


def _cmd_smells(args: argparse.Namespace) -> int:
    g_curr = load_graph(args.curr, args.graph_format)
    pred = load_predictions(args.predictions)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    reports = _smell_reports(args, g_curr, pred.predicted_edges(), model_id="")
    for key, smells in reports.items():
        target = out_dir / f"smells_{key}.txt"
        save_smells(smells, target, seed=args.seed)
        entities = len(smells.cycles) if key == "cycles" else len(smells.nodes)
        print(f"wrote {target} ({entities} anticipated, {len(smells.triggering_edges)} triggering edges)")
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    g_curr = load_graph(args.curr, args.graph_format)
    g_next = load_graph(args.next, args.graph_format)
    pred = load_predictions(args.predictions)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    bare = Dataset(
        feature_names=(),
        instances=tuple(Instance(u, v, (), None) for u, v in pred.pairs),
        kind="test",
        versions=pred.versions or (g_curr.version_id,),
    )
    truth = label_for_evaluation(bare, g_next)
    versions = (g_curr.version_id, g_next.version_id)
    metrics = {"edges": edge_metrics(pred, truth)}
    reports = _smell_reports(args, g_curr, pred.predicted_edges(), model_id="")
    for key, smells in reports.items():
        metrics[key] = smell_metrics(smells, g_curr, g_next, args.fraction)
    ordered = [key for key in ("edges", "cycles", "hubs") if key in metrics]
    for key in ordered:
        target = out_dir / f"metrics_{key}.txt"
        save_metrics(metrics[key], target, seed=args.seed, versions=versions)
        print(f"wrote {target} (precision {metrics[key].precision!r}, recall {metrics[key].recall!r})")
    combined = out_dir / "metrics.tsv"
    save_combined_metrics([metrics[key] for key in ordered], combined, seed=args.seed)
    print(f"wrote {combined}")
    return 0


def _cmd_pipeline(args: argparse.Namespace) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        "prev": args.prev,
        "curr": args.curr,
        "next": args.next,
        "corpus_prev": args.corpus_prev,
        "corpus_curr": args.corpus_curr,
        "out": args.out,
        "graph_format": args.graph_format_override,
        "smell": args.smell,
        "fraction": args.fraction,
        "max_cycles": args.max_cycles,
        "bins": args.bins,
        "top_k": args.top_k,
        "min_gain": args.min_gain,
        "hierarchy": args.hierarchy,
        "l2_lambda": args.l2_lambda,
        "max_iters": args.max_iters,
        "tolerance": args.tolerance,
        "class_weight_mode": args.class_weight_mode,
        "threshold": args.threshold,
        "seed": args.seed,
    }
    cfg = make_config(file_values, overrides)
    result = run_pipeline(cfg)
    for message in result.warnings:
        print(f"warning: {message}", file=sys.stderr)
    for path in result.files:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="smellcast",
        description="Predict dependency growth and anticipate architectural smells.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="normalize a graph file to the canonical edge list")
    p.add_argument("input")
    p.add_argument("output")
    _add_graph_format(p)
    p.add_argument("--version-id", default=None, help="override the version identifier")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("features", help="build a feature table for a version pair or a test set")
    p.add_argument("--prev", help="previous-version graph (omit to build a test set)")
    p.add_argument("--curr", required=True, help="current-version graph")
    p.add_argument("--corpus-prev", help="token corpus of the previous version")
    p.add_argument("--corpus-curr", help="token corpus of the current version")
    p.add_argument("--hierarchy", action=argparse.BooleanOptionalAction, default=True,
                   help="fold sub-package content into parent bags")
    p.add_argument("--out", required=True)
    _add_graph_format(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("train", help="fit the classifier on a labeled feature table")
    p.add_argument("--data", required=True, help="training feature table")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--l2-lambda", type=float, default=1e-3)
    p.add_argument("--max-iters", type=int, default=5000)
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--class-weight-mode", choices=("balanced", "uniform"), default="balanced")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--top-k", type=int, default=None, help="keep the k highest-gain features")
    p.add_argument("--min-gain", type=float, default=None,
                   help="keep features with gain strictly above this")
    p.add_argument("--bins", type=int, default=10, help="bins for the gain computation")
    _add_seed(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("predict", help="score pairs with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="feature table to score")
    p.add_argument("--out", required=True)
    _add_seed(p)
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("smells", help="filter predicted dependencies into anticipated smells")
    p.add_argument("--curr", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--smell", choices=SMELL_CHOICES, default="all")
    p.add_argument("--fraction", type=float, default=DEFAULT_FRACTION)
    p.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES)
    p.add_argument("--out", required=True, help="output directory")
    _add_graph_format(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_smells)

    p = sub.add_parser("evaluate", help="score predictions and smells against the next version")
    p.add_argument("--curr", required=True)
    p.add_argument("--next", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--smell", choices=SMELL_CHOICES, default="all")
    p.add_argument("--fraction", type=float, default=DEFAULT_FRACTION)
    p.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES)
    p.add_argument("--out", required=True, help="output directory")
    _add_graph_format(p)
    _add_seed(p)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("pipeline", help="run every phase over a version triple")
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--prev")
    p.add_argument("--curr")
    p.add_argument("--next")
    p.add_argument("--corpus-prev")
    p.add_argument("--corpus-curr")
    p.add_argument("--out")
    p.add_argument("--graph-format", dest="graph_format_override", choices=GRAPH_FORMATS,
                   default=None)
    p.add_argument("--smell", choices=SMELL_CHOICES, default=None)
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--max-cycles", type=int, default=None)
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--min-gain", type=float, default=None)
    p.add_argument("--hierarchy", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--l2-lambda", type=float, default=None)
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.add_argument("--class-weight-mode", choices=("balanced", "uniform"), default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
