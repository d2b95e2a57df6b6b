"""End-to-end run over a version triple.

The pipeline loads v_{n-1} and v_n (plus optional token corpora and an
optional realized v_{n+1}), builds the training and test sets, ranks
and optionally selects features, trains the classifier, predicts which
absent dependencies will appear, filters the predictions into
anticipated smells, and writes delimited reports plus PNG figures into
one output directory.  With v_{n+1} present it also scores the edge
predictions and the anticipated smells.

Configuration is a flat key=value file; command-line flags override
file values, which override the defaults below.  Everything downstream
is deterministic, so re-running with identical inputs reproduces every
output byte for byte.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .classifier import PredictionModel, PredictionSet, TrainConfig, predict, save_model, train
from .content import ContentCorpus, check_corpus_against_graph, load_corpus
from .dataset import Dataset, build_test_set, build_training_set, label_for_evaluation, save_dataset
from .errors import DataError, ValidationError
from .evaluation import MetricsReport, edge_metrics, smell_metrics
from .features import information_gain, select_features
from .graph import GRAPH_FORMATS, DependencyGraph, diff_graphs, load_graph
from .reporting import (
    plot_degree_profile,
    plot_information_gain,
    plot_metrics,
    plot_probabilities,
    save_combined_metrics,
    save_gains,
    save_metrics,
    save_predictions,
    save_smells,
)
from .smells import (
    DEFAULT_FRACTION,
    DEFAULT_MAX_CYCLES,
    AnticipatedSmells,
    cycle_filter,
    hub_filter,
)

logger = logging.getLogger(__name__)

SMELL_CHOICES = ("cycles", "hubs", "all")


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_optional_int(value: str) -> int | None:
    return None if value.lower() in ("", "none") else int(value)


def _parse_optional_float(value: str) -> float | None:
    return None if value.lower() in ("", "none") else float(value)


def _parse_optional_str(value: str) -> str | None:
    return None if value == "" else value


_FIELD_PARSERS = {
    "prev": _parse_optional_str,
    "curr": _parse_optional_str,
    "next": _parse_optional_str,
    "corpus_prev": _parse_optional_str,
    "corpus_curr": _parse_optional_str,
    "out": str,
    "graph_format": str,
    "smell": str,
    "fraction": float,
    "max_cycles": int,
    "bins": int,
    "top_k": _parse_optional_int,
    "min_gain": _parse_optional_float,
    "hierarchy": _parse_bool,
    "l2_lambda": float,
    "max_iters": int,
    "tolerance": float,
    "class_weight_mode": str,
    "threshold": float,
    "seed": int,
}


@dataclass
class PipelineConfig:
    prev: str | None = None
    curr: str | None = None
    next: str | None = None
    corpus_prev: str | None = None
    corpus_curr: str | None = None
    out: str = "reports"
    graph_format: str = "edge-list"
    smell: str = "all"
    fraction: float = DEFAULT_FRACTION
    max_cycles: int = DEFAULT_MAX_CYCLES
    bins: int = 10
    top_k: int | None = None
    min_gain: float | None = None
    hierarchy: bool = True
    l2_lambda: float = 1e-3
    max_iters: int = 5000
    tolerance: float = 1e-8
    class_weight_mode: str = "balanced"
    threshold: float = 0.5
    seed: int = 42

    def validate(self) -> None:
        if not self.prev or not self.curr:
            raise ValidationError("the pipeline needs both --prev and --curr graphs")
        if self.graph_format not in GRAPH_FORMATS:
            raise ValidationError(
                f"graph_format must be one of {GRAPH_FORMATS}, got {self.graph_format!r}"
            )
        if self.smell not in SMELL_CHOICES:
            raise ValidationError(f"smell must be one of {SMELL_CHOICES}, got {self.smell!r}")
        if self.top_k is not None and self.min_gain is not None:
            raise ValidationError("top_k and min_gain are mutually exclusive")
        if not 0.0 < self.fraction <= 1.0:
            raise ValidationError(f"fraction must be in (0, 1], got {self.fraction}")
        self.train_config()

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            l2_lambda=self.l2_lambda,
            max_iters=self.max_iters,
            tolerance=self.tolerance,
            class_weight_mode=self.class_weight_mode,
            threshold=self.threshold,
            seed=self.seed,
        )


def parse_config_file(text: str, *, path: str | None = None) -> dict[str, object]:
    """Flat ``key = value`` lines; # starts a comment; unknown keys fail."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"{path or '<config>'}:{lineno}: expected key=value, got {line!r}")
        key = key.strip()
        value = value.strip()
        parser = _FIELD_PARSERS.get(key)
        if parser is None:
            raise ValidationError(f"{path or '<config>'}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = parser(value)
        except ValueError as exc:
            raise ValidationError(f"{path or '<config>'}:{lineno}: bad value for {key}: {exc}") from None
    return values


def load_config_file(path: str | Path) -> dict[str, object]:
    path = Path(path)
    return parse_config_file(path.read_text(encoding="utf-8"), path=str(path))


def make_config(
    file_values: dict[str, object] | None = None,
    overrides: dict[str, object] | None = None,
) -> PipelineConfig:
    """Defaults, overlaid with config-file values, overlaid with CLI flags."""
    merged: dict[str, object] = {}
    merged.update(file_values or {})
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    unknown = set(merged) - {f.name for f in dataclasses.fields(PipelineConfig)}
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    cfg = PipelineConfig(**merged)  # type: ignore[arg-type]
    cfg.validate()
    return cfg


@dataclass
class PipelineResult:
    out_dir: Path
    files: list[Path] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    model: PredictionModel | None = None
    predictions: PredictionSet | None = None
    smells: dict[str, AnticipatedSmells] = field(default_factory=dict)
    metrics: dict[str, MetricsReport] = field(default_factory=dict)


def _load_inputs(
    cfg: PipelineConfig,
) -> tuple[DependencyGraph, DependencyGraph, DependencyGraph | None, ContentCorpus | None, ContentCorpus | None]:
    g_prev = load_graph(cfg.prev, cfg.graph_format)
    g_curr = load_graph(cfg.curr, cfg.graph_format)
    g_next = load_graph(cfg.next, cfg.graph_format) if cfg.next else None
    corpus_prev = load_corpus(cfg.corpus_prev) if cfg.corpus_prev else None
    corpus_curr = load_corpus(cfg.corpus_curr) if cfg.corpus_curr else None
    return g_prev, g_curr, g_next, corpus_prev, corpus_curr


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    cfg.validate()
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = PipelineResult(out_dir=out_dir)

    g_prev, g_curr, g_next, corpus_prev, corpus_curr = _load_inputs(cfg)
    for corpus, graph in ((corpus_prev, g_prev), (corpus_curr, g_curr)):
        if corpus is not None:
            unknown = check_corpus_against_graph(corpus, graph.nodes)
            if unknown:
                _warn(result, f"corpus {corpus.version_id!r} mentions nodes missing from "
                              f"{graph.version_id!r}: {', '.join(unknown[:5])}")
    if not diff_graphs(g_prev, g_curr).added_edges:
        _warn(result, f"no dependencies were added between {g_prev.version_id!r} and "
                      f"{g_curr.version_id!r}; this triple gives the model no growth signal")

    train_ds = build_training_set(g_prev, g_curr, corpus_prev, hierarchy=cfg.hierarchy)
    positives, negatives = train_ds.label_counts()
    if positives == 0 or negatives == 0:
        raise DataError(
            f"training pairs from {g_prev.version_id!r}/{g_curr.version_id!r} form a single "
            f"class ({positives} positive, {negatives} negative); choose versions whose "
            "dependency graphs actually differ in connectivity"
        )

    gains = information_gain(train_ds, bins=cfg.bins)
    if cfg.top_k is not None or cfg.min_gain is not None:
        selected = select_features(train_ds, top_k=cfg.top_k, min_gain=cfg.min_gain, bins=cfg.bins)
        if not selected.feature_names:
            _warn(result, "feature selection discarded every feature; keeping the full set")
            selected = train_ds
    else:
        selected = train_ds

    model = train(selected, cfg.train_config())
    model_id = f"{g_prev.version_id}->{g_curr.version_id}"
    result.model = model

    test_ds = build_test_set(g_curr, corpus_curr, hierarchy=cfg.hierarchy)
    if selected.feature_names != test_ds.feature_names:
        indices = [test_ds.feature_names.index(name) for name in selected.feature_names]
        test_ds = test_ds.project(indices)
    pred = predict(model, test_ds)
    result.predictions = pred
    predicted_edges = pred.predicted_edges()

    if cfg.smell in ("cycles", "all"):
        result.smells["cycles"] = cycle_filter(
            g_curr, predicted_edges, cfg.max_cycles, model_id=model_id
        )
    if cfg.smell in ("hubs", "all"):
        result.smells["hubs"] = hub_filter(
            g_curr, predicted_edges, cfg.fraction, model_id=model_id
        )

    eval_ds: Dataset | None = None
    if g_next is not None:
        eval_ds = label_for_evaluation(test_ds, g_next)
        result.metrics["edges"] = edge_metrics(pred, eval_ds)
        if "cycles" in result.smells:
            result.metrics["cycles"] = smell_metrics(result.smells["cycles"], g_curr, g_next)
        if "hubs" in result.smells:
            result.metrics["hubs"] = smell_metrics(
                result.smells["hubs"], g_curr, g_next, cfg.fraction
            )

    _write_reports(cfg, result, g_curr, g_next, selected, test_ds, eval_ds, gains, pred)
    return result


def _warn(result: PipelineResult, message: str) -> None:
    result.warnings.append(message)
    logger.warning(message)


def _write_reports(
    cfg: PipelineConfig,
    result: PipelineResult,
    g_curr: DependencyGraph,
    g_next: DependencyGraph | None,
    train_ds: Dataset,
    test_ds: Dataset,
    eval_ds: Dataset | None,
    gains: list[tuple[str, float]],
    pred: PredictionSet,
) -> None:
    out_dir = result.out_dir
    seed = cfg.seed
    seed_note = {"seed": str(seed)}

    def emit(name: str, write) -> None:
        target = out_dir / name
        write(target)
        result.files.append(target)

    emit("training.tsv", lambda p: save_dataset(train_ds, p, extra_annotations=seed_note))
    emit("test.tsv", lambda p: save_dataset(test_ds, p, extra_annotations=seed_note))
    emit("gains.tsv", lambda p: save_gains(gains, p, seed=seed, bins=cfg.bins))
    emit("model.txt", lambda p: save_model(result.model, p))
    emit("predictions.tsv", lambda p: save_predictions(pred, p, seed=seed))
    if "cycles" in result.smells:
        emit("smells_cycles.txt", lambda p: save_smells(result.smells["cycles"], p, seed=seed))
    if "hubs" in result.smells:
        emit("smells_hubs.txt", lambda p: save_smells(result.smells["hubs"], p, seed=seed))

    if eval_ds is not None and g_next is not None:
        emit("eval.tsv", lambda p: save_dataset(eval_ds, p, extra_annotations=seed_note))
        score_versions = (g_curr.version_id, g_next.version_id)
        ordered = [key for key in ("edges", "cycles", "hubs") if key in result.metrics]
        for key in ordered:
            emit(f"metrics_{key}.txt", lambda p, k=key: save_metrics(
                result.metrics[k], p, seed=seed, versions=score_versions
            ))
        emit("metrics.tsv", lambda p: save_combined_metrics(
            [result.metrics[k] for k in ordered], p, seed=seed
        ))

    highlight = result.smells["hubs"].nodes if "hubs" in result.smells else ()
    emit("degree_profile.png", lambda p: plot_degree_profile(
        g_curr, p, fraction=cfg.fraction, highlight=highlight
    ))
    emit("information_gain.png", lambda p: plot_information_gain(gains, p))
    emit("probabilities.png", lambda p: plot_probabilities(pred, p))
    if result.metrics:
        ordered = [key for key in ("edges", "cycles", "hubs") if key in result.metrics]
        emit("metrics.png", lambda p: plot_metrics([result.metrics[k] for k in ordered], p))
