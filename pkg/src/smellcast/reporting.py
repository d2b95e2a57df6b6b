"""Report files: delimited text plus rendered figures.

Every writer here is deterministic: entity lines are sorted, floats are
written with repr() so they round-trip exactly, headers follow a fixed
field order, and the seed is recorded in every header.  Each text format
has a matching parser, so written files can be re-read.

Figures are rendered with the Agg backend into PNG files next to the
delimited output.  The PNG metadata is pinned so identical inputs give
byte-identical images.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

from .classifier import PredictionSet
from .errors import ParseError
from .evaluation import MetricsReport
from .graph import DependencyGraph, NodeId
from .smells import (
    CYCLIC_DEPENDENCY,
    HUB_LIKE,
    AnticipatedSmells,
    detect_hubs,
)

_PNG_METADATA = {"Software": "smellcast"}

_METRIC_FIELDS = ("precision", "recall", "f1", "weighted_f", "tp", "fp", "fn", "tn")


def _header(kind: str, rest: str, seed: int) -> list[str]:
    first = f"#{kind} {rest}".rstrip()
    return [first, f"#seed {seed}"]


# ---------------------------------------------------------------- predictions


def serialize_predictions(pred: PredictionSet, *, seed: int) -> str:
    lines = _header("predictions", " ".join(pred.versions), seed)
    lines.append(f"#threshold {pred.threshold!r}")
    lines.append("source\ttarget\tprobability\tpredicted")
    for (u, v), p in zip(pred.pairs, pred.probabilities):
        lines.append(f"{u}\t{v}\t{p!r}\t{int(p >= pred.threshold)}")
    return "\n".join(lines) + "\n"


def parse_predictions(text: str, *, path: str | None = None) -> PredictionSet:
    versions: tuple[str, ...] = ()
    threshold: float | None = None
    pairs: list[tuple[NodeId, NodeId]] = []
    probabilities: list[float] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(" ")
            if key == "predictions":
                versions = tuple(value.split())
            elif key == "threshold":
                threshold = float(value)
            continue
        if not saw_header:
            if line != "source\ttarget\tprobability\tpredicted":
                raise ParseError("missing prediction column header", path=path, line=lineno)
            saw_header = True
            continue
        cells = line.split("\t")
        if len(cells) != 4:
            raise ParseError(f"expected 4 columns, got {len(cells)}", path=path, line=lineno)
        try:
            p = float(cells[2])
            hard = int(cells[3])
        except ValueError as exc:
            raise ParseError(f"bad numeric value: {exc}", path=path, line=lineno) from None
        if threshold is None:
            raise ParseError("#threshold header must precede rows", path=path, line=lineno)
        if hard != int(p >= threshold):
            raise ParseError(
                f"predicted flag {hard} contradicts probability {p!r} at threshold {threshold!r}",
                path=path,
                line=lineno,
            )
        pairs.append((cells[0], cells[1]))
        probabilities.append(p)
    if threshold is None or not saw_header:
        raise ParseError("missing prediction header", path=path, line=1)
    return PredictionSet(tuple(pairs), tuple(probabilities), threshold, versions)


def load_predictions(path: str | Path) -> PredictionSet:
    path = Path(path)
    return parse_predictions(path.read_text(encoding="utf-8"), path=str(path))


def save_predictions(pred: PredictionSet, path: str | Path, *, seed: int) -> None:
    Path(path).write_text(serialize_predictions(pred, seed=seed), encoding="utf-8")


# --------------------------------------------------------------- smell report


def serialize_smells(smells: AnticipatedSmells, *, seed: int) -> str:
    lines = _header("smells", smells.smell_kind, seed)
    lines.append(f"#versions {' '.join(smells.versions)}".rstrip())
    lines.append(f"#model {smells.model_id}".rstrip())
    if smells.smell_kind == CYCLIC_DEPENDENCY:
        lines.append(f"#max_cycles {smells.max_cycles}")
        lines.append(f"#truncated {int(smells.truncated)}")
        for cycle in sorted(smells.cycles):
            lines.append("cycle\t" + "\t".join(cycle))
    else:
        lines.append(f"#fraction {smells.fraction!r}")
        for node in sorted(smells.nodes):
            lines.append(f"node\t{node}")
    for u, v in sorted(smells.triggering_edges):
        lines.append(f"edge\t{u}\t{v}")
    return "\n".join(lines) + "\n"


def parse_smells(text: str, *, path: str | None = None) -> AnticipatedSmells:
    kind = ""
    versions: tuple[str, ...] = ()
    model_id = ""
    fraction: float | None = None
    max_cycles: int | None = None
    truncated = False
    cycles: list[tuple[NodeId, ...]] = []
    nodes: list[NodeId] = []
    edges: list[tuple[NodeId, NodeId]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(" ")
            if key == "smells":
                kind = value
            elif key == "versions":
                versions = tuple(value.split())
            elif key == "model":
                model_id = value
            elif key == "fraction":
                fraction = float(value)
            elif key == "max_cycles":
                max_cycles = int(value)
            elif key == "truncated":
                truncated = bool(int(value))
            continue
        cells = line.split("\t")
        if cells[0] == "cycle" and len(cells) >= 3:
            cycles.append(tuple(cells[1:]))
        elif cells[0] == "node" and len(cells) == 2:
            nodes.append(cells[1])
        elif cells[0] == "edge" and len(cells) == 3:
            edges.append((cells[1], cells[2]))
        else:
            raise ParseError(f"unrecognized smell line {line!r}", path=path, line=lineno)
    if not kind:
        raise ParseError("missing #smells header", path=path, line=1)
    return AnticipatedSmells(
        smell_kind=kind,
        triggering_edges=frozenset(edges),
        cycles=tuple(cycles),
        nodes=tuple(nodes),
        versions=versions,
        model_id=model_id,
        fraction=fraction,
        max_cycles=max_cycles,
        truncated=truncated,
    )


def load_smells(path: str | Path) -> AnticipatedSmells:
    path = Path(path)
    return parse_smells(path.read_text(encoding="utf-8"), path=str(path))


def save_smells(smells: AnticipatedSmells, path: str | Path, *, seed: int) -> None:
    Path(path).write_text(serialize_smells(smells, seed=seed), encoding="utf-8")


# -------------------------------------------------------------------- metrics


def serialize_metrics(report: MetricsReport, *, seed: int, versions: Sequence[str] = ()) -> str:
    lines = _header("metrics", report.subject, seed)
    lines.append(f"#versions {' '.join(versions)}".rstrip())
    for name in _METRIC_FIELDS:
        value = getattr(report, name)
        rendered = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{name}\t{rendered}")
    return "\n".join(lines) + "\n"


def parse_metrics(text: str, *, path: str | None = None) -> MetricsReport:
    subject = ""
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(" ")
            if key == "metrics":
                subject = value
            continue
        cells = line.split("\t")
        if len(cells) != 2 or cells[0] not in _METRIC_FIELDS:
            raise ParseError(f"unrecognized metrics line {line!r}", path=path, line=lineno)
        fields[cells[0]] = cells[1]
    missing = [name for name in _METRIC_FIELDS if name not in fields]
    if not subject or missing:
        raise ParseError(f"incomplete metrics report (missing {missing})", path=path, line=1)
    return MetricsReport(
        subject=subject,
        precision=float(fields["precision"]),
        recall=float(fields["recall"]),
        f1=float(fields["f1"]),
        weighted_f=float(fields["weighted_f"]),
        tp=int(fields["tp"]),
        fp=int(fields["fp"]),
        fn=int(fields["fn"]),
        tn=int(fields["tn"]),
    )


def load_metrics(path: str | Path) -> MetricsReport:
    path = Path(path)
    return parse_metrics(path.read_text(encoding="utf-8"), path=str(path))


def save_metrics(
    report: MetricsReport, path: str | Path, *, seed: int, versions: Sequence[str] = ()
) -> None:
    Path(path).write_text(serialize_metrics(report, seed=seed, versions=versions), encoding="utf-8")


def serialize_combined_metrics(reports: Sequence[MetricsReport], *, seed: int) -> str:
    lines = _header("metrics", "combined", seed)
    lines.append("subject\t" + "\t".join(_METRIC_FIELDS))
    for report in reports:
        cells = [report.subject]
        for name in _METRIC_FIELDS:
            value = getattr(report, name)
            cells.append(repr(value) if isinstance(value, float) else str(value))
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def parse_combined_metrics(text: str, *, path: str | None = None) -> list[MetricsReport]:
    reports: list[MetricsReport] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.startswith("#"):
            continue
        if not saw_header:
            if line != "subject\t" + "\t".join(_METRIC_FIELDS):
                raise ParseError("missing combined metrics header", path=path, line=lineno)
            saw_header = True
            continue
        cells = line.split("\t")
        if len(cells) != len(_METRIC_FIELDS) + 1:
            raise ParseError(f"expected {len(_METRIC_FIELDS) + 1} columns", path=path, line=lineno)
        reports.append(
            MetricsReport(
                subject=cells[0],
                precision=float(cells[1]),
                recall=float(cells[2]),
                f1=float(cells[3]),
                weighted_f=float(cells[4]),
                tp=int(cells[5]),
                fp=int(cells[6]),
                fn=int(cells[7]),
                tn=int(cells[8]),
            )
        )
    return reports


def save_combined_metrics(reports: Sequence[MetricsReport], path: str | Path, *, seed: int) -> None:
    Path(path).write_text(serialize_combined_metrics(reports, seed=seed), encoding="utf-8")


# --------------------------------------------------------- information gains


def serialize_gains(gains: Sequence[tuple[str, float]], *, seed: int, bins: int) -> str:
    lines = _header("gains", "", seed)
    lines.append(f"#bins {bins}")
    lines.append("feature\tgain")
    for name, gain in gains:
        lines.append(f"{name}\t{gain!r}")
    return "\n".join(lines) + "\n"


def parse_gains(text: str, *, path: str | None = None) -> list[tuple[str, float]]:
    gains: list[tuple[str, float]] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line or line.startswith("#"):
            continue
        if not saw_header:
            if line != "feature\tgain":
                raise ParseError("missing gains header", path=path, line=lineno)
            saw_header = True
            continue
        cells = line.split("\t")
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, got {len(cells)}", path=path, line=lineno)
        gains.append((cells[0], float(cells[1])))
    return gains


def save_gains(gains: Sequence[tuple[str, float]], path: str | Path, *, seed: int, bins: int) -> None:
    Path(path).write_text(serialize_gains(gains, seed=seed, bins=bins), encoding="utf-8")


# -------------------------------------------------------------------- figures


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_degree_profile(
    g: DependencyGraph,
    path: str | Path,
    *,
    fraction: float,
    highlight: Iterable[NodeId] = (),
) -> None:
    """Scatter of per-node (in, out) degrees with the hub region marked."""
    plt = _pyplot()
    stats = g.degree_stats()
    ordered = sorted(g.nodes)
    hubs = detect_hubs(g, fraction).nodes
    highlight = set(highlight)
    xs = [stats.in_degree[n] for n in ordered]
    ys = [stats.out_degree[n] for n in ordered]
    colors = [
        "tab:red" if n in hubs else ("tab:orange" if n in highlight else "tab:blue")
        for n in ordered
    ]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.scatter(xs, ys, c=colors, s=30, alpha=0.8)
    ax.axvline(stats.median_in, color="gray", linestyle="--", linewidth=1, label="median in")
    ax.axhline(stats.median_out, color="gray", linestyle=":", linewidth=1, label="median out")
    ax.set_xlabel("in-degree")
    ax.set_ylabel("out-degree")
    ax.set_title(f"degree profile of {g.version_id} (fraction={fraction})")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(str(path), metadata=_PNG_METADATA)
    plt.close(fig)


def plot_information_gain(gains: Sequence[tuple[str, float]], path: str | Path) -> None:
    """Horizontal bars, best-ranked feature on top."""
    plt = _pyplot()
    names = [name for name, _ in gains]
    values = [gain for _, gain in gains]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    positions = range(len(names))
    ax.barh(positions, values, color="tab:blue")
    ax.set_yticks(list(positions))
    ax.set_yticklabels(names)
    ax.invert_yaxis()
    ax.set_xlabel("information gain (bits)")
    ax.set_title("feature ranking")
    fig.tight_layout()
    fig.savefig(str(path), metadata=_PNG_METADATA)
    plt.close(fig)


def plot_probabilities(pred: PredictionSet, path: str | Path) -> None:
    """Histogram of predicted probabilities with the decision threshold."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.hist(list(pred.probabilities), bins=20, range=(0.0, 1.0), color="tab:blue")
    ax.axvline(pred.threshold, color="tab:red", linestyle="--", label=f"threshold {pred.threshold}")
    ax.set_xlabel("predicted probability")
    ax.set_ylabel("pairs")
    ax.set_title("edge appearance probabilities")
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(str(path), metadata=_PNG_METADATA)
    plt.close(fig)


def plot_metrics(reports: Sequence[MetricsReport], path: str | Path) -> None:
    """Grouped bars of the four ratio metrics per scored subject."""
    plt = _pyplot()
    metric_names = ("precision", "recall", "f1", "weighted_f")
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    width = 0.8 / max(len(reports), 1)
    for i, report in enumerate(reports):
        values = [getattr(report, name) for name in metric_names]
        positions = [j + i * width for j in range(len(metric_names))]
        ax.bar(positions, values, width=width, label=report.subject)
    ax.set_xticks([j + 0.4 - width / 2 for j in range(len(metric_names))])
    ax.set_xticklabels(metric_names)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("prediction quality")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(str(path), metadata=_PNG_METADATA)
    plt.close(fig)
