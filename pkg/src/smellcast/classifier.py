"""Class-weighted logistic regression for edge appearance.

The model is intentionally plain: z-standardized features, L2 penalty on
the weights (never the bias), per-class instance weights against label
imbalance, and full-batch gradient descent with Armijo backtracking.
Everything is deterministic; the seed is recorded for provenance only.

Constant feature columns are standardized to all-zero, so with a zero
initial vector their weights stay exactly 0 and never influence a
prediction.

Models serialize to a small text format::

    #model smellcast-logistic 1
    #seed 42
    #iterations 137
    #final_loss 0.34657359027997264
    #threshold 0.5
    #l2_lambda 0.001
    #class_weights 1.5 0.5
    #bias -0.25
    feature <TAB> mean <TAB> stddev <TAB> weight
    common_neighbors <TAB> ... <TAB> ... <TAB> ...

Floats are written with repr() and round-trip exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import Dataset
from .errors import DataError, ParseError, SchemaError, ValidationError
from .graph import NodeId

logger = logging.getLogger(__name__)

CLASS_WEIGHT_MODES = ("balanced", "uniform")
MODEL_FORMAT = "smellcast-logistic 1"

# Armijo sufficient-decrease constant and smallest step worth trying.
_ARMIJO = 1e-4
_MIN_STEP = 1e-20


@dataclass(frozen=True)
class TrainConfig:
    l2_lambda: float = 1e-3
    max_iters: int = 5000
    tolerance: float = 1e-8
    class_weight_mode: str = "balanced"
    threshold: float = 0.5
    seed: int = 42

    def __post_init__(self) -> None:
        if self.l2_lambda < 0:
            raise ValidationError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.max_iters < 1:
            raise ValidationError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tolerance <= 0:
            raise ValidationError(f"tolerance must be > 0, got {self.tolerance}")
        if self.class_weight_mode not in CLASS_WEIGHT_MODES:
            raise ValidationError(
                f"class_weight_mode must be one of {CLASS_WEIGHT_MODES}, "
                f"got {self.class_weight_mode!r}"
            )
        if not 0.0 < self.threshold < 1.0:
            raise ValidationError(f"threshold must be in (0, 1), got {self.threshold}")


@dataclass(frozen=True)
class PredictionModel:
    feature_names: tuple[str, ...]
    means: tuple[float, ...]
    stddevs: tuple[float, ...]
    weights: tuple[float, ...]
    bias: float
    class_weights: tuple[float, float]
    threshold: float
    l2_lambda: float
    seed: int
    iterations: int
    final_loss: float

    def __post_init__(self) -> None:
        k = len(self.feature_names)
        for name, values in (
            ("means", self.means),
            ("stddevs", self.stddevs),
            ("weights", self.weights),
        ):
            if len(values) != k:
                raise ValidationError(f"{name} has {len(values)} entries, expected {k}")


@dataclass(frozen=True)
class PredictionSet:
    pairs: tuple[tuple[NodeId, NodeId], ...]
    probabilities: tuple[float, ...]
    threshold: float
    versions: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.pairs) != len(self.probabilities):
            raise ValidationError("pairs and probabilities differ in length")

    @property
    def predicted_labels(self) -> tuple[bool, ...]:
        return tuple(p >= self.threshold for p in self.probabilities)

    def predicted_edges(self) -> list[tuple[NodeId, NodeId]]:
        """Pairs predicted to become dependencies, in input order."""
        return [pair for pair, p in zip(self.pairs, self.probabilities) if p >= self.threshold]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_gradient(
    X: np.ndarray,
    y: np.ndarray,
    sample_weights: np.ndarray,
    w: np.ndarray,
    b: float,
    l2_lambda: float,
) -> tuple[float, np.ndarray, float]:
    """Weighted mean logistic loss plus (lambda/2)*||w||^2, with its gradient.

    The per-instance loss is log(1 + exp(z)) - y*z, computed via logaddexp
    so large |z| cannot overflow.  The bias is not penalized.  Returns
    (loss, grad_w, grad_b).
    """
    n = X.shape[0]
    z = X @ w + b
    losses = np.logaddexp(0.0, z) - y * z
    loss = float(sample_weights @ losses / n + 0.5 * l2_lambda * (w @ w))
    residual = sample_weights * (_sigmoid(z) - y) / n
    grad_w = X.T @ residual + l2_lambda * w
    grad_b = float(residual.sum())
    return loss, grad_w, grad_b


def _standardize(X: np.ndarray, means: np.ndarray, stddevs: np.ndarray) -> np.ndarray:
    constant = stddevs == 0.0
    scales = np.where(constant, 1.0, stddevs)
    Xs = (X - means) / scales
    Xs[:, constant] = 0.0
    return Xs


def _matrix(ds: Dataset) -> np.ndarray:
    k = len(ds.feature_names)
    if not ds.instances:
        return np.zeros((0, k))
    X = np.array([inst.features for inst in ds.instances], dtype=float)
    if not np.isfinite(X).all():
        raise DataError("dataset contains non-finite feature values")
    return X


def train(ds: Dataset, config: TrainConfig | None = None) -> PredictionModel:
    """Fit the classifier on a fully labeled dataset.

    Raises DataError when the dataset is empty, unlabeled, or has only
    one class; a single-class set cannot anchor a decision boundary.
    """
    config = config or TrainConfig()
    if not ds.instances:
        raise DataError("cannot train on an empty dataset")
    if not ds.labeled:
        raise DataError("training needs a label on every instance")
    X = _matrix(ds)
    y = np.array([1.0 if inst.label else 0.0 for inst in ds.instances])
    n = len(y)
    n_pos = int(y.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError(
            f"training set holds a single class ({n_pos} positive, {n_neg} negative); "
            "pick a version pair whose graphs differ in connectivity"
        )

    means = X.mean(axis=0)
    # exact-equality constancy check; std() of a constant column can carry
    # rounding noise
    constant = np.array([bool((col == col[0]).all()) for col in X.T], dtype=bool)
    stddevs = X.std(axis=0)
    stddevs[constant] = 0.0
    Xs = _standardize(X, means, stddevs)

    if config.class_weight_mode == "balanced":
        w_pos = 2.0 * n_neg / n
        w_neg = 2.0 * n_pos / n
    else:
        w_pos = w_neg = 1.0
    sample_weights = np.where(y == 1.0, w_pos, w_neg)

    w = np.zeros(X.shape[1])
    b = 0.0
    loss, grad_w, grad_b = loss_and_gradient(Xs, y, sample_weights, w, b, config.l2_lambda)
    step = 1.0
    iterations = 0
    while iterations < config.max_iters:
        gnorm2 = float(grad_w @ grad_w) + grad_b * grad_b
        if gnorm2 == 0.0:
            break
        step = min(step * 2.0, 1e6)
        accepted = False
        while step > _MIN_STEP:
            cand_w = w - step * grad_w
            cand_b = b - step * grad_b
            cand_loss, cand_gw, cand_gb = loss_and_gradient(
                Xs, y, sample_weights, cand_w, cand_b, config.l2_lambda
            )
            if cand_loss <= loss - _ARMIJO * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        iterations += 1
        improvement = loss - cand_loss
        w, b = cand_w, cand_b
        loss, grad_w, grad_b = cand_loss, cand_gw, cand_gb
        if improvement < config.tolerance:
            break
    else:
        logger.debug("gradient descent hit max_iters=%d", config.max_iters)

    return PredictionModel(
        feature_names=ds.feature_names,
        means=tuple(float(m) for m in means),
        stddevs=tuple(float(s) for s in stddevs),
        weights=tuple(float(x) for x in w),
        bias=float(b),
        class_weights=(float(w_pos), float(w_neg)),
        threshold=config.threshold,
        l2_lambda=config.l2_lambda,
        seed=config.seed,
        iterations=iterations,
        final_loss=float(loss),
    )


def predict(model: PredictionModel, ds: Dataset) -> PredictionSet:
    """Score every instance of ``ds`` with the trained model."""
    if ds.feature_names != model.feature_names:
        raise SchemaError(
            f"dataset features {list(ds.feature_names)} do not match "
            f"model features {list(model.feature_names)}"
        )
    X = _matrix(ds)
    Xs = _standardize(X, np.array(model.means), np.array(model.stddevs))
    z = Xs @ np.array(model.weights) + model.bias
    probabilities = _sigmoid(z)
    return PredictionSet(
        pairs=tuple((inst.source, inst.target) for inst in ds.instances),
        probabilities=tuple(float(p) for p in probabilities),
        threshold=model.threshold,
        versions=ds.versions,
    )


def serialize_model(model: PredictionModel) -> str:
    lines = [
        f"#model {MODEL_FORMAT}",
        f"#seed {model.seed}",
        f"#iterations {model.iterations}",
        f"#final_loss {model.final_loss!r}",
        f"#threshold {model.threshold!r}",
        f"#l2_lambda {model.l2_lambda!r}",
        f"#class_weights {model.class_weights[0]!r} {model.class_weights[1]!r}",
        f"#bias {model.bias!r}",
        "feature\tmean\tstddev\tweight",
    ]
    for j, name in enumerate(model.feature_names):
        lines.append(
            f"{name}\t{model.means[j]!r}\t{model.stddevs[j]!r}\t{model.weights[j]!r}"
        )
    return "\n".join(lines) + "\n"


def parse_model(text: str, *, path: str | None = None) -> PredictionModel:
    meta: dict[str, str] = {}
    rows: list[tuple[str, float, float, float]] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(" ")
            meta[key] = value
            continue
        if not saw_header:
            if line != "feature\tmean\tstddev\tweight":
                raise ParseError("missing model column header", path=path, line=lineno)
            saw_header = True
            continue
        cells = line.split("\t")
        if len(cells) != 4:
            raise ParseError(f"expected 4 columns, got {len(cells)}", path=path, line=lineno)
        try:
            rows.append((cells[0], float(cells[1]), float(cells[2]), float(cells[3])))
        except ValueError as exc:
            raise ParseError(f"bad numeric value: {exc}", path=path, line=lineno) from None
    if meta.get("model") != MODEL_FORMAT:
        raise ParseError(
            f"unsupported model format {meta.get('model')!r}, expected {MODEL_FORMAT!r}",
            path=path,
            line=1,
        )
    if not saw_header:
        raise ParseError("missing model column header", path=path, line=1)
    try:
        cw = meta["class_weights"].split()
        return PredictionModel(
            feature_names=tuple(r[0] for r in rows),
            means=tuple(r[1] for r in rows),
            stddevs=tuple(r[2] for r in rows),
            weights=tuple(r[3] for r in rows),
            bias=float(meta["bias"]),
            class_weights=(float(cw[0]), float(cw[1])),
            threshold=float(meta["threshold"]),
            l2_lambda=float(meta["l2_lambda"]),
            seed=int(meta["seed"]),
            iterations=int(meta["iterations"]),
            final_loss=float(meta["final_loss"]),
        )
    except (KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"incomplete model metadata: {exc}", path=path, line=1) from None


def load_model(path: str | Path) -> PredictionModel:
    path = Path(path)
    return parse_model(path.read_text(encoding="utf-8"), path=str(path))


def save_model(model: PredictionModel, path: str | Path) -> None:
    Path(path).write_text(serialize_model(model), encoding="utf-8")
