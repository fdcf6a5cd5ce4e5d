"""Two-class Fisher discriminant: fitting, scoring and threshold selection.

A bank is diagnosed distressed when its weighted indicator sum reaches the
threshold (``score >= threshold``). Distressed is the positive class, so a
Type I error is a missed distress (fn) and a Type II error a false alarm (fp).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import (
    DegenerateClasses,
    NoFeasibleThreshold,
    SchemaError,
    SingularScatter,
    TooFewSamples,
)
from .indicators import FEATURE_NAMES, IndicatorVector
from .periods import Period, PeriodRange

PAPER_WEIGHTS = (-0.32, 0.20, -0.18, -0.32, -0.99, 0.38, -0.95, -0.5, -0.26, 0.01)
PAPER_THRESHOLD = -190.395

MAX_CONDITION = 1e12
REGULARIZATION_SCALE = 1e-8
REGULARIZATION_ESCALATIONS = 3
DEGENERACY_RTOL = 1e-12


class Label(str, enum.Enum):
    HEALTHY = "healthy"
    DISTRESSED = "distressed"


@dataclass(frozen=True)
class LabeledVector:
    x: IndicatorVector
    label: Label
    bank_id: str = ""
    period: Optional[Period] = None


@dataclass(frozen=True, eq=False)
class DiscriminantModel:
    """Weights, threshold and fit metadata.

    ``class_means`` rows are (healthy, distressed). Models loaded from a
    model file carry no means or scatter.
    """

    weights: np.ndarray
    threshold: float
    class_means: Optional[np.ndarray] = None
    pooled_scatter: Optional[np.ndarray] = None
    regularization: float = 0.0
    fit_window: Optional[PeriodRange] = None
    n_healthy: int = 0
    n_distressed: int = 0

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64).ravel()
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if not np.any(w != 0.0):
            raise ValueError("weights must not all be zero")
        if math.isnan(self.threshold):
            raise ValueError("threshold must not be NaN")
        if self.regularization < 0:
            raise ValueError("regularization must be >= 0")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "threshold", float(self.threshold))
        for name in ("class_means", "pooled_scatter"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=np.float64)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def n_features(self) -> int:
        return self.weights.size

    def with_threshold(self, threshold: float) -> "DiscriminantModel":
        return replace(self, threshold=threshold)

    def scores(self, X) -> np.ndarray:
        """Scores for a batch of row vectors."""
        return np.asarray(X, dtype=np.float64) @ self.weights

    def decisions(self, X) -> np.ndarray:
        """Boolean distressed flags for a batch of row vectors."""
        return self.scores(X) >= self.threshold

    def __eq__(self, other):
        if not isinstance(other, DiscriminantModel):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and self.threshold == other.threshold
            and self.regularization == other.regularization
            and self.fit_window == other.fit_window
        )

    __hash__ = None


def _as_vector(x) -> np.ndarray:
    if isinstance(x, IndicatorVector):
        return x.as_array()
    return np.asarray(x, dtype=np.float64)


def to_arrays(data: Iterable[LabeledVector]) -> tuple[np.ndarray, np.ndarray]:
    """Stack labeled vectors into ``(X, distressed)``."""
    data = list(data)
    if not data:
        return np.zeros((0, len(FEATURE_NAMES))), np.zeros(0, dtype=bool)
    X = np.vstack([lv.x.as_array() for lv in data])
    y = np.array([lv.label == Label.DISTRESSED for lv in data], dtype=bool)
    return X, y


def _solve_pooled(S: np.ndarray, rhs: np.ndarray, regularize: bool) -> tuple[np.ndarray, float]:
    d = S.shape[0]
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(S)
    if np.isfinite(cond) and cond <= MAX_CONDITION:
        try:
            return scipy.linalg.cho_solve(scipy.linalg.cho_factor(S), rhs), 0.0
        except np.linalg.LinAlgError:
            pass
    if not regularize:
        raise SingularScatter(f"pooled scatter is ill-conditioned (condition {cond:.3g})")
    lam = REGULARIZATION_SCALE * np.trace(S) / d
    if not lam > 0:
        raise SingularScatter("pooled scatter has zero trace; cannot regularize")
    for _ in range(REGULARIZATION_ESCALATIONS + 1):
        Sr = S + lam * np.eye(d)
        if np.linalg.cond(Sr) <= MAX_CONDITION:
            try:
                return scipy.linalg.cho_solve(scipy.linalg.cho_factor(Sr), rhs), lam
            except np.linalg.LinAlgError:
                pass
        lam *= 10.0
    raise SingularScatter(
        f"pooled scatter still ill-conditioned after {REGULARIZATION_ESCALATIONS} escalations"
    )


def fit_arrays(X, distressed, threshold: Optional[float] = None, regularize: bool = True,
               fit_window: Optional[PeriodRange] = None) -> DiscriminantModel:
    """Fit Fisher weights ``w`` solving ``S w = mean_D - mean_H``.

    ``S`` is the pooled within-class covariance (summed centered outer
    products over both classes divided by ``n - 2``). When ``S`` is
    ill-conditioned and ``regularize`` is set, a ridge ``lam * I`` is added
    and escalated tenfold up to three times. The default threshold is the
    midpoint of the projected class means.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(distressed, dtype=bool)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError("X must be (n, d) and labels (n,)")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature vectors must be finite")
    n_d = int(y.sum())
    n_h = int(y.size - n_d)
    if n_h < 2 or n_d < 2:
        raise TooFewSamples(f"need >= 2 vectors per class, got {n_h} healthy, {n_d} distressed")

    means, scatter = _kernels.within_class_scatter(X, y.astype(np.int64))
    mu_h, mu_d = means[0], means[1]
    diff = mu_d - mu_h
    scale = max(np.linalg.norm(mu_h), np.linalg.norm(mu_d))
    if np.linalg.norm(diff) <= DEGENERACY_RTOL * scale:
        raise DegenerateClasses("class means coincide")

    S = scatter / (X.shape[0] - 2)
    w, lam = _solve_pooled(S, diff, regularize)
    if w @ mu_d < w @ mu_h:
        w = -w
    if threshold is None:
        threshold = float(w @ (mu_h + mu_d) / 2.0)
    return DiscriminantModel(
        weights=w,
        threshold=threshold,
        class_means=means,
        pooled_scatter=S,
        regularization=lam,
        fit_window=fit_window,
        n_healthy=n_h,
        n_distressed=n_d,
    )


def fit(data: Iterable[LabeledVector], regularize: bool = True,
        fit_window: Optional[PeriodRange] = None) -> DiscriminantModel:
    X, y = to_arrays(data)
    return fit_arrays(X, y, regularize=regularize, fit_window=fit_window)


def score(m: DiscriminantModel, x) -> float:
    return float(np.dot(m.weights, _as_vector(x)))


def classify(m: DiscriminantModel, x) -> Label:
    return Label.DISTRESSED if score(m, x) >= m.threshold else Label.HEALTHY


# -- threshold tuning ---------------------------------------------------------


@dataclass(frozen=True)
class ThresholdSweep:
    thresholds: np.ndarray
    type_i: np.ndarray  # missed distress (fn)
    type_ii: np.ndarray  # false alarms (fp)
    n_healthy: int
    n_distressed: int

    @property
    def total(self) -> np.ndarray:
        return self.type_i + self.type_ii

    def feasible(self) -> np.ndarray:
        """Candidates whose Type I rate does not exceed the Type II rate."""
        # fn/n_d <= fp/n_h, cross-multiplied to stay in integers
        return self.type_i * self.n_healthy <= self.type_ii * self.n_distressed


def threshold_candidates(scores) -> np.ndarray:
    """Midpoints between consecutive distinct sorted scores, plus -inf and +inf."""
    u = np.unique(np.asarray(scores, dtype=np.float64))
    mids = (u[:-1] + u[1:]) / 2.0
    return np.concatenate(([-np.inf], mids, [np.inf]))


def sweep(scores, distressed) -> ThresholdSweep:
    scores = np.asarray(scores, dtype=np.float64)
    distressed = np.asarray(distressed, dtype=bool)
    cands = threshold_candidates(scores)
    fn, fp = _kernels.sweep_error_counts(scores, distressed, cands)
    n_d = int(distressed.sum())
    return ThresholdSweep(cands, fn, fp, int(distressed.size - n_d), n_d)


def tune_threshold_scores(scores, distressed, typeI_below_typeII: bool = False) -> float:
    scores = np.asarray(scores, dtype=np.float64)
    distressed = np.asarray(distressed, dtype=bool)
    if scores.size == 0:
        raise ValueError("validation set is empty")
    if distressed.all() or not distressed.any():
        raise ValueError("validation set must contain both classes")
    sw = sweep(scores, distressed)
    idx = np.arange(sw.thresholds.size)
    if typeI_below_typeII:
        idx = idx[sw.feasible()]
        if idx.size == 0:
            raise NoFeasibleThreshold("no threshold keeps the Type I rate <= the Type II rate")
    # lexsort: last key is primary
    order = np.lexsort((sw.thresholds[idx], sw.type_i[idx], sw.total[idx]))
    return float(sw.thresholds[idx[order[0]]])


def tune_threshold(m: DiscriminantModel, validation: Iterable[LabeledVector],
                   typeI_below_typeII: bool = False) -> float:
    """Threshold minimising total misclassifications on ``validation``.

    Ties go to fewer Type I errors, then to the lower threshold. With
    ``typeI_below_typeII`` only thresholds whose Type I rate is at most the
    Type II rate are eligible.
    """
    X, y = to_arrays(validation)
    return tune_threshold_scores(m.scores(X), y, typeI_below_typeII)


# -- model file ---------------------------------------------------------------

_WEIGHT_KEYS = tuple(f"weight_{name}" for name in FEATURE_NAMES)


def _fmt(x: float) -> str:
    # 17 significant digits round-trips every double
    return format(float(x), "#.17g")


def model_to_text(m: DiscriminantModel) -> str:
    if m.n_features != len(FEATURE_NAMES):
        raise ValueError(f"model files hold {len(FEATURE_NAMES)} weights, model has {m.n_features}")
    lines = [f"{k}={_fmt(w)}" for k, w in zip(_WEIGHT_KEYS, m.weights)]
    lines.append(f"threshold={_fmt(m.threshold)}")
    lines.append(f"regularization={_fmt(m.regularization)}")
    lines.append(f"fit_window={m.fit_window if m.fit_window else ''}")
    return "\n".join(lines) + "\n"


def _parse_float(value: str, lineno: int, key: str, source: str) -> float:
    try:
        x = float(value)
    except ValueError:
        raise SchemaError(lineno, key, f"not a number: {value!r}", source) from None
    if math.isnan(x):
        raise SchemaError(lineno, key, "NaN not allowed", source)
    return x


def model_from_text(text: str, source: str = "<model>") -> DiscriminantModel:
    values: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise SchemaError(lineno, key, "expected key=value", source)
        if key not in _WEIGHT_KEYS + ("threshold", "regularization", "fit_window"):
            raise SchemaError(lineno, key, "unknown key", source)
        if key in values:
            raise SchemaError(lineno, key, "duplicate key", source)
        values[key] = (lineno, value.strip())
    missing = [k for k in _WEIGHT_KEYS + ("threshold",) if k not in values]
    if missing:
        raise SchemaError(0, missing[0], "missing key", source)

    weights = [_parse_float(values[k][1], values[k][0], k, source) for k in _WEIGHT_KEYS]
    for k, w in zip(_WEIGHT_KEYS, weights):
        if not math.isfinite(w):
            raise SchemaError(values[k][0], k, "weights must be finite", source)
    threshold = _parse_float(values["threshold"][1], values["threshold"][0], "threshold", source)
    reg = 0.0
    if "regularization" in values:
        lineno, raw = values["regularization"]
        reg = _parse_float(raw, lineno, "regularization", source)
        if not (math.isfinite(reg) and reg >= 0):
            raise SchemaError(lineno, "regularization", "must be finite and >= 0", source)
    window = None
    if values.get("fit_window", (0, ""))[1]:
        lineno, raw = values["fit_window"]
        try:
            window = PeriodRange.parse(raw)
        except ValueError as exc:
            raise SchemaError(lineno, "fit_window", str(exc), source) from None
    try:
        return DiscriminantModel(np.array(weights), threshold, regularization=reg, fit_window=window)
    except ValueError as exc:
        raise SchemaError(0, "weights", str(exc), source) from None


def save_model(m: DiscriminantModel, path: Union[str, Path]) -> None:
    Path(path).write_text(model_to_text(m), encoding="utf-8")


def load_model(path: Union[str, Path]) -> DiscriminantModel:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"no such file: {p}")
    return model_from_text(p.read_text(encoding="utf-8"), source=p.name)


def paper_model() -> DiscriminantModel:
    """The published hyperplane and its -190.395 threshold, from the shipped fixture."""
    text = resources.files("bank_ews").joinpath("data/paper_weights.txt").read_text(encoding="utf-8")
    return model_from_text(text, source="paper_weights.txt")


def paper_weights_model() -> DiscriminantModel:
    """Same model built from the constants (used to generate the fixture)."""
    return DiscriminantModel(
        np.array(PAPER_WEIGHTS),
        PAPER_THRESHOLD,
        fit_window=PeriodRange(Period(1990, 1), Period(1993, 2)),
    )


def scores_for(m: DiscriminantModel, vectors: Sequence[IndicatorVector]) -> np.ndarray:
    if not vectors:
        return np.zeros(0)
    return m.scores(np.vstack([v.as_array() for v in vectors]))
