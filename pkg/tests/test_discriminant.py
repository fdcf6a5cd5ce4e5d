import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from bank_ews import discriminant as da
from bank_ews.discriminant import (
    PAPER_THRESHOLD,
    PAPER_WEIGHTS,
    DiscriminantModel,
    Label,
    LabeledVector,
    classify,
    fit,
    fit_arrays,
    score,
    tune_threshold,
    tune_threshold_scores,
)
from bank_ews.errors import (
    DegenerateClasses,
    NoFeasibleThreshold,
    SchemaError,
    SingularScatter,
    TooFewSamples,
)
from bank_ews.indicators import IndicatorVector
from bank_ews.periods import Period, PeriodRange


def unit_model(threshold=0.0, index=0):
    w = np.zeros(10)
    w[index] = 1.0
    return DiscriminantModel(w, threshold)


def lv(values, label):
    return LabeledVector(IndicatorVector.from_array(values), label)


def embed(v, constant=3.0):
    x = np.full(10, constant)
    x[0] = v
    return x


# -- fit ----------------------------------------------------------------------


def test_fit_one_dimensional_embedding():
    data = [lv(embed(v), Label.HEALTHY) for v in (-1.1, -0.9)]
    data += [lv(embed(v), Label.DISTRESSED) for v in (0.9, 1.1)]
    m = fit(data)
    assert m.weights[0] > 0
    assert np.all(m.weights[1:] == 0)
    assert m.threshold == pytest.approx(0.0, abs=1e-9)
    assert m.regularization > 0
    assert all(classify(m, d.x) == d.label for d in data)


def test_fit_degenerate():
    pts = [embed(v) + np.arange(10) * v for v in (-1.0, 0.5, 2.0)]
    data = [lv(p, Label.HEALTHY) for p in pts] + [lv(p, Label.DISTRESSED) for p in pts]
    with pytest.raises(DegenerateClasses):
        fit(data)


def test_fit_too_few():
    data = [lv(embed(0.0), Label.HEALTHY), lv(embed(1.0), Label.HEALTHY),
            lv(embed(2.0), Label.DISTRESSED)]
    with pytest.raises(TooFewSamples):
        fit(data)


def test_singular_without_regularization():
    X = np.array([embed(v) for v in (-1.1, -0.9, 0.9, 1.1)])
    y = np.array([False, False, True, True])
    with pytest.raises(SingularScatter):
        fit_arrays(X, y, regularize=False)


def test_zero_scatter_raises():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(SingularScatter):
        fit_arrays(X, [False, False, True, True])


def _random_instance(rng, d, n=40):
    X = rng.normal(size=(n, d))
    y = np.zeros(n, dtype=bool)
    y[n // 2:] = True
    X[y] += rng.normal(size=d)
    return X, y


@pytest.mark.parametrize("seed", range(5))
def test_fit_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    X, y = _random_instance(rng, 10)
    m = fit_arrays(X, y)
    ref = oracles.fisher_direction(X.tolist(), y.tolist())
    assert m.regularization == 0.0
    assert oracles.cosine(m.weights.tolist(), ref) >= 1 - 1e-9
    np.testing.assert_allclose(m.weights, ref, rtol=1e-8)


def test_orientation_and_midpoint():
    rng = np.random.default_rng(1)
    X, y = _random_instance(rng, 5)
    m = fit_arrays(X, y)
    mu_h, mu_d = m.class_means
    assert m.weights @ mu_d >= m.weights @ mu_h
    assert m.threshold == pytest.approx((m.weights @ mu_h + m.weights @ mu_d) / 2)
    np.testing.assert_allclose(m.pooled_scatter, m.pooled_scatter.T)


def test_regularization_escalates_and_records():
    rng = np.random.default_rng(2)
    X, y = _random_instance(rng, 4)
    X[:, 3] = X[:, 2]  # exactly collinear column
    m = fit_arrays(X, y)
    assert m.regularization > 0
    assert np.linalg.cond(m.pooled_scatter + m.regularization * np.eye(4)) <= da.MAX_CONDITION


# -- score / classify ---------------------------------------------------------


def test_score_examples():
    x = np.zeros(10)
    x[0] = 5.0
    assert score(unit_model(), x) == 5.0
    assert score(unit_model(), IndicatorVector.zeros()) == 0.0
    assert score(da.paper_model(), np.ones(10)) == pytest.approx(-2.93, abs=1e-12)
    assert sum(PAPER_WEIGHTS) == pytest.approx(-2.93, abs=1e-12)


@pytest.mark.parametrize("s,expected", [
    (-150.0, Label.DISTRESSED),
    (-294.0, Label.HEALTHY),
    (PAPER_THRESHOLD, Label.DISTRESSED),
    (-199.0, Label.HEALTHY),
])
def test_classify_against_paper_threshold(s, expected):
    assert classify(unit_model(PAPER_THRESHOLD), embed(s, 0.0)) == expected


finite = st.floats(-1e3, 1e3, allow_nan=False)
vec = st.lists(finite, min_size=10, max_size=10)


@given(vec, vec, finite, finite)
def test_score_linear(x, z, a, b):
    m = da.paper_model()
    x, z = np.array(x), np.array(z)
    lhs = score(m, a * x + b * z)
    rhs = a * score(m, x) + b * score(m, z)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-6)


@given(vec)
def test_classify_depends_on_score_only(x):
    m = da.paper_model()
    x = np.array(x)
    assert (classify(m, x) == Label.DISTRESSED) == (score(m, x) >= m.threshold)


def test_model_validation():
    with pytest.raises(ValueError):
        DiscriminantModel(np.zeros(10), 0.0)
    with pytest.raises(ValueError):
        DiscriminantModel(np.array([np.nan] + [1.0] * 9), 0.0)


# -- threshold tuning ---------------------------------------------------------


def test_tune_separable():
    scores = [1, 2, 3, 4, 5, 6]
    labels = [False] * 3 + [True] * 3
    assert tune_threshold_scores(scores, labels) == 3.5


def test_tune_overlapping_frozen():
    # frozen from oracles.sweep_best
    scores = [1, 2, 3, 4, 5, 2.5, 3.5, 4.5, 6, 7]
    labels = [False] * 5 + [True] * 5
    assert tune_threshold_scores(scores, labels) == 2.25
    assert tune_threshold_scores(scores, labels, True) == 2.25


def test_tune_constraint_shifts_threshold():
    # frozen from oracles.sweep_best: unconstrained 9.5 (fn=1, fp=0), constrained 4.25 (fn=0, fp=5)
    scores = list(range(10)) + [4.5, 10, 11]
    labels = [False] * 10 + [True] * 3
    free = tune_threshold_scores(scores, labels)
    tied = tune_threshold_scores(scores, labels, typeI_below_typeII=True)
    assert free == 9.5
    assert tied == 4.25
    sw = da.sweep(scores, labels)
    k_free = list(sw.thresholds).index(free)
    k_tied = list(sw.thresholds).index(tied)
    assert sw.type_i[k_free] / 3 > sw.type_ii[k_free] / 10
    assert sw.type_i[k_tied] / 3 <= sw.type_ii[k_tied] / 10
    assert sw.total[k_tied] >= sw.total[k_free]


def test_tune_via_model():
    m = unit_model()
    val = [lv(embed(v, 0.0), Label.HEALTHY) for v in (1, 2, 3)]
    val += [lv(embed(v, 0.0), Label.DISTRESSED) for v in (4, 5, 6)]
    assert tune_threshold(m, val) == 3.5


def test_tune_needs_both_classes():
    with pytest.raises(ValueError):
        tune_threshold_scores([1.0, 2.0], [False, False])
    with pytest.raises(ValueError):
        tune_threshold_scores([], [])


def test_no_feasible_threshold(monkeypatch):
    # force every candidate infeasible to exercise the error path
    monkeypatch.setattr(da.ThresholdSweep, "feasible", lambda self: np.zeros(self.thresholds.size, bool))
    with pytest.raises(NoFeasibleThreshold):
        tune_threshold_scores([1.0, 2.0], [False, True], typeI_below_typeII=True)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(-8, 8), st.booleans()), min_size=2, max_size=30),
       st.booleans())
def test_tune_matches_oracle(points, constrained):
    scores = [p[0] / 2 for p in points]
    labels = [p[1] for p in points]
    if all(labels) or not any(labels):
        return
    ref = oracles.sweep_best(scores, labels, constrained)
    got = tune_threshold_scores(scores, labels, constrained)
    assert got == ref[0]


# -- model file ---------------------------------------------------------------


def test_paper_fixture():
    m = da.paper_model()
    assert m.weights.tolist() == list(PAPER_WEIGHTS)
    assert m.threshold == PAPER_THRESHOLD
    assert m.fit_window == PeriodRange(Period(1990, 1), Period(1993, 2))


def test_model_file_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(5)
    X, y = _random_instance(rng, 10)
    m = fit_arrays(X, y, fit_window=PeriodRange.parse("1990-H1..1993-H2"))
    da.save_model(m, tmp_path / "m.txt")
    m2 = da.load_model(tmp_path / "m.txt")
    assert m2 == m
    assert m2.weights.tobytes() == m.weights.tobytes()
    text = (tmp_path / "m.txt").read_text()
    assert text == da.model_to_text(m2)
    for line in text.splitlines():
        key, _, value = line.partition("=")
        if key != "fit_window":
            digits = value.lstrip("-").replace(".", "").split("e")[0].lstrip("0")
            assert len(digits) >= 15 or float(value) == 0.0


def test_model_file_errors():
    good = da.model_to_text(da.paper_model())
    with pytest.raises(SchemaError):
        da.model_from_text(good.replace("threshold=", "thresh="))
    with pytest.raises(SchemaError):
        da.model_from_text("\n".join(good.splitlines()[1:]))
    with pytest.raises(SchemaError):
        da.model_from_text(good.replace("weight_f1=-0.32000000000000001", "weight_f1=abc"))
    with pytest.raises(SchemaError):
        da.model_from_text(good + "threshold=1\n")
