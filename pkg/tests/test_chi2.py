import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helpers import quad_sf
from stackline.chi2 import (
    ContingencyTable,
    chi2_sf,
    chi_square_statistic,
    contingency,
    independence_test,
    regularized_gamma_p,
    regularized_gamma_q,
    select_features,
)
from stackline.errors import ConfigError, SelectionError, ShapeError, StatError
from stackline.frame import CATEGORICAL, NUMERIC, Frame, LabeledSet
from stackline.preprocess import PreprocessConfig, fit_encoder, transform

def test_contingency_counts():
    t = contingency([0, 0, 1, 1], [0, 1, 0, 1], 2)
    np.testing.assert_array_equal(t.counts, [[1, 1], [1, 1]])
    assert t.grand_total == 4 and not t.degenerate


def test_contingency_degenerate_and_errors():
    t = contingency([0, 0, 0], [1, 1, 1], 3)
    assert t.counts.shape == (1, 1) and t.degenerate
    with pytest.raises(StatError):
        contingency([], [], 2)
    with pytest.raises(ShapeError):
        contingency([0, 1], [0], 2)
    with pytest.raises(StatError):
        contingency([0, 5], [0, 1], 2)


def test_zero_rows_dropped_before_dof():
    t = contingency([0, 0, 2, 2], [0, 1, 0, 1], 4)
    assert t.counts.shape == (2, 2)
    assert chi_square_statistic(t)[1] == 1


@pytest.mark.parametrize("counts,stat,dof", [
    ([[15, 15], [15, 15]], 0.0, 1),
    ([[10, 20], [20, 10]], 6.6667, 1),      # expected 15 everywhere: 4 * 25 / 15
    ([[10, 20], [20, 40], [30, 60]], 0.0, 2),
])
def test_statistic_values(counts, stat, dof):
    s, d = chi_square_statistic(ContingencyTable.from_counts(counts))
    assert s == pytest.approx(stat, abs=1e-4)
    assert d == dof


def test_degenerate_statistic_raises():
    with pytest.raises(StatError, match="degenerate"):
        chi_square_statistic(ContingencyTable.from_counts([[3, 0], [4, 0]]))


def test_sf_known_points():
    assert chi2_sf(0.0, 1) == 1.0
    assert chi2_sf(0.0, 7) == 1.0
    assert chi2_sf(3.841, 1) == pytest.approx(0.0500, abs=5e-4)
    assert chi2_sf(20 / 3, 1) == pytest.approx(0.0098, abs=1e-3)
    # frozen from the quadrature oracle
    assert chi2_sf(3.841, 1) == pytest.approx(0.0500136837639567, abs=1e-12)
    assert chi2_sf(10.0, 5) == pytest.approx(0.0752352461465122, abs=1e-12)
    assert chi2_sf(2.0, 2) == pytest.approx(math.exp(-1.0), abs=1e-14)


@pytest.mark.parametrize("dof", [1, 2, 3, 5, 10, 50, 200, 1000])
def test_sf_matches_quadrature(dof):
    for x in [0.01, 0.5, dof * 0.5, dof + 0.999, dof + 1.0, dof + 2.0, dof * 1.5, dof + 60.0]:
        assert abs(chi2_sf(x, dof) - quad_sf(x, dof)) <= 1e-10, (x, dof)


def test_sf_domain_errors():
    with pytest.raises(StatError):
        chi2_sf(-1.0, 1)
    with pytest.raises(StatError):
        chi2_sf(1.0, 0)
    with pytest.raises(StatError):
        chi2_sf(float("nan"), 1)


def test_sf_large_arguments():
    assert chi2_sf(1e4, 1000) == pytest.approx(0.0, abs=1e-10)
    assert chi2_sf(1e4, 1) == 0.0 or chi2_sf(1e4, 1) < 1e-300


@settings(max_examples=200, deadline=None)
@given(x=st.floats(0, 500), k=st.integers(1, 200))
def test_p_plus_q_is_one(x, k):
    assert chi2_sf(x, k) + regularized_gamma_p(k / 2, x / 2) == pytest.approx(1.0, abs=1e-12)
    assert regularized_gamma_p(k / 2, x / 2) + regularized_gamma_q(k / 2, x / 2) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(k=st.integers(1, 100), xs=st.lists(st.floats(0, 300), min_size=2, max_size=30))
def test_sf_monotone(k, xs):
    xs = sorted(xs)
    ps = [chi2_sf(x, k) for x in xs]
    assert all(a >= b - 1e-15 for a, b in zip(ps, ps[1:]))


table_strategy = st.lists(st.lists(st.integers(1, 40), min_size=2, max_size=2), min_size=2, max_size=6)


@settings(max_examples=100, deadline=None)
@given(counts=table_strategy, seed=st.integers(0, 1000))
def test_statistic_permutation_invariant(counts, seed):
    rng = np.random.default_rng(seed)
    counts = np.array(counts)
    base = chi_square_statistic(ContingencyTable.from_counts(counts))[0]
    shuffled = counts[rng.permutation(counts.shape[0])][:, ::-1]
    assert chi_square_statistic(ContingencyTable.from_counts(shuffled))[0] == pytest.approx(base, rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(counts=table_strategy, c=st.integers(2, 9))
def test_statistic_scales_with_counts(counts, c):
    counts = np.array(counts)
    base = chi_square_statistic(ContingencyTable.from_counts(counts))[0]
    scaled = chi_square_statistic(ContingencyTable.from_counts(c * counts))[0]
    assert scaled == pytest.approx(c * base, rel=1e-9, abs=1e-9)


def test_independent_feature_rarely_kept():
    kept = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        codes = rng.integers(0, 5, 10_000)
        labels = rng.permutation(np.repeat([0, 1], 5_000))
        if independence_test("f", codes, labels, 5).p_value < 0.05:
            kept += 1
    assert kept <= 10


def _train_frame():
    rng = np.random.default_rng(0)
    y = rng.integers(0, 2, 400)
    rows = []
    for t in y:
        rows.append([
            float(t),                                     # identical to label
            float(rng.standard_normal()),                 # independent
            "Yes" if rng.random() < (0.8 if t else 0.2) else "No",
            "k",                                          # constant
            "Yes" if t else "No",
        ])
    return Frame(["copy", "noise", "cat", "const", "target"],
                 [NUMERIC, NUMERIC, CATEGORICAL, CATEGORICAL, CATEGORICAL], rows)


def test_select_features():
    f = _train_frame()
    enc = fit_encoder(f, PreprocessConfig(drop_columns=[], ordinal_maps={}), "target")
    kept, results = select_features(transform(f, enc), enc, alpha=0.05)
    by_name = {r.feature_name: r for r in results}
    assert by_name["copy"].p_value < 1e-50 and by_name["copy"].kept
    assert by_name["cat"].kept
    assert by_name["const"].degenerate and not by_name["const"].kept
    assert [r.p_value for r in results] == sorted(r.p_value for r in results)
    assert kept == [n for n in ("copy", "noise", "cat") if by_name[n].kept]


def test_select_nothing_kept():
    rng = np.random.default_rng(3)
    data = LabeledSet(np.ones((50, 1)), rng.integers(0, 2, 50), ["flat"])
    f = Frame(["flat", "t"], [NUMERIC, CATEGORICAL], [[1.0, "Yes"], [1.0, "No"]])
    enc = fit_encoder(f, PreprocessConfig(), "t")
    with pytest.raises(SelectionError, match="larger alpha"):
        select_features(data, enc, 0.05)
    with pytest.raises(ConfigError):
        select_features(data, enc, 1.5)
