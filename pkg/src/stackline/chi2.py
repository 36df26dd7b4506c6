"""Chi-square test of independence and significance-based feature selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SelectionError, ShapeError, StatError
from .frame import LabeledSet
from .preprocess import FittedEncoder

_EPS = 1e-16
_FPMIN = 1e-300
_MAX_ITER = 100_000


def _log_prefactor(a: float, x: float) -> float:
    return -x + a * math.log(x) - math.lgamma(a)


def _gamma_series(a: float, x: float) -> float:
    # Lower regularized P(a, x); converges fast for x < a + 1.
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(_log_prefactor(a, x))
    raise StatError(f"incomplete gamma series did not converge for a={a}, x={x}")


def _gamma_continued_fraction(a: float, x: float) -> float:
    # Upper regularized Q(a, x) by modified Lentz; converges fast for x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(_log_prefactor(a, x)) * h
    raise StatError(f"incomplete gamma continued fraction did not converge for a={a}, x={x}")


def _check_gamma_args(a, x):
    if not (a > 0 and math.isfinite(a)):
        raise StatError(f"shape must be positive and finite, got {a}")
    if math.isnan(x) or x < 0:
        raise StatError(f"argument must be non-negative, got {x}")


def regularized_gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_continued_fraction(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x)."""
    _check_gamma_args(a, x)
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_continued_fraction(a, x)


def chi2_sf(statistic: float, dof: int) -> float:
    """Upper-tail probability of a chi-square variate with ``dof`` degrees of freedom."""
    if math.isnan(statistic) or statistic < 0:
        raise StatError(f"chi-square statistic must be non-negative, got {statistic}")
    if int(dof) != dof or dof < 1:
        raise StatError(f"degrees of freedom must be a positive integer, got {dof}")
    a, x = dof / 2.0, statistic / 2.0
    if x == 0:
        return 1.0
    if math.isinf(x):
        return 0.0
    if statistic < dof + 1:
        return 1.0 - _gamma_series(a, x)
    return _gamma_continued_fraction(a, x)


@dataclass(frozen=True)
class ContingencyTable:
    """Observed counts with all-zero rows and columns removed."""

    counts: np.ndarray
    row_codes: tuple[int, ...]
    col_codes: tuple[int, ...]

    @property
    def row_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_totals(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def grand_total(self) -> int:
        return int(self.counts.sum())

    @property
    def degenerate(self) -> bool:
        m, n = self.counts.shape
        return m < 2 or n < 2

    @classmethod
    def from_counts(cls, counts) -> ContingencyTable:
        counts = np.asarray(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.size == 0:
            raise ShapeError("contingency counts must be a non-empty 2-D grid")
        if (counts < 0).any():
            raise StatError("contingency counts must be non-negative")
        rows = np.flatnonzero(counts.sum(axis=1) > 0)
        cols = np.flatnonzero(counts.sum(axis=0) > 0)
        if rows.size == 0:
            raise StatError("contingency table has zero grand total")
        reduced = counts[np.ix_(rows, cols)]
        return cls(reduced, tuple(rows.tolist()), tuple(cols.tolist()))


def contingency(feature_codes, labels, n_bins_used: int) -> ContingencyTable:
    codes = np.asarray(feature_codes)
    labels = np.asarray(labels)
    if codes.shape != labels.shape or codes.ndim != 1:
        raise ShapeError(f"codes {codes.shape} and labels {labels.shape} must be equal-length vectors")
    if codes.size == 0:
        raise StatError("contingency table of empty input")
    if codes.min() < 0 or codes.max() >= n_bins_used:
        raise StatError(f"feature codes must lie in [0, {n_bins_used})")
    if not np.all((labels == 0) | (labels == 1)):
        raise StatError("labels must be 0 or 1")
    counts = np.zeros((n_bins_used, 2), dtype=np.int64)
    np.add.at(counts, (codes.astype(np.int64), labels.astype(np.int64)), 1)
    return ContingencyTable.from_counts(counts)


def chi_square_statistic(table: ContingencyTable) -> tuple[float, int]:
    m, n = table.counts.shape
    dof = (m - 1) * (n - 1)
    if dof == 0:
        raise StatError("degenerate table: zero degrees of freedom")
    observed = table.counts.astype(float)
    expected = np.outer(table.row_totals, table.col_totals) / table.grand_total
    return float(((observed - expected) ** 2 / expected).sum()), dof


@dataclass(frozen=True)
class ChiSquareResult:
    feature_name: str
    statistic: float
    dof: int
    p_value: float
    kept: bool = False
    degenerate: bool = False


def independence_test(name: str, codes, labels, n_bins_used: int) -> ChiSquareResult:
    table = contingency(codes, labels, n_bins_used)
    if table.degenerate:
        return ChiSquareResult(name, 0.0, 0, 1.0, degenerate=True)
    stat, dof = chi_square_statistic(table)
    return ChiSquareResult(name, stat, dof, chi2_sf(stat, dof))


def select_features(train: LabeledSet, enc: FittedEncoder, alpha: float = 0.05):
    """Keep features whose chi-square p-value against the label is below ``alpha``.

    Returns the kept names (in training column order) and all results
    sorted by ascending p-value. A feature whose table collapses to a single
    row or column cannot be tested; it gets p = 1 and is flagged degenerate.
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must lie in (0, 1), got {alpha}")
    results = []
    for j, name in enumerate(train.feature_names):
        codes, n_codes = enc.bin_codes(name, train.features[:, j])
        r = independence_test(name, codes, train.labels, n_codes)
        results.append(
            ChiSquareResult(r.feature_name, r.statistic, r.dof, r.p_value,
                            kept=(not r.degenerate and r.p_value < alpha),
                            degenerate=r.degenerate)
        )
    results.sort(key=lambda r: (r.p_value, -r.statistic, r.feature_name))
    kept_set = {r.feature_name for r in results if r.kept}
    if not kept_set:
        raise SelectionError(
            f"no feature is significant at alpha={alpha}; consider a larger alpha"
        )
    kept = [n for n in train.feature_names if n in kept_set]
    return kept, results
