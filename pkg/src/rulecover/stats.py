"""Statistical testing kernel.

Provides the chi-square survival function (via regularized incomplete gamma),
unconditional chi-square/G independence tests on (label, environment)
contingency tables, and the stratified (conditional) G-test used by pruning
and the exhaustive-subset baseline.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import DataError

_EPS = 1e-15
_MAX_ITER = 800
_TINY = 1e-300


def _regularized_lower_gamma_series(a, x):
    # P(a, x) = x^a e^-x / Gamma(a) * sum_{n>=0} x^n / (a(a+1)...(a+n)).
    # Converges quickly for x < a + 1.
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _regularized_upper_gamma_cf(a, x):
    # Q(a, x) by the Legendre continued fraction, evaluated with the
    # modified Lentz algorithm. Converges quickly for x >= a + 1.
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def chi2_sf(x, dof):
    """Survival function of the chi-square distribution,
    1 - P(dof/2, x/2) with P the regularized lower incomplete gamma.
    """
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DataError(f"chi2_sf needs a finite non-negative statistic, got {x}")
    dof = int(dof)
    if dof < 1:
        raise DataError(f"chi2_sf needs dof >= 1, got {dof}")
    a = dof / 2.0
    half = x / 2.0
    if half == 0.0:  # includes subnormal x underflowing in the halving
        return 1.0
    if half < a + 1.0:
        value = 1.0 - _regularized_lower_gamma_series(a, half)
    else:
        value = _regularized_upper_gamma_cf(a, half)
    return min(max(value, 0.0), 1.0)


@dataclass(frozen=True)
class TestResult:
    statistic: float
    dof: int
    p_value: float
    degenerate: bool


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Counts over (label, environment) pairs: 2 rows, one column per
    distinct environment value observed."""

    counts: np.ndarray
    n: int

    @classmethod
    def from_vectors(cls, y, e):
        y, e = _check_pair(y, e)
        _, e_dense = np.unique(e, return_inverse=True)
        k = int(e_dense.max()) + 1 if e_dense.size else 0
        flat = np.bincount(y.astype(np.int64) * k + e_dense, minlength=2 * k)
        counts = flat.reshape(2, k)
        return cls(counts=counts, n=int(counts.sum()))


def _check_pair(y, e):
    y = np.ascontiguousarray(y, dtype=np.int64)
    e = np.ascontiguousarray(e, dtype=np.int64)
    if y.ndim != 1 or e.ndim != 1 or y.shape[0] != e.shape[0]:
        raise DataError(
            f"y and e must be equal-length vectors, got {y.shape} vs {e.shape}"
        )
    if y.shape[0] < 1:
        raise DataError("need at least one sample")
    if y.min() < 0 or y.max() > 1:
        raise DataError("labels must be 0/1 valued")
    return y, e


def table_stats(counts, method):
    """Statistic and dof for a batch of contingency tables.

    ``counts`` has shape (T, r, c); returns (stat, dof) arrays of length T.
    Degrees of freedom count only rows/columns with a nonzero marginal, so
    value levels absent from the data contribute nothing.
    """
    counts = np.asarray(counts, dtype=np.float64)
    row = counts.sum(axis=2)
    col = counts.sum(axis=1)
    n = row.sum(axis=1)
    nz_rows = (row > 0).sum(axis=1)
    nz_cols = (col > 0).sum(axis=1)
    dof = np.maximum(nz_rows - 1, 0) * np.maximum(nz_cols - 1, 0)
    safe_n = np.where(n > 0, n, 1.0)
    expected = row[:, :, None] * col[:, None, :] / safe_n[:, None, None]
    if method == "chi2":
        diff_sq = (counts - expected) ** 2
        stat = np.divide(
            diff_sq, expected, out=np.zeros_like(expected), where=expected > 0
        ).sum(axis=(1, 2))
    elif method == "gtest":
        # 2 * sum O * ln(O / E), with the 0 * ln 0 := 0 convention.
        ratio = np.divide(
            counts, expected, out=np.ones_like(expected), where=counts > 0
        )
        stat = 2.0 * (counts * np.log(ratio)).sum(axis=(1, 2))
    else:
        raise DataError(f"unknown test method {method!r}; use 'chi2' or 'gtest'")
    # both statistics are nonnegative; clear float dust from cancelling terms
    stat = np.maximum(np.where(dof > 0, stat, 0.0), 0.0)
    return stat, dof.astype(np.int64)


def _result_from(stat, dof):
    stat = float(stat)
    dof = int(dof)
    if dof == 0:
        return TestResult(statistic=stat, dof=0, p_value=1.0, degenerate=True)
    return TestResult(
        statistic=stat, dof=dof, p_value=chi2_sf(stat, dof), degenerate=False
    )


def independence_test(y, e, method="chi2", min_samples=0):
    """Test independence of a binary label vector against environment ids.

    Degenerate data (a constant row/column, or fewer than ``min_samples``
    observations) yields dof 0 and p = 1: independence is not refutable, so
    callers that filter on dependence treat the test as passing.
    """
    table = ContingencyTable.from_vectors(y, e)
    if min_samples and table.n < min_samples:
        return TestResult(statistic=0.0, dof=0, p_value=1.0, degenerate=True)
    stat, dof = table_stats(table.counts[None, :, :], method)
    return _result_from(stat[0], dof[0])


def conditional_gtest(y, e, strata, min_samples_per_cell=0, n_possible_strata=None):
    """G-test of y against e within strata, summed across strata.

    The statistic and dof are accumulated over non-empty strata only, with
    per-stratum dof counting nonzero marginals. When ``min_samples_per_cell``
    is positive, the test is declared degenerate (p = 1) unless the sample
    count reaches ``min_samples_per_cell * 2 * k * n_possible_strata`` --
    i.e. that many samples per cell of the full stratified table. Pass
    ``n_possible_strata`` when the structural number of strata exceeds the
    observed one (e.g. 2**|S| for a conditioning set S of binary features).
    """
    y, e = _check_pair(y, e)
    strata = np.ascontiguousarray(strata, dtype=np.int64)
    if strata.shape[0] != y.shape[0]:
        raise DataError(
            f"strata length {strata.shape[0]} does not match sample count {y.shape[0]}"
        )
    _, e_dense = np.unique(e, return_inverse=True)
    k = int(e_dense.max()) + 1
    _, strata_dense = np.unique(strata, return_inverse=True)
    n_strata = int(strata_dense.max()) + 1
    if min_samples_per_cell:
        cells = 2 * k * int(n_possible_strata if n_possible_strata else n_strata)
        if y.shape[0] < min_samples_per_cell * cells:
            return TestResult(statistic=0.0, dof=0, p_value=1.0, degenerate=True)
    counts = kernels.stratified_label_env_counts(
        strata_dense, n_strata, y, e_dense, k
    )
    stat, dof = table_stats(counts, "gtest")
    return _result_from(stat.sum(), dof.sum())


def joint_strata(features, feature_indices):
    """Stratum ids from the joint value of binary feature columns.

    An empty index set yields a single all-zero stratum, which reduces the
    conditional G-test to the unconditional one.
    """
    features = np.asarray(features)
    cols = sorted(feature_indices)
    if not cols:
        return np.zeros(features.shape[0], dtype=np.int64)
    if len(cols) > 62:
        raise DataError(f"cannot pack {len(cols)} features into stratum ids")
    weights = np.int64(1) << np.arange(len(cols), dtype=np.int64)
    return features[:, cols].astype(np.int64) @ weights
