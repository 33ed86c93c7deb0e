"""Occupancy probability f(N, n, m): the chance that at least one of m
disjoint cells of measure 1/n receives none of N i.i.d. points.

Three evaluators with different contracts:

* f_exact: the alternating inclusion-exclusion sum in exact rational
  arithmetic. Reference-grade, small instances only.
* f_dp: production evaluator. Uses the complementary occupancy chain (the
  N-th power of the constant bidiagonal transition matrix, no cancellation)
  when the cell count is moderate; on instances where that is infeasible it
  switches to the same alternating sum in high-precision floating point sized
  to absorb the cancellation, or short-circuits to 1.0 when the expected
  number of empty cells makes the all-occupied probability underflow double
  precision.
* f_lower_bound: the closed-form lower bound, evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import ResourceLimitError

# flop budget for the O(m^3 log N) occupancy-chain power before switching
_DP_BUDGET = 2 * 10**8


@dataclass(frozen=True)
class OccupancyParams:
    n_points: int  # N: number of thrown points
    cells_inv_measure: float  # n: cells have measure 1/n (real-valued)
    n_cells: int  # m: number of disjoint cells

    def __post_init__(self):
        if self.n_points < 1 or self.n_cells < 1:
            raise ValueError("N and m must be positive integers")
        if not (self.n_cells <= self.cells_inv_measure <= self.n_points):
            raise ValueError("need m <= n <= N")


@dataclass(frozen=True)
class RegimeSpec:
    """Joint (n, m) scaling with N under which f tends to 1.

    Variant I: n = N / (log N - alpha log log N),        m = floor(kappa n)
    Variant II: n = N / ((d-1)/d log N - alpha log log N), m = floor(kappa n^((d-1)/d))
    Variant III: n = N / (1/d log N - alpha log log N),    m = floor(kappa n^(1/d))
    """

    variant: str  # "I" | "II" | "III"
    kappa: float = 1.0
    alpha: float = 1.5
    d: int = 2

    def __post_init__(self):
        if self.variant not in ("I", "II", "III"):
            raise ValueError("variant must be 'I', 'II' or 'III'")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.variant == "I" and self.kappa > 1.0:
            raise ValueError("variant I requires kappa <= 1")
        if self.variant in ("II", "III") and self.d < 2:
            raise ValueError("variants II/III require d >= 2")


def regime_params(spec: RegimeSpec, n_points: int) -> OccupancyParams:
    log_n = math.log(n_points)
    loglog = math.log(log_n) if log_n > 1.0 else -math.inf
    if spec.variant == "I":
        denom = log_n - spec.alpha * loglog
        exponent = 1.0
    elif spec.variant == "II":
        denom = (spec.d - 1) / spec.d * log_n - spec.alpha * loglog
        exponent = (spec.d - 1) / spec.d
    else:
        denom = log_n / spec.d - spec.alpha * loglog
        exponent = 1.0 / spec.d
    if not (denom > 0.0):
        raise ValueError(f"N={n_points} too small for regime {spec.variant}")
    n = n_points / denom
    m = math.floor(spec.kappa * n**exponent)
    return OccupancyParams(n_points=n_points, cells_inv_measure=n, n_cells=m)


# ---------------------------------------------------------------------------
# Evaluators
# ---------------------------------------------------------------------------


def f_exact(params: OccupancyParams) -> Fraction:
    """Exact alternating sum in rational arithmetic; n must be rational."""
    n_exact = Fraction(params.cells_inv_measure).limit_denominator(10**12)
    if abs(float(n_exact) - params.cells_inv_measure) > 1e-12:
        raise ValueError("f_exact needs a rational cell measure")
    if params.n_points > 200 or params.n_cells > 30:
        raise ResourceLimitError("instance exceeds the exact-rational budget (N<=200, m<=30)")
    total = Fraction(0)
    for k in range(1, params.n_cells + 1):
        term = math.comb(params.n_cells, k) * (1 - Fraction(k) / n_exact) ** params.n_points
        total += term if k % 2 == 1 else -term
    return total


def _log_empty_one_cell(params: OccupancyParams) -> float:
    """log of q = (1 - 1/n)^N, the probability a fixed cell stays empty."""
    return params.n_points * math.log1p(-1.0 / params.cells_inv_measure)


def _f_dp_numpy(params: OccupancyParams) -> float:
    # state j = number of occupied target cells; one throw is the constant
    # bidiagonal transition M, so N throws are M^N (squaring, O(m^3 log N)).
    # All entries stay nonnegative, so the power is cancellation-free.
    n, m, big_n = params.cells_inv_measure, params.n_cells, params.n_points
    j = np.arange(m + 1)
    mat = np.diag(1.0 - (m - j) / n)
    mat[j[1:], j[:-1]] = (m - j[:-1]) / n
    v = np.linalg.matrix_power(mat, big_n)[:, 0]
    return float(min(1.0, max(0.0, 1.0 - v[m])))


def _f_mpmath(params: OccupancyParams, log_expected_empty: float) -> float:
    lam = math.exp(log_expected_empty) if log_expected_empty < 5 else math.inf
    digits = 30 + int(0.5 * min(lam, 120.0))
    with mpmath.workdps(digits):
        n = mpmath.mpf(params.cells_inv_measure)
        big_n = params.n_points
        m = params.n_cells
        total = mpmath.mpf(0)
        tiny = mpmath.mpf(10) ** (-digits - 10)
        for k in range(1, m + 1):
            log_term = mpmath.log(mpmath.binomial(m, k)) + big_n * mpmath.log1p(-k / n)
            term = mpmath.e**log_term
            total += term if k % 2 == 1 else -term
            if k > 2.0 * lam + 20 and term < tiny:
                break
        return float(min(1.0, max(0.0, total)))


def f_dp(params: OccupancyParams) -> float:
    """Probability that at least one of the m cells is empty, in [0, 1]."""
    log_q = _log_empty_one_cell(params)
    # expected empty cells m*q; all-occupied probability <= (1-q)^m
    log_all_occupied_bound = params.n_cells * math.log1p(-math.exp(log_q)) if log_q < 0 else 0.0
    if log_all_occupied_bound < -45.0:
        return 1.0
    if (params.n_cells + 1) ** 3 * math.log2(max(2, params.n_points)) <= _DP_BUDGET:
        return _f_dp_numpy(params)
    return _f_mpmath(params, math.log(params.n_cells) + log_q)


def f_complement_log(params: OccupancyParams) -> float:
    """log(1 - f) = log P(all m cells occupied), in high-precision arithmetic.

    Resolves strict trends in f when f saturates to 1.0 in double precision
    (the complement can be far below the double-precision epsilon).
    """
    log_q = _log_empty_one_cell(params)
    lam = params.n_cells * math.exp(log_q)  # expected number of empty cells
    digits = 40 + int(lam)
    with mpmath.workdps(digits):
        n = mpmath.mpf(params.cells_inv_measure)
        big_n = params.n_points
        m = params.n_cells
        total = mpmath.mpf(0)
        tiny = mpmath.mpf(10) ** (-digits)
        for k in range(0, m + 1):
            term = mpmath.binomial(m, k) * mpmath.e ** (big_n * mpmath.log1p(-k / n))
            total += term if k % 2 == 0 else -term
            if k > 3.0 * lam + 20 and abs(term) < tiny:
                break
        if total <= 0:
            raise ResourceLimitError("complement underflowed the working precision")
        return float(mpmath.log(total))


def f_lower_bound(params: OccupancyParams) -> float:
    """Closed-form lower bound on f, evaluated in log space where factors
    underflow. Equals (1 - 1/n)^N at m = 1."""
    n, m, big_n = params.cells_inv_measure, params.n_cells, params.n_points
    log_q = _log_empty_one_cell(params)  # q = (1 - 1/n)^N
    q = math.exp(log_q)
    first = -math.expm1(m * math.log1p(-q)) if q < 1.0 else 1.0  # 1 - (1-q)^m
    if m < 2:
        return first
    log_q1 = (big_n - 1) * math.log1p(-1.0 / n)  # (1 - 1/n)^(N-1)
    log_second = (
        math.log(big_n)
        - 2.0 * math.log(n)
        + math.log(m * (m - 1) / 2.0)
        + 2.0 * log_q1
        + (m - 2) * math.log1p(math.exp(log_q1))
    )
    return first - math.exp(log_second)
