"""Covering radii: exact in one dimension, certified sandwich elsewhere,
plus epsilon-net verdicts and ball-measure estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import UnsupportedDomainError
from .nets import ProbeNet, build_index
from .sampler import SampleSet, SeedSpec
from .spaces import (
    ArcsineInterval,
    Ball,
    Cantor,
    Cube,
    Domain,
    IntervalUniform,
    Polyhedron3,
    Polyline,
    Sphere,
    unit_ball_volume,
)


@dataclass(frozen=True)
class CoveringRadiusInterval:
    """Certified enclosure [lower, upper] of the covering radius, with
    upper = lower + probe_mesh."""

    lower: float
    upper: float
    probe_mesh: float

    def __post_init__(self):
        if not (0 <= self.lower <= self.upper):
            raise ValueError("need 0 <= lower <= upper")

    @property
    def midpoint(self) -> float:
        return (self.lower + self.upper) / 2.0


class Verdict(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class NetVerdict:
    value: Verdict
    margin: float


@dataclass(frozen=True)
class WindowSpec:
    """Sub-window of the arcsine interval over which the supremum is taken:
    [1 - N^-a, 1] (right edge) or [-1 + N^-a, 1 - N^-a] (interior)."""

    a_exponent: float
    side: str = "right_edge"  # "right_edge" | "interior"

    def __post_init__(self):
        if not (self.a_exponent > 0 and math.isfinite(self.a_exponent)):
            raise ValueError("window exponent must be positive and finite")
        if self.side not in ("right_edge", "interior"):
            raise ValueError("side must be 'right_edge' or 'interior'")

    def bounds(self, n_for_window: int) -> tuple[float, float]:
        if n_for_window < 1:
            raise ValueError("window size parameter N must be a positive integer")
        u = float(n_for_window) ** (-self.a_exponent)
        if u >= 2.0:
            raise ValueError("degenerate window: N^-a covers the whole interval")
        if self.side == "right_edge":
            return 1.0 - u, 1.0
        return -1.0 + u, 1.0 - u


# ---------------------------------------------------------------------------
# Exact one-dimensional covering radii
# ---------------------------------------------------------------------------


def _interval_rho(xs: np.ndarray, lo: float, hi: float) -> float:
    xs = np.sort(xs)
    gaps = np.diff(xs)
    interior = float(gaps.max() / 2.0) if gaps.size else 0.0
    return max(float(xs[0] - lo), float(hi - xs[-1]), interior)


def _circle_rho(points: np.ndarray) -> float:
    """Exact chord-metric covering radius of points on the unit circle."""
    angles = np.sort(np.arctan2(points[:, 1], points[:, 0]))
    gaps = np.diff(angles)
    wrap = 2.0 * math.pi - (angles[-1] - angles[0])
    max_gap = max(float(gaps.max()) if gaps.size else 0.0, float(wrap))
    return 2.0 * math.sin(max_gap / 4.0)


def _polyline_rho(domain: Polyline, points: np.ndarray) -> float:
    """Exact sup over the polyline of the distance to the nearest sample.

    Per edge, each sample point x_j restricted to the edge line gives the
    distance function sqrt((t - t_j)^2 + h_j^2); the max of their lower
    envelope is attained at an edge endpoint or at a pairwise crossing.
    O(N^2) candidates per edge, intended for desk-scale exact checks.
    """
    best = 0.0
    for i in range(len(domain.vertices) - 1):
        a = domain.vertices[i]
        b = domain.vertices[i + 1]
        length = float(np.linalg.norm(b - a))
        u = (b - a) / length
        t_j = (points - a) @ u
        perp = points - a - np.outer(t_j, u)
        h2_j = np.einsum("ij,ij->i", perp, perp)

        candidates = [0.0, length]
        # crossing of envelope branches j and k: linear equation in t
        c_j = t_j**2 + h2_j
        for j in range(len(t_j)):
            denom = t_j - t_j[j]
            with np.errstate(divide="ignore", invalid="ignore"):
                t_cross = (c_j - c_j[j]) / (2.0 * denom)
            valid = np.isfinite(t_cross) & (t_cross > 0.0) & (t_cross < length)
            candidates.extend(t_cross[valid].tolist())
        t_cand = np.array(candidates)
        d2 = (t_cand[:, None] - t_j[None, :]) ** 2 + h2_j[None, :]
        best = max(best, float(np.sqrt(d2.min(axis=1)).max()))
    return best


def covering_radius_1d(domain: Domain, x: SampleSet | np.ndarray) -> float:
    """Exact covering radius on the one-dimensional catalog domains."""
    points = x.points if isinstance(x, SampleSet) else np.asarray(x, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if points.shape[0] == 0:
        raise ValueError("need at least one sample point")
    if isinstance(domain, IntervalUniform):
        return _interval_rho(points[:, 0], 0.0, 1.0)
    if isinstance(domain, ArcsineInterval):
        return _interval_rho(points[:, 0], -1.0, 1.0)
    if isinstance(domain, Sphere) and domain.d == 1:
        return _circle_rho(points)
    if isinstance(domain, Polyline):
        return _polyline_rho(domain, points)
    raise UnsupportedDomainError(f"no exact 1-D covering radius for {domain!r}")


def covering_radius_window(
    domain: ArcsineInterval,
    x: SampleSet | np.ndarray,
    window: WindowSpec,
    n_for_window: int,
) -> float:
    """Exact sup-inf over a window of [-1,1]; samples outside the window
    still count as centers."""
    if not isinstance(domain, ArcsineInterval):
        raise UnsupportedDomainError("windowed covering radius is an arcsine-interval operation")
    points = x.points if isinstance(x, SampleSet) else np.asarray(x, dtype=float)
    xs = np.sort(np.ravel(points))
    if xs.size == 0:
        raise ValueError("need at least one sample point")
    w0, w1 = window.bounds(n_for_window)
    # peaks of y -> min_j |y - x_j| lie at midpoints of consecutive samples
    mids = (xs[:-1] + xs[1:]) / 2.0
    cand = np.concatenate([[w0, w1], mids[(mids > w0) & (mids < w1)]])
    pos = np.searchsorted(xs, cand)
    left = np.where(pos > 0, np.abs(cand - xs[np.maximum(pos - 1, 0)]), np.inf)
    right = np.where(pos < xs.size, np.abs(xs[np.minimum(pos, xs.size - 1)] - cand), np.inf)
    return float(np.minimum(left, right).max())


# ---------------------------------------------------------------------------
# Certified sandwich bounds
# ---------------------------------------------------------------------------


def covering_radius_bounds(
    domain: Domain, x: SampleSet | np.ndarray, probe: ProbeNet
) -> CoveringRadiusInterval:
    """Sandwich [L, L + delta] for the covering radius from a certified probe net.

    L maximizes the nearest-sample distance over probe points, so L <= rho;
    any domain point is within delta of a probe point, so rho <= L + delta.
    """
    points = x.points if isinstance(x, SampleSet) else np.asarray(x, dtype=float)
    if points.ndim == 1:
        points = points.reshape(-1, 1)
    if probe.domain != domain:
        raise ValueError("probe net was certified for a different domain")
    index = build_index(points)
    lower = float(index.nearest_distances(probe.points).max())
    return CoveringRadiusInterval(
        lower=lower, upper=lower + probe.certified_mesh, probe_mesh=probe.certified_mesh
    )


# ---------------------------------------------------------------------------
# Ball measures
# ---------------------------------------------------------------------------


def _arcsine_cdf(x: float) -> float:
    return 1.0 - math.acos(min(1.0, max(-1.0, x))) / math.pi


def ball_measure(
    domain: Domain,
    center,
    r: float,
    mc_budget: int = 100_000,
    seed: SeedSpec | None = None,
) -> tuple[float, float]:
    """Normalized measure of the ball B(center, r): (estimate, 99% CI half-width).

    Exact closed forms for the interval, arcsine interval and circle
    (half-width 0); Monte Carlo with a binomial normal-approximation CI
    otherwise.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    c = np.asarray(center, dtype=float).ravel()
    if isinstance(domain, IntervalUniform):
        return max(0.0, min(1.0, c[0] + r) - max(0.0, c[0] - r)), 0.0
    if isinstance(domain, ArcsineInterval):
        return _arcsine_cdf(c[0] + r) - _arcsine_cdf(c[0] - r), 0.0
    if isinstance(domain, Sphere) and domain.d == 1:
        if r >= 2.0:
            return 1.0, 0.0
        return 2.0 * math.asin(r / 2.0) / math.pi, 0.0

    if mc_budget < 100:
        raise ValueError("Monte Carlo ball measure needs a budget of at least 100")
    from .sampler import sample  # local import to avoid cycle at module load

    seed = seed or SeedSpec(0, 0)
    pts = sample(domain, mc_budget, seed).points
    hits = np.linalg.norm(pts - c, axis=1) <= r
    p = float(hits.mean())
    half = 2.576 * math.sqrt(max(p * (1.0 - p), 1.0 / mc_budget) / mc_budget)
    return p, half


# ---------------------------------------------------------------------------
# Net verdicts
# ---------------------------------------------------------------------------


def is_eps_net(domain: Domain, a_points, eps: float, probe: ProbeNet) -> NetVerdict:
    """Is `a_points` an eps-net of the domain (covering radius <= eps)?"""
    if eps <= 0:
        raise ValueError("eps must be positive")
    bounds = covering_radius_bounds(domain, np.asarray(a_points, dtype=float), probe)
    if bounds.upper <= eps:
        return NetVerdict(Verdict.YES, eps - bounds.upper)
    if bounds.lower > eps:
        return NetVerdict(Verdict.NO, bounds.lower - eps)
    return NetVerdict(Verdict.UNKNOWN, min(eps - bounds.lower, bounds.upper - eps))


def is_measure_eps_net(
    domain: Domain,
    a_points,
    eps: float,
    probe: ProbeNet,
    mc_budget: int = 20_000,
    seed: SeedSpec | None = None,
) -> NetVerdict:
    """Is `a_points` a measure eps-net (every ball of measure >= eps meets it)?

    For each probe point y with nearest-sample distance r_y, the ball
    B(y, r_y) misses the configuration up to its boundary. If some such ball
    has measure above eps (beyond its CI), the answer is No. If every ball
    B(y, r_y + mesh) stays below eps, the answer is Yes: an arbitrary empty
    ball B(z, r) has its center within mesh of a probe point y, r <= r_y and
    B(z, r) subset of B(y, r_y + mesh). Otherwise Unknown.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    a = np.asarray(a_points, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    index = build_index(a)
    r_y = index.nearest_distances(probe.points)
    seed = seed or SeedSpec(0, 0)

    worst_no = -math.inf
    worst_yes = -math.inf
    for k in np.argsort(-r_y)[: min(len(r_y), 256)]:
        y = probe.points[k]
        if r_y[k] > 0.0:
            est, half = ball_measure(domain, y, float(r_y[k]), mc_budget, seed)
            if est - half > eps:
                return NetVerdict(Verdict.NO, est - half - eps)
            worst_no = max(worst_no, est - half - eps)
        est_hi, half_hi = ball_measure(
            domain, y, float(r_y[k]) + probe.certified_mesh, mc_budget, seed
        )
        worst_yes = max(worst_yes, est_hi + half_hi)
    if worst_yes < eps:
        return NetVerdict(Verdict.YES, eps - worst_yes)
    return NetVerdict(Verdict.UNKNOWN, 0.0)


# ---------------------------------------------------------------------------
# Probe mesh scale for studies
# ---------------------------------------------------------------------------


def rho_scale(domain: Domain, n: int) -> float:
    """Predicted covering-radius scale at sample size N, used to size probe
    meshes and to rescale study outputs."""
    log_n = math.log(n)
    if isinstance(domain, Cantor):
        return (log_n / n) ** (math.log(3.0) / math.log(2.0))
    if isinstance(domain, ArcsineInterval):
        return log_n / n
    from .spaces import hausdorff_mass

    s = domain.intrinsic_dim
    mass = hausdorff_mass(domain)
    return (mass / unit_ball_volume(int(s)) * log_n / n) ** (1.0 / s)


def probe_mesh_for(domain: Domain, n: int, eta: float = 0.05) -> float:
    return eta * rho_scale(domain, n)
