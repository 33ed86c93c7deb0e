"""Monte Carlo study orchestration and result persistence.

Every study follows the same pattern: sample point configurations per trial
from counter-based streams, reduce covering statistics over trials in stream
order (deterministic), and emit CSV rows with a JSONL metadata sidecar.
Data rows are byte-identical across reruns of the same configuration.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .covering import (
    WindowSpec,
    covering_radius_1d,
    covering_radius_bounds,
    covering_radius_window,
    is_eps_net,
    probe_mesh_for,
    rho_scale,
    Verdict,
)
from .errors import BudgetExceededError, UnsupportedDomainError
from .nets import build_probe_net
from .sampler import GENERATOR_NAME, SeedSpec, sample
from .spaces import (
    ArcsineInterval,
    Cantor,
    Cube,
    Domain,
    IntervalUniform,
    Sphere,
    hausdorff_mass,
    limit_constant,
    unit_ball_volume,
)

BUDGET_LIMIT = 1e10  # estimated distance evaluations before refusal


# ---------------------------------------------------------------------------
# Configuration and rows
# ---------------------------------------------------------------------------


@dataclass
class StudyConfig:
    domain: Domain
    n_grid: list[int]
    trials: int
    p: float = 1.0
    probe_eta: float = 0.05
    master_seed: int = 0
    out: str | None = None
    force: bool = False

    def __post_init__(self):
        if sorted(set(self.n_grid)) != list(self.n_grid):
            raise ValueError("n_grid must be strictly increasing")
        if self.trials < 2:
            raise ValueError("need at least two trials")
        if self.probe_eta <= 0:
            raise ValueError("probe_eta must be positive")


@dataclass(frozen=True)
class StudyRow:
    n: int
    trials: int
    mean_rho_p_lower: float
    mean_rho_p_upper: float
    ci_half_width: float
    rescaled: float
    target: float | None


@dataclass(frozen=True)
class TailRow:
    n: int
    threshold: float
    prob_lower_exceeds: float
    prob_upper_exceeds: float
    bound_form: str


@dataclass(frozen=True)
class ZnRow:
    n: int
    trials: int
    mean: float
    stdev: float
    frac_within_01: float
    frac_within_02: float


# ---------------------------------------------------------------------------
# Output writer
# ---------------------------------------------------------------------------


class StudyWriter:
    """Appends CSV rows incrementally and records run metadata as JSONL."""

    def __init__(self, path: str | Path | None, header: list[str]):
        self.path = Path(path) if path else None
        self.header = header
        self.t0 = time.time()
        if self.path:
            self._fh = open(self.path, "w", buffering=1)
            self._fh.write(",".join(header) + "\n")
            self.meta_path = self.path.with_suffix(self.path.suffix + ".meta.jsonl")
        else:
            self._fh = None

    def write(self, values) -> None:
        if self._fh:
            self._fh.write(",".join(_fmt(v) for v in values) + "\n")

    def close(self, config_echo: dict) -> None:
        if self._fh:
            self._fh.close()
            meta = {
                "config": config_echo,
                "generator": GENERATOR_NAME,
                "version": __version__,
                "wall_time_s": round(time.time() - self.t0, 3),
            }
            with open(self.meta_path, "a") as fh:
                fh.write(json.dumps(meta) + "\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# Budget model
# ---------------------------------------------------------------------------


def estimate_cost(domain: Domain, n: int, trials: int, eta: float) -> float:
    """Rough count of distance evaluations: T * (N + P * q), q ~ log2 N."""
    if _has_exact_1d_path(domain):
        probe_count = 0.0
    else:
        mesh = probe_mesh_for(domain, n, eta)
        probe_count = _probe_count_estimate(domain, mesh)
    return trials * (n + probe_count * max(1.0, math.log2(n)))


def _probe_count_estimate(domain: Domain, mesh: float) -> float:
    s = domain.intrinsic_dim
    if isinstance(domain, Cantor):
        k = math.ceil(-math.log(mesh) / math.log(3.0))
        return 2.0 ** (min(k, domain.depth) + 1)
    try:
        mass = hausdorff_mass(domain)
    except UnsupportedDomainError:
        mass = domain.diameter
    step = 2.0 * mesh / math.sqrt(max(1.0, s))
    return mass / step**s * (3.0 if domain.kind in ("Sphere", "Ball") else 1.0)


def check_budget(config: StudyConfig) -> float:
    cost = sum(estimate_cost(config.domain, n, config.trials, config.probe_eta)
               for n in config.n_grid)
    print(f"estimated cost: {cost:.3g} distance evaluations")
    if cost > BUDGET_LIMIT and not config.force:
        raise BudgetExceededError(
            f"estimated cost {cost:.3g} exceeds {BUDGET_LIMIT:.0e}; rerun with --force"
        )
    return cost


# ---------------------------------------------------------------------------
# Core per-trial covering evaluation
# ---------------------------------------------------------------------------


def _has_exact_1d_path(domain: Domain) -> bool:
    return isinstance(domain, IntervalUniform) or (
        isinstance(domain, Sphere) and domain.d == 1
    )


def _trial_bounds(domain: Domain, n: int, seed: SeedSpec, probe) -> tuple[float, float]:
    sset = sample(domain, n, seed)
    if probe is None:
        rho = covering_radius_1d(domain, sset)
        return rho, rho
    b = covering_radius_bounds(domain, sset, probe)
    return b.lower, b.upper


def _probe_for(domain: Domain, n: int, eta: float):
    if _has_exact_1d_path(domain):
        return None
    return build_probe_net(domain, probe_mesh_for(domain, n, eta))


# ---------------------------------------------------------------------------
# Studies
# ---------------------------------------------------------------------------


def run_expectation_study(config: StudyConfig) -> list[StudyRow]:
    """Per N: trial means of rho^p bounds, CI, and the rescaled midpoint
    against the domain's limit constant (absent where no sharp constant)."""
    check_budget(config)
    try:
        target = limit_constant(config.domain, config.p)
    except UnsupportedDomainError:
        target = None
    header = ["N", "T", "mean_rho_p_lower", "mean_rho_p_upper",
              "ci_half_width", "rescaled", "target"]
    writer = StudyWriter(config.out, header)
    rows = []
    for n in config.n_grid:
        probe = _probe_for(config.domain, n, config.probe_eta)
        lows = np.empty(config.trials)
        ups = np.empty(config.trials)
        for t in range(config.trials):
            lo, up = _trial_bounds(config.domain, n, SeedSpec(config.master_seed, t), probe)
            lows[t], ups[t] = lo**config.p, up**config.p
        mids = (lows + ups) / 2.0
        ci = 2.576 * float(mids.std(ddof=1)) / math.sqrt(config.trials)
        rescale = (n / math.log(n)) ** (config.p / config.domain.intrinsic_dim)
        row = StudyRow(
            n=n,
            trials=config.trials,
            mean_rho_p_lower=float(lows.mean()),
            mean_rho_p_upper=float(ups.mean()),
            ci_half_width=ci,
            rescaled=float(mids.mean()) * rescale,
            target=target,
        )
        rows.append(row)
        writer.write([row.n, row.trials, row.mean_rho_p_lower, row.mean_rho_p_upper,
                      row.ci_half_width, row.rescaled, row.target])
    writer.close(_config_echo(config))
    return rows


def circle_expectation_oracle(n: int, circumference: float = 2.0 * math.pi) -> float:
    """Exact expected arclength covering radius of N uniform points on a
    circle: half the expected maximal spacing, L * H_N / (2N)."""
    if n < 1:
        raise ValueError("need at least one point")
    harmonic = sum(1.0 / k for k in range(1, n + 1))
    return circumference * harmonic / (2.0 * n)


def run_tail_study(domain: Domain, n: int, trials: int, thresholds, master_seed: int = 0,
                   probe_eta: float = 0.05, out: str | None = None) -> list[TailRow]:
    """Empirical tail probabilities P(L >= t) and P(U >= t) per threshold."""
    thresholds = list(thresholds)
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])) or any(
        t < 0 for t in thresholds
    ):
        raise ValueError("thresholds must be nonnegative and increasing")
    probe = _probe_for(domain, n, probe_eta)
    lows = np.empty(trials)
    ups = np.empty(trials)
    for t in range(trials):
        lows[t], ups[t] = _trial_bounds(domain, n, SeedSpec(master_seed, t), probe)
    writer = StudyWriter(out, ["N", "threshold", "prob_lower_exceeds",
                               "prob_upper_exceeds", "bound_form"])
    rows = []
    for thr in thresholds:
        row = TailRow(
            n=n,
            threshold=thr,
            prob_lower_exceeds=float((lows >= thr).mean()),
            prob_upper_exceeds=float((ups >= thr).mean()),
            bound_form="upper-tail-polynomial-decay",
        )
        rows.append(row)
        writer.write([row.n, row.threshold, row.prob_lower_exceeds,
                      row.prob_upper_exceeds, row.bound_form])
    writer.close({"study": "tail", "N": n, "trials": trials, "seed": master_seed})
    return rows


def run_zn_study(d: int, n_grid, trials: int, master_seed: int = 0,
                 probe_eta: float = 0.05, out: str | None = None) -> list[ZnRow]:
    """Distribution of the rescaled sphere covering radius Z_N, which
    converges in probability to 1."""
    if d not in (1, 2):
        raise ValueError("Z_N study supports d in {1, 2}")
    domain = Sphere(d)
    scale_const = unit_ball_volume(d) / ((d + 1) * unit_ball_volume(d + 1))
    writer = StudyWriter(out, ["N", "T", "mean", "stdev",
                               "frac_within_01", "frac_within_02"])
    rows = []
    for n in n_grid:
        probe = _probe_for(domain, n, probe_eta)
        zs = np.empty(trials)
        factor = (scale_const * n / math.log(n)) ** (1.0 / d)
        for t in range(trials):
            lo, up = _trial_bounds(domain, n, SeedSpec(master_seed, t), probe)
            zs[t] = (lo + up) / 2.0 * factor
        row = ZnRow(
            n=n,
            trials=trials,
            mean=float(zs.mean()),
            stdev=float(zs.std(ddof=1)),
            frac_within_01=float((np.abs(zs - 1.0) <= 0.1).mean()),
            frac_within_02=float((np.abs(zs - 1.0) <= 0.2).mean()),
        )
        rows.append(row)
        writer.write([row.n, row.trials, row.mean, row.stdev,
                      row.frac_within_01, row.frac_within_02])
    writer.close({"study": "zn", "d": d, "n_grid": list(n_grid),
                  "trials": trials, "seed": master_seed})
    return rows


def run_arcsine_study(a_exponent: float, side: str, n_grid, trials: int,
                      master_seed: int = 0, out: str | None = None) -> list[StudyRow]:
    """Windowed covering radii on the arcsine interval, rescaled by the
    two-sided-bound rate for the given window regime."""
    domain = ArcsineInterval()
    window = WindowSpec(a_exponent=a_exponent, side=side)
    writer = StudyWriter(out, ["N", "T", "mean_rho_p_lower", "mean_rho_p_upper",
                               "ci_half_width", "rescaled", "target"])
    rows = []
    for n in n_grid:
        vals = np.empty(trials)
        for t in range(trials):
            sset = sample(domain, n, SeedSpec(master_seed, t))
            vals[t] = covering_radius_window(domain, sset, window, n)
        if side == "interior":
            rescale = n / math.log(n)
        elif a_exponent >= 2.0:
            rescale = float(n) ** 2
        else:
            rescale = float(n) ** (1.0 + a_exponent / 2.0) / math.log(n)
        mean = float(vals.mean())
        ci = 2.576 * float(vals.std(ddof=1)) / math.sqrt(trials)
        row = StudyRow(n=n, trials=trials, mean_rho_p_lower=mean, mean_rho_p_upper=mean,
                       ci_half_width=ci, rescaled=mean * rescale, target=None)
        rows.append(row)
        writer.write([row.n, row.trials, row.mean_rho_p_lower, row.mean_rho_p_upper,
                      row.ci_half_width, row.rescaled, row.target])
    writer.close({"study": "arcsine", "a": a_exponent, "side": side,
                  "n_grid": list(n_grid), "trials": trials, "seed": master_seed})
    return rows


def run_random_vs_structured(d: int, n_grid, trials: int, master_seed: int = 0,
                             probe_eta: float = 0.05, out: str | None = None) -> list[dict]:
    """Mean random covering radius vs the centered regular grid configuration
    on the cube; the ratio grows like (log N)^(1/d)."""
    if d not in (1, 2, 3):
        raise ValueError("random-vs-structured study supports d in {1, 2, 3}")
    domain = IntervalUniform() if d == 1 else Cube(d)
    writer = StudyWriter(out, ["N", "T", "random_mean_rho", "grid_rho", "ratio"])
    rows = []
    for n in n_grid:
        probe = _probe_for(domain, n, probe_eta)
        mids = np.empty(trials)
        for t in range(trials):
            lo, up = _trial_bounds(domain, n, SeedSpec(master_seed, t), probe)
            mids[t] = (lo + up) / 2.0
        k = int(math.floor(n ** (1.0 / d)))
        grid_rho = math.sqrt(d) / (2.0 * k)  # centered k^d lattice, exact
        row = {"N": n, "T": trials, "random_mean_rho": float(mids.mean()),
               "grid_rho": grid_rho, "ratio": float(mids.mean()) / grid_rho}
        rows.append(row)
        writer.write([row["N"], row["T"], row["random_mean_rho"],
                      row["grid_rho"], row["ratio"]])
    writer.close({"study": "versus", "d": d, "n_grid": list(n_grid),
                  "trials": trials, "seed": master_seed})
    return rows


def run_epsnet_study(domain: Domain, n_grid, trials: int, c_mult: float,
                     master_seed: int = 0, out: str | None = None) -> list[dict]:
    """Fraction of random configurations that form an eps-net at
    eps = c_mult * (mass/upsilon_s * log N / N)^(1/s)."""
    if c_mult <= 0:
        raise ValueError("c_mult must be positive")
    writer = StudyWriter(out, ["N", "T", "eps", "yes_fraction",
                               "yes_or_unknown_fraction"])
    rows = []
    for n in n_grid:
        eps = c_mult * rho_scale(domain, n)
        probe = build_probe_net(domain, eps / 20.0)
        yes = 0
        yes_or_unknown = 0
        for t in range(trials):
            sset = sample(domain, n, SeedSpec(master_seed, t))
            verdict = is_eps_net(domain, sset.points, eps, probe)
            yes += verdict.value is Verdict.YES
            yes_or_unknown += verdict.value in (Verdict.YES, Verdict.UNKNOWN)
        row = {"N": n, "T": trials, "eps": eps, "yes_fraction": yes / trials,
               "yes_or_unknown_fraction": yes_or_unknown / trials}
        rows.append(row)
        writer.write([row["N"], row["T"], row["eps"], row["yes_fraction"],
                      row["yes_or_unknown_fraction"]])
    writer.close({"study": "epsnet", "n_grid": list(n_grid), "trials": trials,
                  "c_mult": c_mult, "seed": master_seed})
    return rows


def dump_f_grid(n_values, n_cell_measures, m_values, out: str | None = None) -> list[dict]:
    """Evaluate f and its lower bound over a parameter grid, as CSV rows."""
    from .auxfn import OccupancyParams, f_dp, f_lower_bound

    writer = StudyWriter(out, ["N", "n", "m", "f_dp", "f_lower_bound"])
    rows = []
    for big_n in n_values:
        for n in n_cell_measures:
            for m in m_values:
                if not (m <= n <= big_n):
                    continue
                params = OccupancyParams(big_n, n, m)
                row = {"N": big_n, "n": n, "m": m,
                       "f_dp": f_dp(params), "f_lower_bound": f_lower_bound(params)}
                rows.append(row)
                writer.write([row["N"], row["n"], row["m"], row["f_dp"],
                              row["f_lower_bound"]])
    writer.close({"study": "fgrid"})
    return rows


def _config_echo(config: StudyConfig) -> dict:
    from .spaces import domain_to_dict

    return {
        "domain": domain_to_dict(config.domain),
        "n_grid": list(config.n_grid),
        "trials": config.trials,
        "p": config.p,
        "probe_eta": config.probe_eta,
        "master_seed": config.master_seed,
    }


def load_bands() -> dict:
    """Pilot-derived acceptance bands (with the seeds that produced them)."""
    with resources.files("covrad").joinpath("bands.json").open() as fh:
        return json.load(fh)
