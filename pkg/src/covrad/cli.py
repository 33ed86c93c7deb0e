"""Command-line interface for the study runners.

Each subcommand reads an optional JSON config file (--config); explicit flags
override config fields. Exit codes: 0 success, 1 invalid configuration,
2 budget refusal.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import spaces
from .errors import BudgetExceededError
from .experiments import (
    StudyConfig,
    dump_f_grid,
    run_arcsine_study,
    run_epsnet_study,
    run_expectation_study,
    run_random_vs_structured,
    run_tail_study,
    run_zn_study,
)

BUILTIN_DOMAINS = {
    "interval": {"kind": "IntervalUniform", "params": {}},
    "arcsine": {"kind": "ArcsineInterval", "params": {}},
    "circle": {"kind": "Sphere", "params": {"d": 1}},
    "sphere2": {"kind": "Sphere", "params": {"d": 2}},
    "ball2": {"kind": "Ball", "params": {"d": 2}},
    "ball3": {"kind": "Ball", "params": {"d": 3}},
    "cube2": {"kind": "Cube", "params": {"d": 2}},
    "cube3": {"kind": "Cube", "params": {"d": 3}},
    "cantor": {"kind": "Cantor", "params": {"depth": 40}},
}


def _resolve_domain(spec: str | dict) -> spaces.Domain:
    if isinstance(spec, dict):
        return spaces.domain_from_dict(spec)
    if spec in BUILTIN_DOMAINS:
        return spaces.domain_from_dict(BUILTIN_DOMAINS[spec])
    # otherwise treat as a path to a domain JSON document
    with open(spec) as fh:
        return spaces.domain_from_dict(json.load(fh))


def _merge_config(args: argparse.Namespace, defaults: dict) -> dict:
    cfg = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg.update(json.load(fh))
    for key in defaults:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.add_argument("--seed", dest="master_seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--force", action="store_true", default=None,
                   help="run even if the cost estimate exceeds the budget")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="covrad",
                                     description="covering-radius studies of random points")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("study", help="expectation study against the limit constant")
    p.add_argument("--domain", help=f"one of {sorted(BUILTIN_DOMAINS)} or a JSON file")
    p.add_argument("--n-grid", dest="n_grid", type=int, nargs="+")
    p.add_argument("--p", dest="p", type=float)
    p.add_argument("--eta", dest="probe_eta", type=float)
    _add_common(p)

    p = sub.add_parser("tail", help="tail probabilities of the covering radius")
    p.add_argument("--domain")
    p.add_argument("--n", dest="n", type=int)
    p.add_argument("--thresholds", type=float, nargs="+")
    p.add_argument("--eta", dest="probe_eta", type=float)
    _add_common(p)

    p = sub.add_parser("zn", help="rescaled sphere covering radius Z_N")
    p.add_argument("--d", type=int)
    p.add_argument("--n-grid", dest="n_grid", type=int, nargs="+")
    p.add_argument("--eta", dest="probe_eta", type=float)
    _add_common(p)

    p = sub.add_parser("arcsine", help="windowed covering radii on the arcsine interval")
    p.add_argument("--a", dest="a_exponent", type=float)
    p.add_argument("--side", choices=["right_edge", "interior"])
    p.add_argument("--n-grid", dest="n_grid", type=int, nargs="+")
    _add_common(p)

    p = sub.add_parser("epsnet", help="eps-net success fractions")
    p.add_argument("--domain")
    p.add_argument("--n-grid", dest="n_grid", type=int, nargs="+")
    p.add_argument("--c-mult", dest="c_mult", type=float)
    _add_common(p)

    p = sub.add_parser("fgrid", help="dump the occupancy function over a grid")
    p.add_argument("--N", dest="n_values", type=int, nargs="+")
    p.add_argument("--n", dest="n_cell_measures", type=float, nargs="+")
    p.add_argument("--m", dest="m_values", type=int, nargs="+")
    _add_common(p)

    p = sub.add_parser("versus", help="random vs structured grid configurations")
    p.add_argument("--d", type=int)
    p.add_argument("--n-grid", dest="n_grid", type=int, nargs="+")
    p.add_argument("--eta", dest="probe_eta", type=float)
    _add_common(p)

    p = sub.add_parser("constants", help="print the limit-constant table")
    return parser


def _cmd_study(args) -> int:
    cfg = _merge_config(args, {
        "domain": "interval", "n_grid": [100, 1000], "trials": 100, "p": 1.0,
        "probe_eta": 0.05, "master_seed": 0, "out": None, "force": False,
    })
    config = StudyConfig(
        domain=_resolve_domain(cfg["domain"]), n_grid=cfg["n_grid"], trials=cfg["trials"],
        p=cfg["p"], probe_eta=cfg["probe_eta"], master_seed=cfg["master_seed"],
        out=cfg["out"], force=bool(cfg["force"]),
    )
    if config.trials < 30:
        print("warning: fewer than 30 trials; normal CIs are unreliable", file=sys.stderr)
    for row in run_expectation_study(config):
        print(f"N={row.n} rescaled={row.rescaled:.6g} ci={row.ci_half_width:.3g} "
              f"target={row.target if row.target is not None else 'n/a'}")
    return 0


def _cmd_tail(args) -> int:
    cfg = _merge_config(args, {
        "domain": "interval", "n": 1000, "trials": 200, "thresholds": None,
        "probe_eta": 0.05, "master_seed": 0, "out": None,
    })
    if cfg["thresholds"] is None:
        n = cfg["n"]
        base = math.log(n) / n
        cfg["thresholds"] = [k * base for k in (1, 2, 5, 10)]
    rows = run_tail_study(_resolve_domain(cfg["domain"]), cfg["n"], cfg["trials"],
                          cfg["thresholds"], cfg["master_seed"], cfg["probe_eta"], cfg["out"])
    for row in rows:
        print(f"t={row.threshold:.6g} P(L>=t)={row.prob_lower_exceeds:.4f} "
              f"P(U>=t)={row.prob_upper_exceeds:.4f}")
    return 0


def _cmd_zn(args) -> int:
    cfg = _merge_config(args, {
        "d": 1, "n_grid": [100, 1000, 10000], "trials": 100, "probe_eta": 0.05,
        "master_seed": 0, "out": None,
    })
    for row in run_zn_study(cfg["d"], cfg["n_grid"], cfg["trials"], cfg["master_seed"],
                            cfg["probe_eta"], cfg["out"]):
        print(f"N={row.n} mean={row.mean:.4f} stdev={row.stdev:.4f} "
              f"frac|Z-1|<=0.2={row.frac_within_02:.3f}")
    return 0


def _cmd_arcsine(args) -> int:
    cfg = _merge_config(args, {
        "a_exponent": 2.0, "side": "right_edge", "n_grid": [1000, 10000],
        "trials": 200, "master_seed": 0, "out": None,
    })
    for row in run_arcsine_study(cfg["a_exponent"], cfg["side"], cfg["n_grid"],
                                 cfg["trials"], cfg["master_seed"], cfg["out"]):
        print(f"N={row.n} rescaled={row.rescaled:.6g} ci={row.ci_half_width:.3g}")
    return 0


def _cmd_epsnet(args) -> int:
    cfg = _merge_config(args, {
        "domain": "circle", "n_grid": [1000], "trials": 200, "c_mult": 3.0,
        "master_seed": 0, "out": None,
    })
    for row in run_epsnet_study(_resolve_domain(cfg["domain"]), cfg["n_grid"],
                                cfg["trials"], cfg["c_mult"], cfg["master_seed"], cfg["out"]):
        print(f"N={row['N']} eps={row['eps']:.6g} yes={row['yes_fraction']:.3f} "
              f"yes_or_unknown={row['yes_or_unknown_fraction']:.3f}")
    return 0


def _cmd_fgrid(args) -> int:
    cfg = _merge_config(args, {
        "n_values": [100, 1000], "n_cell_measures": [10.0, 50.0], "m_values": [2, 5, 10],
        "out": None,
    })
    rows = dump_f_grid(cfg["n_values"], cfg["n_cell_measures"], cfg["m_values"], cfg["out"])
    for row in rows:
        print(f"N={row['N']} n={row['n']} m={row['m']} f={row['f_dp']:.6g} "
              f"lower={row['f_lower_bound']:.6g}")
    return 0


def _cmd_versus(args) -> int:
    cfg = _merge_config(args, {
        "d": 2, "n_grid": [100, 10000], "trials": 50, "probe_eta": 0.05,
        "master_seed": 0, "out": None,
    })
    for row in run_random_vs_structured(cfg["d"], cfg["n_grid"], cfg["trials"],
                                        cfg["master_seed"], cfg["probe_eta"], cfg["out"]):
        print(f"N={row['N']} random={row['random_mean_rho']:.6g} "
              f"grid={row['grid_rho']:.6g} ratio={row['ratio']:.3f}")
    return 0


def _cmd_constants(args) -> int:
    from .spaces import (Ball, Cube, IntervalUniform, Sphere, limit_constant,
                         unit_box_polyhedron)

    table = [
        ("circle (S^1)", Sphere(1)),
        ("sphere (S^2)", Sphere(2)),
        ("interval [0,1]", IntervalUniform()),
        ("ball d=2", Ball(2)),
        ("ball d=3", Ball(3)),
        ("cube d=2", Cube(2)),
        ("cube d=3", Cube(3)),
        ("unit box (polyhedron)", unit_box_polyhedron()),
    ]
    print(f"{'domain':<24}{'limit constant (p=1)':>22}")
    for name, dom in table:
        print(f"{name:<24}{limit_constant(dom, 1.0):>22.12f}")
    return 0


COMMANDS = {
    "study": _cmd_study,
    "tail": _cmd_tail,
    "zn": _cmd_zn,
    "arcsine": _cmd_arcsine,
    "epsnet": _cmd_epsnet,
    "fgrid": _cmd_fgrid,
    "versus": _cmd_versus,
    "constants": _cmd_constants,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, KeyError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
