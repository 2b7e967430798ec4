"""Command-line entry point.

Exit codes: 0 success, 1 check failed, 2 bad configuration, 3 instance too
large for the requested exact method.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import repro
from .algebra import BusConfig
from .circuits import build_routed_cnot, build_swap_transport, depth, verify_cleanup
from .congestion import validate_round_formula
from .errors import ConfigurationError, ResourceError, TopologyError
from .noise_lab import (
    DEFAULT_T1,
    SWEEP_COLUMNS,
    WIN_COLUMNS,
    NoiseModel,
    TrajectoryConfig,
    distance_sweep,
    threshold_scan,
)
from .report import emit, header, render_csv, render_json
from .route_compiler import FAMILIES, TOPOLOGIES, run_seed_sweep

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3


def _output(args, config: dict, payload: dict, columns=None, rows=None) -> None:
    head = header(args.command, getattr(args, "seed", None), config)
    if args.format == "csv" and columns is not None:
        emit(render_csv(head, columns, rows), args.out)
    else:
        emit(render_json(head, payload), args.out)


def cmd_validate_cnot(args) -> int:
    K = args.k_buses[0]
    cfg = BusConfig(args.d, K)
    circ = build_routed_cnot(range(args.L + 1), K, cfg)
    rep = verify_cleanup(circ)
    config = {"L": args.L, "d": args.d, "K": K}
    _output(args, config, {"passed": rep.passed(), **rep.to_dict()})
    return EXIT_OK if rep.passed() else EXIT_FAIL


def cmd_depth_sweep(args) -> int:
    lo, hi = (args.L[0], args.L[-1]) if args.L else (2, 20)
    rows = [
        {"L": L, "routed_depth": depth(build_routed_cnot(range(L + 1))), "swap_depth": depth(build_swap_transport(range(L + 1)))}
        for L in range(lo, hi + 1)
    ]
    ok = all(r["routed_depth"] == 2 * r["L"] + 1 and r["swap_depth"] == 3 * r["L"] for r in rows)
    _output(args, {"L_min": lo, "L_max": hi}, {"passed": ok, "rows": rows}, ["L", "routed_depth", "swap_depth"], rows)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_congestion_validate(args) -> int:
    n_max = args.n if args.n is not None else 5
    if not 1 <= n_max <= 5:
        raise ConfigurationError(f"--n must lie in 1..5 for exhaustive validation, got {n_max}")
    rep = validate_round_formula(n_max, args.k_buses)
    print(f"validated {rep.graphs_checked} graphs in {rep.elapsed:.2f}s", file=sys.stderr)
    _output(args, {"n_max": n_max, "K_list": args.k_buses}, rep.to_dict(timing=False))
    return EXIT_OK if rep.discrepancies == 0 else EXIT_FAIL


def cmd_bench(args) -> int:
    n = args.n if args.n is not None else 8
    seeds = list(range(args.seed, args.seed + args.seeds))
    rep = run_seed_sweep(args.family, args.topology, n, seeds, args.k_buses)
    config = {"family": args.family, "topology": args.topology, "n": n, "seeds": seeds, "K_list": args.k_buses}
    payload = {"summary": rep.summary(), "layers": [dict(zip(rep.csv_columns(), row)) for row in rep.csv_rows()]}
    _output(args, config, payload, rep.csv_columns(), rep.csv_rows())
    return EXIT_OK


def _t1_model(args) -> NoiseModel:
    return NoiseModel(t1=tuple(args.t1) if args.t1 else DEFAULT_T1)


def cmd_noise_sweep(args) -> int:
    d = args.d if args.d is not None else 5
    L_values = args.L if args.L else list(range(2, 7))
    model = _t1_model(args)
    cfg = TrajectoryConfig(args.trajectories, args.seed)
    rows = distance_sweep(L_values, d, model, cfg)
    config = {"d": d, "L": L_values, "model": model.to_dict(), "trajectories": args.trajectories}
    _output(args, config, {"rows": rows}, SWEEP_COLUMNS, rows)
    return EXIT_OK


def cmd_threshold_scan(args) -> int:
    d = args.d if args.d is not None else 8
    L = args.L[0] if args.L else 3
    model = _t1_model(args)
    cfg = TrajectoryConfig(args.trajectories, args.seed)
    rows = threshold_scan(args.durations, args.multipliers, L, d, cfg, model)
    config = {"d": d, "L": L, "durations": args.durations, "multipliers": args.multipliers, "model": model.to_dict(), "trajectories": args.trajectories}
    _output(args, config, {"rows": rows}, WIN_COLUMNS, rows)
    return EXIT_OK


def cmd_repro(args) -> int:
    results = repro.run_all(args.only or None, echo=lambda line: print(line, file=sys.stderr))
    payload = {"all_passed": all(r.ok for r in results), "criteria": [r.to_dict(timing=False) for r in results]}
    _output(args, {"criteria": [r.number for r in results]}, payload)
    return EXIT_OK if payload["all_passed"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specroute", description="Spectral-bus qudit routing experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, **defaults):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=defaults.get("format", "json"))
        return p

    p = add("validate-cnot", cmd_validate_cnot, "check a routed CNOT on a chain against the ideal CX")
    p.add_argument("--L", type=int, default=4)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--k-buses", type=int, nargs="+", default=[1])

    p = add("depth-sweep", cmd_depth_sweep, "scheduled depth of routed CNOT vs SWAP transport", format="csv")
    p.add_argument("--L", type=int, nargs="+", help="L_min L_max (default 2 20)")

    p = add("congestion-validate", cmd_congestion_validate, "exhaustive check of ceil(chi/K) rounds")
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--k-buses", type=int, nargs="+", default=[1, 2, 3])

    p = add("bench", cmd_bench, "route-demand benchmark for one family and topology")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--topology", choices=TOPOLOGIES, default="line")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--seeds", type=int, default=1, help="number of consecutive seeds to pool")
    p.add_argument("--k-buses", type=int, nargs="+", default=[1, 2, 3])

    p = add("noise-sweep", cmd_noise_sweep, "routed vs SWAP fidelity over chain length", format="csv")
    p.add_argument("--d", type=int, default=5)
    p.add_argument("--L", type=int, nargs="+")
    p.add_argument("--trajectories", type=int, default=500)
    p.add_argument("--t1", type=float, nargs="+", help="relaxation times for levels 1, 2, ...")

    p = add("threshold-scan", cmd_threshold_scan, "routed-minus-SWAP fidelity over duration and lifetime gain", format="csv")
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--L", type=int, nargs=1)
    p.add_argument("--trajectories", type=int, default=500)
    p.add_argument("--t1", type=float, nargs="+", help="relaxation times for levels 1, 2, ...")
    p.add_argument("--durations", type=float, nargs="+", default=[1.0, 0.8, 0.6, 0.4, 0.3, 0.2])
    p.add_argument("--multipliers", type=float, nargs="+", default=[1.0, 1.5, 2.0, 3.0, 5.0, 10.0])

    p = add("repro", cmd_repro, "run every acceptance criterion and print a pass/fail matrix")
    p.add_argument("--only", type=int, nargs="+", help="criterion numbers to run")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConfigurationError, TopologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
