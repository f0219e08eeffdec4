"""Command-line interface: prox, solve, mincut, paraflow, verify and bench."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import bench, io, maxflow, netrep, oracle, paraflow, setfn
from .errors import NumericalError, SubmodProxError
from .prox import ProxProblem, prox, reduce
from .separable import conjugate_exponent
from .solver import LeastSquaresTask, fista

log = logging.getLogger("submodprox")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def _p_value(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"p must be a number or 'inf', got {text!r}") from None
    if not p > 1:
        raise argparse.ArgumentTypeError("p must be greater than 1")
    return p


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as e:
        raise io.InputError(f"cannot write {path}: {e.strerror}") from None


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _add_penalty_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--penalty", required=True, choices=sorted(io.PENALTY_PARSERS))
    p.add_argument("--spec", required=True, help="penalty description file")
    p.add_argument("--p", type=_p_value, default=math.inf, help="exponent p: 2 or inf")
    p.add_argument("--lambda", dest="lam", type=float, required=True)


def _read_csv_matrix(path) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2)
    except (OSError, ValueError) as e:
        raise io.InputError(f"cannot read matrix from {path}: {e}") from None


# ---------------------------------------------------------------- commands


def cmd_prox(args) -> int:
    z = io.parse_vector(io.read_text(args.input))
    F = io.load_penalty(args.penalty, args.spec, z.size)
    res = prox(ProxProblem(z, args.lam, F, args.p))
    _write(args.output, io.format_vector(res.w))
    if args.report:
        _write(args.report, _json({"tau": res.tau.tolist(), **res.report.to_json()}))
    return EXIT_OK


def cmd_solve(args) -> int:
    X = _read_csv_matrix(args.design)
    y = _read_csv_matrix(args.target).ravel()
    F = io.load_penalty(args.penalty, args.spec, X.shape[1])
    task = LeastSquaresTask(X, y, args.lam, F, args.p, args.max_iters, args.tolerance)
    res = fista(task, seed=args.seed)
    _write(args.output, io.format_vector(res.w))
    if args.trace:
        _write(args.trace, _json({
            "objective": res.objective,
            "iterations": res.iterations,
            "restarts": res.restarts,
            "fixed_point_residual": res.fixed_point_residual,
        }))
    return EXIT_OK


def cmd_mincut(args) -> int:
    net = io.parse_dimacs(io.read_text(args.network))
    phi = io.parse_vector(io.read_text(args.phi)) if args.phi else None
    if phi is None and np.any(net.params >= 0):
        raise io.InputError("network has parametric arcs; pass --phi with their capacities")
    state = maxflow.max_flow(net, phi=phi, global_relabel=not args.no_global_relabel)
    lo = maxflow.min_cut(state, "minimal")
    hi = maxflow.min_cut(state, "maximal")
    _write(args.output, _json({
        "value": lo.capacity,
        "minimal_source_side": sorted(v + 1 for v in lo.source_side),
        "maximal_source_side": sorted(v + 1 for v in hi.source_side),
        "pushes": state.counters.pushes,
        "relabels": state.counters.relabels,
    }))
    return EXIT_OK


def cmd_paraflow(args) -> int:
    net = netrep.with_parametric_arcs(io.parse_dimacs(io.read_text(args.network)))
    z = io.parse_vector(io.read_text(args.input))
    if z.size != net.d:
        raise io.InputError(f"network has d={net.d} but z has {z.size} entries")
    pieces = paraflow.Pieces.for_signal(z, args.lam, conjugate_exponent(args.p))
    res = paraflow.solve_parametric(net, pieces)
    out = res.chain.to_json()
    out.update(alpha0=res.alpha0, tau=res.tau.tolist(),
               pushes=res.counters.pushes, relabels=res.counters.relabels)
    _write(args.output, _json(out))
    return EXIT_OK


def cmd_verify(args) -> int:
    rng = np.random.default_rng(args.seed)
    d = args.d
    F = io.load_penalty(args.penalty, args.spec, d)
    results = {}
    try:
        G = reduce(ProxProblem(np.ones(d), 1.0, F, args.p)).F
        results["representation"] = oracle.verify_representation(
            netrep.represent(G), G, tol=max(args.tolerance, 1e-9))
    except SubmodProxError as e:
        log.error("representation check skipped: %s", e)
        results["representation"] = False
    worst = 0.0
    for _ in range(args.trials):
        z = rng.uniform(-2, 2, d)
        for lam in sorted({0.1, 1.0, 10.0, args.lam}):
            prob = ProxProblem(z, lam, F, args.p)
            diff = np.max(np.abs(prox(prob).w - oracle.decomposition_weights(prob)))
            worst = max(worst, float(diff))
    results["oracle_equivalence"] = worst <= max(args.tolerance, 1e-6)
    for name, ok in results.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"max |w_flow - w_oracle| = {worst:.3e}")
    return EXIT_OK if all(results.values()) else EXIT_NUMERIC


def cmd_bench(args) -> int:
    dims = [int(x) for x in args.dims.split(",") if x.strip()] if args.dims else []
    cfg = bench.BenchConfig(args.penalty, dims, args.instances, args.p, args.lam,
                            args.seed, args.output, args.threads)
    rows = bench.run_bench(cfg)
    if args.output is None:
        import csv
        w = csv.DictWriter(sys.stdout, fieldnames=bench.CSV_COLUMNS)
        w.writeheader()
        w.writerows(rows)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="submodprox", description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--tolerance", type=float, default=1e-12)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prox", help="proximal operator of a penalty at a vector")
    _add_penalty_args(p)
    p.add_argument("--input", required=True, help="vector file with z")
    p.add_argument("--output", default=None, help="where to write w (default stdout)")
    p.add_argument("--report", default=None, help="JSON file for tau and counters")
    p.set_defaults(func=cmd_prox)

    p = sub.add_parser("solve", help="penalized least squares by FISTA")
    _add_penalty_args(p)
    p.add_argument("--design", required=True, help="CSV matrix X")
    p.add_argument("--target", required=True, help="CSV vector y")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--output", default=None)
    p.add_argument("--trace", default=None, help="JSON file for the objective trace")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mincut", help="max-flow value and both extreme min cuts")
    p.add_argument("network", help="network in the DIMACS-style format")
    p.add_argument("--phi", default=None, help="vector of parametric arc capacities")
    p.add_argument("--no-global-relabel", action="store_true")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_mincut)

    p = sub.add_parser("paraflow", help="cut chain and breakpoints of a parametric network")
    p.add_argument("network")
    p.add_argument("--input", required=True, help="vector file with z")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--p", type=_p_value, default=math.inf)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_paraflow)

    p = sub.add_parser("verify", help="representation and oracle checks for a small penalty")
    _add_penalty_args(p)
    p.add_argument("--d", type=int, required=True, help="ground set size")
    p.add_argument("--trials", type=int, default=5)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="runtime scaling on random instances")
    p.add_argument("--penalty", choices=["group", "cut"], default="group")
    p.add_argument("--dims", default="100,200,400", help="comma separated dimensions")
    p.add_argument("--instances", type=int, default=10)
    p.add_argument("--p", type=_p_value, default=math.inf)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--output", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except NumericalError as e:
        log.error("numerical failure: %s", e)
        return EXIT_NUMERIC
    except (SubmodProxError, ValueError) as e:
        log.error("%s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
