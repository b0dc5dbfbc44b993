"""Command-line interface.

Subcommands mirror the library surface: enumerate, meander, eval, limit,
weights, crossing, classify, cft, verify.  Output is JSON (schema 1) on
stdout; sweep modes emit CSV rows.  Exit codes: 0 success, 1 numerical
failure, 2 usage error.  CGW_THREADS caps sweep parallelism.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional

import numpy as np

from . import cft as cft_mod
from .config import QuadConfig, RunConfig, load_config
from .coulomb import build_spec, evaluate_basis
from .diagrams import catalan, enumerate_connectivities
from .evaluators import BasisCombination
from .frobenius import classify_interval
from .limits import CollapseError, apply_L, collapse_fit
from .meander import (SpeedContext, build_meander_matrix, determinant_zeros,
                      is_exceptional, numeric_rank, rank_at_zero)
from .quadrature import QuadratureError
from .verify import SUITES, run_suite
from .weights import (SingularSpeedError, crossing_probabilities,
                      regularized_weights, solve_weights, weight_evaluator)

SCHEMA = 1


def _emit(payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    json.dump(payload, sys.stdout, indent=2, sort_keys=True, default=_jsonify)
    sys.stdout.write("\n")


def _jsonify(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj)}")


def _points(text: str) -> tuple:
    try:
        pts = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("points must be comma-separated reals")
    return pts


def _parse_function(text: str, kappa: float, n_arcs: int, quad: QuadConfig):
    """basis:T | weight:T | file:PATH -> evaluator over the canonical basis."""
    kind, _, arg = text.partition(":")
    diags = enumerate_connectivities(n_arcs)
    if kind == "basis":
        return BasisCombination.single(kappa, diags[int(arg) - 1], quad)
    if kind == "weight":
        return weight_evaluator(int(arg), kappa, n_arcs=n_arcs, quad=quad)
    if kind == "file":
        with open(arg) as fh:
            data = json.load(fh)
        coeffs = data["coefficients"]
        if len(coeffs) != len(diags):
            raise ValueError(f"need {len(diags)} coefficients, got {len(coeffs)}")
        return BasisCombination.of(kappa, dict(zip(diags, map(float, coeffs))), quad)
    raise argparse.ArgumentTypeError("function must be basis:T, weight:T or file:PATH")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CGW_THREADS", "1")))
    except ValueError:
        return 1


# ------------------------------------------------------------- subcommands

def cmd_enumerate(args, config: RunConfig) -> int:
    diags = enumerate_connectivities(args.n_arcs, args.anchor)
    _emit({
        "n_arcs": args.n_arcs,
        "count": len(diags),
        "anchor": args.anchor,
        "diagrams": [{"index": k + 1, "pairing": list(d.pairing),
                      "parens": d.to_parens()} for k, d in enumerate(diags)],
    })
    return 0


def cmd_meander(args, config: RunConfig) -> int:
    if args.kappa is not None:
        M = build_meander_matrix(args.n_arcs, kappa=args.kappa)
    else:
        M = build_meander_matrix(args.n_arcs, n=args.n)
    out = {"n_arcs": args.n_arcs, "size": M.size, "fugacity": M.fugacity}
    if args.kappa is not None:
        ctx = SpeedContext(args.kappa)
        exc = is_exceptional(args.kappa, args.n_arcs)
        out["kappa"] = args.kappa
        out["central_charge"] = ctx.central_charge
        out["eight_over_kappa_class"] = ctx.eight_over_kappa_class.value
        out["exceptional"] = None if exc is None else {
            "q": exc.q, "q_prime": exc.q_prime}
    if args.det:
        out["determinant"] = M.determinant()
    if args.rank:
        out["numeric_rank"] = numeric_rank(M, tol=1e-9)
    if args.zeros:
        out["zeros"] = [{"q": q, "q2": q2, "n": nval,
                         "rank": rank_at_zero(args.n_arcs, q, q2),
                         "dependencies": catalan(args.n_arcs)
                         - rank_at_zero(args.n_arcs, q, q2)}
                        for q, q2, nval in determinant_zeros(args.n_arcs)]
    if args.matrix_csv:
        with open(args.matrix_csv, "w", newline="") as fh:
            csv.writer(fh).writerows(M.entries.tolist())
        out["matrix_csv"] = args.matrix_csv
    _emit(out)
    return 0


def cmd_eval(args, config: RunConfig) -> int:
    quad = config.quad if args.quad_tol is None else replace(config.quad,
                                                             tol=args.quad_tol)
    spec = build_spec(args.n_arcs, args.connectivity, args.conjugate, args.kappa)
    res = evaluate_basis(spec, args.points, quad)
    _emit({"kappa": args.kappa, "connectivity": args.connectivity,
           "conjugate": args.conjugate, "points": list(args.points),
           "value": res.value, "error": res.abs_error_est,
           "imag_leak": res.imag_leak, "n_evals": res.n_evals})
    return 0


def cmd_limit(args, config: RunConfig) -> int:
    n_arcs = len(args.points) // 2
    f = _parse_function(args.fn, args.kappa, n_arcs, config.quad)
    if args.interval is not None:
        fit = collapse_fit(f, args.points, args.interval, args.kappa, config.ladder)
        out = {"mode": "single-interval", "interval": args.interval,
               "value": fit.coefficient(0.0), "residual": fit.residual}
    else:
        value = apply_L(args.connectivity, f, args.points, args.kappa, config.ladder)
        out = {"mode": "composed", "connectivity": args.connectivity,
               "value": value}
    out.update({"kappa": args.kappa, "fn": args.fn, "points": list(args.points)})
    if args.ladder_csv and args.interval is not None:
        from .limits import _ladder_values, _local_gap
        deltas = config.ladder.deltas(_local_gap(list(args.points), args.interval))
        vals = _ladder_values(f, list(args.points), args.interval, deltas, args.kappa)
        with open(args.ladder_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["delta", "scaled_value"])
            w.writerows(zip(deltas, vals.tolist()))
        out["ladder_csv"] = args.ladder_csv
    _emit(out)
    return 0


def cmd_weights(args, config: RunConfig) -> int:
    if args.sweep_point:
        idx, lo, hi, count = args.sweep_point
        idx = int(idx)
        writer = csv.writer(sys.stdout)
        writer.writerow([f"x_{idx}"] + [f"pi_{k+1}" for k in range(catalan(args.n_arcs))])

        def row_x(val: float):
            pts = list(args.points)
            pts[idx - 1] = float(val)
            try:
                w = solve_weights(pts, args.kappa, config.quad, config)
                return [val] + list(w.values)
            except (SingularSpeedError, ValueError):
                return [val] + ["invalid"] * catalan(args.n_arcs)

        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            for out in pool.map(row_x, np.linspace(lo, hi, int(count))):
                writer.writerow(out)
        return 0
    if args.sweep_kappa:
        lo, hi, count = args.sweep_kappa
        kappas = np.linspace(lo, hi, int(count))
        writer = csv.writer(sys.stdout)
        writer.writerow(["kappa"] + [f"pi_{k+1}" for k in range(catalan(args.n_arcs))])

        def row(kappa: float):
            try:
                w = solve_weights(args.points, float(kappa), config.quad, config)
                return [kappa] + list(w.values)
            except SingularSpeedError:
                return [kappa] + ["singular"] * catalan(args.n_arcs)

        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            for out in pool.map(row, kappas):
                writer.writerow(out)
        return 0
    try:
        w = solve_weights(args.points, args.kappa, config.quad, config)
    except SingularSpeedError:
        if not args.regularized:
            raise
        w = regularized_weights(args.points, args.kappa, quad=config.quad)
    _emit({"kappa": args.kappa, "points": list(args.points),
           "values": list(w.values), "provenance": w.provenance,
           "condition_number": w.condition_number})
    return 0


def cmd_crossing(args, config: RunConfig) -> int:
    n_arcs = len(args.points) // 2
    fn = args.fn if args.fn else f"basis:{args.basis}"
    f = _parse_function(fn, args.kappa, n_arcs, config.quad)
    dist = crossing_probabilities(f, args.points, args.kappa, config.quad,
                                  config.ladder, config)
    _emit({"kappa": args.kappa, "points": list(args.points), "fn": fn,
           "probabilities": list(dist.probs),
           "partition_value": dist.partition_value,
           "negative_entries": dist.negative_entries})
    return 0


def cmd_classify(args, config: RunConfig) -> int:
    n_arcs = len(args.points) // 2
    f = _parse_function(args.fn, args.kappa, n_arcs, config.quad)
    cls = classify_interval(f, args.points, args.interval, args.kappa, config)
    _emit({"kappa": args.kappa, "points": list(args.points), "fn": args.fn,
           "interval": args.interval,
           "sle_type": cls.sle_type.value, "cft_type": cls.cft_type.value,
           "A0": cls.fit.a0, "A1": cls.fit.a1, "B0": cls.fit.b0,
           "C0": cls.fit.c0, "residual": cls.fit.residual,
           "coefficients": list(cls.coefficients)})
    return 0


def cmd_cft(args, config: RunConfig) -> int:
    ctx = SpeedContext(args.kappa)
    exc = is_exceptional(args.kappa)
    out = {"kappa": args.kappa, "central_charge": ctx.central_charge,
           "fugacity": ctx.n,
           "eight_over_kappa_class": ctx.eight_over_kappa_class.value,
           "one_leg_label": list(cft_mod.one_leg_operator_label(args.kappa)),
           "s_leg_weights": {s: cft_mod.s_leg_weight(s, args.kappa)
                             for s in (0, 1, 2, 3)}}
    if exc is not None and exc.q_prime > 1:
        m = cft_mod.minimal_model_map(exc.kappa)
        out["minimal_model"] = {"p": m.model.p, "p_prime": m.model.p_prime,
                                "correspondence": m.correspondence.value,
                                "central_charge": float(m.model.central_charge)}
    else:
        out["minimal_model"] = None
    _emit(out)
    return 0


def cmd_verify(args, config: RunConfig) -> int:
    results = run_suite(args.suite, config)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cgw", description=__doc__)
    p.add_argument("--config", help="JSON or TOML run configuration")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("enumerate", help="list arc connectivities")
    sp.add_argument("--n-arcs", type=int, required=True)
    sp.add_argument("--anchor", type=int, default=None,
                    help="1-based interval: its diagrams come first")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("meander", help="meander matrix diagnostics")
    sp.add_argument("--n-arcs", type=int, required=True)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--kappa", type=float)
    group.add_argument("--n", type=float, help="fugacity directly")
    sp.add_argument("--det", action="store_true")
    sp.add_argument("--rank", action="store_true")
    sp.add_argument("--zeros", action="store_true")
    sp.add_argument("--matrix-csv", help="write the matrix entries to CSV")
    sp.set_defaults(func=cmd_meander)

    sp = sub.add_parser("eval", help="evaluate one basis function")
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--n-arcs", type=int, required=True)
    sp.add_argument("--connectivity", type=int, required=True)
    sp.add_argument("--conjugate", type=int, required=True)
    sp.add_argument("--points", type=_points, required=True)
    sp.add_argument("--quad-tol", type=float, default=None)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("limit", help="collapse limits and composed functionals")
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--points", type=_points, required=True)
    sp.add_argument("--fn", required=True, help="basis:T | weight:T | file:PATH")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--connectivity", type=int,
                       help="composed functional [L_sigma]")
    group.add_argument("--interval", type=int, help="single collapse at (i,i+1)")
    sp.add_argument("--ladder-csv", help="write the ladder table to CSV")
    sp.set_defaults(func=cmd_limit)

    sp = sub.add_parser("weights", help="solve the connectivity weights")
    sp.add_argument("--kappa", type=float)
    sp.add_argument("--n-arcs", type=int, required=True)
    sp.add_argument("--points", type=_points, required=True)
    sp.add_argument("--regularized", action="store_true",
                    help="fall back to the kappa-ladder at degenerate speeds")
    sp.add_argument("--sweep-kappa", nargs=3, type=float, default=None,
                    metavar=("START", "STOP", "COUNT"),
                    help="emit a CSV sweep instead of JSON")
    sp.add_argument("--sweep-point", nargs=4, type=float, default=None,
                    metavar=("INDEX", "START", "STOP", "COUNT"),
                    help="CSV sweep moving one coordinate (1-based index)")
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("crossing", help="crossing-probability distribution")
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--points", type=_points, required=True)
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--fn", help="basis:T | weight:T | file:PATH")
    group.add_argument("--basis", type=int, help="shorthand for --fn basis:T")
    sp.add_argument("--n-arcs", type=int, default=None,
                    help="accepted for symmetry; inferred from the points")
    sp.set_defaults(func=cmd_crossing)

    sp = sub.add_parser("classify", help="interval classification")
    sp.add_argument("--kappa", type=float, required=True)
    sp.add_argument("--points", type=_points, required=True)
    sp.add_argument("--fn", required=True)
    sp.add_argument("--interval", type=int, required=True)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("cft", help="central charge and Kac data")
    sp.add_argument("--kappa", type=float, required=True)
    sp.set_defaults(func=cmd_cft)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--suite", default="all", choices=sorted(SUITES))
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = load_config(args.config) if args.config else RunConfig()
    np.random.seed(config.seed)
    try:
        return args.func(args, config)
    except (QuadratureError, SingularSpeedError, CollapseError,
            ZeroDivisionError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
