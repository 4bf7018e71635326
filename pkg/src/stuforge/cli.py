"""
Command line entry point.

Exit status: 0 pass or feasible, 1 verified negative result, 2 failed STU
verification, 64 usage error. Reports go to stdout (or --output) as JSON
or CSV; every report echoes its resolved configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import (ConditionsNotMet, DimensionBudgetExceeded, InvalidBudget, InvalidPreimage,
                     InvalidSpectrum, LengthMismatch, NotMajorised, OutOfRange, StepUnbuildable,
                     StuforgeError, SumMismatch, TooLarge, UnsupportedDimension)
from .spectra import EnergySpectrum

EXIT_OK, EXIT_NEGATIVE, EXIT_FAILED, EXIT_USAGE = 0, 1, 2, 64

USAGE_ERRORS = (InvalidSpectrum, OutOfRange, LengthMismatch, SumMismatch, UnsupportedDimension,
                TooLarge, InvalidBudget, InvalidPreimage, DimensionBudgetExceeded, NotMajorised)

# frozen CSV headers
CURVE_HEADER = ("delta_E", "delta_I", "beta_bar")
NORM_SCAN_HEADER = ("seed", "energies", "beta", "beta_prime", "cond_i", "cond_ii_strong",
                    "cond_ii_weak")
VERTEX_HEADER_PREFIX = "x"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy to python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


def _config(args):
    skip = {"func", "output", "default_format"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _emit_json(args, result):
    text = json.dumps(_clean({"config": _config(args), "result": result}), indent=2)
    _write(args, text + "\n")


def _emit_csv(args, header, rows):
    buf = io.StringIO()
    for k, v in _config(args).items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    _write(args, buf.getvalue())


def _write(args, text):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(text, name):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"--{name}: expected comma separated numbers, got {text!r}") from exc


def _beta(text):
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        return float(t)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid inverse temperature {text!r}") from exc


def _spectrum(args, attr="energies"):
    text = getattr(args, attr)
    if text is None:
        raise UsageError(f"--{attr.replace('_', '-')} is required")
    return EnergySpectrum.parse(text, normalize=not getattr(args, "raw_units", False))


def _require(args, *names):
    for n in names:
        if getattr(args, n, None) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_spectra(args):
    from .spectra import beta_for_energy, entropy, mean_energy, partition_function, thermal_vector
    spec = _spectrum(args)
    res = {"energies": spec.energies, "d": spec.d, "gaps": spec.gaps()}
    if args.beta is not None:
        p = thermal_vector(spec, args.beta).probs
        res.update(probs=p, partition_function=partition_function(spec, args.beta),
                   entropy=entropy(p), mean_energy=mean_energy(spec, args.beta))
    if args.target_energy is not None:
        res["beta_for_energy"] = beta_for_energy(spec, args.target_energy)
    _emit_json(args, res)
    return EXIT_OK


def _stu_exit(report):
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_stu_majorised(args):
    from .block_unitary import assemble_and_apply, partial_trace_marginals
    from .stu_majorised import build_stu_majorised, counterexamples_d4, reach_majorised_marginal_d3
    if args.counterexample_d4:
        res = counterexamples_d4(shuffles=args.shuffles, seed=args.seed)
        _emit_json(args, res)
        return EXIT_OK if res["certified"] else EXIT_NEGATIVE
    _require(args, "energies", "beta")
    spec = _spectrum(args)
    if args.target is not None:
        target = np.array(_floats(args.target, "target"))
        blocks = reach_majorised_marginal_d3(spec, args.beta, target)
        rA, rB = partial_trace_marginals(assemble_and_apply(blocks, spec, args.beta))
        dev = float(max(np.max(np.abs(np.diag(rA) - target)), np.max(np.abs(np.diag(rB) - target))))
        tol = args.tol if args.tol is not None else 1e-9
        res = {"marginal_A": np.diag(rA), "marginal_B": np.diag(rB), "deviation": dev,
               "passed": dev <= tol}
        if args.emit_blocks:
            res["blocks"] = blocks.to_json()
        _emit_json(args, res)
        return EXIT_OK if res["passed"] else EXIT_FAILED
    _require(args, "beta_prime")
    blocks = build_stu_majorised(spec, args.beta, args.beta_prime)
    return _emit_stu(args, blocks, spec)


def _emit_stu(args, blocks, spec, extra=None):
    from .block_unitary import verify_stu
    rep = verify_stu(blocks, spec, args.beta, args.beta_prime, tol=args.tol)
    if args.format == "csv":
        _emit_csv(args, rep.CSV_HEADER, [next(csv.reader([rep.csv_row()]))])
        return _stu_exit(rep)
    res = rep.to_json()
    if extra:
        res.update(extra)
    if args.emit_blocks:
        res["blocks"] = blocks.to_json()
    _emit_json(args, res)
    return _stu_exit(rep)


def cmd_stu_norm(args):
    from .stu_norm import build_stu_norm, check_conditions
    if args.scan:
        return _norm_scan(args)
    _require(args, "energies", "beta", "beta_prime")
    spec = _spectrum(args)
    cond = check_conditions(spec, args.beta, args.beta_prime)
    if args.check_only:
        _emit_json(args, cond)
        return EXIT_OK if cond["cond_i"] and cond["cond_ii_strong"] else EXIT_NEGATIVE
    try:
        blocks = build_stu_norm(spec, args.beta, args.beta_prime)
    except ConditionsNotMet as exc:
        _emit_json(args, {"built": False, "flag": exc.flag, "message": str(exc), "conditions": cond})
        return EXIT_NEGATIVE
    return _emit_stu(args, blocks, spec, {"conditions": cond})


def _norm_scan(args):
    from .lemmas import random_spectrum
    from .stu_norm import check_conditions
    _require(args, "dim")
    rows = []
    for seed in range(args.scan):
        spec = random_spectrum(np.random.default_rng([args.seed, seed]), args.dim, args.kind)
        for b in (0.5, 1.0, 2.0, 5.0):
            for bp in (0.0, 0.5 * b, 0.9 * b):
                c = check_conditions(spec, b, bp)
                rows.append((seed, ";".join(repr(e) for e in spec.energies), b, bp,
                             int(c["cond_i"]), int(c["cond_ii_strong"]), int(c["cond_ii_weak"])))
    _emit_csv(args, NORM_SCAN_HEADER, rows)
    return EXIT_OK


def cmd_stu_geometric(args):
    from .stu_geometric import build_stu_geometric, convexity_certify, d5_region_check
    _require(args, "energies", "beta")
    spec = _spectrum(args)
    if args.certify:
        rep = convexity_certify(spec)
        _emit_json(args, rep)
        return EXIT_OK if rep["sign_violations"] == 0 and rep["max_rel_dcoords"] <= 1e-6 else EXIT_NEGATIVE
    if spec.d == 5 and not args.force:
        rep = d5_region_check(spec, args.beta, args.beta_prime, tol=args.tol)
        _emit_json(args, rep)
        if not rep["resolved"]:
            return EXIT_NEGATIVE
        return EXIT_OK if rep["stu"]["passed"] else EXIT_FAILED
    _require(args, "beta_prime")
    return _emit_stu(args, build_stu_geometric(spec, args.beta, args.beta_prime), spec)


def cmd_polytope(args):
    from .spectra import thermal_vector
    from .stu_geometric import hull_membership, to_coords, vertex_set
    _require(args, "energies", "beta")
    spec = _spectrum(args)
    vs = vertex_set(spec, args.beta, force=args.force)
    if args.emit_vertices:
        header = [f"{VERTEX_HEADER_PREFIX}{n}" for n in range(spec.d - 1)] + ["label"]
        rows = [list(pt) + ["-".join(map(str, lab))] for pt, lab in zip(vs.points, vs.labels)]
        _emit_csv(args, header, rows)
        return EXIT_OK
    if args.point is not None:
        point = np.array(_floats(args.point, "point"))
    elif args.beta_prime is not None:
        point = to_coords(thermal_vector(spec, args.beta_prime).probs)
    else:
        _emit_json(args, {"count": vs.count, "raw_count": vs.raw_count})
        return EXIT_OK
    cert = hull_membership(point, vs)
    _emit_json(args, {"point": point, "feasible": cert.feasible, "gap": cert.gap,
                      "residual": cert.residual,
                      "weights": {"-".join(map(str, k)): w for k, w in cert.weights.items()},
                      "count": vs.count})
    return EXIT_OK if cert.feasible else EXIT_NEGATIVE


def cmd_bounds_curve(args):
    from .bounds import max_correlation_curve
    _require(args, "energies", "beta")
    spec = _spectrum(args)
    from .spectra import mean_energy
    full = 2 * (float(spec.array.mean()) - mean_energy(spec, args.beta))
    top = args.max_delta_e if args.max_delta_e is not None else full
    grid = np.linspace(0.0, top, args.grid)
    pts = max_correlation_curve(spec, args.beta, grid)
    if args.format == "json":
        _emit_json(args, {"points": [p.__dict__ for p in pts], "full_budget": full})
    else:
        _emit_csv(args, CURVE_HEADER, [(p.delta_E, p.delta_I, p.beta_bar) for p in pts])
    return EXIT_OK


def cmd_bounds_asym(args):
    from .bounds import AsymmetricProblem, asym_pure_optimum
    _require(args, "energies_a", "energies_b", "budget")
    # budgets are absolute energies, so the spectra keep their units
    prob = AsymmetricProblem.from_values(_floats(args.energies_a, "energies-a"),
                                         _floats(args.energies_b, "energies-b"), args.budget)
    sol = asym_pure_optimum(prob)
    res = sol.to_json()
    res["identity_gap"] = abs(sol.mutual_information - sol.mutual_information_closed) \
        if math.isfinite(sol.beta_of_c) else 0.0
    _emit_json(args, res)
    return EXIT_OK


def cmd_copies(args):
    from .copies import simulate_copies
    _require(args, "energies", "beta", "schedule", "n")
    spec = _spectrum(args)
    trace = simulate_copies(spec, args.beta, args.n, [_beta(b) for b in args.schedule.split(",")],
                            args.method, tol=args.tol if args.tol is not None else 1e-9)
    _emit_json(args, trace.to_json())
    return EXIT_OK if trace.passed else EXIT_FAILED


def cmd_oracle_sample(args):
    from .oracle import sample_reachable
    _require(args, "energies", "beta")
    spec = _spectrum(args)
    s = sample_reachable(spec, args.beta, args.count, args.seed)
    res = {"count": s.count, "escapes": s.escapes, "max_asymmetry": s.max_asymmetry}
    if args.emit_points:
        res["points"] = s.points
    _emit_json(args, res)
    return EXIT_OK if s.escapes == 0 else EXIT_FAILED


def cmd_oracle_cross(args):
    from .oracle import cross_method_check
    _require(args, "energies", "beta", "beta_prime")
    rep = cross_method_check(_spectrum(args), args.beta, args.beta_prime, tol=args.tol)
    _emit_json(args, rep)
    return EXIT_OK if rep["agree"] else EXIT_FAILED


def cmd_lemmas(args):
    from .lemmas import check_all
    rep = check_all(seed=args.seed, jobs=args.jobs)
    _emit_json(args, rep)
    return EXIT_OK if rep["passed"] else EXIT_NEGATIVE


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="report format (default depends on the command)")
    common.add_argument("--output", help="write the report to this file instead of stdout")
    common.add_argument("--tol", type=float, default=None,
                        help="verification tolerance (default: STUFORGE_TOL or 1e-9)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--raw-units", action="store_true",
                        help="keep energies as given instead of rescaling to E_1 = 1")

    spec_args = _Parser(add_help=False)
    spec_args.add_argument("--energies", help='spectrum literal, e.g. "0,1,2.5"')
    spec_args.add_argument("--beta", type=_beta)
    spec_args.add_argument("--beta-prime", type=_beta)

    blocks_arg = _Parser(add_help=False)
    blocks_arg.add_argument("--emit-blocks", action="store_true")

    p = _Parser(prog="stuforge", description="Symmetrically thermalizing unitaries and bounds.")
    p.add_argument("--version", action="version", version=f"stuforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectra", parents=[common, spec_args], help="thermal quantities of a spectrum")
    s.add_argument("--target-energy", type=float)
    s.set_defaults(func=cmd_spectra)

    stu = sub.add_parser("stu", help="build and verify an STU")
    stu_sub = stu.add_subparsers(dest="method", required=True, parser_class=_Parser)
    m = stu_sub.add_parser("majorised", parents=[common, spec_args, blocks_arg])
    m.add_argument("--target", help="target marginal p0,p1,p2 (must be majorised by p(beta))")
    m.add_argument("--counterexample-d4", action="store_true")
    m.add_argument("--shuffles", type=int, default=10)
    m.set_defaults(func=cmd_stu_majorised)
    n = stu_sub.add_parser("norm", parents=[common, spec_args, blocks_arg])
    n.add_argument("--check-only", action="store_true")
    n.add_argument("--scan", type=int, default=0, help="grid scan over this many random spectra")
    n.add_argument("--dim", type=int)
    n.add_argument("--kind", choices=("any", "decreasing", "increasing"), default="any")
    n.set_defaults(func=cmd_stu_norm)
    g = stu_sub.add_parser("geometric", parents=[common, spec_args, blocks_arg])
    g.add_argument("--certify", action="store_true", help="convexity certification only")
    g.add_argument("--force", action="store_true", help="d=5: exhaustive path instead of region check")
    g.set_defaults(func=cmd_stu_geometric)

    pt = sub.add_parser("polytope", parents=[common, spec_args], help="vertex polytope and membership")
    pt.add_argument("--emit-vertices", action="store_true")
    pt.add_argument("--point", help="reduced coordinates x0,x1,... to test")
    pt.add_argument("--force", action="store_true")
    pt.set_defaults(func=cmd_polytope)

    b = sub.add_parser("bounds", help="optimal correlation bounds")
    b_sub = b.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    bc = b_sub.add_parser("curve", parents=[common, spec_args])
    bc.add_argument("--grid", type=int, default=50)
    bc.add_argument("--max-delta-e", type=float)
    bc.set_defaults(func=cmd_bounds_curve, default_format="csv")
    ba = b_sub.add_parser("asym", parents=[common])
    ba.add_argument("--energies-a")
    ba.add_argument("--energies-b")
    ba.add_argument("--budget", type=float)
    ba.set_defaults(func=cmd_bounds_asym)

    c = sub.add_parser("copies", help="finite-copies protocol")
    c_sub = c.add_subparsers(dest="action", required=True, parser_class=_Parser)
    cs = c_sub.add_parser("simulate", parents=[common, spec_args])
    cs.add_argument("--n", type=int)
    cs.add_argument("--schedule", help="per-round target betas")
    cs.add_argument("--method", choices=("geometric", "norm", "majorised"), default="geometric")
    cs.set_defaults(func=cmd_copies)

    o = sub.add_parser("oracle", help="brute-force cross-checks")
    o_sub = o.add_subparsers(dest="action", required=True, parser_class=_Parser)
    os_ = o_sub.add_parser("sample", parents=[common, spec_args])
    os_.add_argument("--count", type=int, default=1000)
    os_.add_argument("--emit-points", action="store_true")
    os_.set_defaults(func=cmd_oracle_sample)
    oc = o_sub.add_parser("cross", parents=[common, spec_args])
    oc.set_defaults(func=cmd_oracle_cross)

    lm = sub.add_parser("lemmas", help="lemma grid suite")
    lm_sub = lm.add_subparsers(dest="action", required=True, parser_class=_Parser)
    la = lm_sub.add_parser("check-all", parents=[common])
    la.add_argument("--jobs", type=int, default=1)
    la.set_defaults(func=cmd_lemmas)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format is None:
            args.format = getattr(args, "default_format", "json")
        if args.tol is not None:
            os.environ["STUFORGE_TOL"] = repr(args.tol)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except USAGE_ERRORS as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConditionsNotMet, StepUnbuildable) as exc:
        print(f"negative result: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    except StuforgeError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
