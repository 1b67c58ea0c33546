"""Command-line interface.

Subcommands: free-energy, partition, constrained, perturb, series, coulomb,
verify.  Output is deterministic: floats print with 17 significant digits,
JSON keys are sorted, exact rationals print as fraction strings.  Exit codes:
0 success, 1 verification failure, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from . import __version__, coulomb, dimer, integrals, model, series, verify
from .errors import VertexExpandError, VerificationFailed

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _float(x: float) -> str:
    return f"{x:.17g}"


def _jsonable(value):
    if isinstance(value, float):
        return float(_float(value))
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, series.PiRational):
        return value.as_json()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _flat(value) -> str:
    if isinstance(value, float):
        return _float(value)
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(_jsonable(value), sort_keys=True)
    return str(value)


def emit(records: list[dict], fmt: str, quiet: bool) -> None:
    """Print records as JSON lines or CSV with a sorted-key header."""
    if quiet:
        return
    if fmt == "json":
        for rec in records:
            print(json.dumps(_jsonable(rec), sort_keys=True))
        return
    keys = sorted({k for rec in records for k in rec})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(keys)
    for rec in records:
        writer.writerow([_flat(rec.get(k, "")) for k in keys])
    sys.stdout.write(buf.getvalue())


def _quad_spec(tol: float) -> integrals.QuadratureSpec:
    return integrals.QuadratureSpec(tolerance=tol)


def _parse_sweep(text: str) -> list[float]:
    try:
        start, stop, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "sweep must be start:stop:step") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("sweep needs step > 0, stop >= start")
    count = int(round((stop - start) / step))
    return [start + i * step for i in range(count + 1)]


def _parse_edge(text: str) -> dimer.EdgeConstraint:
    try:
        idx, occ = text.split(":")
        return dimer.EdgeConstraint(int(idx), bool(int(occ)))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "edge must be INDEX:0 or INDEX:1") from None


# --- subcommand handlers -----------------------------------------------------

def cmd_free_energy(args) -> int:
    points = args.sweep if args.sweep is not None else [args.beta_s]
    spec = _quad_spec(args.tol)
    records = []
    for bs in points:
        if args.method == "quad":
            value = integrals.baxter_free_energy(bs, spec)
            extra = {}
        elif args.method == "series":
            value, bound = integrals.baxter_series(bs, args.terms)
            extra = {"error_bound": bound}
        else:
            params = model.ModelParams(
                beta_s=bs, rows=args.size, cols=args.size,
                boundary=model.Boundary.PERIODIC)
            result = model.transfer_matrix_free_energy(params)
            extra = {"spectral_gap": result.gap}
            value = result.free_energy
        prov = {"quad": "quadrature", "series": "accelerated-series",
                "finite": "transfer-matrix"}[args.method]
        records.append({"quantity": "free_energy", "beta_s": bs,
                        "method": args.method, "provenance": prov,
                        "value": value, **extra})
    emit(records, args.format, args.quiet)
    return EXIT_OK


def _build_params(args) -> model.ModelParams:
    boundary = (model.Boundary.PERIODIC if args.boundary == "periodic"
                else model.Boundary.FIXED_GROUND_STATE)
    return model.ModelParams(beta_s=args.beta_s, rows=args.rows,
                             cols=args.cols, boundary=boundary)


def cmd_partition(args) -> int:
    params = _build_params(args)
    rec = {"quantity": "log_partition", "rows": args.rows, "cols": args.cols,
           "beta_s": args.beta_s, "boundary": args.boundary,
           "oracle": args.oracle, "provenance": args.oracle}
    log_enum = log_pf = None
    if args.oracle in ("enumerate", "both"):
        log_enum = math.log(model.enumerate_partition(params).z)
        rec["log_z_enumerate"] = log_enum
    if args.oracle in ("pfaffian", "both"):
        if params.boundary is not model.Boundary.FIXED_GROUND_STATE:
            print("error: pfaffian oracle needs --boundary fixed",
                  file=sys.stderr)
            return EXIT_USAGE
        kast = dimer.kasteleyn_orientation(dimer.build_decorated(params))
        log_pf = dimer.partition_dimer(kast)
        rec["log_z_pfaffian"] = log_pf
    if log_enum is not None and log_pf is not None:
        diff = abs(log_enum - log_pf)
        rec["abs_diff"] = diff
        if diff > max(args.tol, 1e-9):
            emit([rec], args.format, args.quiet)
            print("error: oracle disagreement", file=sys.stderr)
            return EXIT_NUMERICAL
    emit([rec], args.format, args.quiet)
    return EXIT_OK


def cmd_constrained(args) -> int:
    params = _build_params(args)
    if params.boundary is not model.Boundary.FIXED_GROUND_STATE:
        print("error: constrained sums need --boundary fixed", file=sys.stderr)
        return EXIT_USAGE
    kast = dimer.kasteleyn_orientation(dimer.build_decorated(params))
    records = []
    if args.edge:
        ratio = dimer.constrained_ratio(kast, args.edge)
        records.append({
            "quantity": "constrained_ratio", "rows": args.rows,
            "cols": args.cols, "beta_s": args.beta_s,
            "constraints": [f"{c.edge}:{int(c.occupied)}" for c in args.edge],
            "provenance": "pfaffian", "ratio": ratio,
            "log_z": dimer.constrained_partition(kast, args.edge)})
    if args.site is not None:
        r, c = args.site
        total = 0.0
        for state in range(1, 7):
            ratio = dimer.vertex_constrained_ratio(kast, (r, c), state)
            total += ratio
            records.append({
                "quantity": "vertex_state_probability", "rows": args.rows,
                "cols": args.cols, "beta_s": args.beta_s,
                "site": [r, c], "state": state,
                "provenance": "pfaffian", "ratio": ratio})
        records.append({
            "quantity": "vertex_state_probability_sum", "rows": args.rows,
            "cols": args.cols, "beta_s": args.beta_s,
            "site": [r, c], "value": total})
    if not records:
        print("error: give --edge and/or --site", file=sys.stderr)
        return EXIT_USAGE
    emit(records, args.format, args.quiet)
    return EXIT_OK


def cmd_perturb(args) -> int:
    result = integrals.first_order_free_energy(
        args.beta_s, args.u, _quad_spec(args.tol))
    emit([{
        "quantity": "first_order_free_energy", "beta_s": args.beta_s,
        "u": args.u, "provenance": "quadrature", "f0": result.f0,
        "coefficient_constrained": result.coefficient_constrained,
        "coefficient_derivative": result.coefficient_derivative,
        "free_energy": result.free_energy,
    }], args.format, args.quiet)
    return EXIT_OK


def cmd_series(args) -> int:
    k = args.order
    if args.target == "stirling":
        s = series.stirling_correction(k)
        rec = {"quantity": "stirling_bracket",
               "coefficients": {str(d): s[d] for d in range(k + 1)}}
    else:
        builders = {"fst": series.singular_t_series,
                    "sng": series.singular_betas_series,
                    "b2": series.b2_series}
        if args.target == "t-map":
            s = series.t_of_betas(k)
            rec = {"quantity": "t_map",
                   "coefficients": {str(d): s[d] for d in range(k + 1)}}
        else:
            log_s = builders[args.target](k)
            rec = {"quantity": args.target,
                   "scale": log_s.scale,
                   "log_label": log_s.log_label,
                   "coefficients": {str(d): log_s.singular[d]
                                    for d in range(k + 1)}}
    rec["order"] = k
    rec["provenance"] = "exact-rational"
    emit([rec], args.format, args.quiet)
    return EXIT_OK


def cmd_coulomb(args) -> int:
    records = []
    if args.beta_eps is not None:
        records.append({
            "quantity": "singular_exponent", "beta_eps": args.beta_eps,
            "provenance": "closed-form",
            "j": coulomb.j_of_betaeps(args.beta_eps),
            "exponent": coulomb.singular_exponent(args.beta_eps),
            "kt_threshold": coulomb.KT_BETA_EPS})
    if args.expand is not None:
        expansion = coulomb.exponent_u_expansion(args.expand)
        records.append({
            "quantity": "exponent_u_expansion", "order": args.expand,
            "provenance": "exact-rational",
            "coefficients": [
                {str(p): q for p, q in sorted(coeff.items())}
                for coeff in expansion]})
    if not records:
        print("error: give --beta-eps and/or --expand", file=sys.stderr)
        return EXIT_USAGE
    emit(records, args.format, args.quiet)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = (list(verify.SUITES) if args.suite == "all" else [args.suite])
    ok, lines = verify.run_suites(names)
    if not args.quiet:
        for line in lines:
            print(line)
    return EXIT_OK if ok else EXIT_VERIFY


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vertex-expand",
        description="Free-fermion expansion toolkit for staggered "
                    "six-vertex models.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--seed", type=int, default=0,
                        help="reserved for stochastic extensions")
    common.add_argument("--quiet", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("free-energy", parents=[common],
                       help="infinite-lattice reduced free energy")
    p.add_argument("--beta-s", type=float, default=0.0)
    p.add_argument("--sweep", type=_parse_sweep, default=None,
                   metavar="START:STOP:STEP")
    p.add_argument("--method", choices=("quad", "series", "finite"),
                   default="quad")
    p.add_argument("--terms", type=int, default=2000,
                   help="head terms for --method series")
    p.add_argument("--size", type=int, default=8,
                   help="torus side for --method finite")
    p.set_defaults(func=cmd_free_energy)

    p = sub.add_parser("partition", parents=[common],
                       help="finite-lattice partition function oracles")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--beta-s", type=float, default=0.0)
    p.add_argument("--boundary", choices=("periodic", "fixed"),
                   default="fixed")
    p.add_argument("--oracle", choices=("enumerate", "pfaffian", "both"),
                   default="both")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("constrained", parents=[common],
                       help="constrained dimer sums and state probabilities")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--beta-s", type=float, default=0.0)
    p.add_argument("--boundary", choices=("periodic", "fixed"),
                   default="fixed")
    p.add_argument("--edge", type=_parse_edge, action="append", default=[],
                   metavar="INDEX:OCC")
    p.add_argument("--site", type=int, nargs=2, default=None,
                   metavar=("ROW", "COL"))
    p.set_defaults(func=cmd_constrained)

    p = sub.add_parser("perturb", parents=[common],
                       help="first-order free energy in the coupling shift")
    p.add_argument("--beta-s", type=float, default=0.0)
    p.add_argument("--u", type=float, default=0.0)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("series", parents=[common],
                       help="exact singular expansions")
    p.add_argument("--target",
                   choices=("stirling", "fst", "sng", "b2", "t-map"),
                   default="sng")
    p.add_argument("--order", type=int, default=8)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("coulomb", parents=[common],
                       help="renormalization exponent and its expansion")
    p.add_argument("--beta-eps", type=float, default=None)
    p.add_argument("--expand", type=int, default=None, metavar="ORDER")
    p.set_defaults(func=cmd_coulomb)

    p = sub.add_parser("verify", parents=[common],
                       help="run self-verification suites")
    p.add_argument("--suite",
                   choices=("all",) + tuple(verify.SUITES), default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (VertexExpandError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
