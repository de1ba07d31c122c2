"""Command-line entry point: ``ncorlicz <command> [options]``.

Exit codes: 0 when every check passes, 1 when at least one fails, 2 on
usage or input errors.
"""

import argparse
import csv
import io
import json
import logging
import os
import sys

from . import __version__
from .errors import OrliczError
from .functions import GridSpec, conjugate, default_conjugate_grid, dyadic_indices, parse_phi
from .geometry import check_bounds
from .norms import luxemburg_norm, orlicz_norm, schatten_norm
from .report import VerificationReport, _plain, fmt
from .spectral import matrix_to_json, read_matrix
from .suites import SUITES, SuiteConfig, run_suite

log = logging.getLogger("ncorlicz")

FORMATS = ("json", "csv", "text")


class UsageError(Exception):
    pass


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def _rows_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def _render_report(rep, form):
    if form == "json":
        return rep.to_json()
    if form == "csv":
        return rep.to_csv()
    return rep.to_text()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_norm(args):
    phi = parse_phi(args.phi)
    T = read_matrix(args.matrix)
    log.debug("matrix %s of dim %d", args.matrix, T.shape[0])
    results = {"luxemburg": luxemburg_norm(phi, T), "orlicz": orlicz_norm(phi, T)}
    rows = [(k, r.value, r.method, r.residual) for k, r in results.items()]
    if phi.power is not None:
        rows.append(("schatten", schatten_norm(phi.power, T), "closed_form", 0.0))
    if args.format == "json":
        text = _dump_json({"phi": phi.label, "matrix": str(args.matrix), "norms": {
            name: {"value": v, "method": m, "residual": r} for name, v, m, r in rows}})
    elif args.format == "csv":
        text = _rows_csv(["norm", "value", "method", "residual"], rows)
    else:
        text = "".join(f"{name:10s} {fmt(v)}  ({m}, residual {fmt(r)})\n" for name, v, m, r in rows)
    _emit(text, args.out)
    return 0


def cmd_conjugate(args):
    phi = parse_phi(args.phi)
    spec = None
    if args.lo is not None or args.hi is not None or args.n is not None:
        base = default_conjugate_grid(phi)
        spec = GridSpec(args.lo if args.lo is not None else base.lo,
                        args.hi if args.hi is not None else base.hi,
                        args.n if args.n is not None else base.n)
    psi = conjugate(phi, spec)
    grid = psi.params["grid"]
    text = _rows_csv(["u", "phi"], zip(grid.nodes, grid.values))
    _emit(text, args.out)
    return 0


def cmd_indices(args):
    phi = parse_phi(args.phi)
    est = dyadic_indices(phi)
    data = {"phi": phi.label, "alpha": est.alpha, "beta": est.beta, "converged": est.converged}
    if args.format == "json":
        text = _dump_json(data)
    elif args.format == "csv":
        text = _rows_csv(["phi", "alpha", "beta", "converged"],
                         [(phi.label, est.alpha, est.beta, est.converged)])
    else:
        text = (f"alpha {fmt(est.alpha)}\nbeta  {fmt(est.beta)}\n"
                f"converged {str(est.converged).lower()}\n")
    _emit(text, args.out)
    return 0 if est.converged else 1


def cmd_verify(args):
    cfg = SuiteConfig(trials=args.trials, seed=args.seed, dim=args.dim, budget=args.budget,
                      dual_tuples=args.dual_tuples)
    for name in ("phi1", "phi2", "phi", "s"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    if args.p is not None:
        if args.suite == "clarkson-sp":
            cfg.sp_p = args.p
        else:
            cfg.p = args.p
    # parse function specs up front so bad input is a usage error
    for label in (cfg.phi1, cfg.phi2, cfg.phi):
        parse_phi(label)
    rep = run_suite(args.suite, cfg)
    _emit(_render_report(rep, args.format), args.out)
    return 0 if rep.ok else 1


def cmd_constants(args):
    phi = parse_phi(args.phi)
    if args.s is None:
        rep, J, c = check_bounds(phi, 0.0, args.dim, args.budget, args.seed, phi_s=phi)
        s = None
    else:
        rep, J, c = check_bounds(phi, args.s, args.dim, args.budget, args.seed)
        s = args.s
    rep.suite = "constants"
    rep.config = {"phi": phi.label, "s": "none" if s is None else s, "dim": args.dim,
                  "budget": args.budget, "seed": args.seed}
    alpha = rep.records[0].detail["alpha"]
    beta = rep.records[0].detail["beta"]
    if args.format == "json":
        data = rep.to_dict()
        data["estimates"] = {"cnj": c.to_dict(), "J": J.to_dict(), "alpha": alpha, "beta": beta}
        text = _dump_json(data)
    elif args.format == "csv":
        text = _rows_csv(["quantity", "value"],
                         [("cnj", c.value), ("J", J.value), ("alpha", alpha), ("beta", beta)])
        text += "\n" + rep.to_csv()
    else:
        wx, wy = c.witness
        text = (f"cnj   {fmt(c.value)}\nJ     {fmt(J.value)}\n"
                f"alpha {fmt(alpha)}\nbeta  {fmt(beta)}\n" + rep.to_text()
                + f"witness x {json.dumps(matrix_to_json(wx)['entries'])}\n"
                + f"witness y {json.dumps(matrix_to_json(wy)['entries'])}\n")
    _emit(text, args.out)
    return 0 if rep.ok else 1


def cmd_report(args):
    try:
        with open(args.input) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read report {args.input}: {exc}") from exc
    rep = VerificationReport.from_dict(data)
    _emit(_render_report(rep, args.format), args.out)
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="ncorlicz",
                                 description="Norms, constants and inequality checks for "
                                             "noncommutative Orlicz sequence spaces.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, default_format="text"):
        p.add_argument("--format", choices=FORMATS, default=default_format)
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("norm", help="Luxemburg, Orlicz and Schatten norms of a matrix")
    p.add_argument("--phi", required=True, help="power:<p> or grid:<csv path>")
    p.add_argument("--matrix", required=True, help="matrix file (.json or headerless .csv)")
    common(p)
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("conjugate", help="tabulate the complementary function as u,phi CSV")
    p.add_argument("--phi", required=True)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_conjugate)

    p = sub.add_parser("indices", help="dyadic estimates of the indices alpha and beta")
    p.add_argument("--phi", required=True)
    common(p)
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("verify", help="run a randomized verification suite")
    p.add_argument("--suite", required=True, choices=SUITES)
    p.add_argument("--phi1")
    p.add_argument("--phi2")
    p.add_argument("--phi", help="base function for the interpolation suites")
    p.add_argument("--p", type=float, help="tuple exponent (S_p exponent for clarkson-sp)")
    p.add_argument("--s", type=float, help="interpolation parameter")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--budget", type=int, default=10_000)
    p.add_argument("--dual-tuples", type=int, default=20)
    common(p, "json")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("constants", help="estimate c_NJ and J and check their bounds")
    p.add_argument("--phi", required=True)
    p.add_argument("--s", type=float)
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--budget", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=42)
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("report", help="re-render a JSON report")
    p.add_argument("--in", dest="input", required=True)
    common(p)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None):
    if os.environ.get("ORLICZ_LOG", "").lower() == "debug":
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OrliczError, UsageError, ValueError) as exc:
        print(f"ncorlicz: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
