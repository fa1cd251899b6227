"""Command-line front end: CSV/DOT/JSON artifacts and the acceptance run.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 acceptance failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, acceptance, bintree, census, hardy, mcsim, qudit, spectrum, transform
from .outcomes import DomainError

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_ACCEPTANCE = 0, 1, 2, 3

DEFAULT_DB_RANGE = "0:15:0.05"
DEFAULT_TOLERANCE = 1e-12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- arguments

def parse_db_range(text):
    """``a:b:step`` -> inclusive dB grid ``a, a+step, ..., b``."""
    try:
        a, b, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"--db-range expects a:b:step, got {text!r}") from None
    if not step > 0 or b < a:
        raise UsageError(f"--db-range needs step > 0 and a <= b, got {text!r}")
    count = int(math.floor((b - a) / step + 1e-9)) + 1
    return [round(a + i * step, 12) for i in range(count)]


def parse_truncation(text):
    if text == "auto":
        return None
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"--truncation expects an integer or 'auto', got {text!r}") from None
    if n < 1:
        raise UsageError("--truncation must be positive")
    return n


def _grid(args):
    """List of ``(db, lambda)`` points from ``--lambda`` or ``--db-range``."""
    if args.lam is not None:
        lams = args.lam
        return [(spectrum.lambda_to_db(lam), spectrum._check_lambda(lam)) for lam in lams]
    return [(db, spectrum.db_to_lambda(db)) for db in parse_db_range(args.db_range or DEFAULT_DB_RANGE)]


def _single_lambda(args):
    if args.lam is None or len(args.lam) != 1:
        raise UsageError("this command needs exactly one --lambda value")
    return spectrum._check_lambda(args.lam[0])


def _outcomes(lam, scheme, truncation, tol):
    if scheme == "qubit":
        n = truncation if truncation is not None else spectrum.auto_truncation(lam, tol)
        return hardy.qubit_outcomes(lam, n)
    d_max = truncation if truncation is not None else qudit.auto_dmax(lam, tol)
    return qudit.qudit_outcomes(lam, d_max)


def _variant(name):
    return bintree.OOPR if name == "oopr" else bintree.NEAR_EVEN


# ------------------------------------------------------------------- output

def _fmt(value):
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _csv_text(meta, header, rows):
    buf = io.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}={_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _map(fn, items, workers):
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _grid_meta(args, grid):
    if args.lam is not None:
        return {"grid": "lambda=" + ",".join(repr(lam) for _, lam in grid)}
    return {"grid": f"db={args.db_range or DEFAULT_DB_RANGE}"}


# ----------------------------------------------------------------- commands

def cmd_rate(args):
    grid = _grid(args)

    def row(point):
        db, lam = point
        return (db, lam, transform.pmax_qubit(lam), census.spdc_rate(lam))

    meta = _grid_meta(args, grid)
    meta["threshold_db"] = spectrum.lambda_to_db(spectrum.THRESHOLD_LAMBDA)
    meta["threshold_lambda"] = spectrum.THRESHOLD_LAMBDA
    _emit(_csv_text(meta, ["db", "lambda", "p_max", "spdc_rate"], _map(row, grid, args.workers)), args.out)


def cmd_povm_count(args):
    try:
        lo, hi = (int(t) for t in args.n_range.split(":"))
    except ValueError:
        raise UsageError(f"--n-range expects lo:hi, got {args.n_range!r}") from None
    if lo < 2 or hi < lo:
        raise UsageError("--n-range needs 2 <= lo <= hi")
    lam = args.lam[0] if args.lam else 0.8
    rows = [
        (n, census.povm_count("nielsen", n), census.bvn_count_formula(n), census.povm_count("hardy", n),
         census.hardy_count_observed(lam, n))
        for n in range(lo, hi + 1)
    ]
    meta = {"n_range": args.n_range, "observed_lambda": float(lam)}
    _emit(_csv_text(meta, ["N", "nielsen", "bvn", "hardy", "hardy_observed"], rows), args.out)


def cmd_entanglement(args):
    grid = _grid(args)
    tol = args.tolerance

    def row(point):
        db, lam = point
        s_tmsv = spectrum.tmsv_entropy(lam)
        s_avg = qudit.average_entanglement(lam, tol)
        return (db, lam, s_tmsv, s_avg, transform.pmax_qubit(lam), s_tmsv - s_avg)

    meta = _grid_meta(args, grid)
    meta["tolerance"] = tol
    meta["gap_limit"] = qudit.GAP_LIMIT
    header = ["db", "lambda", "s_tmsv", "s_avg", "p_max_ebits", "gap"]
    _emit(_csv_text(meta, header, _map(row, grid, args.workers)), args.out)


def cmd_efficiency(args):
    grid = _grid(args)
    truncation = parse_truncation(args.truncation)
    tol = args.tolerance
    nan = float("nan")

    def row(point):
        db, lam = point
        ebits = transform.pmax_qubit(lam) if args.scheme == "qubit" else qudit.average_entanglement(lam, tol)
        if ebits <= 0:
            return (db, lam) + (nan,) * 6
        out = _outcomes(lam, args.scheme, truncation, tol)
        s_o = bintree.tree_stats(bintree.build_oopr_tree(out), ebits)
        s_n = bintree.tree_stats(bintree.build_near_even_tree(out), ebits)
        return (db, lam,
                s_o.efficiency, s_o.rounds_error / ebits,
                s_n.efficiency, s_n.rounds_error / ebits,
                s_n.efficiency_bound, s_n.entropy_error / ebits)

    meta = _grid_meta(args, grid)
    meta.update(scheme=args.scheme, truncation=args.truncation, tolerance=tol)
    header = ["db", "lambda", "eta_oopr", "eta_oopr_err", "eta_near_even", "eta_near_even_err",
              "eta_shannon_bound", "eta_shannon_bound_err"]
    _emit(_csv_text(meta, header, _map(row, grid, args.workers)), args.out)


def cmd_tree(args):
    lam = _single_lambda(args)
    out = _outcomes(lam, args.scheme, parse_truncation(args.truncation), args.tolerance)
    tree = bintree.build_tree(out, _variant(args.variant))
    if args.out is None:
        sys.stdout.write(tree.to_dot())
        return
    path = Path(args.out)
    path.with_suffix(".dot").write_text(tree.to_dot())
    path.with_suffix(".json").write_text(tree.to_json(indent=1) + "\n")


def cmd_simulate(args):
    lam = _single_lambda(args)
    if args.runs < 1:
        raise DomainError("--runs must be at least 1")
    out = _outcomes(lam, args.scheme, parse_truncation(args.truncation), args.tolerance)
    tree = bintree.build_tree(out, _variant(args.variant))
    batch = mcsim.simulate(tree, mcsim.tmsv_state(lam, out.dim), args.runs, args.seed, workers=args.workers)
    summary = mcsim.empirical_stats(batch)
    meta = {"lambda": lam, "scheme": args.scheme, "variant": args.variant, "runs": args.runs,
            "seed": args.seed, "truncation": args.truncation}
    text = "".join(f"# {k}={_fmt(v)}\n" for k, v in meta.items()) + summary.to_csv()
    _emit(text, args.out)
    if args.transcripts:
        with open(args.transcripts, "w") as fh:
            for line in batch.transcripts():
                fh.write(line + "\n")


def cmd_check(args):
    numbers = args.only or [num for num, *_ in acceptance.CRITERIA]
    results = []
    for num in numbers:
        try:
            res = acceptance.run_criterion(num)
        except KeyError:
            raise UsageError(f"no acceptance criterion {num}") from None
        print(res.line(), flush=True)
        results.append(res)
    passed = sum(r.ok for r in results)
    print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if passed == len(results) else EXIT_ACCEPTANCE


# ------------------------------------------------------------------- parser

def build_parser():
    parser = _Parser(prog="cvdv", description="TMSV to discrete-variable entanglement conversion.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid_opts(p, allow_range=True):
        group = p.add_mutually_exclusive_group()
        group.add_argument("--lambda", dest="lam", type=float, action="append", metavar="L",
                           help="squeezing parameter tanh(r); repeat for several points")
        if allow_range:
            group.add_argument("--db-range", metavar="A:B:STEP",
                               help=f"inclusive dB grid (default {DEFAULT_DB_RANGE})")
        else:
            p.set_defaults(db_range=None)

    def common(p):
        p.add_argument("--out", metavar="PATH", help="output file (default stdout)")
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, metavar="T",
                       help="truncation / series tolerance")
        p.add_argument("--workers", type=int, default=1, metavar="W", help="threads for grid points")

    def scheme_opts(p):
        p.add_argument("--scheme", choices=("qubit", "qudit"), default="qubit")
        p.add_argument("--truncation", default="auto", metavar="N|auto",
                       help="Fock truncation (qubit) or number of qudit outcomes")

    p = sub.add_parser("rate", help="P_max and SPDC rate versus squeezing")
    grid_opts(p)
    common(p)
    p.set_defaults(func=cmd_rate)

    p = sub.add_parser("povm-count", help="POVM counts of the competing protocols")
    p.add_argument("--n-range", default="2:30", metavar="LO:HI")
    p.add_argument("--lambda", dest="lam", type=float, action="append", metavar="L",
                   help="squeezing used for the observed count (default 0.8)")
    common(p)
    p.set_defaults(func=cmd_povm_count)

    p = sub.add_parser("entanglement", help="TMSV entropy, average qudit entanglement and their gap")
    grid_opts(p)
    common(p)
    p.set_defaults(func=cmd_entanglement)

    p = sub.add_parser("efficiency", help="binary rounds per ebit for both tree variants")
    grid_opts(p)
    scheme_opts(p)
    common(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("tree", help="DOT (and JSON with --out) of one measurement tree")
    grid_opts(p, allow_range=False)
    scheme_opts(p)
    p.add_argument("--variant", choices=("oopr", "near-even"), default="near-even")
    common(p)
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("simulate", help="Monte Carlo runs of one measurement tree")
    grid_opts(p, allow_range=False)
    scheme_opts(p)
    p.add_argument("--variant", choices=("oopr", "near-even"), default="near-even")
    p.add_argument("--runs", type=int, default=100_000, metavar="R")
    p.add_argument("--seed", type=int, default=0, metavar="S")
    p.add_argument("--transcripts", metavar="PATH", help="write one JSON line per run")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("check", help="run the acceptance criteria")
    p.add_argument("--only", type=int, action="append", metavar="K", help="run criterion K only")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        code = args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except DomainError as exc:
        print(f"cvdv: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"cvdv: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
