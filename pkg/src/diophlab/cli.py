"""Command-line front end: ``diophlab <command> ...``.

Exit codes: 0 ok, 2 usage error, 3 partial result (precision ran out, time
budget hit, nothing found within a cap), 4 unresolved scan cells.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import contfrac, lattice, limit, measure, published
from .constants import PRECISION_ENV, ExpressionError, eval_constant, parse_constant
from .precision import DivisionByZeroInterval, HighPrecisionReal, PrecisionExhausted

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL, EXIT_UNRESOLVED = 0, 2, 3, 4

TABLE_PRECISION = 1024
DEFAULT_PRECISION = 256
TABLE_COMMANDS = {"mu-table", "cf", "convergents", "best-approx"}

SCAN_FAMILIES = {
    "sin-ke+m": lattice.SIN_KE_PLUS_M,
    "sin-kepi+m": lattice.SIN_KEPI_PLUS_M,
    "sin-kpi-r+mpi-s": lattice.SIN_KPI_R_PLUS_MPI_S,
}
GAP_FAMILIES = {
    "half-odd-pi": lattice.GAP_HALF_ODD_PI,
    "int-pi": lattice.GAP_INT_PI,
}
RANGE_FLAGS = ("--k", "--m", "--r-range")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    precision_bits: int
    output_format: str = "text"
    output_path: str | None = None
    time_budget_secs: int | None = None
    thresholds: dict = field(default_factory=dict)
    ranges: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise UsageError("precision must be at least 64 bits")
        if self.output_format not in ("text", "csv", "json"):
            raise UsageError(f"unknown format {self.output_format!r}")


# -- argument parsing ----------------------------------------------------


def parse_int(text: str) -> int:
    """Integer literal, also accepting 10^6, 10**6 and 1e6."""
    s = text.strip().replace("**", "^")
    try:
        if "^" in s:
            base, exp = s.split("^")
            return int(base) ** int(exp)
        if "e" in s.lower():
            v = Fraction(s)
            if v.denominator != 1:
                raise ValueError
            return int(v)
        return int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--precision", type=int, default=None,
                   help=f"working precision in bits (env {PRECISION_ENV})")
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--output", default=None, help="write the result here instead of stdout")
    p.add_argument("--time-budget", type=float, default=None, help="seconds, where supported")
    p.add_argument("--config", default=None, help="key=value file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diophlab",
                                     description="Diophantine approximation experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cf", help="certified continued fraction")
    p.add_argument("constant")
    p.add_argument("--terms", type=parse_int, default=20)
    p.add_argument("--compare", action="store_true",
                   help="compare with the published expansion for this constant")

    p = sub.add_parser("convergents", help="convergents p_n/q_n")
    p.add_argument("constant")
    p.add_argument("--count", type=parse_int, default=10)

    p = sub.add_parser("mu-table", help="mu0 estimates per convergent")
    p.add_argument("constant")
    p.add_argument("--rows", type=parse_int, default=10)

    p = sub.add_parser("best-approx", help="exhaustive best-approximation check")
    p.add_argument("constant")
    p.add_argument("--index", type=parse_int, required=True, help="convergent index n")

    p = sub.add_parser("limit-test", help="thresholded limit test with decay curves")
    p.add_argument("constant")
    p.add_argument("--m-max", type=parse_int, default=limit.M_MAX)
    p.add_argument("--x-max", type=parse_int, default=limit.X_MAX)
    p.add_argument("--saturation", type=float, default=limit.SATURATION)
    p.add_argument("--decay", type=float, default=limit.DECAY)
    p.add_argument("--curves", default=None, help="write decay curves as CSV here")

    p = sub.add_parser("kernel", help="Dirichlet kernel at (t, x)")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", type=parse_int, required=True)
    p.add_argument("--floor", type=float, default=limit.SINGULAR_FLOOR)
    p.add_argument("--compare", action="store_true", help="also sum term by term")

    p = sub.add_parser("discrepancy", help="star discrepancy of frac(alpha n)")
    p.add_argument("constant")
    p.add_argument("--n", type=parse_int, default=10 ** 5)

    p = sub.add_parser("scan", help="certified min |sin| over a lattice box")
    p.add_argument("family", choices=sorted(SCAN_FAMILIES))
    p.add_argument("--k", type=parse_range, required=True)
    p.add_argument("--m", type=parse_range, required=True)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--s", type=int, default=None)
    p.add_argument("--max-bits", type=int, default=lattice.MAX_BITS)
    p.add_argument("--cells", default=None, help="write every cell value as CSV here")

    p = sub.add_parser("gap", help="certified lattice gap to multiples of pi")
    p.add_argument("family", choices=sorted(GAP_FAMILIES))
    p.add_argument("--k", type=parse_range, required=True)
    p.add_argument("--m", type=parse_range, required=True)
    p.add_argument("--r-range", type=parse_range, default=None)
    p.add_argument("--max-bits", type=int, default=lattice.MAX_BITS)
    p.add_argument("--cells", default=None)

    p = sub.add_parser("int-multiple", help="certified min |e k - m pi|")
    p.add_argument("--k-max", type=parse_int, required=True)
    p.add_argument("--m-max", type=parse_int, required=True)

    p = sub.add_parser("sine-product", help="Euler product for sin(x) with tail bound")
    p.add_argument("constant")
    p.add_argument("--terms", type=parse_int, default=1000)

    p = sub.add_parser("kronecker", help="least q with |alpha q - p - beta| < eps")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", default="0")
    p.add_argument("--eps", type=parse_fraction, required=True)
    p.add_argument("--q-cap", type=parse_int, default=10 ** 6)

    for p in sub.choices.values():
        _common(p)
    return parser


def _join_negative_ranges(argv: list[str]) -> list[str]:
    # argparse reads "-50:50" as a flag; glue it to its option
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in RANGE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            k, v = line.split("=", 1)
            values[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return values


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser = build_parser()
    argv = _join_negative_ranges(argv)
    args = parser.parse_args(argv)
    if args.config:
        # config values become defaults, so explicit flags still win
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        values = read_config(args.config)
        unknown = sorted(set(values) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        flags = {a.dest for a in sub._actions if isinstance(a, argparse._StoreTrueAction)}
        for k in flags & set(values):
            if values[k].lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {k} expects a boolean")
            values[k] = values[k].lower() in ("true", "1", "yes")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def make_config(args: argparse.Namespace) -> RunConfig:
    if args.precision is not None:
        bits = args.precision
    elif os.environ.get(PRECISION_ENV):
        try:
            bits = int(os.environ[PRECISION_ENV])
        except ValueError:
            raise UsageError(f"{PRECISION_ENV} must be an integer") from None
    else:
        bits = TABLE_PRECISION if args.command in TABLE_COMMANDS else DEFAULT_PRECISION
    thresholds = {k: getattr(args, k) for k in ("saturation", "decay") if hasattr(args, k)}
    ranges = {k: getattr(args, k) for k in ("k", "m", "r_range") if hasattr(args, k)}
    budget = None if args.time_budget is None else int(math.ceil(args.time_budget))
    return RunConfig(bits, args.format, args.output, budget, thresholds, ranges)


# -- helpers -------------------------------------------------------------


def _value(text: str, bits: int) -> HighPrecisionReal:
    return eval_constant(parse_constant(text), bits)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(str(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# -- commands ------------------------------------------------------------


def cmd_cf(args, cfg: RunConfig) -> int:
    cid = parse_constant(args.constant)
    cf = contfrac.expand(eval_constant(cid, cfg.precision_bits), args.terms, source=cid.key)
    complete = cf.certified_len == args.terms or cf.terminated
    ref = published.EXPANSIONS.get(cid.key) if args.compare else None
    mismatch = None
    if ref is not None:
        n = min(len(ref), len(cf.a))
        mismatch = next((i for i in range(n) if ref[i] != cf.a[i]), None)
        if mismatch is None and len(ref) != len(cf.a):
            mismatch = n
    if cfg.output_format == "json":
        doc = cf.to_json()
        if ref is not None:
            doc["published"] = [str(a) for a in ref]
            doc["first_mismatch"] = mismatch
        out = _json(doc)
    elif cfg.output_format == "csv":
        out = _csv(["k", "a"], enumerate(cf.a))
    else:
        out = f"{cid.key} = {cf}\n"
        if cf.terminated:
            out += "expansion terminates (exact rational)\n"
        elif not complete:
            out += f"certified {cf.certified_len} of {args.terms} terms at {cfg.precision_bits} bits\n"
        if ref is not None:
            ref_text = str(contfrac.ContinuedFraction(ref, len(ref)))
            out += f"published  {ref_text}\n"
            out += ("agrees with published expansion\n" if mismatch is None
                    else f"first difference at index {mismatch}\n")
    _emit(cfg, out)
    return EXIT_OK if complete else EXIT_PARTIAL


def cmd_convergents(args, cfg: RunConfig) -> int:
    x = _value(args.constant, cfg.precision_bits)
    cf = contfrac.expand(x, args.count)
    convs = contfrac.convergents(cf)
    if cfg.output_format == "json":
        out = _json([c.to_json() for c in convs])
    elif cfg.output_format == "csv":
        out = _csv(["n", "p", "q"], ((c.n, c.p, c.q) for c in convs))
    else:
        out = "".join(f"{c.n:>3}  {c.p}/{c.q}\n" for c in convs)
    _emit(cfg, out)
    return EXIT_OK if len(convs) == args.count or cf.terminated else EXIT_PARTIAL


def _render_table(rows, key, cfg: RunConfig) -> str:
    if cfg.output_format == "csv":
        return measure.table_csv(rows)
    if cfg.output_format == "json":
        return measure.table_json(rows, key, cfg.precision_bits)
    return measure.table_text(rows, key)


def cmd_mu_table(args, cfg: RunConfig) -> int:
    cid = parse_constant(args.constant)
    try:
        rows = measure.mu_table(cid, args.rows, cfg.precision_bits)
    except PrecisionExhausted as exc:
        _emit(cfg, _render_table(exc.partial or [], cid.key, cfg))
        print(f"diophlab: {exc}", file=sys.stderr)
        return EXIT_PARTIAL
    _emit(cfg, _render_table(rows, cid.key, cfg))
    return EXIT_OK


def cmd_best_approx(args, cfg: RunConfig) -> int:
    x = _value(args.constant, cfg.precision_bits)
    cf = contfrac.expand(x, args.index + 1)
    c = contfrac.convergents(cf, args.index + 1)[-1]
    rep = contfrac.best_approx_oracle(x, c, cfg.time_budget_secs)
    doc = {"n": rep.n, "p": str(rep.p), "q": str(rep.q), "q_scanned": rep.q_scanned,
           "complete": rep.complete, "holds": rep.holds,
           "counterexample": None if rep.counterexample is None
           else [str(v) for v in rep.counterexample]}
    if cfg.output_format == "text":
        state = {True: "holds", False: "fails", None: "undecided"}[rep.holds]
        out = f"n={rep.n} {rep.p}/{rep.q}: {state}; scanned q <= {rep.q_scanned}\n"
        if rep.counterexample:
            out += f"beaten by {rep.counterexample[0]}/{rep.counterexample[1]}\n"
    elif cfg.output_format == "csv":
        out = _csv(list(doc), [[v if not isinstance(v, list) else "/".join(v)
                               for v in doc.values()]])
    else:
        out = _json(doc)
    _emit(cfg, out)
    return EXIT_OK if rep.complete else EXIT_PARTIAL


def cmd_limit_test(args, cfg: RunConfig) -> int:
    cid = parse_constant(args.constant)
    x = eval_constant(cid, cfg.precision_bits)
    res = limit.classify(x, args.m_max, args.x_max, args.saturation, args.decay, cid.key)
    if args.curves:
        _write(args.curves, res.curves_csv())
    if cfg.output_format == "json":
        out = res.to_json()
    elif cfg.output_format == "csv":
        out = res.curves_csv()
    else:
        worst = max(res.curves, key=lambda c: c.samples[-1].modulus)
        out = (f"{cid.key}: {res.verdict} (m_max={res.m_max}, x_max={res.x_max})\n"
               f"largest modulus at x_max: {worst.samples[-1].modulus:.6g} at m={worst.m}; "
               f"thresholds saturation>{res.saturation}, decay<{res.decay / res.x_max:.3g}\n")
    _emit(cfg, out)
    return EXIT_OK


def cmd_kernel(args, cfg: RunConfig) -> int:
    closed = limit.kernel_closed_form(args.t, args.x, args.floor)
    doc = {"t": args.t, "x": args.x, "closed_form": closed}
    if args.compare:
        brute = limit.kernel_brute(args.t, args.x)
        doc.update(brute_re=brute.real, brute_im=brute.imag,
                   relative_difference=limit.relative_difference(closed, brute.real))
    if cfg.output_format == "json":
        out = _json(doc)
    elif cfg.output_format == "csv":
        out = _csv(list(doc), [[repr(v) if isinstance(v, float) else v for v in doc.values()]])
    else:
        out = "".join(f"{k}: {v!r}\n" for k, v in doc.items())
    _emit(cfg, out)
    return EXIT_OK


def cmd_discrepancy(args, cfg: RunConfig) -> int:
    d = limit.discrepancy(_value(args.constant, cfg.precision_bits), args.n)
    if cfg.output_format == "json":
        out = _json({"constant": args.constant, "N": args.n, "star_discrepancy": d})
    elif cfg.output_format == "csv":
        out = _csv(["N", "star_discrepancy"], [[args.n, repr(d)]])
    else:
        out = f"D*_{args.n} = {d!r}\n"
    _emit(cfg, out)
    return EXIT_OK


def _scan_out(rep: lattice.LatticeScanReport, cfg: RunConfig, cells_path: str | None) -> int:
    if cells_path:
        _write(cells_path, rep.cells_csv())
    if cfg.output_format == "json":
        out = rep.to_json()
    elif cfg.output_format == "csv":
        out = _csv(["family", "min_abs", "argmin", "precision_used", "unresolved"],
                   [[rep.family, repr(rep.min_abs), " ".join(map(str, rep.argmin)),
                     rep.precision_used, len(rep.unresolved)]])
    else:
        out = (f"{rep.family} over {rep.box}: min {rep.min_abs:.12g} at {rep.argmin}, "
               f"certified lower bound {float(rep.certified_lower):.12g}, "
               f"max precision {rep.precision_used} bits\n")
        if rep.unresolved:
            out += f"unresolved cells: {list(rep.unresolved)}\n"
    _emit(cfg, out)
    return EXIT_OK if rep.complete else EXIT_UNRESOLVED


def cmd_scan(args, cfg: RunConfig) -> int:
    fam = SCAN_FAMILIES[args.family]
    start = min(cfg.precision_bits, args.max_bits) if args.precision else lattice.START_BITS
    rep = lattice.sine_scan(fam, args.k, args.m, start, args.r, args.s,
                            args.max_bits, keep_cells=bool(args.cells))
    return _scan_out(rep, cfg, args.cells)


def cmd_gap(args, cfg: RunConfig) -> int:
    start = min(cfg.precision_bits, args.max_bits) if args.precision else lattice.START_BITS
    rep = lattice.lattice_gap(GAP_FAMILIES[args.family], args.k, args.m, args.r_range,
                              precision_bits=start, max_bits=args.max_bits,
                              keep_cells=bool(args.cells))
    return _scan_out(rep, cfg, args.cells)


def cmd_int_multiple(args, cfg: RunConfig) -> int:
    start = cfg.precision_bits if args.precision else lattice.START_BITS
    rep = lattice.integer_multiple_check(args.k_max, args.m_max, start)
    return _scan_out(rep, cfg, None)


def cmd_sine_product(args, cfg: RunConfig) -> int:
    res = lattice.sine_product(_value(args.constant, cfg.precision_bits), args.terms)
    tail = None if res.tail_bound is None else float(res.tail_bound)
    doc = {"terms": res.terms, "partial": res.partial.to_decimal(20),
           "tail_bound": tail, "lower": float(res.value.lower), "upper": float(res.value.upper)}
    if cfg.output_format == "json":
        out = _json(doc)
    elif cfg.output_format == "csv":
        out = _csv(list(doc), [[repr(v) if isinstance(v, float) else v for v in doc.values()]])
    else:
        out = (f"partial product {doc['partial']} over {res.terms} terms\n"
               f"sin enclosure [{doc['lower']!r}, {doc['upper']!r}]\n")
    _emit(cfg, out)
    return EXIT_OK


def cmd_kronecker(args, cfg: RunConfig) -> int:
    alpha = _value(args.alpha, cfg.precision_bits)
    beta = _value(args.beta, cfg.precision_bits)
    try:
        sol = lattice.kronecker_solve(alpha, beta, args.eps, args.q_cap)
    except lattice.KroneckerNotFound as exc:
        print(f"diophlab: {exc}", file=sys.stderr)
        doc = {"found": False, "best_q": str(exc.best_q), "best_p": str(exc.best_p),
               "best_value": repr(exc.best_value)}
        _emit(cfg, _json(doc) if cfg.output_format == "json" else f"not found: {exc}\n")
        return EXIT_PARTIAL
    if cfg.output_format == "json":
        out = sol.to_json()
    elif cfg.output_format == "csv":
        out = _csv(["p", "q", "achieved"], [[sol.p, sol.q, repr(sol.achieved)]])
    else:
        out = f"q={sol.q} p={sol.p} |alpha q - p - beta| = {sol.achieved:.6g} < {float(sol.epsilon):g}\n"
    _emit(cfg, out)
    return EXIT_OK


COMMANDS = {
    "cf": cmd_cf,
    "convergents": cmd_convergents,
    "mu-table": cmd_mu_table,
    "best-approx": cmd_best_approx,
    "limit-test": cmd_limit_test,
    "kernel": cmd_kernel,
    "discrepancy": cmd_discrepancy,
    "scan": cmd_scan,
    "gap": cmd_gap,
    "int-multiple": cmd_int_multiple,
    "sine-product": cmd_sine_product,
    "kronecker": cmd_kronecker,
}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
        cfg = make_config(args)
        return COMMANDS[args.command](args, cfg)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    except (UsageError, ExpressionError, DivisionByZeroInterval, ValueError, OSError) as exc:
        print(f"diophlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionExhausted as exc:
        print(f"diophlab: {exc}", file=sys.stderr)
        return EXIT_PARTIAL


if __name__ == "__main__":
    sys.exit(main())
