"""Finite-sample irrationality-measure estimates from convergents.

For a convergent p/q of x the estimate is mu0 = log(1/|x - p/q|) / log(q),
the exponent for which |x - p/q| = q^(-mu0) exactly.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

from . import published
from .constants import ConstantId, eval_constant
from .contfrac import Convergent, convergents, expand
from .precision import HighPrecisionReal, PrecisionExhausted, coerce, log

MATCHES = "matches-paper"
INCONSISTENT = "paper-inconsistent"
ABSENT = "paper-absent"

MATCH_TOLERANCE = Fraction(5, 10 ** 5)
TABLE_PRECISION = 1024


@dataclass(frozen=True)
class MuEstimate:
    n: int                           # 1-based row number (convergent index + 1)
    p: int
    q: int
    mu0: HighPrecisionReal | None    # None when q == 1
    tag: str | None = None
    printed: str | None = None       # published value on the aligned row, if any

    def mu0_text(self, digits: int = 6) -> str:
        if self.mu0 is None:
            return ""
        return format_fixed(self.mu0.value, digits)

    def to_json(self) -> dict:
        return {
            "n": str(self.n), "p": str(self.p), "q": str(self.q),
            "mu0": self.mu0_text() or None, "tag": self.tag, "printed": self.printed,
        }


def format_fixed(q: Fraction, digits: int) -> str:
    """Round a rational to ``digits`` decimals (half-even, deterministic)."""
    n = round(q * 10 ** digits)  # Fraction.__round__ is exact half-even
    return str(Decimal(n).scaleb(-digits))


def mu_estimate(x, c: Convergent) -> MuEstimate:
    """mu0 for one convergent; the row number is ``c.n + 1``."""
    x = coerce(x)
    if c.q < 2:
        return MuEstimate(c.n + 1, c.p, c.q, None)
    d = abs(x - Fraction(c.p, c.q))
    if d.sign() != 1:
        raise PrecisionExhausted(
            f"|x - {c.p}/{c.q}| is not certified positive at this precision", term=c.n)
    mu0 = -log(d) / log(HighPrecisionReal.from_int(c.q, x.precision_bits))
    return MuEstimate(c.n + 1, c.p, c.q, mu0)


def tag_row(est: MuEstimate, key: str) -> MuEstimate:
    row = published.lookup(key, est.p, est.q)
    if row is None:
        return MuEstimate(est.n, est.p, est.q, est.mu0, ABSENT, None)
    if (row.p, row.q) != (est.p, est.q):
        tag = INCONSISTENT
    elif row.printed is None or est.mu0 is None:
        tag = MATCHES if row.printed is None and est.mu0 is None else INCONSISTENT
    else:
        gap = abs(est.mu0.value - Fraction(row.printed))
        tag = MATCHES if gap + est.mu0.err < MATCH_TOLERANCE else INCONSISTENT
    return MuEstimate(est.n, est.p, est.q, est.mu0, tag, row.printed)


def mu_table(cid: ConstantId, rows: int,
             precision_bits: int = TABLE_PRECISION) -> list[MuEstimate]:
    """Rows 1..rows, each tagged against the published table for ``cid``."""
    if rows < 1:
        raise ValueError("rows must be positive")
    x = eval_constant(cid, precision_bits)
    cf = expand(x, rows, source=cid.key)
    out: list[MuEstimate] = []
    for c in convergents(cf):
        try:
            out.append(tag_row(mu_estimate(x, c), cid.key))
        except PrecisionExhausted as exc:
            raise PrecisionExhausted(str(exc), term=c.n + 1, partial=out) from exc
    if len(out) < rows:
        raise PrecisionExhausted(
            f"only {len(out)} rows certified at {precision_bits} bits",
            term=len(out) + 1, partial=out)
    return out


def table_csv(rows: list[MuEstimate]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "p", "q", "mu0", "tag"])
    for r in rows:
        w.writerow([r.n, r.p, r.q, r.mu0_text(), r.tag or ""])
    return buf.getvalue()


def table_json(rows: list[MuEstimate], key: str, precision_bits: int) -> str:
    doc = {"constant": key, "precision_bits": precision_bits,
           "rows": [r.to_json() for r in rows]}
    return json.dumps(doc, indent=2) + "\n"


def table_text(rows: list[MuEstimate], key: str) -> str:
    lines = [f"mu0 estimates for {key}",
             f"{'n':>3}  {'p':>10}  {'q':>8}  {'mu0':>9}  {'printed':>9}  tag"]
    for r in rows:
        lines.append(f"{r.n:>3}  {r.p:>10}  {r.q:>8}  {r.mu0_text():>9}  "
                     f"{r.printed or '':>9}  {r.tag or ''}")
    return "\n".join(lines) + "\n"
