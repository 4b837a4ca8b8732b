"""Certified nonvanishing scans over integer boxes, the Euler sine product,
lattice-gap minima and a Kronecker approximation solver.

Every box result is a finite check; it says nothing about cells outside it.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .constants import E, E_TIMES_PI, ConstantId, eval_constant, pi_pow
from .precision import (
    GUARD_BITS,
    HighPrecisionReal,
    PrecisionExhausted,
    _rad_units,
    _to_fixed,
    coerce,
    const_pi,
    sin,
)

START_BITS = 128
MAX_BITS = 4096

SIN_KE_PLUS_M = "SIN_KE_PLUS_M"
SIN_KEPI_PLUS_M = "SIN_KEPI_PLUS_M"
SIN_KPI_R_PLUS_MPI_S = "SIN_KPI_R_PLUS_MPI_S"
GAP_HALF_ODD_PI = "GAP_HALF_ODD_PI"
GAP_INT_PI = "GAP_INT_PI"
INT_MULT_E_PI = "INT_MULT_E_PI"

SINE_FAMILIES = (SIN_KE_PLUS_M, SIN_KEPI_PLUS_M, SIN_KPI_R_PLUS_MPI_S)
GAP_FAMILIES = (GAP_HALF_ODD_PI, GAP_INT_PI)


@dataclass(frozen=True)
class LatticeScanReport:
    family: str
    box: dict
    min_abs: float
    argmin: tuple[int, ...]
    precision_used: int
    certified_lower: Fraction   # min over cells of the ball's lower end
    unresolved: tuple[tuple[int, ...], ...] = ()
    cells: tuple[tuple, ...] | None = None  # (k, m, [r,] value) rows when requested

    @property
    def complete(self) -> bool:
        return not self.unresolved

    @property
    def certified_positive(self) -> bool:
        return self.complete and self.certified_lower > 0

    def to_json(self) -> str:
        doc = {
            "family": self.family,
            "box": {k: list(v) if isinstance(v, tuple) else v for k, v in self.box.items()},
            "min_abs": repr(self.min_abs),
            "argmin": list(self.argmin),
            "precision_used": self.precision_used,
            "certified_lower": f"{float(self.certified_lower):.17g}",
            "unresolved": [list(c) for c in self.unresolved],
        }
        return json.dumps(doc, indent=2) + "\n"

    def cells_csv(self) -> str:
        if self.cells is None:
            raise ValueError("scan was run without cell capture")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        width = len(self.cells[0]) if self.cells else 3
        w.writerow(["k", "m", "r", "value"] if width == 4 else ["k", "m", "value"])
        for row in self.cells:
            w.writerow([*row[:-1], repr(row[-1])])
        return buf.getvalue()


def _range(r) -> range:
    lo, hi = r
    if lo > hi:
        raise ValueError(f"empty range {r}")
    return range(lo, hi + 1)


@lru_cache(maxsize=64)
def _sine_bases(family: str, r: int | None, s: int | None, P: int):
    if family == SIN_KE_PLUS_M:
        return eval_constant(E, P), HighPrecisionReal.from_int(1, P)
    if family == SIN_KEPI_PLUS_M:
        return eval_constant(E_TIMES_PI, P), HighPrecisionReal.from_int(1, P)
    if family == SIN_KPI_R_PLUS_MPI_S:
        return eval_constant(pi_pow(r + 1), P), eval_constant(pi_pow(s + 1), P)
    raise ValueError(f"unknown sine family {family!r}")


def _escalate(evaluate, start_bits: int, max_bits: int):
    """Evaluate at doubling precision until the ball excludes zero."""
    P = start_bits
    while True:
        v = evaluate(P)
        if not v.contains_zero():
            return v, P
        if P >= max_bits:
            return None, P
        P = min(2 * P, max_bits)


class _MinTracker:
    def __init__(self, keep_cells: bool):
        self.best = None
        self.arg = None
        self.lower = None
        self.prec = 0
        self.unresolved = []
        self.cells = [] if keep_cells else None

    def add(self, cell, v: HighPrecisionReal | None, P: int):
        self.prec = max(self.prec, P)
        if v is None:
            self.unresolved.append(cell)
            return
        a = abs(v)
        mid = float(a)
        if self.cells is not None:
            self.cells.append((*cell, mid))
        if self.best is None or mid < self.best:
            self.best, self.arg = mid, cell
        lo = a.lower
        if self.lower is None or lo < self.lower:
            self.lower = lo

    def report(self, family, box) -> LatticeScanReport:
        if self.best is None:
            return LatticeScanReport(family, box, math.nan, (), self.prec, Fraction(0),
                                     tuple(self.unresolved), self._cells())
        return LatticeScanReport(family, box, self.best, self.arg, self.prec, self.lower,
                                 tuple(self.unresolved), self._cells())

    def _cells(self):
        return None if self.cells is None else tuple(self.cells)


def sine_scan(family: str, k_range, m_range, precision_bits: int = START_BITS,
              r: int | None = None, s: int | None = None,
              max_bits: int = MAX_BITS, keep_cells: bool = False) -> LatticeScanReport:
    """Certified min |sin(k X + m Y)| over a box, excluding (0, 0).

    X, Y are (e, 1), (e*pi, 1) or (pi^(r+1), pi^(s+1)) by family.
    """
    if family == SIN_KPI_R_PLUS_MPI_S:
        if r is None or s is None or not 1 <= r < s:
            raise ValueError("the pi-power family needs 1 <= r < s")
    else:
        r = s = None
    ks, ms = _range(k_range), _range(m_range)
    box = {"k": tuple(k_range), "m": tuple(m_range)}
    if r is not None:
        box.update(r=r, s=s)
    tracker = _MinTracker(keep_cells)
    for k in ks:
        for m in ms:
            if k == 0 and m == 0:
                continue

            def value(P, k=k, m=m):
                X, Y = _sine_bases(family, r, s, P)
                return sin(X * k + Y * m)

            v, P = _escalate(value, precision_bits, max_bits)
            tracker.add((k, m), v, P)
    if tracker.best is None and not tracker.unresolved:
        raise ValueError("box contains only the trivial point (0, 0)")
    return tracker.report(family, box)


# -- sine product --------------------------------------------------------


@dataclass(frozen=True)
class SineProductResult:
    terms: int
    partial: HighPrecisionReal         # x * prod_{n<=terms}(1 - x^2/(pi^2 n^2))
    tail_bound: Fraction | None        # remaining factor lies in [1 - tail_bound, 1]
    value: HighPrecisionReal           # certified enclosure of sin(x)


def sine_product(x, terms: int) -> SineProductResult:
    """Truncated Euler product for sin(x) with a rigorous tail enclosure.

    For n > |x|/pi every factor lies in (0, 1], so the partial product
    overshoots sin(x) in absolute value and the tail factor T obeys
    1 - c/(N (1 - c/(N+1)^2)) <= T <= 1 with c = x^2/pi^2.
    """
    if terms < 1:
        raise ValueError("terms must be positive")
    x = coerce(x)
    prec = x.precision_bits
    ratio = x.pi_ratio
    if ratio is not None and ratio.denominator == 1 and abs(ratio) <= terms:
        zero = HighPrecisionReal.from_int(0, prec)
        return SineProductResult(terms, zero, Fraction(0), zero)

    W = prec + GUARD_BITS + 2 * terms.bit_length() + 16
    one = 1 << W
    pi = const_pi(prec + 64)
    c = (x * x) / (pi * pi)
    C, cerr = _to_fixed(c, W)
    ec = cerr + _rad_units(c, W)
    Pm, perr = _to_fixed(x, W)
    ep = perr + _rad_units(x, W)
    for n in range(1, terms + 1):
        n2 = n * n
        F = one - C // n2
        ef = ec // n2 + 2
        Pn = (Pm * F) >> W
        ep = (ep * abs(F) + (abs(Pm) + ep) * ef) // one + 2
        Pm = Pn
    partial = HighPrecisionReal.make(Pm, ep, -W, prec)

    N = terms
    c_hi = c.upper
    if (N + 1) ** 2 <= c_hi:
        enclosure = HighPrecisionReal.from_interval(-1, 1, prec)
        return SineProductResult(terms, partial, None, enclosure)
    delta = c_hi / (N * (1 - c_hi / (N + 1) ** 2))
    lo_t = max(1 - delta, Fraction(0))
    corners = [partial.lower, partial.upper, partial.lower * lo_t, partial.upper * lo_t]
    enclosure = HighPrecisionReal.from_interval(min(corners), max(corners), prec)
    return SineProductResult(terms, partial, delta, enclosure)


# -- lattice gaps --------------------------------------------------------


def best_r(family: str, y: HighPrecisionReal, r_range=None) -> int:
    """Nearest line index for y: round(y/pi) or round(y/pi - 1/2)."""
    t = y.value / const_pi(y.precision_bits).value
    if family == GAP_HALF_ODD_PI:
        t -= Fraction(1, 2)
    elif family not in (GAP_INT_PI, INT_MULT_E_PI):
        raise ValueError(f"unknown gap family {family!r}")
    r = round(t)
    if r_range is not None:
        r = min(max(r, r_range[0]), r_range[1])
    return r


def _line(family: str, r: int, P: int) -> HighPrecisionReal:
    pi = const_pi(P)
    if family == GAP_HALF_ODD_PI:
        return pi * Fraction(2 * r + 1, 2)
    return pi * r


def _parse_base(b, P: int) -> HighPrecisionReal:
    if isinstance(b, ConstantId):
        return eval_constant(b, P)
    if isinstance(b, HighPrecisionReal):
        return b
    return HighPrecisionReal.from_fraction(Fraction(b), P)


def lattice_gap(family: str, k_range, m_range, r_range=None,
                bases=(E, 1), precision_bits: int = START_BITS,
                max_bits: int = MAX_BITS, keep_cells: bool = False) -> LatticeScanReport:
    """min over the box of |k X + m Y - line_r| with the nearest line per cell.

    Lines are r*pi (GAP_INT_PI) or (2r+1)*pi/2 (GAP_HALF_ODD_PI).  The default
    bases (X, Y) = (e, 1) give |ke + m - line|; pass (pi^v, pi^u) for the
    pi-power analog.
    """
    if family not in GAP_FAMILIES:
        raise ValueError(f"unknown gap family {family!r}")
    ks, ms = _range(k_range), _range(m_range)
    if r_range is not None:
        _range(r_range)
    cells = [(k, m) for k in ks for m in ms if (k, m) != (0, 0)]
    if not cells:
        raise ValueError("box contains only the trivial point (0, 0)")
    box = {"k": tuple(k_range), "m": tuple(m_range)}
    if r_range is not None:
        box["r"] = tuple(r_range)
    tracker = _MinTracker(keep_cells)
    for k, m in cells:
        hold = {}

        def value(P, k=k, m=m):
            X, Y = (_parse_base(b, P) for b in bases)
            y = X * k + Y * m
            hold["r"] = best_r(family, y, r_range)
            return y - _line(family, hold["r"], P)

        v, P = _escalate(value, precision_bits, max_bits)
        tracker.add((k, m, hold["r"]), v, P)
    return tracker.report(family, box)


def integer_multiple_check(k_max: int, m_max: int, precision_bits: int = START_BITS,
                           max_bits: int = MAX_BITS) -> LatticeScanReport:
    """Certified min of |e k - m pi| over 1 <= k <= k_max, 1 <= m <= m_max."""
    if k_max < 1 or m_max < 1:
        raise ValueError("k_max and m_max must be at least 1")
    tracker = _MinTracker(False)
    for k in range(1, k_max + 1):
        # |ek - m pi| is convex in m, so the nearest admissible m is the cell minimum
        m = best_r(INT_MULT_E_PI, eval_constant(E, precision_bits) * k, (1, m_max))

        def value(P, k=k, m=m):
            return eval_constant(E, P) * k - const_pi(P) * m

        v, P = _escalate(value, precision_bits, max_bits)
        tracker.add((k, m), v, P)
    return tracker.report(INT_MULT_E_PI, {"k": (1, k_max), "m": (1, m_max)})


# -- Kronecker approximation ---------------------------------------------


class KroneckerNotFound(LookupError):
    def __init__(self, message: str, best_q: int, best_p: int, best_value: float):
        super().__init__(message)
        self.best_q = best_q
        self.best_p = best_p
        self.best_value = best_value


@dataclass(frozen=True)
class KroneckerSolution:
    alpha: HighPrecisionReal
    beta: HighPrecisionReal
    epsilon: Fraction
    p: int
    q: int
    achieved: float
    achieved_ball: HighPrecisionReal

    def to_json(self) -> str:
        doc = {"p": str(self.p), "q": str(self.q), "epsilon": f"{float(self.epsilon):.17g}",
               "achieved": repr(self.achieved)}
        return json.dumps(doc, indent=2) + "\n"


def first_hit(a: int, m: int, lo: int, hi: int) -> int | None:
    """Least x >= 0 with lo <= (a x) mod m <= hi, for 0 <= lo <= hi < m.

    Euclid-style descent: if no multiple of a lands in [lo, hi] directly,
    the problem transforms into the same question for (m mod a, a).
    """
    stack = []
    while True:
        if lo == 0:
            y = 0
            break
        a %= m
        if a == 0:
            y = None
            break
        k = -(-lo // a)
        if a * k <= hi:
            y = k
            break
        stack.append((a, m, lo))
        a, m, lo, hi = m % a, a, (-hi) % a, (-lo) % a
    while stack:
        if y is None:
            return None
        a, m, lo = stack.pop()
        y = -(-(lo + m * y) // a)
    return y


def _first_hit_from(A: int, c: int, M: int, width: int, start: int) -> int | None:
    """Least q >= start with (A q + c) mod M in [0, width]."""
    c0 = (c + A * start) % M
    lo, hi = (-c0) % M, (width - c0) % M
    if lo <= hi:
        x = first_hit(A, M, lo, hi)
    else:
        x1 = first_hit(A, M, 0, hi)
        x2 = first_hit(A, M, lo, M - 1)
        x = min(v for v in (x1, x2) if v is not None) if (x1, x2) != (None, None) else None
    return None if x is None else start + x


def _distance(alpha: HighPrecisionReal, beta: HighPrecisionReal, q: int):
    v = alpha * q - beta
    p = round(v.value)
    return p, abs(v - p)


def kronecker_solve(alpha, beta, epsilon, q_cap: int) -> KroneckerSolution:
    """Least q in [1, q_cap] with |alpha q - p - beta| < epsilon for some integer p."""
    alpha = coerce(alpha)
    beta = coerce(beta, alpha.precision_bits)
    eps = Fraction(epsilon)
    if alpha.exact is not None:
        raise ValueError("alpha must be irrational-typed, got an exact rational")
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    if q_cap < 1:
        raise ValueError("q_cap must be at least 1")

    W = alpha.precision_bits + GUARD_BITS
    M = 1 << W
    A, aerr = _to_fixed(alpha, W)
    B, berr = _to_fixed(beta, W)
    ea = aerr + _rad_units(alpha, W)
    eb = berr + _rad_units(beta, W)
    slack = q_cap * ea + eb + 2
    E = math.floor(eps * M)
    A %= M
    if eps >= Fraction(1, 2):
        return _solution(alpha, beta, eps, 1)

    start = 1
    while start <= q_cap:
        # outer window: every true hit is in it; inner window: every member is a true hit
        Eo = E + slack
        q = _first_hit_from(A, (Eo - B) % M, M, 2 * Eo, start)
        if q is None or q > q_cap:
            break
        p, d = _distance(alpha, beta, q)
        if d.upper < eps:
            return _solution(alpha, beta, eps, q)
        if d.lower >= eps:
            start = q + 1
            continue
        P = alpha.precision_bits
        raise PrecisionExhausted(f"cannot decide q={q} against epsilon at {P} bits")

    bq, bp, bv = _best_within(alpha, beta, A, B, M, q_cap)
    raise KroneckerNotFound(f"no q <= {q_cap} reaches epsilon; best {bv:.3g} at q={bq}",
                            bq, bp, bv)


def _solution(alpha, beta, eps, q) -> KroneckerSolution:
    p, d = _distance(alpha, beta, q)
    return KroneckerSolution(alpha, beta, eps, p, q, float(d), d)


def _best_within(alpha, beta, A, B, M, q_cap):
    """Smallest achievable distance over q <= q_cap, by bisection on the window."""
    lo, hi = 0, M // 2
    while lo < hi:
        mid = (lo + hi) // 2
        q = _first_hit_from(A, (mid - B) % M, M, 2 * mid, 1)
        if q is not None and q <= q_cap:
            hi = mid
        else:
            lo = mid + 1
    q = _first_hit_from(A, (lo - B) % M, M, 2 * lo, 1)
    p, d = _distance(alpha, beta, q)
    return q, p, float(d)
