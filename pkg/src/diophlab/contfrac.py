"""Certified continued-fraction expansion and convergents.

Quotients of a ball are certified by running the Euclidean algorithm on both
endpoints in lockstep: the set of reals sharing a prefix of partial quotients
is an interval, so agreement at both endpoints settles every interior point.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction

from .precision import HighPrecisionReal, PrecisionExhausted, coerce


@dataclass(frozen=True)
class ContinuedFraction:
    a: tuple[int, ...]
    certified_len: int
    source: str | None = None
    # True when the whole (finite) expansion of a rational input was emitted
    terminated: bool = False
    # index of the first quotient precision could not certify, if any
    exhausted_at: int | None = None

    def __post_init__(self):
        if any(ak < 1 for ak in self.a[1:]):
            raise ValueError("partial quotients after a0 must be >= 1")
        if self.certified_len != len(self.a):
            raise ValueError("certified_len must equal the number of emitted quotients")

    def __len__(self) -> int:
        return len(self.a)

    def __str__(self) -> str:
        if not self.a:
            return "[]"
        tail = ", ".join(map(str, self.a[1:]))
        return f"[{self.a[0]}; {tail}]" if tail else f"[{self.a[0]}]"

    def to_json(self) -> dict:
        return {"a": [str(ak) for ak in self.a], "certified_len": self.certified_len}

    @classmethod
    def from_json(cls, data: dict | str) -> ContinuedFraction:
        if isinstance(data, str):
            data = json.loads(data)
        a = tuple(int(ak) for ak in data["a"])
        return cls(a, int(data["certified_len"]))

    def value(self) -> Fraction:
        """Exact value of the emitted prefix, folded bottom-up."""
        if not self.a:
            raise ValueError("empty continued fraction")
        acc = Fraction(self.a[-1])
        for ak in reversed(self.a[:-1]):
            acc = ak + 1 / acc
        return acc


@dataclass(frozen=True)
class Convergent:
    n: int
    p: int
    q: int

    def to_json(self) -> dict:
        return {"n": self.n, "p": str(self.p), "q": str(self.q)}

    @classmethod
    def from_json(cls, data: dict) -> Convergent:
        return cls(int(data["n"]), int(data["p"]), int(data["q"]))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


def convergents_to_json(convs) -> str:
    return json.dumps([c.to_json() for c in convs])


def convergents_from_json(text: str) -> list[Convergent]:
    return [Convergent.from_json(d) for d in json.loads(text)]


def _euclid(num: int, den: int, max_terms: int) -> tuple[list[int], bool]:
    a = []
    while len(a) < max_terms:
        q, r = divmod(num, den)
        a.append(q)
        if r == 0:
            return a, True
        num, den = den, r
    return a, False


def expand(x, max_terms: int, source: str | None = None) -> ContinuedFraction:
    """Partial quotients of ``x`` that hold for every point of its ball."""
    if max_terms < 1:
        raise ValueError("max_terms must be positive")
    x = coerce(x)
    if x.exact is not None or x.rad == 0:
        q = x.exact if x.exact is not None else x.value
        a, done = _euclid(q.numerator, q.denominator, max_terms)
        return ContinuedFraction(tuple(a), len(a), source, terminated=done)

    lo, hi = x.lower, x.upper
    nl, dl = lo.numerator, lo.denominator
    nh, dh = hi.numerator, hi.denominator
    a: list[int] = []
    exhausted = None
    while len(a) < max_terms:
        ql, rl = divmod(nl, dl)
        qh, rh = divmod(nh, dh)
        if ql != qh:
            exhausted = len(a)
            break
        a.append(ql)
        if rl == 0 or rh == 0:
            # an endpoint is rational here; the next quotient is undecided
            exhausted = len(a) if len(a) < max_terms else None
            break
        nl, dl, nh, dh = dl, rl, dh, rh
    if not a:
        raise PrecisionExhausted("precision exhausted at term 0", term=0)
    return ContinuedFraction(tuple(a), len(a), source, exhausted_at=exhausted)


def convergents(cf: ContinuedFraction, count: int | None = None) -> list[Convergent]:
    if count is None:
        count = cf.certified_len
    if count > cf.certified_len:
        raise PrecisionExhausted(
            f"requested {count} convergents but only {cf.certified_len} quotients are certified",
            term=cf.certified_len)
    out = []
    p_prev, p = 0, 1   # p_{-2}, p_{-1}
    q_prev, q = 1, 0   # q_{-2}, q_{-1}
    for n, an in enumerate(cf.a[:count]):
        p_prev, p = p, an * p + p_prev
        q_prev, q = q, an * q + q_prev
        out.append(Convergent(n, p, q))
    return out


def determinant_ok(c: Convergent, c_prev: Convergent) -> bool:
    """p_n q_{n-1} - p_{n-1} q_n == (-1)^(n-1)."""
    return c.p * c_prev.q - c_prev.p * c.q == (-1) ** (c.n - 1)


def _distance(x: HighPrecisionReal, c: Convergent) -> HighPrecisionReal:
    return abs(x - Fraction(c.p, c.q))


def _certify_le(small: Fraction, ball: HighPrecisionReal) -> bool:
    """Decide small <= value(ball) for every point, or raise."""
    if small <= ball.lower:
        return True
    if small > ball.upper:
        return False
    raise PrecisionExhausted(f"cannot compare {float(small):.6g} against the distance ball")


def _certify_ge(big: Fraction, ball: HighPrecisionReal) -> bool:
    if ball.upper <= big:
        return True
    if ball.lower > big:
        return False
    raise PrecisionExhausted(f"cannot compare {float(big):.6g} against the distance ball")


@dataclass(frozen=True)
class SandwichReport:
    n: int
    distance: HighPrecisionReal
    lower_bound: Fraction | None
    upper_bound: Fraction
    lower_ok: bool
    upper_ok: bool
    terminating: bool

    @property
    def holds(self) -> bool:
        return self.lower_ok and self.upper_ok


def check_sandwich(x, c: Convergent, c_next: Convergent | None) -> SandwichReport:
    """1/(2 q_{n+1} q_n) <= |x - p_n/q_n| <= 1/q_n^2."""
    x = coerce(x)
    d = _distance(x, c)
    upper = Fraction(1, c.q * c.q)
    terminating = d.exact == 0
    if terminating:
        lower = None if c_next is None else Fraction(1, 2 * c_next.q * c.q)
        return SandwichReport(c.n, d, lower, upper, False, True, True)
    if c_next is None:
        raise ValueError("successor convergent required for the lower bound")
    if c_next.n != c.n + 1:
        raise ValueError("convergents must be consecutive")
    lower = Fraction(1, 2 * c_next.q * c.q)
    return SandwichReport(c.n, d, lower, upper, _certify_le(lower, d), _certify_ge(upper, d), False)


@dataclass(frozen=True)
class QuotientBoundReport:
    n: int
    a_next: int
    strict_upper_ok: bool   # |x - p/q| < 1/(a_{n+1} q^2)
    half_lower_ok: bool     # 1/(2 a_{n+1} q^2) <= |x - p/q|


def check_quotient_bound(x, c: Convergent, a_next: int) -> QuotientBoundReport:
    x = coerce(x)
    d = _distance(x, c)
    bound = Fraction(1, a_next * c.q * c.q)
    if d.upper < bound:
        upper_ok = True
    elif d.lower >= bound:
        upper_ok = False
    else:
        raise PrecisionExhausted("cannot certify the quotient bound")
    half_ok = _certify_le(bound / 2, d)
    return QuotientBoundReport(c.n, a_next, upper_ok, half_ok)


@dataclass(frozen=True)
class BestApproxReport:
    n: int
    p: int
    q: int
    q_scanned: int
    complete: bool
    holds: bool | None
    counterexample: tuple[int, int] | None = None


def best_approx_oracle(x, c: Convergent, time_budget: float | None = None) -> BestApproxReport:
    """Exhaustive check that no q <= q_n beats |x q_n - p_n|.

    Only the nearest integer p is tried for each q; any other p is farther.
    Work is done in fixed point with the ball radius carried per q.
    """
    x = coerce(x)
    if x.exact is not None:
        x = HighPrecisionReal.from_fraction(x.exact, max(x.precision_bits, 256))
    W = -x.exp
    X, R = x.man, x.rad
    if W < 0:
        X, R, W = X << -W, R << -W, 0
    one = 1 << W
    half = one >> 1

    ref = abs(c.q * X - c.p * one)
    ref_lo, ref_hi = ref - c.q * R, ref + c.q * R
    deadline = None if time_budget is None else time.monotonic() + time_budget
    for q in range(1, c.q + 1):
        if deadline is not None and q % 4096 == 0 and time.monotonic() > deadline:
            return BestApproxReport(c.n, c.p, c.q, q - 1, False, None)
        qX = q * X
        p = (qX + half) >> W
        if q == c.q and p == c.p:
            continue
        d = abs(qX - p * one)
        slack = q * R
        if d + slack < ref_lo:
            return BestApproxReport(c.n, c.p, c.q, q, True, False, (p, q))
        if d - slack <= ref_hi and x.exact is None:
            raise PrecisionExhausted(f"cannot separate q={q} from the convergent at this precision")
        if x.exact is not None and d < ref:
            return BestApproxReport(c.n, c.p, c.q, q, True, False, (p, q))
    return BestApproxReport(c.n, c.p, c.q, c.q, True, True)


def dirichlet_ok(x, c: Convergent) -> bool:
    """0 < |x - p/q| < 1/q^2."""
    d = _distance(coerce(x), c)
    return d.sign() == 1 and d.upper < Fraction(1, c.q * c.q)

