"""Symmetric exponential sums, the thresholded limit test and discrepancy.

The partial sum over -x <= n <= x of exp(i 2 pi f n) is the Dirichlet kernel
sin((2x+1) pi f) / sin(pi f).  Only f = frac(m alpha) and (2x+1) f mod 2 are
needed, both of which are reduced once at full precision; no per-term phase
is ever accumulated for the limit test itself.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .precision import HighPrecisionReal, PrecisionExhausted, coerce, const_pi, sin

SINGULAR_FLOOR = 1e-12
BRUTE_CAP = 10 ** 7
DISCREPANCY_CAP = 10 ** 7
SATURATION = 0.9
DECAY = 10.0
M_MAX = 64
X_MAX = 10 ** 6

_CHUNK = 1 << 20


class SingularPointError(ValueError):
    """|sin t| fell below the configured floor."""


class CapExceeded(ValueError):
    """Requested size is above the configured cap."""


def kernel_closed_form(t: float, x: int, floor: float = SINGULAR_FLOOR) -> float:
    """sin((2x+1)t) / sin(t), evaluated in extended precision."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    tl = np.longdouble(t)
    s = np.sin(tl)
    if abs(s) < floor:
        raise SingularPointError(f"|sin({t})| < {floor}")
    return float(np.sin(np.longdouble(2 * x + 1) * tl) / s)


def kernel_brute(t: float, x: int, cap: int = BRUTE_CAP) -> complex:
    """Term-by-term sum of exp(i 2 t n) over -x <= n <= x."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x > cap:
        raise CapExceeded(f"x={x} exceeds cap {cap}")
    two_t = 2 * np.longdouble(t)
    re_parts, im_parts = [], []
    for start in range(-x, x + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, x + 1), dtype=np.longdouble)
        phase = two_t * n
        re_parts.append(math.fsum(np.cos(phase).astype(np.float64)))
        im_parts.append(math.fsum(np.sin(phase).astype(np.float64)))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def relative_difference(a: float, b: float) -> float:
    """|a - b| scaled by max(|a|, |b|, 1); sums near zero are judged absolutely."""
    return abs(a - b) / max(abs(a), abs(b), 1.0)


@dataclass(frozen=True)
class KernelSample:
    x: int
    m: int
    re: float
    im: float
    modulus: float
    # certified value of the full (unnormalized) sum; not part of equality
    total: HighPrecisionReal | None = field(default=None, compare=False, repr=False)

    def to_json(self) -> dict:
        return {"x": self.x, "m": self.m, "re": self.re, "im": self.im, "modulus": self.modulus}


def reduce_phase(alpha, m: int) -> HighPrecisionReal:
    """f = m*alpha minus its nearest integer, in [-1/2, 1/2]."""
    a = coerce(alpha)
    ma = a * m
    f = ma - round(ma.value)
    return f


def _nearest_mod2(v: HighPrecisionReal) -> HighPrecisionReal:
    # shift by an even integer so the midpoint lies in [-1, 1]
    k = 2 * round(v.value / 2)
    return v - k


def limit_test_partial(alpha, m: int, x: int) -> KernelSample:
    """(1/(2x)) * sum over -x <= n <= x of exp(i 2 pi m alpha n)."""
    if m == 0:
        raise ValueError("m = 0 is degenerate")
    if x < 1:
        raise ValueError("x must be at least 1")
    alpha = coerce(alpha)
    f = reduce_phase(alpha, m)
    if f.exact == 0:
        total = HighPrecisionReal.from_int(2 * x + 1, alpha.precision_bits)
    else:
        if f.contains_zero():
            raise PrecisionExhausted(f"frac({m}*alpha) is not certified nonzero")
        pi = const_pi(alpha.precision_bits)
        g = _nearest_mod2((2 * x + 1) * f)
        total = sin(pi * g) / sin(pi * f)
    value = float(total) / (2 * x)
    return KernelSample(x, m, value, 0.0, abs(value), total)


def envelope_constant(alpha, m: int) -> HighPrecisionReal | None:
    """1/|sin(pi m alpha)|, or None when m*alpha is an exact integer."""
    f = reduce_phase(alpha, m)
    if f.exact == 0:
        return None
    return 1 / abs(sin(const_pi(f.precision_bits) * f))


@dataclass(frozen=True)
class DecayCurve:
    alpha_id: str
    m: int
    samples: tuple[KernelSample, ...]
    bound_constant: float | None

    def __post_init__(self):
        xs = [s.x for s in self.samples]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("samples must have strictly increasing x")

    def bound_at(self, x: int) -> float | None:
        return None if self.bound_constant is None else self.bound_constant / (2 * x)

    def to_json(self) -> dict:
        return {"m": self.m, "bound_constant": self.bound_constant,
                "samples": [s.to_json() for s in self.samples]}


def x_grid(x_max: int, x_min: int = 1000) -> list[int]:
    """Powers of ten from x_min up to x_max, plus x_max itself."""
    grid, x = [], x_min
    while x < x_max:
        grid.append(x)
        x *= 10
    grid.append(x_max)
    return grid


def decay_curve(alpha, m: int, xs, alpha_id: str = "") -> DecayCurve:
    samples = tuple(limit_test_partial(alpha, m, x) for x in xs)
    c = envelope_constant(alpha, m)
    return DecayCurve(alpha_id, m, samples, None if c is None else float(c))


RATIONAL_LIKE = "rational-like"
IRRATIONAL_LIKE = "irrational-like"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Classification:
    verdict: str
    m_max: int
    x_max: int
    curves: tuple[DecayCurve, ...]
    saturation: float = SATURATION
    decay: float = DECAY

    def to_json(self) -> str:
        doc = {"verdict": self.verdict, "m_max": self.m_max, "x_max": self.x_max,
               "saturation": self.saturation, "decay": self.decay,
               "curves": [c.to_json() for c in self.curves]}
        return json.dumps(doc, indent=2) + "\n"

    def curves_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "m", "modulus", "bound"])
        for c in self.curves:
            for s in c.samples:
                b = c.bound_at(s.x)
                w.writerow([s.x, s.m, repr(s.modulus), "" if b is None else repr(b)])
        return buf.getvalue()


def classify(alpha, m_max: int = M_MAX, x_max: int = X_MAX,
             saturation: float = SATURATION, decay: float = DECAY,
             alpha_id: str = "") -> Classification:
    """Threshold the partial sums at x_max over 1 <= m <= m_max.

    rational-like: some m has modulus > saturation.
    irrational-like: every m has modulus < decay / x_max.
    Anything else is inconclusive.
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    if x_max < 1000:
        raise ValueError("x_max must be at least 1000")
    xs = x_grid(x_max)
    curves = tuple(decay_curve(alpha, m, xs, alpha_id) for m in range(1, m_max + 1))
    final = [c.samples[-1].modulus for c in curves]
    if any(v > saturation for v in final):
        verdict = RATIONAL_LIKE
    elif all(v < decay / x_max for v in final):
        verdict = IRRATIONAL_LIKE
    else:
        verdict = INCONCLUSIVE
    return Classification(verdict, m_max, x_max, curves, saturation, decay)


def discrepancy(alpha, N: int, cap: int = DISCREPANCY_CAP) -> float:
    """Star discrepancy of frac(alpha n), n = 1..N, via the sorted-sample formula."""
    if N < 1:
        raise ValueError("N must be positive")
    if N > cap:
        raise CapExceeded(f"N={N} exceeds cap {cap}")
    alpha = coerce(alpha)
    n = np.arange(1, N + 1, dtype=np.uint64)
    if alpha.exact is not None:
        q = alpha.exact
        a, b = q.numerator % q.denominator, q.denominator
        if a * N < 2 ** 63:
            pts = ((np.uint64(a) * n) % np.uint64(b)).astype(np.float64) / b
        else:
            pts = np.array([Fraction(a * k % b, b) for k in range(1, N + 1)], dtype=np.float64)
    else:
        frac = alpha.value - math.floor(alpha.value)
        A = math.floor(frac * 2 ** 64)
        # uint64 multiplication wraps, which is exactly the reduction mod 1;
        # keep 53 bits so the float conversion is exact and stays below 1
        pts = ((np.uint64(A) * n) >> np.uint64(11)).astype(np.float64) / 2.0 ** 53
    pts.sort()
    i = np.arange(1, N + 1, dtype=np.float64)
    return float(max(np.max(i / N - pts), np.max(pts - (i - 1) / N)))
