"""Midpoint-radius ("ball") arithmetic over dyadic rationals.

A :class:`HighPrecisionReal` is the closed interval ``[mid - rad, mid + rad]``
with ``mid = man * 2**exp`` and ``rad = rad_units * 2**exp``.  Every operation
returns a ball that contains the exact result for every choice of operands
inside the input balls.  Transcendental kernels run in fixed point on Python
integers and carry an explicit count of truncation units.

Exact rationals keep their :class:`~fractions.Fraction` value alongside the
ball so that rational-only pipelines (Euclid, exact limit tests) never touch
a rounding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

GUARD_BITS = 16
RAD_BITS = 32
DEFAULT_PRECISION = 256


class PrecisionExhausted(ArithmeticError):
    """A discrete decision could not be certified at the available precision."""

    def __init__(self, message: str, term: int | None = None, partial=None):
        super().__init__(message)
        self.term = term
        self.partial = partial


class DivisionByZeroInterval(ZeroDivisionError):
    """The divisor ball contains zero."""


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _normalize(man: int, rad: int, exp: int, prec: int) -> tuple[int, int, int]:
    width = prec + GUARD_BITS
    shift = max(abs(man).bit_length() - width, rad.bit_length() - RAD_BITS)
    if shift > 0:
        man >>= shift
        rad = ((rad + (1 << shift) - 1) >> shift) + 1
        exp += shift
    if man == 0 and rad == 0:
        exp = 0
    return man, rad, exp


@dataclass(frozen=True, slots=True)
class HighPrecisionReal:
    man: int
    rad: int
    exp: int
    precision_bits: int
    exact: Fraction | None = None
    # set when the value is known to be an exact rational multiple of pi
    pi_ratio: Fraction | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def make(cls, man, rad, exp, prec, exact=None, pi_ratio=None):
        if rad < 0:
            raise ValueError("negative radius")
        man, rad, exp = _normalize(man, rad, exp, prec)
        if exact is not None and exact == 0:
            pi_ratio = Fraction(0)
        return cls(man, rad, exp, prec, exact, pi_ratio)

    @classmethod
    def from_fraction(cls, q, prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
        q = Fraction(q)
        num, den = q.numerator, q.denominator
        if den & (den - 1) == 0:
            return cls.make(num, 0, -(den.bit_length() - 1), prec, exact=q)
        k = prec + GUARD_BITS + 2 - (num.bit_length() - den.bit_length())
        if k >= 0:
            man, rem = divmod(num << k, den)
        else:
            man, rem = divmod(num, den << -k)
        return cls.make(man, 1 if rem else 0, -k, prec, exact=q)

    @classmethod
    def from_int(cls, n: int, prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
        return cls.from_fraction(Fraction(n), prec)

    @classmethod
    def from_float(cls, x: float, err: float | None = None,
                   prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
        """Wrap a float as an approximation; default error is half an ulp."""
        if not math.isfinite(x):
            raise ValueError(f"non-finite input {x!r}")
        if err is None:
            err = math.ulp(x) / 2
        mid = Fraction(x)
        r = Fraction(err)
        if r < 0:
            raise ValueError("negative error bound")
        exp = min(_dyadic_exp(mid), _dyadic_exp(r)) if r else _dyadic_exp(mid)
        man = int(mid * Fraction(2) ** -exp)
        rad = int(r * Fraction(2) ** -exp)
        if rad == 0 and r == 0:
            return cls.make(man, 0, exp, prec, exact=mid)
        return cls.make(man, rad, exp, prec)

    @classmethod
    def from_interval(cls, lo, hi, prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("empty interval")
        mid = (lo + hi) / 2
        exp = -(prec + GUARD_BITS + 2 - max(abs(mid).numerator.bit_length()
                                            - mid.denominator.bit_length(), 0))
        scale = Fraction(2) ** -exp
        man = math.floor(mid * scale)
        rad = math.ceil((hi - lo) / 2 * scale) + 1
        return cls.make(man, rad, exp, prec)

    # -- views ------------------------------------------------------------

    @property
    def value(self) -> Fraction:
        return _dyadic(self.man, self.exp)

    @property
    def err(self) -> Fraction:
        return _dyadic(self.rad, self.exp)

    @property
    def lower(self) -> Fraction:
        return _dyadic(self.man - self.rad, self.exp)

    @property
    def upper(self) -> Fraction:
        return _dyadic(self.man + self.rad, self.exp)

    def contains(self, q) -> bool:
        return self.lower <= Fraction(q) <= self.upper

    def contains_zero(self) -> bool:
        return abs(self.man) <= self.rad

    def sign(self) -> int | None:
        """Certified sign, or None if the ball touches zero."""
        if self.man > self.rad:
            return 1
        if self.man < -self.rad:
            return -1
        if self.exact == 0:
            return 0
        return None

    def floor(self) -> int | None:
        """Certified floor, or None when the ball straddles an integer."""
        if self.exact is not None:
            return math.floor(self.exact)
        lo, hi = math.floor(self.lower), math.floor(self.upper)
        return lo if lo == hi else None

    def err_float(self) -> float:
        return _to_float(self.rad, self.exp)

    def __float__(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        return _to_float(self.man, self.exp)

    def decimal_prefix(self, digits: int) -> str | None:
        """Truncated decimal expansion valid for every point of the ball."""
        lo, hi = _truncate(self.lower, digits), _truncate(self.upper, digits)
        if self.exact is not None:
            return _truncate(self.exact, digits)
        return lo if lo == hi else None

    def to_decimal(self, digits: int) -> str:
        return _truncate(self.exact if self.exact is not None else self.value, digits)

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"HighPrecisionReal(exact={self.exact})"
        return f"HighPrecisionReal({self.to_decimal(20)} +/- {self.err_float():.3g})"

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(coerce(other, self.precision_bits), self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(coerce(other, self.precision_bits), self)

    def __neg__(self):
        return HighPrecisionReal(-self.man, self.rad, self.exp, self.precision_bits,
                                 None if self.exact is None else -self.exact,
                                 None if self.pi_ratio is None else -self.pi_ratio)

    def __abs__(self):
        if self.man >= 0:
            return self
        if self.contains_zero():
            # |x| is not a ball centred on |mid| when x straddles zero
            hi = max(-self.lower, self.upper)
            return HighPrecisionReal.from_interval(0, hi, self.precision_bits)
        return -self

    def __pow__(self, n):
        return int_pow(self, n)


def _dyadic(man: int, exp: int) -> Fraction:
    return Fraction(man << exp) if exp >= 0 else Fraction(man, 1 << -exp)


def _dyadic_exp(q: Fraction) -> int:
    den = q.denominator
    if den & (den - 1):
        raise ValueError("not a dyadic rational")
    return -(den.bit_length() - 1)


def _to_float(man: int, exp: int) -> float:
    s = max(abs(man).bit_length() - 64, 0)
    try:
        return math.ldexp(float(man >> s), exp + s)
    except OverflowError:
        return math.copysign(math.inf, man)


def _truncate(q: Fraction, digits: int) -> str:
    neg = q < 0
    scaled = math.floor(abs(q) * 10 ** digits)
    whole, frac = divmod(scaled, 10 ** digits)
    text = f"{whole}.{frac:0{digits}d}" if digits else str(whole)
    return "-" + text if neg else text


def coerce(x, prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    if isinstance(x, HighPrecisionReal):
        return x
    if isinstance(x, (int, Rational)):
        return HighPrecisionReal.from_fraction(Fraction(x), prec)
    if isinstance(x, float):
        return HighPrecisionReal.from_float(x, prec=prec)
    raise TypeError(f"cannot convert {type(x).__name__} to HighPrecisionReal")


def _pair(a, b):
    if not isinstance(a, HighPrecisionReal):
        a = coerce(a, b.precision_bits)
    if not isinstance(b, HighPrecisionReal):
        b = coerce(b, a.precision_bits)
    return a, b, max(a.precision_bits, b.precision_bits)


def _align(a: HighPrecisionReal, b: HighPrecisionReal):
    e = min(a.exp, b.exp)
    sa, sb = a.exp - e, b.exp - e
    return a.man << sa, a.rad << sa, b.man << sb, b.rad << sb, e


def add(a, b) -> HighPrecisionReal:
    a, b, prec = _pair(a, b)
    pr = a.pi_ratio + b.pi_ratio if a.pi_ratio is not None and b.pi_ratio is not None else None
    if a.exact is not None and b.exact is not None:
        return _with_ratio(HighPrecisionReal.from_fraction(a.exact + b.exact, prec), pr)
    ma, ra, mb, rb, e = _align(a, b)
    return HighPrecisionReal.make(ma + mb, ra + rb, e, prec, pi_ratio=pr)


def sub(a, b) -> HighPrecisionReal:
    if not isinstance(b, HighPrecisionReal):
        b = coerce(b, a.precision_bits if isinstance(a, HighPrecisionReal) else DEFAULT_PRECISION)
    return add(a, -b)


def mul(a, b) -> HighPrecisionReal:
    a, b, prec = _pair(a, b)
    pr = None
    if a.pi_ratio is not None and b.exact is not None:
        pr = a.pi_ratio * b.exact
    elif b.pi_ratio is not None and a.exact is not None:
        pr = b.pi_ratio * a.exact
    if a.exact is not None and b.exact is not None:
        return HighPrecisionReal.from_fraction(a.exact * b.exact, prec)
    man = a.man * b.man
    rad = abs(a.man) * b.rad + abs(b.man) * a.rad + a.rad * b.rad
    return HighPrecisionReal.make(man, rad, a.exp + b.exp, prec, pi_ratio=pr)


def div(a, b) -> HighPrecisionReal:
    a, b, prec = _pair(a, b)
    if b.exact == 0 or abs(b.man) <= b.rad:
        raise DivisionByZeroInterval("divisor interval contains zero")
    pr = None
    if a.pi_ratio is not None and b.exact is not None:
        pr = a.pi_ratio / b.exact
    if a.exact is not None and b.exact is not None:
        return HighPrecisionReal.from_fraction(a.exact / b.exact, prec)
    ma, ra, mb, rb = a.man, a.rad, b.man, b.rad
    k = max(0, prec + GUARD_BITS + abs(mb).bit_length() - abs(ma).bit_length() + 2)
    q, r = divmod(ma << k, mb)
    amb = abs(mb)
    rad = _ceil_div((ra * amb + abs(ma) * rb) << k, (amb - rb) * amb) + (1 if r else 0)
    return HighPrecisionReal.make(q, rad, a.exp - b.exp - k, prec, pi_ratio=pr)


def int_pow(x: HighPrecisionReal, n: int) -> HighPrecisionReal:
    if not isinstance(n, int):
        raise TypeError("exponent must be an integer")
    if x.exact is not None:
        if x.exact == 0 and n < 0:
            raise DivisionByZeroInterval("zero to a negative power")
        return HighPrecisionReal.from_fraction(x.exact ** n, x.precision_bits)
    if n < 0:
        return div(1, int_pow(x, -n))
    result = HighPrecisionReal.from_int(1, x.precision_bits)
    base = x
    while n:
        if n & 1:
            result = mul(result, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return result


def sqrt(x) -> HighPrecisionReal:
    x = coerce(x)
    prec = x.precision_bits
    if x.exact is not None:
        if x.exact < 0:
            raise ValueError("square root of a negative number")
        rn, rd = math.isqrt(x.exact.numerator), math.isqrt(x.exact.denominator)
        if rn * rn == x.exact.numerator and rd * rd == x.exact.denominator:
            return HighPrecisionReal.from_fraction(Fraction(rn, rd), prec)
    m, r, e = x.man, x.rad, x.exp
    if m - r <= 0:
        raise PrecisionExhausted("square root argument not certified positive")
    s = max(0, 2 * (prec + GUARD_BITS + 2) - m.bit_length())
    if (e - s) % 2:
        s += 1
    root = math.isqrt(m << s)
    low_root = math.isqrt((m - r) << s)
    rad = _ceil_div(r << s, low_root) + 1 if r else 1
    return HighPrecisionReal.make(root, rad, (e - s) // 2, prec)


# -- fixed-point kernels -------------------------------------------------
#
# Each kernel returns (v, err) meaning |true * 2**W - v| <= err.


def _atan_inv(k: int, W: int) -> tuple[int, int]:
    term = (1 << W) // k
    total, k2, n, count = term, k * k, 1, 1
    sign = 1
    while term:
        term //= k2
        n += 2
        sign = -sign
        total += sign * (term // n)
        count += 1
    return total, 3 * count + 3


@lru_cache(maxsize=64)
def _pi_fixed(W: int) -> tuple[int, int]:
    a, ea = _atan_inv(5, W)
    b, eb = _atan_inv(239, W)
    return 16 * a - 4 * b, 16 * ea + 4 * eb


@lru_cache(maxsize=64)
def _e_fixed(W: int) -> tuple[int, int]:
    term = total = 1 << W
    k = count = 1
    while term:
        term //= k
        total += term
        k += 1
        count += 1
    return total, 2 * count + 2


@lru_cache(maxsize=64)
def _ln2_fixed(W: int) -> tuple[int, int]:
    term = (1 << W) // 3
    total, n, count = term, 1, 1
    while term:
        term //= 9
        n += 2
        total += term // n
        count += 1
    return 2 * total, 2 * (3 * count + 3)


def _mulshift(a: int, b: int, W: int) -> int:
    """a * b / 2**W truncated toward zero (floor would stall at -1)."""
    p = a * b
    return p >> W if p >= 0 else -((-p) >> W)


def _tdiv(a: int, d: int) -> int:
    return a // d if a >= 0 else -((-a) // d)


def _sincos_fixed(v: int, W: int) -> tuple[int, int, int]:
    """sin and cos of v / 2**W for |v| <= 2**W."""
    one = 1 << W
    v2 = (v * v) >> W
    s_term, s_total = v, v
    c_term, c_total = one, one
    k, count = 1, 1
    while s_term or c_term:
        c_term = -_tdiv(_mulshift(c_term, v2, W), (2 * k - 1) * (2 * k))
        s_term = -_tdiv(_mulshift(s_term, v2, W), (2 * k) * (2 * k + 1))
        c_total += c_term
        s_total += s_term
        k += 1
        count += 1
    return s_total, c_total, 4 * count + 4


def _exp_fixed(v: int, W: int) -> tuple[int, int]:
    """exp(v / 2**W) for |v| <= 2**W."""
    term = total = 1 << W
    k, count = 1, 1
    while term:
        term = _tdiv(_mulshift(term, v, W), k)
        total += term
        k += 1
        count += 1
    return total, 4 * count + 4


def _atanh_fixed(u: int, W: int) -> tuple[int, int]:
    """atanh(u / 2**W) for |u| <= 2**W / 3."""
    u2 = (u * u) >> W
    term = total = u
    n, count = 1, 1
    while term:
        term = _mulshift(term, u2, W)
        n += 2
        total += _tdiv(term, n)
        count += 1
    return total, 3 * count + 3


def _to_fixed(x: HighPrecisionReal, W: int) -> tuple[int, int]:
    """Midpoint of x at scale 2**-W and its truncation error in units."""
    shift = x.exp + W
    if shift >= 0:
        return x.man << shift, 0
    return x.man >> -shift, 1


def _rad_units(x: HighPrecisionReal, W: int) -> int:
    shift = x.exp + W
    if shift >= 0:
        return x.rad << shift
    return _ceil_div(x.rad, 1 << -shift)


def _with_ratio(x: HighPrecisionReal, pi_ratio) -> HighPrecisionReal:
    if pi_ratio is None or x.pi_ratio == pi_ratio:
        return x
    return HighPrecisionReal(x.man, x.rad, x.exp, x.precision_bits, x.exact, pi_ratio)


# -- constants -----------------------------------------------------------


@lru_cache(maxsize=32)
def const_pi(prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    W = prec + GUARD_BITS + 16
    v, e = _pi_fixed(W)
    return HighPrecisionReal.make(v, e, -W, prec, pi_ratio=Fraction(1))


@lru_cache(maxsize=32)
def const_e(prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    W = prec + GUARD_BITS + 16
    v, e = _e_fixed(W)
    return HighPrecisionReal.make(v, e, -W, prec)


@lru_cache(maxsize=32)
def const_ln2(prec: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    W = prec + GUARD_BITS + 16
    v, e = _ln2_fixed(W)
    return HighPrecisionReal.make(v, e, -W, prec)


# -- elementary functions ------------------------------------------------


def _reduce(x: HighPrecisionReal, period_fixed, W: int):
    """Reduce mid(x) modulo a constant; returns (k, remainder, err units at W)."""
    M, merr = _to_fixed(x, W)
    extra = max(0, abs(M).bit_length() - W) + 8
    Wr = W + extra
    M, merr = _to_fixed(x, Wr)
    P, perr = period_fixed(Wr)
    k = (2 * M + P) // (2 * P)
    R = M - k * P
    rerr = merr + abs(k) * perr
    return k, R >> extra, (rerr >> extra) + 2


def sin(x) -> HighPrecisionReal:
    return _sin_cos(coerce(x), 0)


def cos(x) -> HighPrecisionReal:
    return _sin_cos(coerce(x), 1)


def _half_pi_fixed(W: int) -> tuple[int, int]:
    v, e = _pi_fixed(W + 1)
    return v >> 2, (e >> 2) + 1


def _sin_cos(x: HighPrecisionReal, quarter: int) -> HighPrecisionReal:
    prec = x.precision_bits
    if x.exact == 0:
        return HighPrecisionReal.from_int(quarter, prec)
    W = prec + GUARD_BITS + 32
    k, R, rerr = _reduce(x, _half_pi_fixed, W)
    s, c, kerr = _sincos_fixed(R, W)
    branch = (k + quarter) % 4
    val = (s, c, -s, -c)[branch]
    rad = kerr + rerr + _rad_units(x, W)
    return HighPrecisionReal.make(val, rad, -W, prec)


def exp(x) -> HighPrecisionReal:
    x = coerce(x)
    prec = x.precision_bits
    if x.exact == 0:
        return HighPrecisionReal.from_int(1, prec)
    if abs(float(x)) > 2 ** 24:
        raise OverflowError("exponent too large")
    r = x.err
    if r > 1:
        raise PrecisionExhausted("input radius too large for exp")
    W = prec + GUARD_BITS + 32
    n, R, rerr = _reduce(x, _ln2_fixed, W)
    y, yerr = _exp_fixed(R, W)
    # |R| < 1 so exp is 3-Lipschitz there; e**r - 1 <= 3r for r <= 1
    units = yerr + 3 * rerr + math.ceil(3 * r * (y + yerr))
    return HighPrecisionReal.make(y, units, n - W, prec)


def log(x) -> HighPrecisionReal:
    x = coerce(x)
    prec = x.precision_bits
    if x.exact == 1:
        return HighPrecisionReal.from_int(0, prec)
    if x.man - x.rad <= 0:
        if x.man <= 0 and x.exact is not None:
            raise ValueError("logarithm of a non-positive number")
        raise PrecisionExhausted("logarithm argument not certified positive")
    W = prec + GUARD_BITS + 32 + max(0, (abs(x.exp) + x.man.bit_length()).bit_length())
    m, e = x.man, x.exp
    b = m.bit_length()
    one = 1 << b
    u = ((m - one) << W) // (m + one)
    t, terr = _atanh_fixed(u, W)
    L, lerr = _ln2_fixed(W)
    val = 2 * t + (e + b) * L
    err = 2 * (terr + 2) + abs(e + b) * lerr
    if x.rad:
        # |log y - log mid| <= rad / (mid - rad)
        bound = Fraction(x.rad, m - x.rad)
        err += math.ceil(bound * (1 << W)) + 1
    return HighPrecisionReal.make(val, err, -W, prec)
