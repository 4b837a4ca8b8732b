"""Named constants and the small expression language used to name them.

Expressions accept integers, decimal literals, ``e``, ``pi`` (or ``π``),
``+ - * / ^``, parentheses and ``sqrt(...)``.  Parsing goes through Python's
own :mod:`ast` with a node whitelist.  Expressions free of ``e``, ``pi`` and
``sqrt`` of non-squares evaluate to exact rationals.
"""

from __future__ import annotations

import ast
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .precision import (
    DEFAULT_PRECISION,
    HighPrecisionReal,
    const_e,
    const_pi,
    int_pow,
    sqrt,
)

PRECISION_ENV = "DIOPHLAB_PRECISION"


class ExpressionError(ValueError):
    """Unparseable or disallowed constant expression."""


@dataclass(frozen=True)
class ConstantId:
    tag: str
    r: int | None = None
    expr: str | None = None

    def __post_init__(self):
        if self.tag == "PI_POW" and (self.r is None or self.r < 1):
            raise ExpressionError("PI_POW requires r >= 1")
        if self.tag == "CUSTOM":
            _parse(self.expr)

    @property
    def key(self) -> str:
        """Canonical text form, also the key of published data."""
        if self.tag == "PI_POW":
            return "pi" if self.r == 1 else f"pi^{self.r}"
        if self.tag == "CUSTOM":
            return self.expr
        return _KEYS[self.tag]

    def __str__(self) -> str:
        return self.key


_KEYS = {
    "E": "e",
    "PI": "pi",
    "E_PLUS_PI": "e+pi",
    "E_TIMES_PI": "e*pi",
    "PI_PLUS_PI_SQ": "pi+pi^2",
    "PI_INV": "1/pi",
}

E = ConstantId("E")
PI = ConstantId("PI")
E_PLUS_PI = ConstantId("E_PLUS_PI")
E_TIMES_PI = ConstantId("E_TIMES_PI")
PI_PLUS_PI_SQ = ConstantId("PI_PLUS_PI_SQ")
PI_INV = ConstantId("PI_INV")


def pi_pow(r: int) -> ConstantId:
    return ConstantId("PI_POW", r=r)


def custom(text: str) -> ConstantId:
    return ConstantId("CUSTOM", expr=text)


_ALIASES = {
    "e": E, "pi": PI, "π": PI,
    "e+pi": E_PLUS_PI, "pi+e": E_PLUS_PI,
    "e*pi": E_TIMES_PI, "pi*e": E_TIMES_PI, "epi": E_TIMES_PI,
    "pi+pi^2": PI_PLUS_PI_SQ, "pi^2+pi": PI_PLUS_PI_SQ,
    "1/pi": PI_INV, "pi^-1": PI_INV, "pi^(-1)": PI_INV,
}


def parse_constant(text: str) -> ConstantId:
    norm = text.strip().replace(" ", "").replace("π", "pi").replace("**", "^")
    if norm in _ALIASES:
        return _ALIASES[norm]
    if norm.startswith("pi^") and norm[3:].isdigit() and int(norm[3:]) >= 1:
        return pi_pow(int(norm[3:]))
    return custom(norm)


def is_exact(cid: ConstantId) -> bool:
    return exact_value(cid) is not None


def exact_value(cid: ConstantId) -> Fraction | None:
    if cid.tag != "CUSTOM":
        return None
    return _exact(_parse(cid.expr))


def default_precision(fallback: int = DEFAULT_PRECISION) -> int:
    raw = os.environ.get(PRECISION_ENV)
    return int(raw) if raw else fallback


@lru_cache(maxsize=256)
def eval_constant(cid: ConstantId, precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    P = precision_bits
    if cid.tag == "E":
        return const_e(P)
    if cid.tag == "PI":
        return const_pi(P)
    if cid.tag == "E_PLUS_PI":
        return const_e(P) + const_pi(P)
    if cid.tag == "E_TIMES_PI":
        return const_e(P) * const_pi(P)
    if cid.tag == "PI_PLUS_PI_SQ":
        p = const_pi(P)
        return p + p * p
    if cid.tag == "PI_POW":
        return int_pow(const_pi(P), cid.r)
    if cid.tag == "PI_INV":
        return 1 / const_pi(P)
    return evaluate(cid.expr, P)


def evaluate(text: str, precision_bits: int = DEFAULT_PRECISION) -> HighPrecisionReal:
    return _eval(_parse(text), precision_bits)


# -- parsing ---------------------------------------------------------------


@lru_cache(maxsize=256)
def _parse(text: str) -> ast.expr:
    if not text or not text.strip():
        raise ExpressionError("empty expression")
    src = text.replace("π", "pi").replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}") from exc
    _check(tree.body, src)
    return tree.body


def _check(node: ast.AST, src: str) -> None:
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, (int, float)):
            raise ExpressionError(f"unsupported literal {node.value!r}")
        # keep decimal literals exact
        node.exact = Fraction(ast.get_source_segment(src, node))
    elif isinstance(node, ast.Name):
        if node.id not in ("e", "pi"):
            raise ExpressionError(f"unknown symbol {node.id!r}")
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _check(node.operand, src)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        _check(node.left, src)
        _check(node.right, src)
    elif isinstance(node, ast.BinOp) and isinstance(node.op, ast.Pow):
        _check(node.left, src)
        n = _int_exponent(node.right)
        if n < 0 and not (n == -1 and isinstance(node.left, ast.Name) and node.left.id == "pi"):
            raise ExpressionError("negative powers are only allowed as pi^-1")
        node.n = n
    elif isinstance(node, ast.Call):
        if not (isinstance(node.func, ast.Name) and node.func.id == "sqrt"
                and len(node.args) == 1 and not node.keywords):
            raise ExpressionError("only sqrt(x) calls are supported")
        _check(node.args[0], src)
    else:
        raise ExpressionError(f"unsupported syntax: {ast.dump(node)}")


def _int_exponent(node: ast.AST) -> int:
    sign = 1
    while isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        if isinstance(node.op, ast.USub):
            sign = -sign
        node = node.operand
    if isinstance(node, ast.Constant) and type(node.value) is int:
        return sign * node.value
    raise ExpressionError("exponents must be integer literals")


def _exact(node: ast.AST) -> Fraction | None:
    if isinstance(node, ast.Constant):
        return node.exact
    if isinstance(node, ast.Name):
        return None
    if isinstance(node, ast.UnaryOp):
        v = _exact(node.operand)
        return None if v is None else (-v if isinstance(node.op, ast.USub) else v)
    if isinstance(node, ast.Call):
        v = _exact(node.args[0])
        if v is None or v < 0:
            return None
        r = sqrt(HighPrecisionReal.from_fraction(v, 64))
        return r.exact
    if isinstance(node.op, ast.Pow):
        v = _exact(node.left)
        if v is None:
            return None
        if v == 0 and node.n < 0:
            raise ExpressionError("zero denominator")
        return v ** node.n
    a, b = _exact(node.left), _exact(node.right)
    if a is None or b is None:
        return None
    if isinstance(node.op, ast.Add):
        return a + b
    if isinstance(node.op, ast.Sub):
        return a - b
    if isinstance(node.op, ast.Mult):
        return a * b
    if b == 0:
        raise ExpressionError("zero denominator")
    return a / b


def _eval(node: ast.AST, P: int) -> HighPrecisionReal:
    q = _exact(node)
    if q is not None:
        return HighPrecisionReal.from_fraction(q, P)
    if isinstance(node, ast.Name):
        return const_e(P) if node.id == "e" else const_pi(P)
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, P)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call):
        return sqrt(_eval(node.args[0], P))
    if isinstance(node.op, ast.Pow):
        return int_pow(_eval(node.left, P), node.n)
    a, b = _eval(node.left, P), _eval(node.right, P)
    if isinstance(node.op, ast.Add):
        return a + b
    if isinstance(node.op, ast.Sub):
        return a - b
    if isinstance(node.op, ast.Mult):
        return a * b
    if _exact(node.right) == 0:
        raise ExpressionError("zero denominator")
    return a / b
