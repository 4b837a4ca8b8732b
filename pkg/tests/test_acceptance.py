"""Acceptance checks, one marker per criterion.

Run ``pytest tests/test_acceptance.py`` (or the full suite); the terminal
summary prints one PASS/FAIL line per criterion.  Every check is implemented
as stated, including those the published data cannot satisfy.
"""

import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

from diophlab import published
from diophlab.constants import E, E_PLUS_PI, E_TIMES_PI, PI, PI_PLUS_PI_SQ, eval_constant
from diophlab.contfrac import best_approx_oracle, check_sandwich, convergents, determinant_ok, expand
from diophlab.lattice import (
    SIN_KE_PLUS_M,
    SIN_KEPI_PLUS_M,
    SIN_KPI_R_PLUS_MPI_S,
    KroneckerNotFound,
    kronecker_solve,
    sine_scan,
)
from diophlab.limit import (
    IRRATIONAL_LIKE,
    RATIONAL_LIKE,
    classify,
    envelope_constant,
    kernel_brute,
    kernel_closed_form,
    limit_test_partial,
    relative_difference,
)
from diophlab.measure import ABSENT, INCONSISTENT, MATCHES, mu_table

GOLDEN = Path(__file__).parent / "golden"
TOL = 5e-5
FIVE = {"e+pi": E_PLUS_PI, "e*pi": E_TIMES_PI, "pi+pi^2": PI_PLUS_PI_SQ, "e": E, "pi": PI}


def cli(*args: str) -> subprocess.CompletedProcess:
    return subprocess.run([sys.executable, "-m", "diophlab", *args],
                          capture_output=True, text=True, check=False)


def _rows(cid, n):
    return {(r.p, r.q): r for r in mu_table(cid, n, 1024)}


# -- 1 -------------------------------------------------------------------

@pytest.mark.criterion(1)
@pytest.mark.parametrize("key, terms", [("e+pi", 24), ("e*pi", 30), ("pi+pi^2", 27)])
def test_cf_reproduces_quoted_expansion(key, terms):
    start = time.perf_counter()
    proc = cli("cf", key, "--terms", str(terms), "--format", "json", "--precision", "1024")
    elapsed = time.perf_counter() - start
    assert proc.returncode == 0, proc.stderr
    got = tuple(int(a) for a in json.loads(proc.stdout)["a"])
    assert elapsed < 5
    assert got == published.EXPANSIONS[key]


# -- 2 -------------------------------------------------------------------

TABLE1_VALUES = [
    (41, 7, 3.033470),
    (920, 157, 2.608509),
    (19613, 3347, 2.124717),
    (59759, 10198, 2.073126),
    (379087, 64692, 2.067776),
    (538751, 91939, 2.066541),
]


@pytest.mark.criterion(2)
@pytest.mark.parametrize("p, q, printed", TABLE1_VALUES)
def test_e_plus_pi_row_value(p, q, printed):
    row = _rows(E_PLUS_PI, 11)[p, q]
    assert abs(float(row.mu0) - printed) < TOL


@pytest.mark.criterion(2)
def test_e_plus_pi_row_40146_validated_or_flagged():
    row = _rows(E_PLUS_PI, 11)[40146, 6851]
    ok = abs(float(row.mu0) - 2.382347) < TOL
    assert ok or row.tag == INCONSISTENT


@pytest.mark.criterion(2)
def test_e_plus_pi_flags():
    rows = _rows(E_PLUS_PI, 11)
    assert rows[293, 50].tag == INCONSISTENT
    assert rows[159664, 27247].tag == ABSENT


# -- 3 -------------------------------------------------------------------

TABLE2 = {r.row: r for r in published.TABLES["e*pi"]}


@pytest.mark.criterion(3)
@pytest.mark.parametrize("n", [3, 5, 6, 8, 9, 10])
def test_e_times_pi_row_matches(n):
    ref = TABLE2[n]
    row = _rows(E_TIMES_PI, 10)[ref.p, ref.q]
    assert abs(float(row.mu0) - float(ref.printed)) < TOL and row.tag == MATCHES


@pytest.mark.criterion(3)
@pytest.mark.parametrize("n", [4, 7])
def test_e_times_pi_row_flagged(n):
    ref = TABLE2[n]
    row = _rows(E_TIMES_PI, 10)[ref.p, ref.q]
    assert row.mu0 is not None  # oracle value is reported
    assert row.tag == INCONSISTENT


# -- 4 -------------------------------------------------------------------

TABLE3 = {r.row: r for r in published.TABLES["pi+pi^2"]}


@pytest.mark.criterion(4)
@pytest.mark.parametrize("n", range(2, 11))
def test_pi_plus_pi_sq_row_matches(n):
    ref = TABLE3[n]
    row = _rows(PI_PLUS_PI_SQ, 10)[ref.p, ref.q]
    assert abs(float(row.mu0) - float(ref.printed)) < TOL


# -- 5 -------------------------------------------------------------------

@pytest.mark.criterion(5)
def test_kernel_equivalence_and_bound():
    rng = random.Random(20240501)
    start = time.perf_counter()
    done = 0
    worst = 0.0
    while done < 500:
        t = rng.uniform(-10.0, 10.0)
        if abs(math.sin(t)) <= 1e-3:
            continue
        x = rng.randint(0, 10 ** 4)
        closed = kernel_closed_form(t, x)
        brute = kernel_brute(t, x)
        worst = max(worst, relative_difference(closed, brute.real))
        assert abs(closed) <= 1 / abs(math.sin(t)) * (1 + 1e-12)
        assert abs(brute) <= 1 / abs(math.sin(t)) * (1 + 1e-9)
        done += 1
    assert worst < 1e-9
    assert time.perf_counter() - start < 30


# -- 6 -------------------------------------------------------------------

def _rationals():
    rng = random.Random(66)
    out = set()
    while len(out) < 50:
        b = rng.randint(1, 64)
        out.add(Fraction(rng.randint(-500, 500), b))
    return sorted(out)


@pytest.mark.criterion(6)
@pytest.mark.parametrize("q", _rationals(), ids=str)
def test_rational_saturation(q):
    b = q.denominator
    for x in (10 ** 3, 10 ** 5):
        assert limit_test_partial(q, b, x).modulus == (2 * x + 1) / (2 * x)
    assert classify(q).verdict == RATIONAL_LIKE


# -- 7 -------------------------------------------------------------------

@pytest.mark.criterion(7)
@pytest.mark.parametrize("key", list(FIVE))
def test_irrational_decay(key):
    x = 10 ** 6
    alpha = eval_constant(FIVE[key], 256)
    for m in range(1, 11):
        s = limit_test_partial(alpha, m, x)
        env = envelope_constant(alpha, m)
        assert abs(s.total).upper / (2 * x) <= env.lower / (2 * x)
    assert classify(alpha, 10, x).verdict == IRRATIONAL_LIKE


# -- 8 -------------------------------------------------------------------

@pytest.mark.criterion(8)
@pytest.mark.parametrize("key", list(FIVE))
def test_convergent_identities(key):
    alpha = eval_constant(FIVE[key], 1024)
    convs = convergents(expand(alpha, 26))
    assert len(convs) == 26
    for prev, c in zip(convs, convs[1:]):
        assert determinant_ok(c, prev)
    for c, nxt in zip(convs[:25], convs[1:26]):
        rep = check_sandwich(alpha, c, nxt)
        assert rep.lower_ok and rep.upper_ok


# -- 9 -------------------------------------------------------------------

def _best_approx_cases():
    cases = []
    for key, cid in FIVE.items():
        cf = expand(eval_constant(cid, 1024), 40)
        for c in convergents(cf):
            if c.q <= 10 ** 4:
                cases.append(pytest.param(key, c.n, c.p, c.q, id=f"{key}-n{c.n}"))
    return cases


_budget = {"spent": 0.0}


@pytest.mark.criterion(9)
@pytest.mark.parametrize("key, n, p, q", _best_approx_cases())
def test_best_approximation(key, n, p, q):
    from diophlab.contfrac import Convergent
    start = time.perf_counter()
    rep = best_approx_oracle(eval_constant(FIVE[key], 1024), Convergent(n, p, q))
    _budget["spent"] += time.perf_counter() - start
    assert _budget["spent"] < 60
    assert rep.complete and rep.holds, f"beaten by {rep.counterexample}"


# -- 10 ------------------------------------------------------------------

@pytest.mark.criterion(10)
@pytest.mark.parametrize("family, box, rs", [
    (SIN_KE_PLUS_M, 50, (None, None)),
    (SIN_KEPI_PLUS_M, 50, (None, None)),
    (SIN_KPI_R_PLUS_MPI_S, 20, (1, 2)),
    (SIN_KPI_R_PLUS_MPI_S, 20, (1, 3)),
    (SIN_KPI_R_PLUS_MPI_S, 20, (2, 3)),
], ids=["ke+m", "kepi+m", "r1s2", "r1s3", "r2s3"])
def test_nonvanishing_scan(family, box, rs):
    rep = sine_scan(family, (-box, box), (-box, box), r=rs[0], s=rs[1], max_bits=4096)
    assert rep.unresolved == ()
    assert rep.precision_used <= 4096
    assert rep.certified_lower > 0


# -- 11 ------------------------------------------------------------------

@pytest.fixture(scope="module")
def e_orbit():
    """frac(q e) for q <= 10^4, from mpmath at 300 bits."""
    with mpmath.workprec(300):
        return [None] + [mpmath.frac(q * mpmath.e) for q in range(1, 10 ** 4 + 1)]


@pytest.mark.criterion(11)
def test_kronecker_fast_path_matches_brute_force(e_orbit):
    rng = random.Random(1111)
    alpha = eval_constant(E, 256)
    with mpmath.workprec(300):
        for _ in range(100):
            beta = Fraction(rng.random())
            eps = Fraction(10 ** rng.uniform(-4, -1))
            b, ep = mpmath.mpf(beta.numerator) / beta.denominator, mpmath.mpf(eps.numerator) / eps.denominator
            want = None
            for q in range(1, 10 ** 4 + 1):
                d = e_orbit[q] - b
                if abs(d - mpmath.nint(d)) < ep:
                    want = q
                    break
            try:
                got = kronecker_solve(alpha, beta, eps, 10 ** 4).q
            except KroneckerNotFound:
                got = None
            assert got == want, (beta, eps)


# -- 12 ------------------------------------------------------------------

@pytest.mark.criterion(12)
@pytest.mark.parametrize("key, rows, stem", [
    ("e+pi", 11, "e_plus_pi"),
    ("e*pi", 10, "e_times_pi"),
    ("pi+pi^2", 10, "pi_plus_pi_sq"),
])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_table_output_is_byte_identical(key, rows, stem, fmt):
    runs = [cli("mu-table", key, "--rows", str(rows), "--format", fmt) for _ in range(2)]
    assert all(r.returncode == 0 for r in runs)
    assert runs[0].stdout.encode() == runs[1].stdout.encode()
    assert runs[0].stdout.encode() == (GOLDEN / f"mu_table_{stem}.{fmt}").read_bytes()


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
