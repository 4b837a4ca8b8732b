import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from diophlab.constants import E, E_PLUS_PI, E_TIMES_PI, PI_PLUS_PI_SQ, eval_constant
from diophlab.limit import (
    INCONCLUSIVE,
    IRRATIONAL_LIKE,
    RATIONAL_LIKE,
    CapExceeded,
    DecayCurve,
    KernelSample,
    SingularPointError,
    classify,
    discrepancy,
    envelope_constant,
    kernel_brute,
    kernel_closed_form,
    limit_test_partial,
    reduce_phase,
    relative_difference,
    x_grid,
)


def test_closed_form_quarter_pi():
    assert kernel_closed_form(math.pi / 4, 1) == pytest.approx(1.0, abs=1e-15)


def test_closed_form_matches_brute_small():
    a = kernel_closed_form(0.7, 50)
    b = kernel_brute(0.7, 50)
    assert relative_difference(a, b.real) < 1e-10
    assert b.imag == 0.0


def test_closed_form_matches_mpmath_sum(mp2000):
    ref = mpmath.fsum(mpmath.cos(mpmath.mpf(1.4) * n) for n in range(-50, 51))
    assert kernel_closed_form(0.7, 50) == pytest.approx(float(ref), rel=1e-12)


def test_closed_form_bound_at_one():
    assert abs(kernel_closed_form(1.0, 1000)) <= 1 / abs(math.sin(1.0))


def test_singular_point():
    with pytest.raises(SingularPointError):
        kernel_closed_form(math.pi, 10)
    with pytest.raises(SingularPointError):
        kernel_closed_form(0.0, 10)


def test_brute_trivial_cases():
    assert kernel_brute(1.234, 0) == 1 + 0j
    assert kernel_brute(math.pi / 2, 3).real == pytest.approx(-1.0, abs=1e-14)


def test_brute_cap():
    with pytest.raises(CapExceeded):
        kernel_brute(0.5, 11, cap=10)


def test_brute_imaginary_part_small():
    rng = random.Random(7)
    for _ in range(20):
        t, x = rng.uniform(0.01, 3.1), rng.randint(1, 5000)
        assert abs(kernel_brute(t, x).imag) < 1e-9 * (2 * x + 1)


def test_rational_saturation_is_exact():
    s = limit_test_partial(Fraction(3, 4), 4, 12345)
    assert s.modulus == (2 * 12345 + 1) / (2 * 12345)
    assert s.total.exact == 2 * 12345 + 1


def test_m_zero_rejected():
    with pytest.raises(ValueError):
        limit_test_partial(eval_constant(E, 128), 0, 10)


def test_x_must_be_positive():
    with pytest.raises(ValueError):
        limit_test_partial(eval_constant(E, 128), 1, 0)


def test_sample_invariants():
    s = limit_test_partial(eval_constant(E_PLUS_PI, 256), 3, 777)
    assert s.modulus == pytest.approx(math.hypot(s.re, s.im))
    assert s.modulus <= (2 * 777 + 1) / (2 * 777)


def test_e_plus_pi_envelope_at_one_million():
    x = eval_constant(E_PLUS_PI, 256)
    s = limit_test_partial(x, 1, 10 ** 6)
    bound = envelope_constant(x, 1)
    assert abs(s.total).upper <= bound.lower


def test_partial_sum_matches_direct_summation():
    alpha = eval_constant(E_TIMES_PI, 256)
    x, m = 300, 3
    n = np.arange(-x, x + 1, dtype=np.float64)
    f = float(reduce_phase(alpha, m))
    direct = math.fsum(np.cos(2 * math.pi * f * n)) / (2 * x)
    assert limit_test_partial(alpha, m, x).re == pytest.approx(direct, abs=1e-12)


def test_sqrt_two_from_float_decays_within_envelope():
    alpha = 2 ** 0.5
    bound = float(envelope_constant(alpha, 1))
    curve = [limit_test_partial(alpha, 1, x) for x in x_grid(10 ** 6)]
    for s in curve:
        assert s.modulus <= bound / (2 * s.x) * (1 + 1e-12)
    assert curve[-1].modulus < 1e-5


@pytest.mark.parametrize("cid", [E_PLUS_PI, E_TIMES_PI, PI_PLUS_PI_SQ])
def test_argument_reduction_stable_across_precisions(cid):
    a, b = eval_constant(cid, 1024), eval_constant(cid, 2048)
    for m in range(1, 101):
        assert abs(float(reduce_phase(a, m)) - float(reduce_phase(b, m))) < 1e-12


def test_argument_reduction_against_mpmath(mp2000):
    a = eval_constant(PI_PLUS_PI_SQ, 1024)
    for m in (1, 17, 99):
        ref = m * (mpmath.pi + mpmath.pi ** 2)
        ref -= mpmath.nint(ref)
        assert float(reduce_phase(a, m)) == pytest.approx(float(ref), abs=1e-15)


def test_classify_twenty_two_sevenths():
    res = classify(Fraction(22, 7), 10, 10 ** 4)
    assert res.verdict == RATIONAL_LIKE
    assert res.curves[6].samples[-1].modulus == (2 * 10 ** 4 + 1) / (2 * 10 ** 4)


def test_classify_e_plus_pi_small_m():
    assert classify(eval_constant(E_PLUS_PI, 256), 10, 10 ** 6).verdict == IRRATIONAL_LIKE


def test_classify_e_plus_pi_default_thresholds_inconclusive():
    # m = 50 leaves modulus 1.48e-5 above 10/x_max at x_max = 10^6
    res = classify(eval_constant(E_PLUS_PI, 256))
    assert res.verdict == INCONCLUSIVE
    assert res.curves[49].samples[-1].modulus > 1e-5


def test_classify_denominator_101_small_window():
    # every m <= 10 has |sum|/(2x) <= 1/(2x |sin(pi m/101)|) < 10/x_max at x_max = 10^4
    res = classify(Fraction(1, 101), 10, 10 ** 4)
    assert res.verdict == IRRATIONAL_LIKE
    assert classify(Fraction(1, 101), 101, 10 ** 4).verdict == RATIONAL_LIKE


def test_classify_rejects_small_window():
    with pytest.raises(ValueError):
        classify(Fraction(1, 2), 1, 999)


def test_curve_outputs_are_ordered_and_deterministic():
    a = classify(eval_constant(E_TIMES_PI, 256), 3, 10 ** 5)
    b = classify(eval_constant(E_TIMES_PI, 256), 3, 10 ** 5)
    assert a.to_json() == b.to_json() and a.curves_csv() == b.curves_csv()
    lines = a.curves_csv().splitlines()
    assert lines[0] == "x,m,modulus,bound" and len(lines) == 1 + 3 * 3


def test_decay_curve_requires_increasing_x():
    s = KernelSample(10, 1, 0.1, 0.0, 0.1)
    with pytest.raises(ValueError):
        DecayCurve("x", 1, (s, s), None)


def test_discrepancy_examples():
    assert discrepancy(Fraction(1, 2), 2) == 0.5
    assert discrepancy(1, 100) == 1.0
    assert discrepancy(eval_constant(E_PLUS_PI, 256), 10 ** 5) < 1e-2


def test_discrepancy_against_direct_formula():
    alpha = eval_constant(E, 256)
    N = 2000
    pts = sorted(mp_frac for mp_frac in (float((alpha * n).value % 1) for n in range(1, N + 1)))
    ref = max(max((i + 1) / N - p, p - i / N) for i, p in enumerate(pts))
    assert discrepancy(alpha, N) == pytest.approx(ref, abs=1e-12)


def test_discrepancy_cap():
    with pytest.raises(CapExceeded):
        discrepancy(Fraction(1, 3), 11, cap=10)
