"""Certified experiments in Diophantine approximation.

Ball arithmetic on dyadic rationals underlies continued fractions,
irrationality-measure estimates, exponential-sum limit tests and
lattice nonvanishing scans.
"""

from .constants import (
    E,
    E_PLUS_PI,
    E_TIMES_PI,
    PI,
    PI_INV,
    PI_PLUS_PI_SQ,
    ConstantId,
    ExpressionError,
    custom,
    eval_constant,
    parse_constant,
    pi_pow,
)
from .contfrac import (
    ContinuedFraction,
    Convergent,
    best_approx_oracle,
    check_sandwich,
    convergents,
    expand,
)
from .limit import (
    DecayCurve,
    KernelSample,
    classify,
    discrepancy,
    kernel_brute,
    kernel_closed_form,
    limit_test_partial,
)
from .lattice import (
    KroneckerNotFound,
    KroneckerSolution,
    LatticeScanReport,
    integer_multiple_check,
    kronecker_solve,
    lattice_gap,
    sine_product,
    sine_scan,
)
from .measure import MuEstimate, mu_estimate, mu_table
from .precision import (
    DivisionByZeroInterval,
    HighPrecisionReal,
    PrecisionExhausted,
    add,
    cos,
    div,
    int_pow,
    mul,
    sin,
    sub,
)

sin_certified = sin

__version__ = "0.1.0"
