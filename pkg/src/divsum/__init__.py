"""divsum: exact divisor floor sums with certified asymptotics diagnostics.

Library layout:

    divisors   d(n) pointwise, segmented tables, summatory D(t)
    floors     exact [x/n^c] and [(x/k)^(1/c)], the Exponent type, psi
    sums       the two floor-sum evaluators and the optimal split
    mainterm   certified d_c and the main term d_c x^(1/c)
    harmonic   sawtooth trig approximation, Fejer majorant, dyadic sums
    exponents  error exponents, E(x) measurement, log-log slope fits
    cli        the `divsum` command
"""

from .divisors import (
    DivisorTable,
    divisor_count,
    divisor_count_batch,
    divisor_sieve,
    divisor_summatory,
)
from .errors import ComputationError, ResourceLimitError, UndecidableFloorError
from .exponents import (
    ErrorSample,
    FitResult,
    error_term,
    exponent_fit,
    improvement_region_check,
    scan,
    theta_feng,
    theta_new,
)
from .floors import Exponent, floor_inv_pow, floor_x_over_pow, introot, psi_value
from .harmonic import (
    ExpSumSpec,
    TrigApprox,
    exp_sum_divisor,
    fejer_bound,
    h_range,
    jutila_ratio,
    psi_sum,
    vaaler_phi,
    vaaler_psi_approx,
)
from .mainterm import (
    CertifiedValue,
    dc_certified,
    dc_constant,
    dc_partial,
    main_term,
    summatory_remainder,
    tail_bound,
)
from .sums import SumResult, optimal_N, sum_blocked, sum_direct

__version__ = "0.1.0"

__all__ = [
    "CertifiedValue",
    "ComputationError",
    "DivisorTable",
    "ErrorSample",
    "ExpSumSpec",
    "Exponent",
    "FitResult",
    "ResourceLimitError",
    "SumResult",
    "TrigApprox",
    "UndecidableFloorError",
    "dc_certified",
    "dc_constant",
    "dc_partial",
    "divisor_count",
    "divisor_count_batch",
    "divisor_sieve",
    "divisor_summatory",
    "error_term",
    "exp_sum_divisor",
    "exponent_fit",
    "fejer_bound",
    "floor_inv_pow",
    "floor_x_over_pow",
    "h_range",
    "improvement_region_check",
    "introot",
    "jutila_ratio",
    "main_term",
    "optimal_N",
    "psi_sum",
    "psi_value",
    "scan",
    "sum_blocked",
    "sum_direct",
    "summatory_remainder",
    "tail_bound",
    "theta_feng",
    "theta_new",
    "vaaler_phi",
    "vaaler_psi_approx",
    "__version__",
]
