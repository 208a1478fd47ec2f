"""Coefficient-quotient tests for boundary singularities of power series.

Fejer-type kernels with certified sign patterns, N-good coefficient
sequences, arc concentration constants, and a probe that looks for a
singular point on the unit circle from damped slices of the series.
"""

from .concentration import (
    ConstantEstimate,
    constant_growth,
    constructed_constant,
    poincare_check,
    quadratic_form,
    random_good_series,
    sharp_constant_lower_bound,
    verify_corollary,
)
from .errors import (
    CertificationError,
    FabryError,
    HypothesisError,
    InsufficientDataError,
    TruncationError,
    ValidationError,
)
from .fourier_core import (
    Arc,
    CoeffSeq,
    TrigPoly,
    arc_integral_exact,
    evaluate,
    l2_norm_sq,
    quadrature,
    read_coefficients,
    write_coefficients,
)
from .goodness import GoodnessReport, is_n_good, quotient_phase_drift, tail_good_index
from .kernels import (
    certify_negativity,
    claim_poly,
    denominator_inequality_check,
    fejer,
    fejer_closed,
    g_closed,
    g_kernel,
)
from .probe import ConcentrationReport, ProbeReport, concentration_sweep, damped_slice, probe, probe_family

__version__ = "0.1.0"
