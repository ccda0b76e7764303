"""Exponential decay of a repeatedly measured qubit coupled to a massless scalar field."""

from .decay import (
    ClassicalDecayParams,
    MeasurementSchedule,
    ZenoParams,
    classical_population,
    classical_survival,
    gaussian_zeno_limit,
    quantum_short_time_survival,
    repeated_survival,
)
from .errors import ConvergenceError, DomainError, PerturbationBreakdownError, PerturbationWarning
from .pipeline import (
    LawTag,
    SurvivalCurve,
    landau_peierls_comparison,
    landau_peierls_max_n,
    make_survival_curve,
    survival_after_n,
    survival_continuous_limit,
)
from .quadrature import QuadratureResult, RegulatorSweep, integrate, principal_value
from .response_first import (
    QubitFieldParams,
    ResponseBreakdown,
    decay_probability_first,
    f1_piece,
    f2_piece,
    regulated_response,
    renormalized_from_pieces,
    renormalized_value,
    response_renormalized,
)
from .response_second import (
    FieldKind,
    FieldState,
    SecondResponseBreakdown,
    flat_band_kernel,
    flat_band_kernel_spectral,
    pv_piece,
    response_second_renormalized,
    response_second_small_time,
    response_second_total,
    small_time_coeff_p,
    small_time_coeff_q,
)
from .specfun import cos_deficit_integral, cos_integral, heaviside, sin_integral
from .verify import VerificationReport, run_verification

__version__ = "0.1.0"
