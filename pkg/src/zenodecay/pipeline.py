"""Survival after N measurements, its continuous limit, and survival curves."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .decay import (
    ClassicalDecayParams,
    MeasurementSchedule,
    ZenoParams,
    classical_survival,
    gaussian_zeno_limit_at,
)
from .errors import DomainError, PerturbationBreakdownError
from .response_first import QubitFieldParams, renormalized_value
from .response_second import FieldKind, FieldState, small_time_coeff_p, small_time_coeff_q


class LawTag(enum.Enum):
    CLASSICAL = "Classical"
    GAUSSIAN_ZENO = "GaussianZeno"
    FIRST_ORDER_VACUUM = "FirstOrderVacuum"
    FLAT_BAND_SEQUENCE = "FlatBandSequence"
    CONTINUOUS_LIMIT = "ContinuousLimit"


@dataclass(frozen=True)
class SurvivalCurve:
    schedule: MeasurementSchedule
    points: tuple[tuple[float, float], ...]
    law_tag: LawTag

    def __post_init__(self):
        times = [t for t, _ in self.points]
        if not times or times[0] != 0.0 or self.points[0][1] != 1.0:
            raise ValueError("a survival curve starts at (0, 1)")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("curve times must be strictly increasing")
        if any(not 0.0 <= s <= 1.0 for _, s in self.points):
            raise ValueError("survival values must lie in [0, 1]")

    @property
    def times(self) -> np.ndarray:
        return np.array([t for t, _ in self.points])

    @property
    def survival(self) -> np.ndarray:
        return np.array([s for _, s in self.points])


def _interval_log_survival(p: float) -> float:
    if not 0.0 <= p <= 1.0 or not math.isfinite(p):
        raise PerturbationBreakdownError(f"per-interval transition probability {p!r} outside [0, 1]")
    if p == 1.0:
        return -math.inf
    return math.log1p(-p)


def _n_measurement_survival(params: QubitFieldParams, state: FieldState, T: float, N: int) -> float:
    if T == 0:
        return 1.0
    dt = T / N
    log_s = _interval_log_survival(params.sigma * renormalized_value(params.E, dt))
    if N > 1:
        if state.kind is FieldKind.VACUUM:
            p_later = params.sigma * renormalized_value(params.E, dt)
        else:
            a = state.a
            p_later = params.sigma * (small_time_coeff_p(params.E, a) * dt + small_time_coeff_q(params.E, a) * dt * dt)
        log_s += (N - 1) * _interval_log_survival(p_later)
    return math.exp(log_s)


def survival_after_n(
    params: QubitFieldParams, state_after_first: FieldState, schedule: MeasurementSchedule
) -> float:
    """Probability that the qubit is found excited at all N measurements.

    One factor uses the full renormalized vacuum response over ``T/N``; the
    remaining ``N - 1`` factors use the flat-band small-time law
    ``σ(p Δτ + q Δτ²)``.  With a vacuum ``state_after_first`` every factor is
    the vacuum one.
    """
    if schedule.N == math.inf:
        raise DomainError("use survival_continuous_limit for N = inf")
    _check_unit_density(state_after_first)
    return _n_measurement_survival(params, state_after_first, schedule.T, int(schedule.N))


def _check_unit_density(state: FieldState) -> None:
    if state.kind is FieldKind.FLAT_BAND and state.density != 1.0:
        raise DomainError("the small-time coefficients p, q are defined for unit occupation density")


def effective_lifetime(params: QubitFieldParams, a: float) -> float:
    """``τ_c = 1/(σ p(E, a))``; infinite when decoupled."""
    rate = params.sigma * small_time_coeff_p(params.E, a)
    return math.inf if rate == 0 else 1.0 / rate


def survival_continuous_limit(params: QubitFieldParams, a: float, T: float, N: float = math.inf) -> float:
    """``exp(-σ p T - σ q T²/N)``; for N = inf a pure exponential with lifetime τ_c."""
    if not (math.isfinite(T) and T >= 0):
        raise DomainError(f"T must be finite and >= 0, got {T}")
    if N == math.inf:
        tau_c = effective_lifetime(params, a)
        if tau_c == math.inf:
            return 1.0
        return classical_survival(T, ClassicalDecayParams(tau_c))
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    p = small_time_coeff_p(params.E, a)
    q = small_time_coeff_q(params.E, a)
    return math.exp(-params.sigma * p * T - params.sigma * q * T * T / N)


def landau_peierls_max_n(T: float, E: float) -> int:
    """Largest integer N with N < T|E| (0 if there is none)."""
    if not T > 0:
        raise DomainError(f"T must be positive, got {T}")
    bound = T * abs(E)
    if bound <= 1:
        return 0
    return math.ceil(bound) - 1


def _grid(T: float, num_points: int) -> np.ndarray:
    if num_points < 2:
        raise DomainError("a curve needs at least two points")
    return np.linspace(0.0, T, num_points)


def make_survival_curve(
    law_tag: LawTag | str,
    T: float,
    num_points: int,
    *,
    tau_E: float | None = None,
    tau_z: float | None = None,
    N: float = math.inf,
    params: QubitFieldParams | None = None,
    a: float | None = None,
) -> SurvivalCurve:
    """Sample one survival law on a uniform grid over ``[0, T]``.

    Each grid time ``t`` is treated as its own total observation time with
    ``N`` measurements, so the interval length is ``t/N``.
    """
    law = LawTag(law_tag)
    schedule = MeasurementSchedule(T, N)
    times = _grid(T, num_points)

    if law is LawTag.CLASSICAL:
        cp = ClassicalDecayParams(_required(tau_E, "tau_E"))
        values = [classical_survival(t, cp) for t in times]
    elif law is LawTag.GAUSSIAN_ZENO:
        zp = ZenoParams(_required(tau_z, "tau_z"))
        values = [gaussian_zeno_limit_at(t, N, zp) for t in times]
    elif law is LawTag.FIRST_ORDER_VACUUM:
        qp = _required(params, "params")
        _finite_n(N)
        values = [_n_measurement_survival(qp, FieldState.vacuum(), t, int(N)) for t in times]
    elif law is LawTag.FLAT_BAND_SEQUENCE:
        qp = _required(params, "params")
        _finite_n(N)
        state = FieldState.flat_band(_required(a, "a"))
        values = [_n_measurement_survival(qp, state, t, int(N)) for t in times]
    else:
        qp = _required(params, "params")
        band = _required(a, "a")
        values = [survival_continuous_limit(qp, band, t, N) for t in times]

    points = tuple((float(t), float(v)) for t, v in zip(times, values))
    return SurvivalCurve(schedule, points, law)


def _required(value, name):
    if value is None:
        raise DomainError(f"{name} is required for this law")
    return value


def _finite_n(N: float) -> None:
    if N == math.inf:
        raise DomainError("this law needs a finite number of measurements")


@dataclass(frozen=True)
class LandauPeierlsComparison:
    n_max: int
    capped: SurvivalCurve
    limit: SurvivalCurve
    max_abs_diff: float


def landau_peierls_comparison(
    params: QubitFieldParams, a: float, T: float, num_points: int
) -> LandauPeierlsComparison:
    """Flat-band sequence with N capped at the Landau-Peierls bound vs the N = inf exponential."""
    n_max = landau_peierls_max_n(T, params.E)
    if n_max < 1:
        raise DomainError(f"T|E| = {T * abs(params.E)} admits no measurement under N < T|E|")
    capped = make_survival_curve(LawTag.FLAT_BAND_SEQUENCE, T, num_points, N=n_max, params=params, a=a)
    limit = make_survival_curve(LawTag.CONTINUOUS_LIMIT, T, num_points, params=params, a=a)
    diff = float(np.max(np.abs(capped.survival - limit.survival)))
    return LandauPeierlsComparison(n_max, capped, limit, diff)
