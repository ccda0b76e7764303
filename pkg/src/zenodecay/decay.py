"""Classical exponential decay and the Gaussian short-time (Zeno) laws."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

from .errors import DomainError


@dataclass(frozen=True)
class ClassicalDecayParams:
    tau_E: float

    def __post_init__(self):
        if not (math.isfinite(self.tau_E) and self.tau_E > 0):
            raise DomainError(f"lifetime tau_E must be positive and finite, got {self.tau_E}")

    @property
    def rate(self) -> float:
        return 1.0 / self.tau_E


@dataclass(frozen=True)
class ZenoParams:
    tau_z: float

    def __post_init__(self):
        if not (math.isfinite(self.tau_z) and self.tau_z > 0):
            raise DomainError(f"Zeno time tau_z must be positive and finite, got {self.tau_z}")

    @classmethod
    def from_moments(cls, mean_h: float, mean_h2: float) -> "ZenoParams":
        """Zeno time from the energy moments <H> and <H^2> of the initial state."""
        variance = mean_h2 - mean_h * mean_h
        if not variance > 0:
            raise DomainError("need <H^2> > <H>^2 for a finite Zeno time")
        return cls(1.0 / math.sqrt(variance))


@dataclass(frozen=True)
class MeasurementSchedule:
    """``N`` equally spaced measurements in a total time ``T``.

    ``N`` may be ``math.inf`` to denote the continuous-observation limit.
    """

    T: float
    N: float

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError(f"total time T must be positive, got {self.T}")
        if self.N != math.inf and (self.N < 1 or int(self.N) != self.N):
            raise DomainError(f"measurement count N must be an integer >= 1 or inf, got {self.N}")

    @property
    def delta_tau(self) -> float:
        return 0.0 if self.N == math.inf else self.T / self.N


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"time must be finite and non-negative, got {t}")
    return t


def classical_survival(t: float, params: ClassicalDecayParams) -> float:
    t = _check_time(t)
    return math.exp(-t / params.tau_E)


def classical_population(t: float, N0: float, params: ClassicalDecayParams) -> float:
    t = _check_time(t)
    if not N0 > 0:
        raise DomainError(f"initial population must be positive, got {N0}")
    return N0 * math.exp(-t / params.tau_E)


def quantum_short_time_survival(t: float, params: ZenoParams) -> float:
    """Truncated quadratic law ``1 - t²/τ_z²``, clamped at zero."""
    t = _check_time(t)
    return max(0.0, 1.0 - (t / params.tau_z) ** 2)


def repeated_survival(
    schedule: MeasurementSchedule, single_interval_survival: Callable[[float], float]
) -> float:
    """Probability of surviving all ``N`` measurements: ``[P(T/N)]^N``."""
    if schedule.N == math.inf:
        raise DomainError("repeated_survival needs a finite N; use the limit laws for N = inf")
    p = single_interval_survival(schedule.T / schedule.N)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"single-interval survival {p!r} is not a probability")
    return p ** int(schedule.N)


def gaussian_zeno_limit(schedule: MeasurementSchedule, params: ZenoParams) -> float:
    """Large-N form ``exp(-T²/(τ_z² N))``; equals 1 for N = inf."""
    return math.exp(-schedule.T**2 / (params.tau_z**2 * schedule.N))


def gaussian_zeno_limit_at(T: float, N: float, params: ZenoParams) -> float:
    # also accepts T = 0, which MeasurementSchedule excludes
    T = _check_time(T)
    return math.exp(-T * T / (params.tau_z**2 * N))
