"""Sine integral, cosine integral and related helpers.

Small arguments use the Maclaurin series; beyond ``SERIES_CUTOFF`` the
exponential integral E1(ix) is evaluated with a modified Lentz continued
fraction, from which

    Ci(x) = -Re E1(ix),        Si(x) = pi/2 + Im E1(ix).

Each public ``*_integral`` function returns a :class:`SpecialValue` carrying
an estimate of the absolute error; the bare ``si``/``ci``/``cin`` helpers
return floats for use inside closed-form expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError

EULER_GAMMA = 0.57721566490153286060651209008240243104215933593992

SERIES_CUTOFF = 4.0

_EPS = 2.220446049250313e-16
_MAX_TERMS = 200


@dataclass(frozen=True)
class SpecialValue:
    value: float
    est_abs_error: float


def _check_finite(x: float, name: str = "argument") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def _si_series(x: float) -> tuple[float, float]:
    # sum_k (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    x2 = x * x
    term = x
    total = x
    magnitude = abs(x)
    for k in range(1, _MAX_TERMS):
        term *= -x2 / ((2 * k) * (2 * k + 1))
        contrib = term / (2 * k + 1)
        total += contrib
        magnitude += abs(contrib)
        if abs(contrib) <= 0.25 * _EPS * abs(total):
            return total, abs(contrib) + 4 * _EPS * magnitude
    raise ConvergenceError("Si series did not converge", SpecialValue(total, abs(term)))


def _cin_series(x: float) -> tuple[float, float]:
    # Cin(x) = int_0^x (1 - cos t)/t dt = sum_{k>=1} (-1)^(k+1) x^(2k) / (2k (2k)!)
    x2 = x * x
    term = 1.0
    total = 0.0
    magnitude = 0.0
    for k in range(1, _MAX_TERMS):
        term *= -x2 / ((2 * k - 1) * (2 * k))
        contrib = -term / (2 * k)
        total += contrib
        magnitude += abs(contrib)
        if abs(contrib) <= 0.25 * _EPS * abs(total):
            return total, abs(contrib) + 4 * _EPS * magnitude
    raise ConvergenceError("Cin series did not converge", SpecialValue(total, abs(term)))


def _e1_imaginary(x: float) -> tuple[complex, float]:
    """E1(ix) for x >= SERIES_CUTOFF, with a convergence-based error bound."""
    tiny = 1e-300
    b = complex(1.0, x)
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(2, 10_000):
        a = -float((i - 1) * (i - 1))
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            h *= complex(math.cos(x), -math.sin(x))
            return h, 8 * _EPS * max(1.0, abs(h)) + abs(h) * abs(delta - 1.0)
    raise ConvergenceError(f"continued fraction for E1(i*{x}) did not converge")


def si(x: float) -> float:
    """Sine integral as a plain float."""
    return sin_integral(x).value


def ci(x: float) -> float:
    """Cosine integral as a plain float (x > 0)."""
    return cos_integral(x).value


def cin(x: float) -> float:
    """Entire cosine integral ``int_0^x (1 - cos t)/t dt`` (x >= 0)."""
    return -cos_deficit_integral(x).value


def sin_integral(z: float) -> SpecialValue:
    z = _check_finite(z, "z")
    if z == 0.0:
        return SpecialValue(0.0, 0.0)
    x = abs(z)
    if x <= SERIES_CUTOFF:
        value, err = _si_series(x)
    else:
        e1, err = _e1_imaginary(x)
        value = 0.5 * math.pi + e1.imag
        err += 2 * _EPS
    # odd by construction
    return SpecialValue(math.copysign(value, z), err)


def cos_integral(z: float) -> SpecialValue:
    """Ci(z) = gamma + ln z + int_0^z (cos t - 1)/t dt, defined for z > 0."""
    z = _check_finite(z, "z")
    if z <= 0.0:
        raise DomainError(f"cos_integral requires z > 0, got {z!r}")
    if z <= SERIES_CUTOFF:
        deficit, err = _cin_series(z)
        log_z = math.log(z)
        value = EULER_GAMMA + log_z - deficit
        return SpecialValue(value, err + 2 * _EPS * (EULER_GAMMA + abs(log_z) + abs(deficit)))
    e1, err = _e1_imaginary(z)
    return SpecialValue(-e1.real, err)


def cos_deficit_integral(x: float) -> SpecialValue:
    """int_0^x (cos t - 1)/t dt for x >= 0; never positive."""
    x = _check_finite(x, "x")
    if x < 0.0:
        raise DomainError(f"cos_deficit_integral requires x >= 0, got {x!r}")
    if x == 0.0:
        return SpecialValue(0.0, 0.0)
    if x <= SERIES_CUTOFF:
        value, err = _cin_series(x)
        return SpecialValue(-value, err)
    c = cos_integral(x)
    log_x = math.log(x)
    value = c.value - EULER_GAMMA - log_x
    return SpecialValue(value, c.est_abs_error + 2 * _EPS * (abs(c.value) + EULER_GAMMA + log_x))


def heaviside(x: float) -> float:
    """Unit step with the symmetric convention H(0) = 1/2."""
    x = _check_finite(x, "x")
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return 0.0
    return 0.5
