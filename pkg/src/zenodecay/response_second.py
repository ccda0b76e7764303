"""Second-measurement response with a flat-band many-particle field state.

After the first measurement the field is taken to hold quanta with constant
occupation on frequencies ``[0, a]``.  The two-point function then gains a
kernel ``g(ξ, a)`` on top of the vacuum Wightman function, and the
non-vacuum response splits into:

* a doubled vacuum piece (the ``-2/ξ²`` term of the kernel),
* two vacuum-like pieces at the shifted energies ``E + a`` and ``E - a``,
* a piece from the ``sin(aξ)/ξ`` term, evaluated through principal values.

Two kernels are supported.  ``"closed_form"`` (the default) is
``-2/ξ² - 2cos(aξ)/ξ² - (2a/ξ) sin(aξ)``.  ``"spectral"`` is obtained by
integrating ``2 ∫_0^a ω cos(ωξ) dω`` exactly, which gives
``-2/ξ² + 2cos(aξ)/ξ² + (2a/ξ) sin(aξ)``: the same doubled vacuum term, with
the shifted and sine pieces entering with the opposite sign.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .errors import DomainError
from .quadrature import principal_value
from .response_first import (
    TWO_PI_SQ,
    regulated_response,
    renormalized_from_pieces,
    renormalized_value,
)
from .specfun import heaviside, si

KERNELS = ("closed_form", "spectral")

# ||E| - a| below this fraction of max(|E|, a) counts as the degenerate case
DEGENERACY_RTOL = 1e-9

SMALL_TIME_VALIDITY = 0.1


class SmallTimeWarning(UserWarning):
    """The small-Δτ expansion is used outside the range where it is accurate."""


class FieldKind(enum.Enum):
    VACUUM = "vacuum"
    FLAT_BAND = "flat_band"


@dataclass(frozen=True)
class FieldState:
    kind: FieldKind
    a: float | None = None
    density: float = 1.0

    def __post_init__(self):
        if self.kind is FieldKind.FLAT_BAND:
            if self.a is None or not (math.isfinite(self.a) and self.a > 0):
                raise DomainError(f"flat-band state needs a cutoff a > 0, got {self.a}")
            if not (math.isfinite(self.density) and self.density >= 0):
                raise DomainError(f"occupation density must be >= 0, got {self.density}")
        elif self.a is not None:
            raise DomainError("vacuum state carries no band cutoff")

    @classmethod
    def vacuum(cls) -> "FieldState":
        return cls(FieldKind.VACUUM)

    @classmethod
    def flat_band(cls, a: float, density: float = 1.0) -> "FieldState":
        return cls(FieldKind.FLAT_BAND, a, density)


@dataclass(frozen=True)
class SecondResponseBreakdown:
    base_vacuum: float
    vacuum_part: float
    shifted_plus: float
    shifted_minus: float
    pv_part: float
    total: float


def _check_kernel(kernel: str) -> None:
    if kernel not in KERNELS:
        raise ValueError(f"kernel must be one of {KERNELS}, got {kernel!r}")


def flat_band_kernel(xi: float, a: float) -> float:
    """Closed-form flat-band kernel ``-2/ξ² - 2cos(aξ)/ξ² - (2a/ξ) sin(aξ)``."""
    if xi == 0:
        raise DomainError("flat_band_kernel is singular at xi = 0")
    if not a > 0:
        raise DomainError(f"band cutoff a must be positive, got {a}")
    return -2 / xi**2 - 2 * math.cos(a * xi) / xi**2 - (2 * a / xi) * math.sin(a * xi)


def flat_band_kernel_spectral(xi: float, a: float) -> float:
    """Exact ``2 ∫_0^a ω cos(ωξ) dω = 2[a sin(aξ)/ξ + (cos(aξ) - 1)/ξ²]``; a² at ξ = 0."""
    if not a > 0:
        raise DomainError(f"band cutoff a must be positive, got {a}")
    if xi == 0:
        return a * a
    return 2 * (a * math.sin(a * xi) / xi + (math.cos(a * xi) - 1) / xi**2)


def shifted_vacuum_piece(E: float, a_shift: float, delta_tau: float, epsilon: float) -> float:
    """Vacuum-like regulated response at the shifted energy ``E + a_shift``."""
    return regulated_response(E + a_shift, delta_tau, epsilon)


def _half_cos_minus_one_over(k: float, L: float) -> float:
    # (cos(kL) - 1)/(2k) == -sin²(kL/2)/k; the right side has no cancellation
    return -math.sin(0.5 * k * L) ** 2 / k


def sine_overlap_integral(E: float, a: float, delta_tau: float) -> float:
    """``∫_0^Δτ sin(aξ) cos(Eξ) dξ`` in closed form.

    ``(cos((E-a)Δτ) - 1)/(2(E-a)) - (cos((E+a)Δτ) - 1)/(2(E+a))``; a term whose
    energy difference vanishes contributes its limit, zero.  At |E| = a the
    result is the double-angle value ``(1 - cos 2aΔτ)/(4a)``.
    """
    L = float(delta_tau)
    scale = max(abs(E), abs(a))
    total = 0.0
    for k, sign in ((E - a, 1.0), (E + a, -1.0)):
        if abs(k) <= DEGENERACY_RTOL * scale:
            continue
        total += sign * _half_cos_minus_one_over(k, L)
    return total


def sine_weighted_closed(E: float, a: float, delta_tau: float) -> float:
    """``∫_{-Δτ}^{Δτ} (Δτ - |ξ|) e^{-iEξ} sin(aξ)/ξ dξ`` via sine integrals."""
    L = float(delta_tau)
    return L * (si((E + a) * L) - si((E - a) * L)) - 2 * sine_overlap_integral(E, a, L)


def pv_piece(E: float, a: float, delta_tau: float, tol: float = 1e-12) -> float:
    """Sine-term piece with the stated prefactors.

    ``-(aΔτ/8πi) [P∫ e^{-iξ(E-a)}/ξ dξ - P∫ e^{-iξ(E+a)}/ξ dξ] + (a/2π) ∫_0^Δτ sin(aξ) cos(Eξ) dξ``

    Both principal values run over ``[-Δτ, Δτ]``.  Their cosine parts are odd
    and vanish; they are still integrated, so a failure of that cancellation
    would show up in the result.
    """
    if not delta_tau > 0:
        raise DomainError(f"delta_tau must be positive, got {delta_tau}")
    if not a > 0:
        raise DomainError(f"band cutoff a must be positive, got {a}")
    L = float(delta_tau)

    def pv_exp(k: float) -> complex:
        # P∫ e^{-ikξ}/ξ dξ = P∫ cos(kξ)/ξ dξ - i P∫ sin(kξ)/ξ dξ
        kw = {}
        if abs(k) * L > 20 * math.pi:
            kw["period"] = 2 * math.pi / abs(k)
        re = principal_value(lambda x: math.cos(k * x) / x, 0.0, -L, L, tol, **kw).value
        im = principal_value(lambda x: math.sin(k * x) / x, 0.0, -L, L, tol, **kw).value
        return complex(re, -im)

    bracket = pv_exp(E - a) - pv_exp(E + a)
    first = -(a * L / (8 * math.pi * 1j)) * bracket
    return first.real + (a / (2 * math.pi)) * sine_overlap_integral(E, a, L)


def _sine_piece(E: float, a: float, delta_tau: float, kernel: str, tol: float) -> float:
    if kernel == "closed_form":
        return pv_piece(E, a, delta_tau, tol)
    return (a / TWO_PI_SQ) * sine_weighted_closed(E, a, delta_tau)


def response_second_total(
    E: float,
    state: FieldState,
    delta_tau: float,
    epsilon: float,
    kernel: str = "closed_form",
    tol: float = 1e-12,
) -> SecondResponseBreakdown:
    """Regulated second-measurement response, piece by piece.

    ``total = base_vacuum + vacuum_part + shifted_plus + shifted_minus + pv_part``
    where ``base_vacuum`` is the vacuum response and the other four come from
    the flat-band kernel, scaled by the occupation density.
    """
    _check_kernel(kernel)
    base = regulated_response(E, delta_tau, epsilon)
    if state.kind is FieldKind.VACUUM:
        return SecondResponseBreakdown(base, 0.0, 0.0, 0.0, 0.0, base)
    a = state.a
    d = state.density
    sign = 1.0 if kernel == "closed_form" else -1.0
    vacuum_part = d * 2.0 * base
    plus = d * sign * shifted_vacuum_piece(E, a, delta_tau, epsilon)
    minus = d * sign * shifted_vacuum_piece(E, -a, delta_tau, epsilon)
    pv = d * _sine_piece(E, a, delta_tau, kernel, tol)
    total = base + vacuum_part + plus + minus + pv
    return SecondResponseBreakdown(base, vacuum_part, plus, minus, pv, total)


def response_second_renormalized(
    E: float, a: float, delta_tau: float, kernel: str = "closed_form", tol: float = 1e-12
) -> float:
    """Regulator-free second response.

    Each vacuum-like piece has the same logarithmic counterterm subtracted as
    in the first measurement.  With the closed-form kernel the even closed form is
    used for every piece; with the spectral kernel the sign-aware form is used,
    and the counterterms of the flat-band pieces cancel among themselves.
    """
    _check_kernel(kernel)
    if delta_tau == 0:
        return 0.0
    if kernel == "closed_form":
        return (
            3 * renormalized_value(E, delta_tau)
            + renormalized_value(E + a, delta_tau)
            + renormalized_value(E - a, delta_tau)
            + pv_piece(E, a, delta_tau, tol)
        )
    return (
        3 * renormalized_from_pieces(E, delta_tau)
        - renormalized_from_pieces(E + a, delta_tau)
        - renormalized_from_pieces(E - a, delta_tau)
        + (a / TWO_PI_SQ) * sine_weighted_closed(E, a, delta_tau)
    )


def _check_coeff_args(E: float, a: float) -> None:
    if not a > 0:
        raise DomainError(f"band cutoff a must be positive, got {a}")
    if E == 0 or not math.isfinite(E):
        raise DomainError(f"E must be finite and nonzero, got {E}")


def _degenerate(E: float, a: float) -> bool:
    return abs(abs(E) - a) <= DEGENERACY_RTOL * max(abs(E), a)


def small_time_coeff_p(E: float, a: float) -> float:
    """Linear small-Δτ coefficient, by the three stated cases."""
    _check_coeff_args(E, a)
    if _degenerate(E, a):
        return abs(E) / math.pi
    if abs(E) < a:
        return (3 * abs(E) + 4 * a) / (4 * math.pi)
    return 5 * abs(E) / (4 * math.pi)


def small_time_coeff_p_general(E: float, a: float) -> float:
    """The undivided step-function expression the three cases come from."""
    _check_coeff_args(E, a)
    return (
        3 * abs(E) + abs(E + a) + abs(E - a)
        + a * heaviside(a - E) - a * heaviside(-E - a) + a * heaviside(E + a)
    ) / (4 * math.pi)


def small_time_coeff_q(E: float, a: float) -> float:
    """Quadratic small-Δτ coefficient ``(5E²(π - 3) - 2a²)/(8π²)``."""
    _check_coeff_args(E, a)
    if _degenerate(E, a):
        return (5 * math.pi - 17) * E * E / (8 * math.pi**2)
    return (5 * E * E * (math.pi - 3) - 2 * a * a) / (8 * math.pi**2)


def response_second_small_time(E: float, a: float, delta_tau: float) -> float:
    """``p Δτ + q Δτ²``; warns when |E|Δτ or aΔτ exceeds 0.1."""
    if delta_tau < 0:
        raise DomainError(f"delta_tau must be >= 0, got {delta_tau}")
    if max(abs(E), a) * delta_tau > SMALL_TIME_VALIDITY:
        warnings.warn(
            f"small-time expansion used at max(|E|, a) * delta_tau = {max(abs(E), a) * delta_tau:.3g}",
            SmallTimeWarning,
            stacklevel=2,
        )
    return small_time_coeff_p(E, a) * delta_tau + small_time_coeff_q(E, a) * delta_tau**2
