"""First-measurement response of a two-level system in the vacuum.

The regulated response splits into a piece proportional to Δτ and a piece
carrying the logarithmic regulator dependence.  Subtracting the logarithmic
counterterm ``ln(Δτ/ε)/(2π²)`` leaves a finite, regulator-free response.
Two renormalized forms are exposed:

* :func:`renormalized_value` - the even-in-E closed form.  It coincides with
  the decay branch (E < 0) of the split pieces.
* :func:`renormalized_from_pieces` - split pieces minus the counterterm, valid
  for either sign of E.

All quantities are in natural units (ħ = c = 1); E < 0 is decay, E > 0 is
excitation.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass

from .errors import ConvergenceError, DomainError, PerturbationBreakdownError, PerturbationWarning
from .quadrature import integrate
from .specfun import cos_deficit_integral, heaviside, si

TWO_PI_SQ = 2.0 * math.pi**2

PERTURBATION_WARN = 0.1


@dataclass(frozen=True)
class QubitFieldParams:
    E: float
    sigma: float

    def __post_init__(self):
        if not math.isfinite(self.E) or self.E == 0:
            raise DomainError(f"transition energy E must be finite and nonzero, got {self.E}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise DomainError(f"coupling sigma must be >= 0, got {self.sigma}")


@dataclass(frozen=True)
class ResponseBreakdown:
    piece1: float
    piece2: float
    renormalized: float
    linear_coeff: float
    quadratic_coeff: float


def _check_dtau(delta_tau: float, strict: bool) -> float:
    delta_tau = float(delta_tau)
    if not math.isfinite(delta_tau) or delta_tau < 0 or (strict and delta_tau == 0):
        bound = "> 0" if strict else ">= 0"
        raise DomainError(f"delta_tau must be {bound}, got {delta_tau}")
    return delta_tau


def f1_piece(E: float, delta_tau: float) -> float:
    """Part of the regulated response proportional to the flat Δτ weight."""
    L = _check_dtau(delta_tau, strict=True)
    x = abs(E) * L
    return (L / (2 * math.pi)) * (
        -E * heaviside(-E)
        + math.cos(E * L) / (math.pi * L)
        + (abs(E) / math.pi) * (si(x) - math.pi / 2)
    )


def f2_piece(E: float, delta_tau: float, epsilon: float) -> float:
    """Regulator-dependent part, ``(-γ + Ci(|E|Δτ) - ln(ε|E|) - 1)/(2π²)``.

    Evaluated through ``Ci(x) - γ - ln x = ∫_0^x (cos t - 1)/t dt``, which is
    the same expression but stays finite and accurate as E -> 0.
    """
    L = _check_dtau(delta_tau, strict=True)
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    x = abs(E) * L
    return (math.log(L / epsilon) - 1.0 + cos_deficit_integral(x).value) / TWO_PI_SQ


def counterterm(delta_tau: float, epsilon: float) -> float:
    """Logarithmic divergence removed by renormalization."""
    return math.log(delta_tau / epsilon) / TWO_PI_SQ


def regulated_response(E: float, delta_tau: float, epsilon: float) -> float:
    return f1_piece(E, delta_tau) + f2_piece(E, delta_tau, epsilon)


def renormalized_from_pieces(E: float, delta_tau: float) -> float:
    """Split pieces minus the counterterm, for either sign of E.

    Equals ``(x Si x - (π/2) E Δτ + cos x - 1 + Cin-deficit)/(2π²)`` with
    ``x = |E|Δτ``; this is negative at small Δτ when E > 0.
    """
    L = _check_dtau(delta_tau, strict=False)
    x = abs(E) * L
    if x == 0:
        return 0.0
    return (x * si(x) - 0.5 * math.pi * E * L + _cos_minus_one(x) + cos_deficit_integral(x).value) / TWO_PI_SQ


def _cos_minus_one(x: float) -> float:
    # cos x - 1 without cancellation against the other small terms
    return -2.0 * math.sin(0.5 * x) ** 2


def renormalized_value(E: float, delta_tau: float) -> float:
    """Even-in-E renormalized response as a float."""
    L = _check_dtau(delta_tau, strict=False)
    x = abs(E) * L
    if x == 0:
        return 0.0
    return (
        x * (math.pi / 2 + si(x)) + _cos_minus_one(x) + cos_deficit_integral(x).value
    ) / TWO_PI_SQ


def small_time_coefficients(
    func: Callable[[float], float], h0: float, levels: int = 7
) -> tuple[float, float]:
    """Linear and quadratic Taylor coefficients of ``func`` at 0, with func(0) = 0.

    Richardson extrapolation on step halving: first of ``func(h)/h`` for the
    linear coefficient, then of ``(func(h)/h - c1)/h`` for the quadratic one.
    """
    hs = [h0 / 2**k for k in range(levels)]
    ratios = [func(h) / h for h in hs]

    def richardson(values):
        table = [list(values)]
        for j in range(1, len(values)):
            prev = table[-1]
            factor = 2.0**j
            table.append([(factor * prev[k + 1] - prev[k]) / (factor - 1) for k in range(len(prev) - 1)])
        return table[-1][0]

    c1 = richardson(ratios)
    c2 = richardson([(r - c1) / h for r, h in zip(ratios, hs)])
    return c1, c2


def response_renormalized(E: float, delta_tau: float) -> ResponseBreakdown:
    L = _check_dtau(delta_tau, strict=False)
    x = abs(E) * L
    if L == 0:
        piece1 = 1.0 / TWO_PI_SQ  # limit of f1 as Δτ -> 0
    else:
        piece1 = f1_piece(E, L)
    piece2 = (cos_deficit_integral(x).value - 1.0) / TWO_PI_SQ
    if E == 0:
        c1 = c2 = 0.0
    else:
        c1, c2 = small_time_coefficients(lambda h: renormalized_value(E, h), 0.5 / abs(E))
    return ResponseBreakdown(piece1, piece2, renormalized_value(E, L), c1, c2)


def decay_probability_first(params: QubitFieldParams, delta_tau: float) -> float:
    """First-order transition probability ``σ F_ren(E, Δτ)``.

    Warns with :class:`PerturbationWarning` above 0.1 and raises
    :class:`PerturbationBreakdownError` above 1.
    """
    return _checked_probability(params.sigma * renormalized_value(params.E, delta_tau))


def survival_first(params: QubitFieldParams, delta_tau: float) -> float:
    return 1.0 - decay_probability_first(params, delta_tau)


def _checked_probability(p: float) -> float:
    if p > 1.0 or p < 0.0 or not math.isfinite(p):
        raise PerturbationBreakdownError(f"first-order probability {p!r} outside [0, 1]")
    if p > PERTURBATION_WARN:
        warnings.warn(
            f"transition probability {p:.3g} exceeds {PERTURBATION_WARN}; "
            "first-order perturbation theory is unreliable",
            PerturbationWarning,
            stacklevel=3,
        )
    return p


def continuum_decay_probability(
    rho: Callable[[float], float],
    omega_c: float,
    omega_e: float,
    sigma_of_a: Callable[[float], float],
    delta_tau: float,
    omega_max: float,
    tail: float = 0.0,
    tol: float = 1e-11,
    points=None,
) -> float:
    """Transition probability into a continuum of levels above ``omega_c``.

    Integrates ``ρ(ω) σ(ω) F_ren(ω - ω_e, Δτ)`` over ``[omega_c, omega_max]``
    and adds the caller's estimate ``tail`` of the remainder.
    """
    L = _check_dtau(delta_tau, strict=False)
    if not omega_max > omega_c:
        raise DomainError("omega_max must exceed omega_c")

    def integrand(w):
        density = rho(w)
        if density == 0:
            return 0.0
        return density * sigma_of_a(w) * renormalized_value(w - omega_e, L)

    res = integrate(integrand, omega_c, omega_max, tol, points=points)
    total = res.value + tail
    if not math.isfinite(total):
        raise ConvergenceError("continuum integral is not finite", res)
    return total
