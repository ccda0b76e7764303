"""Brute-force quadrature used as an independent check on the closed forms.

The core is a globally adaptive Gauss-Kronrod (7, 15) integrator with the
QUADPACK error heuristic.  Everything else here is built on it: symmetric
principal values, the iε-regulated response integrals, the flat-band kernel
defined through its frequency integral, and the ε -> 0 extrapolation of a
regulator sweep.

Nothing in this module calls into the closed-form code paths.
"""

from __future__ import annotations

import heapq
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError

# Kronrod abscissae on [0, 1] (odd indices are the Gauss points).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WEIGHTS_K = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_WEIGHTS_G = np.concatenate([_WG[:-1], _WG[::-1]])

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny

DEFAULT_MAX_SUBDIVISIONS = 5000
DEFAULT_EPSILON_FACTORS = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    est_abs_error: float
    subdivisions: int


@dataclass(frozen=True)
class RegulatorSweep:
    """Values of a regulated quantity at a decreasing sequence of ε."""

    epsilons: tuple[float, ...]
    values: tuple[float, ...]
    extrapolated: float = field(default=math.nan)

    def __post_init__(self):
        eps = self.epsilons
        if len(eps) != len(self.values):
            raise ValueError("epsilons and values must have the same length")
        if any(e <= 0 for e in eps):
            raise ValueError("regulator values must be positive")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly decreasing")


def _gk15(f, a: float, b: float, vectorized: bool):
    center = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = center + half * _NODES
    if vectorized:
        fx = np.asarray(f(x), dtype=float)
    else:
        fx = np.array([f(float(t)) for t in x], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise ConvergenceError(f"integrand is not finite on [{a}, {b}]")
    kronrod = half * float(np.dot(_WEIGHTS_K, fx))
    gauss = half * float(np.dot(_WEIGHTS_G, fx[_GAUSS_IDX]))
    resabs = abs(half) * float(np.dot(_WEIGHTS_K, np.abs(fx)))
    mean = kronrod / (2.0 * half) if half else 0.0
    resasc = abs(half) * float(np.dot(_WEIGHTS_K, np.abs(fx - mean)))
    err = abs(kronrod - gauss)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    floor = 50 * _EPS * resabs
    at_floor = err <= floor
    if resabs > _TINY / (50 * _EPS):
        err = max(err, floor)
    return kronrod, err, at_floor


def _ordered_sum(heap) -> float:
    # fixed left-to-right order keeps the result independent of refinement history
    return math.fsum(v for _, v in sorted((lo, v) for _, _, lo, _, v in heap))


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    rel_tol: float = 0.0,
    points: Sequence[float] | None = None,
    period: float | None = None,
    max_subdivisions: int = DEFAULT_MAX_SUBDIVISIONS,
    vectorized: bool = False,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    Args:
        f: Integrand.  With ``vectorized=True`` it is called on numpy arrays.
        a, b: Limits, ``a <= b``.
        tol: Absolute error target for the whole interval.
        rel_tol: Optional relative error target; the looser of the two wins.
        points: Interior break points (kinks, peaks, removable singularities).
        period: If given, the interval is pre-split into panels of this
            length, which keeps oscillatory integrands well resolved.
        max_subdivisions: Upper bound on the number of panels.

    Raises:
        ConvergenceError: the panel budget ran out; ``.result`` holds the
            best estimate.
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a > b:
        raise DomainError(f"integration limits must satisfy a <= b, got [{a}, {b}]")
    if tol <= 0:
        raise DomainError("tol must be positive")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)

    edges = {a, b}
    if points is not None:
        edges.update(float(p) for p in points if a < p < b)
    if period is not None and period > 0:
        n_panels = int(math.ceil((b - a) / period))
        if n_panels > max_subdivisions // 2:
            raise DomainError("period splitting would exceed the panel budget")
        edges.update(a + k * period for k in range(1, n_panels))
    edges = sorted(e for e in edges if a <= e <= b)

    # panels still worth refining live in the heap; panels whose error is at
    # the rounding floor are retired
    heap: list[tuple[float, int, float, float, float]] = []
    retired: list[tuple[float, int, float, float, float]] = []
    counter = 0
    value = 0.0
    error = 0.0

    def add(lo, hi):
        nonlocal counter, value, error
        val, err, at_floor = _gk15(f, lo, hi, vectorized)
        entry = (-err, counter, lo, hi, val)
        counter += 1
        (retired.append if at_floor else lambda e: heapq.heappush(heap, e))(entry)
        value += val
        error += err

    for lo, hi in zip(edges[:-1], edges[1:]):
        add(lo, hi)

    while heap and error > max(tol, rel_tol * abs(value)):
        if len(heap) + len(retired) >= max_subdivisions:
            raise ConvergenceError(
                f"integration over [{a}, {b}] stopped at {max_subdivisions} panels "
                f"with error {error:.3e} > tol {tol:.3e}",
                QuadratureResult(_ordered_sum(heap + retired), error, len(heap) + len(retired)),
            )
        entry = heapq.heappop(heap)
        neg_err, _, lo, hi, old_val = entry
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            retired.append(entry)
            continue
        value -= old_val
        error += neg_err
        add(lo, mid)
        add(mid, hi)
        error = max(error, 0.0)
    heap += retired
    error = math.fsum(-e for e, *_ in heap)
    return QuadratureResult(_ordered_sum(heap), error, len(heap))


def principal_value(
    f: Callable[[float], float],
    singularity: float,
    a: float,
    b: float,
    tol: float = 1e-10,
    *,
    vectorized: bool = False,
    **kwargs,
) -> QuadratureResult:
    """Cauchy principal value of ``f`` across a simple pole at ``singularity``.

    Nodes are paired symmetrically about the pole, so the integrand actually
    handed to the quadrature, ``f(s + t) + f(s - t)``, is regular at t = 0.
    The part of ``[a, b]`` outside the symmetric window is integrated directly.
    """
    s = float(singularity)
    if not a < s < b:
        raise DomainError("singularity must lie strictly inside (a, b)")
    half = min(s - a, b - s)

    def paired(t):
        return f(s + t) + f(s - t)

    try:
        core = integrate(paired, 0.0, half, tol / 2, vectorized=vectorized, **kwargs)
        if s - a > half:
            rest = integrate(f, a, s - half, tol / 2, vectorized=vectorized, **kwargs)
        elif b - s > half:
            rest = integrate(f, s + half, b, tol / 2, vectorized=vectorized, **kwargs)
        else:
            rest = QuadratureResult(0.0, 0.0, 0)
    except ConvergenceError as exc:
        raise ConvergenceError(f"principal value did not converge: {exc}", exc.result) from exc
    return QuadratureResult(
        core.value + rest.value,
        core.est_abs_error + rest.est_abs_error,
        core.subdivisions + rest.subdivisions,
    )


def _regulator_points(epsilon: float, upper: float) -> list[float]:
    pts = []
    scale = epsilon
    while scale < upper:
        pts.extend(s for s in (scale, 3 * scale) if s < upper)
        scale *= 10
    return pts


_WEIGHTS = ("full", "constant", "abs")


def response_double_integral(
    E: float,
    delta_tau: float,
    epsilon: float,
    tol: float = 1e-11,
    *,
    weight: str = "full",
) -> QuadratureResult:
    """Real part of the regulated first-measurement response integral.

    Evaluates ``-(1/4π²) ∫_{-Δτ}^{Δτ} w(ξ) e^{-iEξ} / (ξ - iε)² dξ`` with
    ``w = Δτ - |ξ|`` (``weight="full"``), ``w = Δτ`` (``"constant"``) or
    ``w = -|ξ|`` (``"abs"``); the last two are the two halves of the split
    response.  With ``1/(ξ - iε)² = (ξ² - ε² + 2iεξ)/(ξ² + ε²)²`` the real part
    of the integrand is even in ξ and the imaginary part odd, so only
    ``2 ∫_0^Δτ`` of the real part is computed.
    """
    if delta_tau <= 0:
        raise DomainError("delta_tau must be positive")
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if epsilon >= delta_tau / 10:
        raise DomainError(f"epsilon={epsilon} too coarse for delta_tau={delta_tau}")
    if weight not in _WEIGHTS:
        raise ValueError(f"weight must be one of {_WEIGHTS}")
    L = float(delta_tau)
    eps2 = epsilon * epsilon

    def integrand(x):
        if weight == "full":
            w = L - x
        elif weight == "constant":
            w = L
        else:
            w = -x
        d = x * x + eps2
        re = np.cos(E * x) * (x * x - eps2) + 2 * epsilon * x * np.sin(E * x)
        return w * re / (d * d)

    period = 2 * math.pi / abs(E) if E != 0 and abs(E) * L > 20 * math.pi else None
    res = integrate(
        integrand, 0.0, L, tol * 2 * math.pi**2,
        points=_regulator_points(epsilon, L), period=period, vectorized=True,
    )
    scale = -2.0 / (4 * math.pi**2)
    return QuadratureResult(scale * res.value, abs(scale) * res.est_abs_error, res.subdivisions)


def flat_band_kernel_oracle(xi: float, a: float, tol: float = 1e-12) -> QuadratureResult:
    """``∫_0^a ω (e^{iωξ} + e^{-iωξ}) dω = 2 ∫_0^a ω cos(ωξ) dω`` by quadrature."""
    if a <= 0:
        raise DomainError(f"band cutoff a must be positive, got {a}")
    if xi == 0:
        return QuadratureResult(a * a, 0.0, 0)
    period = 2 * math.pi / abs(xi) if abs(xi) * a > 4 * math.pi else None
    return integrate(
        lambda w: 2 * w * np.cos(w * xi), 0.0, a, tol, period=period, vectorized=True,
    )


def flat_band_response_oracle(
    E: float, a: float, delta_tau: float, tol: float = 1e-11, density: float = 1.0
) -> QuadratureResult:
    """Non-vacuum part of the second response, ``(1/4π²) ∫ (Δτ-|ξ|) e^{-iEξ} g(ξ) dξ``.

    ``g`` is the flat-band kernel evaluated by quadrature at each node, so this
    is a nested integral.  The kernel is real, even and bounded, hence no
    regulator is needed.
    """
    if delta_tau <= 0:
        raise DomainError("delta_tau must be positive")
    L = float(delta_tau)

    def integrand(x):
        return (L - x) * math.cos(E * x) * flat_band_kernel_oracle(x, a, tol / 10).value

    res = integrate(integrand, 0.0, L, tol * 2 * math.pi**2)
    scale = density * 2.0 / (4 * math.pi**2)
    return QuadratureResult(scale * res.value, scale * res.est_abs_error, res.subdivisions)


def regulator_epsilons(E: float, delta_tau: float, factors=DEFAULT_EPSILON_FACTORS) -> tuple[float, ...]:
    """Default ε sweep, scaled by the shorter of Δτ and 1/|E|."""
    scale = delta_tau if E == 0 else min(delta_tau, 1.0 / abs(E))
    return tuple(f * scale for f in factors)


def sweep_regulator(
    func: Callable[[float], float], epsilons: Sequence[float]
) -> RegulatorSweep:
    eps = tuple(float(e) for e in epsilons)
    return RegulatorSweep(eps, tuple(float(func(e)) for e in eps))


def extrapolate_regulator(
    sweep: RegulatorSweep,
    counterterm: Callable[[float], float],
    resid_tol: float = 1e-5,
) -> float:
    """ε -> 0 intercept of ``values - counterterm(ε)`` fitted on {1, ε, ε ln ε}."""
    eps = np.asarray(sweep.epsilons, dtype=float)
    if eps.size < 3:
        raise ValueError("need at least three regulator values to extrapolate")
    y = np.asarray(sweep.values, dtype=float) - np.array([counterterm(e) for e in eps])
    design = np.column_stack([np.ones_like(eps), eps, eps * np.log(eps)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.max(np.abs(y - design @ coef)))
    if not math.isfinite(resid) or resid > resid_tol:
        raise ConvergenceError(
            f"regulator fit residual {resid:.3e} exceeds {resid_tol:.1e}", float(coef[0])
        )
    return float(coef[0])


def sine_weighted_oracle(E: float, a: float, delta_tau: float, tol: float = 1e-12) -> QuadratureResult:
    """``∫_{-Δτ}^{Δτ} (Δτ - |ξ|) e^{-iEξ} sin(aξ)/ξ dξ`` (real; the integrand is regular)."""
    if delta_tau <= 0:
        raise DomainError("delta_tau must be positive")
    L = float(delta_tau)

    def integrand(x):
        # sin(a x)/x written via sinc to stay finite at the origin
        return 2 * (L - x) * np.cos(E * x) * a * np.sinc(a * x / np.pi)

    k = max(abs(E), abs(a))
    period = 2 * math.pi / k if k * L > 20 * math.pi else None
    return integrate(integrand, 0.0, L, tol, period=period, vectorized=True)


def sine_overlap_oracle(E: float, a: float, delta_tau: float, tol: float = 1e-13) -> QuadratureResult:
    """``∫_0^Δτ sin(aξ) cos(Eξ) dξ`` by quadrature."""
    k = abs(E) + abs(a)
    period = 2 * math.pi / k if k * delta_tau > 20 * math.pi else None
    return integrate(
        lambda x: np.sin(a * x) * np.cos(E * x), 0.0, delta_tau, tol, period=period, vectorized=True,
    )


def regulated_kernel_response_oracle(
    E: float,
    a: float,
    delta_tau: float,
    epsilon: float,
    tol: float = 1e-11,
) -> QuadratureResult:
    """Non-vacuum second response with the closed-form flat-band kernel, regulated.

    Integrates ``(1/4π²) ∫ (Δτ - |ξ|) e^{-iEξ} g(ξ) dξ`` where every pole of
    ``g(ξ) = -2/ξ² - 2 cos(aξ)/ξ² - (2a/ξ) sin(aξ)`` is moved to ``ξ - iε``.
    The integrand's real part is even in ξ, so ``ξ`` and ``-ξ`` are summed on
    ``[0, Δτ]`` and the imaginary part is discarded.
    """
    if delta_tau <= 0 or epsilon <= 0:
        raise DomainError("delta_tau and epsilon must be positive")
    if epsilon >= delta_tau / 10:
        raise DomainError(f"epsilon={epsilon} too coarse for delta_tau={delta_tau}")
    L = float(delta_tau)

    def half(x):
        z = x - 1j * epsilon
        g = -2 / z**2 - (np.exp(1j * a * x) + np.exp(-1j * a * x)) / z**2 - 2 * a * np.sin(a * x) / z
        return (L - np.abs(x)) * np.exp(-1j * E * x) * g

    def integrand(x):
        return (half(x) + half(-x)).real

    k = abs(E) + abs(a)
    period = 2 * math.pi / k if k * L > 20 * math.pi else None
    res = integrate(
        integrand, 0.0, L, tol * 4 * math.pi**2,
        points=_regulator_points(epsilon, L), period=period, vectorized=True,
    )
    scale = 1.0 / (4 * math.pi**2)
    return QuadratureResult(scale * res.value, scale * res.est_abs_error, res.subdivisions)


def renormalized_response_oracle(
    E: float,
    delta_tau: float,
    weight: str = "full",
    epsilons: Sequence[float] | None = None,
) -> tuple[float, RegulatorSweep]:
    """ε -> 0 limit of the regulated response with ``ln(Δτ/ε)/(2π²)`` removed.

    For ``weight="constant"`` there is no divergence and nothing is subtracted.
    """
    eps = tuple(epsilons) if epsilons is not None else regulator_epsilons(E, delta_tau)
    sweep = sweep_regulator(
        lambda e: response_double_integral(E, delta_tau, e, weight=weight).value, eps
    )
    if weight == "constant":
        ct = lambda e: 0.0  # noqa: E731
    else:
        ct = lambda e: math.log(delta_tau / e) / (2 * math.pi**2)  # noqa: E731
    value = extrapolate_regulator(sweep, ct)
    return value, RegulatorSweep(sweep.epsilons, sweep.values, value)


def renormalized_kernel_response_oracle(
    E: float,
    a: float,
    delta_tau: float,
    epsilons: Sequence[float] | None = None,
) -> tuple[float, RegulatorSweep]:
    """ε -> 0 limit of :func:`regulated_kernel_response_oracle`.

    The kernel has a double pole of weight 2 from ``-2/ξ²`` and one of weight
    2 from ``-2cos(aξ)/ξ²``, so four vacuum counterterms are removed.
    """
    if epsilons is not None:
        eps = tuple(epsilons)
    else:
        eps = regulator_epsilons(max(abs(E), abs(a)), delta_tau)
    sweep = sweep_regulator(
        lambda e: regulated_kernel_response_oracle(E, a, delta_tau, e).value, eps
    )
    value = extrapolate_regulator(sweep, lambda e: 4 * math.log(delta_tau / e) / (2 * math.pi**2))
    return value, RegulatorSweep(sweep.epsilons, sweep.values, value)
