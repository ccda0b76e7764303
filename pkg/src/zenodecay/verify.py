"""Closed form vs oracle registry.

Each registry entry evaluates one closed-form expression and an independent
numerical counterpart, and records PASS when they agree within the entry's
tolerance, FLAG otherwise.  An entry that raises is recorded as a FLAG with
NaN values; running the registry never raises.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import pipeline
from .decay import MeasurementSchedule
from .quadrature import (
    flat_band_kernel_oracle,
    flat_band_response_oracle,
    integrate,
    renormalized_kernel_response_oracle,
    renormalized_response_oracle,
    sine_overlap_oracle,
    sine_weighted_oracle,
)
from .response_first import (
    QubitFieldParams,
    counterterm,
    f1_piece,
    f2_piece,
    renormalized_from_pieces,
    renormalized_value,
    small_time_coefficients,
)
from .response_second import (
    FieldState,
    flat_band_kernel,
    pv_piece,
    response_second_renormalized,
    shifted_vacuum_piece,
    sine_overlap_integral,
    small_time_coeff_p,
    small_time_coeff_p_general,
    small_time_coeff_q,
)
from .specfun import EULER_GAMMA, cos_deficit_integral, cos_integral, sin_integral

PASS = "PASS"
FLAG = "FLAG"

REPORT_HEADER = ("formula_id", "paper_anchor", "closed_form", "oracle", "abs_diff", "tolerance", "verdict")


@dataclass(frozen=True)
class ReportEntry:
    formula_id: str
    paper_anchor: str
    closed_form: float
    oracle: float
    abs_diff: float
    tolerance: float
    verdict: str

    def as_row(self) -> tuple:
        return (
            self.formula_id, self.paper_anchor, self.closed_form, self.oracle,
            self.abs_diff, self.tolerance, self.verdict,
        )


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple[ReportEntry, ...]

    def __post_init__(self):
        ids = [e.formula_id for e in self.entries]
        if len(ids) != len(set(ids)):
            raise ValueError("duplicate formula_id in report")

    @property
    def flags(self) -> tuple[ReportEntry, ...]:
        return tuple(e for e in self.entries if e.verdict == FLAG)

    @property
    def all_pass(self) -> bool:
        return not self.flags

    def by_id(self, formula_id: str) -> ReportEntry:
        for e in self.entries:
            if e.formula_id == formula_id:
                return e
        raise KeyError(formula_id)


@dataclass(frozen=True)
class RegistryItem:
    formula_id: str
    paper_anchor: str
    evaluate: Callable[[], tuple[float, float]]
    tolerance: float


def make_entry(formula_id: str, anchor: str, closed: float, oracle: float, tol: float) -> ReportEntry:
    diff = abs(closed - oracle)
    # NaN never passes
    verdict = PASS if diff <= tol else FLAG
    return ReportEntry(formula_id, anchor, float(closed), float(oracle), float(diff), float(tol), verdict)


def _fmt(x: float) -> str:
    return f"{x:g}"


def _special_function_items() -> list[RegistryItem]:
    items = [
        RegistryItem(
            "si_1",
            "Si(1) = integral of sin t / t over [0, 1]",
            lambda: (
                sin_integral(1.0).value,
                integrate(lambda t: np.sinc(t / np.pi), 0.0, 1.0, 1e-14, vectorized=True).value,
            ),
            1e-10,
        )
    ]
    for x in (0.01, 0.1, 1.0, 5.0, 20.0):
        items.append(RegistryItem(
            f"cos_deficit_identity_{_fmt(x)}",
            "Ci(x) - gamma - ln x = integral of (cos t - 1)/t over [0, x]",
            lambda x=x: (
                cos_integral(x).value - EULER_GAMMA - math.log(x),
                cos_deficit_integral(x).value,
            ),
            1e-10,
        ))
    return items


def _first_response_items() -> list[RegistryItem]:
    items = [
        RegistryItem(
            "f1_piece_E-1_dtau1",
            "flat-weight piece: (dtau/2pi)(-E theta(-E) + cos(E dtau)/(pi dtau) + |E|/pi (Si - pi/2))",
            lambda: (f1_piece(-1.0, 1.0), renormalized_response_oracle(-1.0, 1.0, weight="constant")[0]),
            1e-5,
        ),
        RegistryItem(
            "f2_piece_E-1_dtau1",
            "log piece: (-gamma + Ci(|E| dtau) - ln(eps |E|) - 1)/(2 pi^2), counterterm removed",
            lambda: (
                f2_piece(-1.0, 1.0, 1e-3) - counterterm(1.0, 1e-3),
                renormalized_response_oracle(-1.0, 1.0, weight="abs")[0],
            ),
            1e-5,
        ),
    ]
    points = [(E, L) for E in (-0.5, -1.0, -2.0) for L in (0.5, 1.0, 3.0)] + [(1.0, 1.0)]
    for E, L in points:
        items.append(RegistryItem(
            f"F_ren_E{_fmt(E)}_dtau{_fmt(L)}",
            "renormalized response (1/2pi^2)[x(pi/2 + Si x) + cos x - 1 + Ci x - gamma - ln x]",
            lambda E=E, L=L: (renormalized_value(E, L), renormalized_response_oracle(E, L)[0]),
            1e-4,
        ))
    items.append(RegistryItem(
        "F_ren_pieces_E1_dtau1",
        "split pieces minus ln(dtau/eps)/(2pi^2), excitation branch",
        lambda: (renormalized_from_pieces(1.0, 1.0), renormalized_response_oracle(1.0, 1.0)[0]),
        1e-4,
    ))
    items.append(RegistryItem(
        "F_ren_linear_coeff",
        "small-interval expansion, linear term |E| dtau/(4pi)",
        lambda: (1.0 / (4 * math.pi), small_time_coefficients(lambda h: renormalized_value(-1.0, h), 0.5)[0]),
        1e-8,
    ))
    items.append(RegistryItem(
        "F_ren_quadratic_coeff",
        "small-interval expansion, quadratic term alpha E^2 dtau^2/(4pi), alpha = 1/2 - 3/(2pi)",
        lambda: (
            (0.5 - 3 / (2 * math.pi)) / (4 * math.pi),
            small_time_coefficients(lambda h: renormalized_value(-1.0, h), 0.5)[1],
        ),
        1e-6,
    ))
    return items


_KERNEL_POINTS = tuple(
    (xi, a)
    for xi in (0.3, 1.0, math.pi, 2 * math.pi, 7.5)
    for a in (0.5, 1.0, 2.0, 3.0)
)


def _kernel_items() -> list[RegistryItem]:
    return [
        RegistryItem(
            f"flat_band_kernel_xi{_fmt(xi)}_a{_fmt(a)}",
            "flat-band kernel -2/xi^2 - 2cos(a xi)/xi^2 - (2a/xi) sin(a xi)",
            lambda xi=xi, a=a: (flat_band_kernel(xi, a), flat_band_kernel_oracle(xi, a).value),
            1e-10,
        )
        for xi, a in _KERNEL_POINTS
    ]


def _second_response_items() -> list[RegistryItem]:
    items = []
    for E, a in ((-1.0, 2.0), (-1.0, 1.0)):
        for shift, tag in ((a, "plus"), (-a, "minus")):
            items.append(RegistryItem(
                f"shifted_{tag}_E{_fmt(E)}_a{_fmt(a)}",
                "shifted vacuum piece = regulated vacuum response at E + a (or E - a)",
                lambda E=E, shift=shift: (
                    shifted_vacuum_piece(E, shift, 1.0, 1e-3),
                    renormalized_response_oracle(E + shift, 1.0)[0] + counterterm(1.0, 1e-3),
                ),
                1e-5,
            ))
    items.append(RegistryItem(
        "pv_piece_E-1_a2_dtau1",
        "sine-term piece with principal values, against -(a/4pi^2) times its defining integral",
        lambda: (
            pv_piece(-1.0, 2.0, 1.0),
            -(2.0 / (4 * math.pi**2)) * sine_weighted_oracle(-1.0, 2.0, 1.0).value,
        ),
        1e-8,
    ))
    items.append(RegistryItem(
        "sine_overlap_E1_a2_dtau_pi",
        "integral of sin(a xi) cos(E xi) over [0, dtau] in closed form, worked value 4/3",
        lambda: (sine_overlap_integral(1.0, 2.0, math.pi), sine_overlap_oracle(1.0, 2.0, math.pi).value),
        1e-10,
    ))
    items.append(RegistryItem(
        "sine_overlap_degenerate_E1_a1",
        "degenerate |E| = a: (1 - cos 2a dtau)/(4a)",
        lambda: (sine_overlap_integral(1.0, 1.0, 0.7), (1 - math.cos(1.4)) / 4),
        1e-12,
    ))
    items.append(RegistryItem(
        "second_total_closed_form_E-1_a1_dtau0.5",
        "renormalized non-vacuum second response from the closed-form pieces vs quadrature of the closed-form kernel",
        lambda: (
            response_second_renormalized(-1.0, 1.0, 0.5) - renormalized_value(-1.0, 0.5),
            renormalized_kernel_response_oracle(-1.0, 1.0, 0.5)[0],
        ),
        1e-5,
    ))
    items.append(RegistryItem(
        "second_total_spectral_E-1_a1_dtau0.5",
        "non-vacuum second response, spectral-integral kernel pieces vs nested quadrature",
        lambda: (
            response_second_renormalized(-1.0, 1.0, 0.5, kernel="spectral") - renormalized_from_pieces(-1.0, 0.5),
            flat_band_response_oracle(-1.0, 1.0, 0.5).value,
        ),
        1e-8,
    ))
    return items


def _coeffs_closed_form(E: float, a: float) -> tuple[float, float]:
    h0 = 0.5 / max(abs(E), a)
    return small_time_coefficients(lambda h: response_second_renormalized(E, a, h), h0)


def _coefficient_items() -> list[RegistryItem]:
    items = []
    for E, a in ((-1.0, 2.0), (-3.0, 1.0), (-1.0, 1.0)):
        items.append(RegistryItem(
            f"p_E{_fmt(E)}_a{_fmt(a)}",
            "p(E, a) by cases: (3|E| + 4a)/4pi, 5|E|/4pi, |E|/pi; vs the assembled renormalized response",
            lambda E=E, a=a: (small_time_coeff_p(E, a), _coeffs_closed_form(E, a)[0]),
            1e-6,
        ))
    # a slightly above |E| is the inner case |E| < a, slightly below the outer one
    for side, factor in (("inner", 1 + 1e-7), ("outer", 1 - 1e-7)):
        items.append(RegistryItem(
            f"p_boundary_{side}_limit",
            "p at |E| = a: stated |E|/pi vs the one-sided limit of the neighbouring case",
            lambda factor=factor: (small_time_coeff_p(-1.0, 1.0), small_time_coeff_p(-1.0, factor)),
            1e-5,
        ))
    for E, a in ((-3.0, 1.0), (3.0, 1.0)):
        items.append(RegistryItem(
            f"p_cases_vs_step_form_E{_fmt(E)}_a{_fmt(a)}",
            "p cases vs (3|E| + |E+a| + |E-a| + a theta(a-E) - a theta(-E-a) + a theta(E+a))/4pi",
            lambda E=E, a=a: (small_time_coeff_p(E, a), small_time_coeff_p_general(E, a)),
            1e-14,
        ))
    items.append(RegistryItem(
        "q_special_vs_general",
        "q at |E| = a: (5pi - 17)E^2/(8pi^2) vs (5E^2(pi - 3) - 2a^2)/(8pi^2)",
        lambda: (
            small_time_coeff_q(-1.0, 1.0),
            (5 * (math.pi - 3) - 2) / (8 * math.pi**2),
        ),
        1e-14,
    ))
    for E, a in ((-2.0, 1.0), (-1.0, 2.0)):
        items.append(RegistryItem(
            f"q_E{_fmt(E)}_a{_fmt(a)}",
            "q(E, a) = (5E^2(pi - 3) - 2a^2)/(8pi^2) vs the assembled renormalized response",
            lambda E=E, a=a: (small_time_coeff_q(E, a), _coeffs_closed_form(E, a)[1]),
            1e-6,
        ))
    return items


def _pipeline_items() -> list[RegistryItem]:
    params = QubitFieldParams(-1.0, 0.01)

    def evaluate():
        closed = pipeline.survival_continuous_limit(params, 1.0, 1.0, 10_000)
        product = pipeline.survival_after_n(params, FieldState.flat_band(1.0), MeasurementSchedule(1.0, 10_000))
        return closed, product

    return [RegistryItem(
        "survival_limit_N1e4",
        "exp(-sigma p T - sigma q T^2/N) vs the N-measurement product",
        evaluate,
        1e-5,
    )]


def registry() -> list[RegistryItem]:
    items = (
        _special_function_items()
        + _first_response_items()
        + _kernel_items()
        + _second_response_items()
        + _coefficient_items()
        + _pipeline_items()
    )
    ids = [i.formula_id for i in items]
    assert len(ids) == len(set(ids)), "registry ids must be unique"
    return items


def run_item(item: RegistryItem, tolerance: float | None = None) -> ReportEntry:
    tol = item.tolerance if tolerance is None else tolerance
    try:
        closed, oracle = item.evaluate()
    except Exception:  # noqa: BLE001 - a failing entry is a finding, not a crash
        closed = oracle = math.nan
    return make_entry(item.formula_id, item.paper_anchor, closed, oracle, tol)


def run_verification(tolerance: float | None = None) -> VerificationReport:
    """Evaluate every registry entry; ``tolerance`` overrides the per-entry defaults."""
    if tolerance is not None and not tolerance > 0:
        raise ValueError("tolerance must be positive")
    return VerificationReport(tuple(run_item(item, tolerance) for item in registry()))
