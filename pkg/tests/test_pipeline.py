from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenodecay.decay import ClassicalDecayParams, MeasurementSchedule, classical_survival
from zenodecay.errors import DomainError, PerturbationBreakdownError
from zenodecay.pipeline import (
    LawTag,
    SurvivalCurve,
    effective_lifetime,
    landau_peierls_comparison,
    landau_peierls_max_n,
    make_survival_curve,
    survival_after_n,
    survival_continuous_limit,
)
from zenodecay.response_first import QubitFieldParams, renormalized_value
from zenodecay.response_second import FieldState, small_time_coeff_p, small_time_coeff_q

BAND = FieldState.flat_band(1.0)


def test_single_measurement():
    params = QubitFieldParams(-1.0, 0.05)
    s = survival_after_n(params, BAND, MeasurementSchedule(2.0, 1))
    assert s == pytest.approx(1 - 0.05 * renormalized_value(-1.0, 2.0), abs=1e-15)


def test_decoupled():
    params = QubitFieldParams(-1.0, 0.0)
    for n in (1, 7, 1000):
        assert survival_after_n(params, BAND, MeasurementSchedule(3.0, n)) == 1.0
    assert survival_continuous_limit(params, 1.0, 3.0) == 1.0


def test_product_structure():
    params = QubitFieldParams(-1.0, 0.01)
    T, N = 1.0, 10
    dt = T / N
    p, q = small_time_coeff_p(-1.0, 1.0), small_time_coeff_q(-1.0, 1.0)
    expected = (1 - 0.01 * renormalized_value(-1.0, dt)) * (1 - 0.01 * (p * dt + q * dt * dt)) ** (N - 1)
    assert survival_after_n(params, BAND, MeasurementSchedule(T, N)) == pytest.approx(expected, rel=1e-14)


def test_vacuum_state_uses_vacuum_factors():
    params = QubitFieldParams(-1.0, 0.01)
    expected = (1 - 0.01 * renormalized_value(-1.0, 0.25)) ** 4
    assert survival_after_n(params, FieldState.vacuum(), MeasurementSchedule(1.0, 4)) == pytest.approx(expected)


def test_convergence_toward_exponential():
    params = QubitFieldParams(-1.0, 0.01)
    target = math.exp(-0.01 * small_time_coeff_p(-1.0, 1.0))
    gaps = [
        abs(survival_after_n(params, BAND, MeasurementSchedule(1.0, n)) - target)
        for n in (10, 100, 1000, 10_000)
    ]
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-5


def test_breakdown_and_guards():
    with pytest.raises(PerturbationBreakdownError):
        survival_after_n(QubitFieldParams(-1.0, 50.0), BAND, MeasurementSchedule(5.0, 1))
    with pytest.raises(DomainError):
        survival_after_n(QubitFieldParams(-1.0, 0.01), BAND, MeasurementSchedule(1.0, math.inf))
    with pytest.raises(DomainError):
        survival_after_n(QubitFieldParams(-1.0, 0.01), FieldState.flat_band(1.0, 2.0), MeasurementSchedule(1.0, 3))


def test_continuous_limit_values():
    # sigma p = 0.5 with T = 2 gives e^-1
    p = small_time_coeff_p(-1.0, 1.0)
    params = QubitFieldParams(-1.0, 0.5 / p)
    assert survival_continuous_limit(params, 1.0, 2.0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert survival_continuous_limit(params, 1.0, 0.0) == 1.0
    with pytest.raises(DomainError):
        survival_continuous_limit(params, 1.0, -1.0)


def test_finite_n_ratio_approaches_one():
    params = QubitFieldParams(-2.0, 0.1)
    ratios = [
        survival_continuous_limit(params, 1.0, 3.0, n) / survival_continuous_limit(params, 1.0, 3.0)
        for n in (1, 10, 100, 1000)
    ]
    # q > 0 here, so the ratio climbs toward 1 from below
    assert ratios == sorted(ratios)
    assert ratios[-1] == pytest.approx(1.0, abs=1e-3)


def test_effective_lifetime():
    params = QubitFieldParams(-3.0, 0.2)
    assert effective_lifetime(params, 1.0) == pytest.approx(1 / (0.2 * 15 / (4 * math.pi)))
    assert effective_lifetime(QubitFieldParams(-3.0, 0.0), 1.0) == math.inf


def test_landau_peierls_examples():
    assert landau_peierls_max_n(10.0, 5.0) == 49
    assert landau_peierls_max_n(0.5, 1.0) == 0
    assert landau_peierls_max_n(3.0, -1.0) == 2
    with pytest.raises(DomainError):
        landau_peierls_max_n(0.0, 1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_landau_peierls_bound(T, E):
    n = landau_peierls_max_n(T, E)
    assert n < T * E <= n + 1 or (n == 0 and T * E <= 1)


def test_classical_curve():
    curve = make_survival_curve(LawTag.CLASSICAL, 3.0, 4, tau_E=1.0)
    assert curve.points[0] == (0.0, 1.0)
    assert np.allclose(curve.survival, np.exp(-np.arange(4.0)), atol=1e-15)
    assert curve.law_tag is LawTag.CLASSICAL


def test_gaussian_curves_monotone_in_n():
    curves = [make_survival_curve("GaussianZeno", 2.0, 11, tau_z=1.0, N=n) for n in (1, 2, 4, 8, 16)]
    for lo, hi in zip(curves, curves[1:]):
        assert np.all(hi.survival >= lo.survival)
    assert np.all(make_survival_curve("GaussianZeno", 2.0, 5, tau_z=1.0).survival == 1.0)


def test_continuous_limit_curve_is_classical():
    params = QubitFieldParams(-1.0, 0.3)
    tau_c = effective_lifetime(params, 2.0)
    limit = make_survival_curve(LawTag.CONTINUOUS_LIMIT, 5.0, 21, params=params, a=2.0)
    classical = make_survival_curve(LawTag.CLASSICAL, 5.0, 21, tau_E=tau_c)
    assert limit.points == classical.points
    # semigroup on grid points
    s = limit.survival
    assert s[4] * s[6] == pytest.approx(s[10], rel=1e-12)


def test_flat_band_and_vacuum_curves():
    params = QubitFieldParams(-1.0, 0.01)
    band = make_survival_curve(LawTag.FLAT_BAND_SEQUENCE, 2.0, 5, N=20, params=params, a=1.0)
    vac = make_survival_curve(LawTag.FIRST_ORDER_VACUUM, 2.0, 5, N=20, params=params)
    assert band.survival[-1] == pytest.approx(
        survival_after_n(params, BAND, MeasurementSchedule(2.0, 20)), rel=1e-15
    )
    assert np.all(np.diff(vac.survival) <= 0)
    with pytest.raises(DomainError):
        make_survival_curve(LawTag.FLAT_BAND_SEQUENCE, 2.0, 5, params=params, a=1.0)
    with pytest.raises(DomainError):
        make_survival_curve(LawTag.CLASSICAL, 2.0, 1, tau_E=1.0)
    with pytest.raises(DomainError):
        make_survival_curve(LawTag.CLASSICAL, 2.0, 5)


def test_zeno_versus_decay_contrast():
    # no linear term: survival -> 1; with a linear term: survival -> exp(-sigma p T) < 1
    gauss = make_survival_curve(LawTag.GAUSSIAN_ZENO, 1.0, 3, tau_z=1.0, N=10**6)
    assert gauss.survival[-1] == pytest.approx(1.0, abs=1e-5)
    params = QubitFieldParams(-1.0, 0.01)
    s = survival_after_n(params, BAND, MeasurementSchedule(1.0, 10**6))
    assert s == pytest.approx(math.exp(-0.01 * small_time_coeff_p(-1.0, 1.0)), abs=1e-7)
    assert s < 1 - 1e-3


def test_survival_curve_invariants():
    sched = MeasurementSchedule(1.0, 1)
    with pytest.raises(ValueError):
        SurvivalCurve(sched, ((0.0, 0.9), (1.0, 0.5)), LawTag.CLASSICAL)
    with pytest.raises(ValueError):
        SurvivalCurve(sched, ((0.0, 1.0), (0.0, 0.5)), LawTag.CLASSICAL)
    with pytest.raises(ValueError):
        SurvivalCurve(sched, ((0.0, 1.0), (1.0, 1.5)), LawTag.CLASSICAL)


def test_landau_peierls_comparison():
    cmp = landau_peierls_comparison(QubitFieldParams(-5.0, 0.01), 1.0, 10.0, 11)
    assert cmp.n_max == 49
    diff = np.max(np.abs(cmp.capped.survival - cmp.limit.survival))
    assert cmp.max_abs_diff == diff
    assert 0 < cmp.max_abs_diff < 0.01
    with pytest.raises(DomainError):
        landau_peierls_comparison(QubitFieldParams(-0.1, 0.01), 1.0, 5.0, 11)


def test_classical_survival_matches_limit_pointwise():
    params = QubitFieldParams(-1.0, 0.01)
    tau_c = effective_lifetime(params, 1.0)
    for t in np.linspace(0, 4, 9):
        assert survival_continuous_limit(params, 1.0, float(t)) == classical_survival(
            float(t), ClassicalDecayParams(tau_c)
        )
