from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zenodecay.errors import ConvergenceError, DomainError, PerturbationBreakdownError, PerturbationWarning
from zenodecay.quadrature import renormalized_response_oracle
from zenodecay.response_first import (
    QubitFieldParams,
    continuum_decay_probability,
    counterterm,
    decay_probability_first,
    f1_piece,
    f2_piece,
    regulated_response,
    renormalized_from_pieces,
    renormalized_value,
    response_renormalized,
    small_time_coefficients,
    survival_first,
)

# mpmath references of the even closed form
F_REF = {
    (-1.0, 1.0): 0.092069037783776937704,
    (-0.5, 3.0): 0.14699842135940433484,
    (-2.0, 0.5): 0.092069037783776937704,
    (-5.0, 2.0): 1.3945397085582737548,
}


@pytest.mark.parametrize("key", sorted(F_REF))
def test_renormalized_reference(key):
    assert renormalized_value(*key) == pytest.approx(F_REF[key], abs=1e-15)


def test_renormalized_zero_interval():
    for E in (-5, -1, -0.5, 0.5, 1, 5):
        assert renormalized_value(E, 0.0) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 50), st.floats(0.0, 20))
def test_renormalized_even_and_nonnegative(E, L):
    assert renormalized_value(E, L) == renormalized_value(-E, L)
    assert renormalized_value(-E, L) >= 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 20), st.floats(0.001, 10))
def test_even_form_equals_decay_branch(E, L):
    assert renormalized_value(-E, L) == pytest.approx(renormalized_from_pieces(-E, L), abs=1e-13)


def test_excitation_branch_differs():
    # E > 0: the split pieces are lower by |E| dtau/(2 pi)
    diff = renormalized_value(1.0, 1.0) - renormalized_from_pieces(1.0, 1.0)
    assert diff == pytest.approx(1.0 / (2 * math.pi), abs=1e-14)
    assert renormalized_from_pieces(1.0, 0.1) < 0


def test_split_pieces_against_oracle():
    assert f1_piece(-1.0, 1.0) == pytest.approx(
        renormalized_response_oracle(-1.0, 1.0, weight="constant")[0], abs=1e-5
    )
    assert f2_piece(-1.0, 1.0, 1e-3) - counterterm(1.0, 1e-3) == pytest.approx(
        renormalized_response_oracle(-1.0, 1.0, weight="abs")[0], abs=1e-5
    )


@pytest.mark.parametrize("E,L", [(-0.5, 0.5), (-1.0, 3.0), (-2.0, 1.0), (1.0, 1.0), (2.0, 0.5)])
def test_sign_aware_form_against_oracle(E, L):
    assert renormalized_from_pieces(E, L) == pytest.approx(renormalized_response_oracle(E, L)[0], abs=1e-5)


def test_regulated_minus_counterterm_is_regulator_free():
    for eps in (1e-2, 1e-5, 1e-9):
        value = regulated_response(-1.0, 1.0, eps) - counterterm(1.0, eps)
        assert value == pytest.approx(renormalized_from_pieces(-1.0, 1.0), abs=1e-15)


def test_f2_finite_at_zero_energy():
    assert f2_piece(0.0, 1.0, 1e-3) == pytest.approx((math.log(1e3) - 1) / (2 * math.pi**2), abs=1e-15)


def test_large_interval_linear_growth():
    slope = (renormalized_value(-1.0, 2000.0) - renormalized_value(-1.0, 1000.0)) / 1000.0
    assert slope == pytest.approx(1 / (2 * math.pi), rel=1e-3)
    assert f1_piece(1.0, 1e4) / 1e4 < 1e-4


def test_small_time_coefficients():
    b = response_renormalized(-2.0, 0.01)
    assert b.linear_coeff == pytest.approx(2.0 / (4 * math.pi), abs=1e-10)
    # quadratic coefficient derived from the closed form: E^2/(8 pi^2)
    assert b.quadratic_coeff == pytest.approx(4.0 / (8 * math.pi**2), abs=1e-7)
    approx = b.linear_coeff * 0.001 + b.quadratic_coeff * 0.001**2
    assert approx == pytest.approx(renormalized_value(-2.0, 0.001), abs=1e-9)


def test_small_time_coefficients_polynomial():
    c1, c2 = small_time_coefficients(lambda h: 3 * h + 7 * h * h, 0.5)
    assert (c1, c2) == (pytest.approx(3, abs=1e-12), pytest.approx(7, abs=1e-9))


def test_breakdown_zero_interval():
    b = response_renormalized(-1.0, 0.0)
    assert b.renormalized == 0.0
    assert b.piece2 == pytest.approx(-1 / (2 * math.pi**2))


def test_params_validation():
    with pytest.raises(DomainError):
        QubitFieldParams(0.0, 0.1)
    with pytest.raises(DomainError):
        QubitFieldParams(-1.0, -0.1)
    with pytest.raises(DomainError):
        renormalized_value(-1.0, -0.1)
    with pytest.raises(DomainError):
        f2_piece(-1.0, 1.0, 0.0)


def test_decay_probability_and_warnings():
    params = QubitFieldParams(-1.0, 0.01)
    p = decay_probability_first(params, 1.0)
    assert p == pytest.approx(0.01 * F_REF[(-1.0, 1.0)])
    assert survival_first(params, 1.0) == pytest.approx(1 - p)
    assert decay_probability_first(QubitFieldParams(-1.0, 0.0), 5.0) == 0.0
    with pytest.warns(PerturbationWarning):
        decay_probability_first(QubitFieldParams(-1.0, 1.0), 2.0)
    with pytest.raises(PerturbationBreakdownError):
        decay_probability_first(QubitFieldParams(-1.0, 10.0), 5.0)


def test_continuum_single_level_limit():
    # a narrow top-hat density of unit weight reproduces the single-level response
    w0, half = 2.0, 1e-4
    rho = lambda w: 1 / (2 * half) if abs(w - w0) <= half else 0.0  # noqa: E731
    total = continuum_decay_probability(
        rho, w0 - half, 1.0, lambda w: 1.0, 1.0, w0 + half, points=None
    )
    assert total == pytest.approx(renormalized_value(w0 - 1.0, 1.0), rel=1e-6)


def test_continuum_tail_and_guards():
    rho = lambda w: math.exp(-w)  # noqa: E731
    base = continuum_decay_probability(rho, 0.0, 1.0, lambda w: 0.1, 0.5, 10.0)
    assert continuum_decay_probability(rho, 0.0, 1.0, lambda w: 0.1, 0.5, 10.0, tail=0.25) == pytest.approx(base + 0.25)
    with pytest.raises(DomainError):
        continuum_decay_probability(rho, 1.0, 1.0, lambda w: 1.0, 0.5, 1.0)
    with pytest.raises(ConvergenceError):
        continuum_decay_probability(rho, 0.0, 1.0, lambda w: 1.0, 0.5, 1.0, tail=math.inf)
