import cmath
import math

import numpy as np
import pytest

from mdbusy import RangeError, SingularityError, ValidationError, make_params
from mdbusy import moments
from mdbusy.transform import bbar, bbar_array, bbar_via_general, pole_guard


def literal_form(lam, alpha, s):
    # the transform as usually printed, before rearranging for stability
    return 1 + (s - (s + lam) * s / (lam * cmath.exp(-(s + lam) * alpha) + s)) / lam


def test_zero_is_exactly_one(unit_params):
    assert bbar(unit_params, 0) == 1
    assert bbar(unit_params, 0j) == 1
    assert bbar_via_general(unit_params, 0) == 1
    assert bbar_array(unit_params, np.array([0j]))[0] == 1


def test_value_at_one(unit_params):
    expected = 2 - 2 / (math.exp(-2) + 1)
    assert bbar(unit_params, 1) == pytest.approx(expected, rel=1e-15)
    assert expected == pytest.approx(0.2384058, abs=1e-7)


@pytest.mark.parametrize("s", [1, 0.3 + 4j, 2.5 - 0.1j, 1e-3j])
def test_rearrangement_matches_printed_form(s):
    params = make_params(1.3, 0.8)
    assert bbar(params, s) == pytest.approx(literal_form(1.3, 0.8, s), rel=1e-12)


@pytest.mark.parametrize("lam, alpha, s", [(1, 1, 1), (1, 3, 0.5 + 2j), (2, 0.5, -0.5 + 7j)])
def test_general_route_examples(lam, alpha, s):
    params = make_params(lam, alpha)
    assert abs(bbar_via_general(params, s) - bbar(params, s)) <= 1e-12 * abs(bbar(params, s))


@pytest.mark.parametrize("rho", [0.1, 1.0, 3.0])
def test_general_route_on_grid(rho):
    params = make_params(1.0, rho)
    sigma = np.linspace(0.0, 5.0, 10)
    omega = np.linspace(-100.0, 100.0, 100)
    worst = 0.0
    for x in sigma:
        for y in omega:
            s = complex(x, y)
            a, b = bbar(params, s), bbar_via_general(params, s)
            worst = max(worst, abs(a - b) / abs(b))
    assert worst <= 1e-11


def test_general_route_domain(unit_params):
    with pytest.raises(ValidationError):
        bbar_via_general(unit_params, -1.0)
    with pytest.raises(ValidationError):
        bbar_via_general(unit_params, complex(math.nan, 0))


def test_conjugate_symmetry():
    rng = np.random.default_rng(11)
    params = make_params(1.7, 1.1)
    for _ in range(100):
        r, phi = 50 * math.sqrt(rng.random()), 2 * math.pi * rng.random()
        s = cmath.rect(r, phi)
        if s.real <= -params.lam * 0.5:
            s = complex(-s.real, s.imag)
        assert bbar(params, s.conjugate()) == pytest.approx(bbar(params, s).conjugate(), rel=1e-13)


@pytest.mark.parametrize("rho", [0.1, 1.0, 3.0, 10.0])
def test_characteristic_function_bound(rho):
    params = make_params(1.0, rho)
    w = np.concatenate([np.linspace(-200, -1e-3, 2000), np.linspace(1e-3, 200, 2000)])
    values = bbar_array(params, 1j * w)
    assert np.all(np.abs(values) <= 1 + 1e-12)


def test_array_matches_scalar():
    params = make_params(0.7, 2.0)
    s = np.array([0, 1, 2j, -0.3 + 5j, 40 - 40j])
    vec = bbar_array(params, s)
    for z, v in zip(s, vec):
        assert v == pytest.approx(bbar(params, z), rel=1e-15)


@pytest.mark.parametrize("lam, alpha", [(1, 1), (2, 0.25), (0.5, 4)])
def test_derivative_at_zero_is_minus_mean(lam, alpha):
    params = make_params(lam, alpha)
    # forward-difference error is about h E[B^2] / 2, so keep h small for large means
    h = 1e-7
    slope = -(bbar(params, h) - bbar(params, 0)).real / h
    assert slope == pytest.approx(moments.mean(params), rel=1e-5)


def test_unit_mean_by_difference(unit_params):
    h = 1e-6
    assert -(bbar(unit_params, h) - 1).real / h == pytest.approx(1.7182818, abs=1e-5)


def test_large_real_part_degrades_gracefully(unit_params):
    # exp underflows to zero and the transform vanishes without overflow
    assert bbar(unit_params, 1e4) == 0
    assert abs(bbar(unit_params, 800 + 3j)) == 0


def test_overflow_is_explicit(unit_params):
    with pytest.raises(RangeError):
        bbar(unit_params, -800.0)
    with pytest.raises(RangeError):
        bbar_array(unit_params, np.array([-800.0 + 0j]))


def test_pole_raises():
    # s = -lam solves s + lam e^{-(s + lam) alpha} = 0 for every alpha
    params = make_params(1.0, 2.5)
    root = -1.0
    with pytest.raises(SingularityError):
        bbar(params, root)
    with pytest.raises(SingularityError):
        bbar_array(params, np.array([root + 0j]))


def test_pole_guard_threshold():
    assert pole_guard(1.0, 0.5e-13)
    assert not pole_guard(1.0, 2e-13)
    assert pole_guard(0.0, 0.0)


def test_non_finite_rejected(unit_params):
    with pytest.raises(ValidationError):
        bbar(unit_params, complex(math.inf, 0))
