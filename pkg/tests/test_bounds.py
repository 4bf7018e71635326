import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stuforge.bounds import (AsymmetricProblem, asym_pure_optimum, curve_value,
                             max_correlation_curve, subadditivity_check)
from stuforge.errors import InvalidBudget
from stuforge.spectra import EnergySpectrum, entropy, mean_energy, thermal_vector

SPEC = EnergySpectrum.from_values([0, 1, 2])


def test_curve_frozen():
    pt = curve_value(SPEC, 1.0, 0.3)
    assert pt.beta_bar == pytest.approx(0.6868254037590413, abs=1e-9)
    assert pt.delta_I == pytest.approx(0.25124675586321397, abs=1e-9)


def test_curve_endpoints():
    pts = max_correlation_curve(SPEC, 1.0, [0.0, 10.0])
    assert pts[0].delta_I == 0.0 and pts[0].beta_bar == 1.0
    S0 = entropy(thermal_vector(SPEC, 1.0).probs)
    assert pts[1].beta_bar == 0.0
    assert pts[1].delta_I == pytest.approx(2 * (math.log(3) - S0), abs=1e-12)


def test_curve_rejects_negative_budget():
    with pytest.raises(InvalidBudget):
        curve_value(SPEC, 1.0, -0.1)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.0, 8.0), st.floats(0.1, 5.0), st.floats(0.01, 0.99))
def test_curve_is_thermal_saturation(e2, beta, frac):
    spec = EnergySpectrum.from_values([0, 1, e2])
    bp = frac * beta
    dE = 2 * (mean_energy(spec, bp) - mean_energy(spec, beta))
    pt = curve_value(spec, beta, dE)
    assert pt.beta_bar == pytest.approx(bp, rel=1e-7, abs=1e-9)
    dI = 2 * (entropy(thermal_vector(spec, bp).probs) - entropy(thermal_vector(spec, beta).probs))
    assert pt.delta_I == pytest.approx(dI, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 8.0), st.floats(0.1, 5.0))
def test_curve_is_monotone(e2, beta):
    pts = max_correlation_curve(EnergySpectrum.from_values([0, 1, e2]), beta, np.linspace(0, 3, 20))
    dI = [p.delta_I for p in pts]
    assert all(b >= a - 1e-12 for a, b in zip(dI, dI[1:]))


def test_asym_frozen():
    sol = asym_pure_optimum(AsymmetricProblem.from_values([0, 1], [0, 1, 2], 0.5))
    assert np.array_equal(sol.effective_spectrum, [0.0, 2.0])
    assert sol.beta_of_c == pytest.approx(0.54930614433405485, abs=1e-9)
    assert sol.mutual_information == pytest.approx(1.1246702892376167, abs=1e-9)
    assert sol.mutual_information_closed == pytest.approx(sol.mutual_information, abs=1e-9)
    assert sol.energy == pytest.approx(0.5, abs=1e-9)


def test_asym_keeps_units():
    a = asym_pure_optimum(AsymmetricProblem.from_values([0, 2], [0, 2], 1.0))
    b = asym_pure_optimum(AsymmetricProblem.from_values([0, 1], [0, 1], 0.5))
    assert a.mutual_information == pytest.approx(b.mutual_information, abs=1e-12)
    assert a.beta_of_c == pytest.approx(b.beta_of_c / 2, rel=1e-9)


def test_asym_limits():
    zero = asym_pure_optimum(AsymmetricProblem.from_values([0, 1], [0, 1], 0.0))
    assert zero.beta_of_c == math.inf
    assert zero.mutual_information == 0.0 and zero.mutual_information_closed == 0.0
    flat = asym_pure_optimum(AsymmetricProblem.from_values([0, 0], [0, 0, 0], 0.3))
    assert flat.mutual_information == pytest.approx(2 * math.log(2))
    big = asym_pure_optimum(AsymmetricProblem.from_values([0, 1], [0, 1], 5.0))
    assert big.beta_of_c == 0.0 and big.mutual_information == pytest.approx(2 * math.log(2))
    with pytest.raises(InvalidBudget):
        AsymmetricProblem.from_values([0, 1], [0, 1], -1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.0, 5.0), min_size=1, max_size=3),
       st.lists(st.floats(0.0, 5.0), min_size=1, max_size=4), st.floats(0.01, 3.0))
def test_asym_identity(ga, gb, c):
    ea = np.concatenate([[0.0], np.cumsum(ga)])
    eb = np.concatenate([[0.0], np.cumsum(gb)])
    sol = asym_pure_optimum(AsymmetricProblem.from_values(ea, eb, c))
    if math.isfinite(sol.beta_of_c):
        assert sol.mutual_information_closed == pytest.approx(sol.mutual_information, abs=1e-9)
    assert sol.energy <= c + 1e-9
    assert sol.mutual_information <= 2 * math.log(min(ea.size, eb.size)) + 1e-12


def test_subadditivity_example():
    assert subadditivity_check(0.5, 0.7, 1.4, 0.1) is False
    assert subadditivity_check(0.5, 0.7, 0.9, 0.9) is True
