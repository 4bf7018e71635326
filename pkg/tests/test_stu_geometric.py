import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stuforge.block_unitary import verify_stu
from stuforge.errors import InvalidPreimage, SignCheckFailure, TooLarge, UnsupportedDimension
from stuforge.spectra import EnergySpectrum, thermal_vector
from stuforge.stu_geometric import (build_stu_geometric, convexity_certify, curve_coefficients,
                                    d4_five_point_geometry, d4_sign_checks, d5_region_check,
                                    from_coords, hull_membership, partner_point_d3,
                                    ratio_monotonicity, shifted_coords, target_vertices,
                                    to_coords, vertex_set, vertex_transforms)

probs = arrays(np.float64, st.integers(2, 7), elements=st.floats(0.01, 1.0))


def test_d3_coordinates():
    assert np.allclose(to_coords([1, 0, 0]), [-1, -1])
    assert np.allclose(to_coords([0, 1, 0]), [1, -1])
    assert np.allclose(to_coords([0, 0, 1]), [0, 2])
    assert np.allclose(to_coords(np.full(5, 0.2)), 0.0)


def test_invalid_preimage():
    with pytest.raises(InvalidPreimage):
        from_coords([3.0, 0.0])


@settings(max_examples=80, deadline=None)
@given(probs)
def test_coordinate_roundtrip(w):
    p = w / w.sum()
    assert np.allclose(from_coords(to_coords(p)), p, atol=1e-12)
    assert np.allclose(shifted_coords(p) - 1.0, to_coords(p), atol=1e-12)


def test_vertex_counts():
    assert vertex_set(EnergySpectrum.from_values([0, 1, 2]), 1.0).count == 36
    vs = vertex_set(EnergySpectrum.from_values([0, 1, 1.7, 2.9]), 1.0)
    assert vs.raw_count == 13824 and vs.count == 1728
    # equal gaps make some generator combinations coincide
    assert vertex_set(EnergySpectrum.from_values([0, 1, 2, 3]), 1.0).count == 864
    assert vs.to_csv().splitlines()[0] == "x0,x1,x2,label"


def test_vertex_set_limit():
    with pytest.raises(TooLarge):
        vertex_set(EnergySpectrum.from_values([0, 1, 2, 3, 4]), 1.0)


@pytest.mark.parametrize("E, beta, beta_prime", [([0, 1, 2], 1.0, 0.4), ([0, 1, 1.7, 2.9], 1.0, 0.0)])
def test_thermal_points_are_inside(E, beta, beta_prime):
    spec = EnergySpectrum.from_values(E)
    vs = vertex_set(spec, beta)
    cert = hull_membership(to_coords(thermal_vector(spec, beta_prime).probs), vs)
    assert cert.feasible and cert.residual <= 1e-9
    assert sum(cert.weights.values()) == pytest.approx(1.0, abs=1e-9)


def test_point_outside_hull_has_gap():
    spec = EnergySpectrum.from_values([0, 1, 2])
    cert = hull_membership(to_coords([0.99, 0.01, 0.0]), vertex_set(spec, 1.0))
    assert not cert.feasible and cert.gap > 1e-6


def test_curve_coefficients_frozen():
    a = curve_coefficients(EnergySpectrum.from_values([0, 1, 2, 3]), 1.0, 0.5).a
    ref = [0.43989203493927737, 0.12096238853535036, 0.12035473707436452, 0.31879083945100775]
    assert np.allclose(a, ref, rtol=0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 5), elements=st.floats(0.05, 5.0)),
       st.floats(0.05, 8.0), st.floats(0.0, 0.99))
def test_curve_coefficients_are_convex_weights(g, beta, frac):
    spec = EnergySpectrum.from_values(np.concatenate([[0.0, 1.0], 1.0 + np.cumsum(g)]))
    c = curve_coefficients(spec, beta, frac * beta)
    assert np.all(c.a >= 0) and c.a.sum() == pytest.approx(1.0, abs=1e-10)
    pts = np.array([to_coords(v) for v in target_vertices(spec, beta)])
    assert np.allclose(c.a @ pts, to_coords(thermal_vector(spec, frac * beta).probs), atol=1e-10)


def test_ratio_monotonicity_sign():
    spec = EnergySpectrum.from_values([0, 1, 2.3, 5.1, 6])
    assert ratio_monotonicity(spec, np.geomspace(0.05, 10, 30)) <= 1e-9


@pytest.mark.parametrize("E", [[0, 1, 2], [0, 1, 7.5], [0, 1, 1.7, 2.9], [0, 1, 1.2, 5]])
def test_convexity_certificate(E):
    rep = convexity_certify(EnergySpectrum.from_values(E), n=25)
    assert rep["max_rel_dcoords"] <= 1e-6
    assert rep["max_rel_df"] <= 1e-6
    assert rep["max_rel_second"] <= 1e-5
    assert rep["sign_violations"] == 0


def test_d3_second_derivative_closed_form():
    rep = convexity_certify(EnergySpectrum.from_values([0, 1, 3.3]), n=20)
    assert max(rep["closed_form_rel"]) <= 1e-10


def test_d4_closed_forms_frozen():
    closed = d4_sign_checks(thermal_vector(EnergySpectrum.from_values([0, 1, 2, 3]), 1.0).probs)
    assert closed["AO_x_AE"] == pytest.approx(0.23876581234452693, abs=1e-12)
    assert closed["EO_x_ED"] == pytest.approx(0.1062634064469435, abs=1e-12)
    assert closed["x_B"] == pytest.approx(0.30999276736365321, abs=1e-12)


def test_d4_five_point_signs():
    geo = d4_five_point_geometry(EnergySpectrum.from_values([0, 1, 1.7, 2.9]), 1.0)
    num = geo["numeric"]
    assert num["x_B"] >= 0 and num["x_C"] >= 0 and num["y_D"] >= 0 and num["x_E"] <= 0
    assert min(num["AO_x_AE"], num["EO_x_ED"], num["DO_x_DC"]) >= 0
    assert num["x_B"] == pytest.approx(geo["closed"]["x_B"], rel=1e-12)


@pytest.mark.parametrize("E", [[0, 1], [0, 1, 2], [0, 1, 1.7, 2.9], [0, 1, 1.2, 5]])
def test_vertex_transforms_hit_targets(E):
    spec = EnergySpectrum.from_values(E)
    for vt, v in zip(vertex_transforms(spec, 1.3), target_vertices(spec, 1.3)):
        assert np.allclose(vt.point, v, atol=1e-12), vt.name


@pytest.mark.parametrize("E, beta, beta_prime", [
    ([0, 1], 2.0, 0.5),
    ([0, 1, 2], 1.35, 0.5),
    ([0, 1, 2], 3.0, 0.0),
    ([0, 1, 2], 1.35, 0.6),
    ([0, 1, 1.7, 2.9], 1.0, 0.4),
    ([0, 1, 1.2, 5], 2.0, 0.1),
    ([0, 1, 2, 3], 4.0, 2.0),
])
def test_geometric_builds(E, beta, beta_prime):
    spec = EnergySpectrum.from_values(E)
    rep = verify_stu(build_stu_geometric(spec, beta, beta_prime), spec, beta, beta_prime)
    assert rep.passed and rep.deviation <= 1e-9


def test_geometric_limits():
    spec = EnergySpectrum.from_values([0, 1, 2])
    assert verify_stu(build_stu_geometric(spec, 1.0, 1.0), spec, 1.0, 1.0).passed
    with pytest.raises(UnsupportedDimension):
        build_stu_geometric(EnergySpectrum.from_values([0, 1, 2, 3, 4]), 1.0, 0.5)
    # at beta = inf the curve ratios degenerate and the LP route takes over
    rep = verify_stu(build_stu_geometric(spec, math.inf, 1.0), spec, math.inf, 1.0)
    assert rep.passed


def test_partner_point_mirrors_x():
    spec = EnergySpectrum.from_values([0, 1, 2])
    partner = partner_point_d3(spec, 1.35)
    thermal = to_coords(thermal_vector(spec, 1.35).probs)
    assert partner[1] == pytest.approx(thermal[1], abs=1e-12)
    assert partner[0] >= 0 > thermal[0]


def test_d5_resolved_at_low_temperature():
    rep = d5_region_check(EnergySpectrum.from_values([0, 1, 2, 3, 4]), 2.0, 1.0)
    assert rep["resolved"]
    assert max(rep["vertex_errors"]) <= 1e-12
    assert rep["stu"]["passed"]


def test_d5_unresolved_at_high_temperature():
    rep = d5_region_check(EnergySpectrum.from_values([0, 1, 2, 3, 4]), 0.3)
    assert not rep["resolved"]
    assert "stu" not in rep


def test_d5_zero_denominator_reported():
    rep = d5_region_check(EnergySpectrum.from_values([0, 1, 1, 1, 1]), 1.0)
    assert "not_constructible" in rep["vertices"]["v3"]["failed_conditions"]
    assert not rep["resolved"]


def test_d5_sign_guard_for_bad_order():
    with pytest.raises(ValueError):
        curve_coefficients(EnergySpectrum.from_values([0, 1, 2]), 0.5, 1.0)
    assert issubclass(SignCheckFailure, AssertionError)
