import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stuforge.copies import (apply_two_site, build_step, log_schedule, pairing_schedule,
                             reduced_state, simulate_copies)
from stuforge.errors import DimensionBudgetExceeded, StepUnbuildable
from stuforge.oracle import random_orthogonal
from stuforge.spectra import EnergySpectrum


def test_pairing_n3():
    sched = pairing_schedule(3)
    assert len(sched.rounds) == 3
    assert len(set(sched.pairs())) == 9


@pytest.mark.parametrize("n", range(1, 65))
def test_pairing_never_repeats(n):
    assert pairing_schedule(n).check()


def test_pairing_rejects_zero():
    with pytest.raises(ValueError):
        pairing_schedule(0)


def test_log_schedule():
    s = log_schedule(4.0, 1.0, 2)
    assert s == pytest.approx([2.0, 1.0])
    assert log_schedule(1.0, 0.0, 2) == pytest.approx([0.5, 0.0])


def test_unknown_method_and_unbuildable():
    spec = EnergySpectrum.from_values([0, 0.01, 0.02, 50])
    with pytest.raises(ValueError):
        build_step("magic", spec, 1.0, 0.5)
    with pytest.raises(StepUnbuildable):
        build_step("norm", spec, 1.0, 0.5)


def test_budget_guard():
    with pytest.raises(DimensionBudgetExceeded):
        simulate_copies(EnergySpectrum.from_values([0, 1, 2]), 1.0, 4, [0.8, 0.6, 0.4, 0.2])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_two_site_action_matches_kron(seed):
    rng = np.random.default_rng(seed)
    d, N = 2, 3
    A = random_orthogonal(d ** N, rng)
    rho = A @ np.diag(rng.dirichlet(np.ones(d ** N))) @ A.T
    W = random_orthogonal(d * d, rng)
    full = np.kron(W, np.eye(d))
    out = apply_two_site(rho, W, d, N, 0, 1)
    assert np.allclose(out, full @ rho @ full.T, atol=1e-12)
    assert np.allclose(reduced_state(out, d, N, [2]), reduced_state(rho, d, N, [2]), atol=1e-12)


def test_reduced_state_of_product():
    p, q = np.array([0.7, 0.3]), np.array([0.6, 0.4])
    rho = np.diag(np.kron(p, q))
    assert np.allclose(reduced_state(rho, 2, 2, [0]), np.diag(p))
    assert np.allclose(reduced_state(rho, 2, 2, [1]), np.diag(q))


def test_single_round_protocols_pass():
    spec = EnergySpectrum.from_values([0, 1])
    assert simulate_copies(spec, 2.0, 1, [1.0]).passed
    assert simulate_copies(spec, 2.0, 2, [1.5, 1.0]).passed


def test_d3_two_copies_pass():
    spec = EnergySpectrum.from_values([0, 1, 2])
    trace = simulate_copies(spec, 2.0, 2, log_schedule(2.0, 1.0, 2))
    assert trace.passed
    assert max(r.marginal_deviation for r in trace.rounds) <= 1e-9


def test_d2_three_copies_third_round_meets_correlated_pair():
    # the third round pairs A_i with B_{i+2}; those were linked through earlier partners
    trace = simulate_copies(EnergySpectrum.from_values([0, 1]), 2.0, 3, log_schedule(2.0, 0.5, 3))
    assert trace.rounds[0].passed and trace.rounds[1].passed
    assert trace.rounds[2].pair_product_deviation > 1e-3
    assert not trace.passed
    assert all(r.entropy_drift <= 1e-9 for r in trace.rounds)
    assert trace.to_json()["passed"] is False
    assert math.isclose(trace.betas[-1], 0.5)
