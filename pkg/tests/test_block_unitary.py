import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from stuforge.block_unitary import (BlockUnitary, JointState, assemble_and_apply,
                                    dense_partial_traces, lift_transforms, partial_trace_marginals,
                                    verify_stu)
from stuforge.errors import DimensionMismatch
from stuforge.lcs import JointDiagonal, cyclic, n_free, thermal_decomposition
from stuforge.oracle import random_orthogonal
from stuforge.spectra import EnergySpectrum, entropy, thermal_vector

gaps = arrays(np.float64, st.integers(1, 4), elements=st.floats(0.05, 4.0))


def _spec(g):
    return EnergySpectrum.from_values(np.concatenate([[0.0], np.cumsum(g)]))


def test_dense_is_orthogonal_and_block_placed():
    rng = np.random.default_rng(0)
    bu = BlockUnitary(tuple(random_orthogonal(3, rng) for _ in range(3)))
    W = bu.dense()
    assert np.allclose(W.T @ W, np.eye(9))
    # block 1 acts on |0,1>, |1,2>, |2,0>
    idx = [1, 5, 6]
    assert np.allclose(W[np.ix_(idx, idx)], bu.blocks[1])


def test_identity_is_trivial_stu():
    spec = EnergySpectrum.from_values([0, 1, 2])
    rep = verify_stu(BlockUnitary.identity(3), spec, 1.0, 1.0)
    assert rep.passed and rep.deviation <= 1e-15
    assert rep.delta_E == 0.0 and abs(rep.delta_I) < 1e-15


def test_non_orthogonal_block_rejected():
    bad = BlockUnitary((np.eye(2), 2 * np.eye(2)))
    with pytest.raises(DimensionMismatch):
        verify_stu(bad, EnergySpectrum.from_values([0, 1]), 1.0, 0.5)


def test_json_roundtrip():
    rng = np.random.default_rng(1)
    bu = BlockUnitary(tuple(random_orthogonal(2, rng) for _ in range(2)))
    back = BlockUnitary.from_json(bu.to_json())
    assert all(np.array_equal(a, b) for a, b in zip(bu.blocks, back.blocks))


def test_state_dense_roundtrip():
    p = np.array([0.5, 0.3, 0.2])
    st_ = JointState.from_joint_diagonal(JointDiagonal.product(p))
    back = JointState.from_dense(st_.dense())
    assert all(np.array_equal(a, b) for a, b in zip(st_.blocks, back.blocks))
    assert np.allclose(np.diag(st_.dense()), np.kron(p, p))


@settings(max_examples=40, deadline=None)
@given(gaps, st.floats(0.05, 5.0), st.integers(0, 10 ** 6))
def test_block_and_dense_marginals_agree(g, beta, seed):
    spec = _spec(g)
    d = spec.d
    rng = np.random.default_rng(seed)
    bu = BlockUnitary(tuple(random_orthogonal(d, rng) for _ in range(d)))
    state = assemble_and_apply(bu, spec, beta)
    rA, rB = partial_trace_marginals(state)
    W = bu.dense()
    p = thermal_vector(spec, beta).probs
    rho = W @ np.diag(np.kron(p, p)) @ W.T
    dA, dB = dense_partial_traces(rho)
    assert np.allclose(rA, dA, atol=1e-13) and np.allclose(rB, dB, atol=1e-13)
    # block unitaries never create local coherences
    assert np.allclose(dA, np.diag(np.diag(dA)), atol=1e-13)
    ev = np.sort(np.linalg.eigvalsh(rho))
    assert np.allclose(ev, np.sort(np.kron(p, p)), atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(gaps, st.floats(0.05, 5.0))
def test_identity_lift_reproduces_state(g, beta):
    spec = _spec(g)
    d = spec.d
    dec = thermal_decomposition(spec, beta)
    bu = lift_transforms(dec, np.eye(d), [np.eye(d)] * n_free(d))
    rep = verify_stu(bu, spec, beta, beta)
    assert rep.passed
    assert rep.entropy_after == pytest.approx(2 * entropy(thermal_vector(spec, beta).probs), abs=1e-12)


def test_partner_blocks_are_cyclic_conjugates():
    spec = EnergySpectrum.from_values([0, 1, 2.5, 3, 4])
    dec = thermal_decomposition(spec, 1.0)
    uni = np.full((5, 5), 0.2)
    bu = lift_transforms(dec, uni, [uni, uni])
    for i in (1, 2):
        P = cyclic(5, i)
        assert np.allclose(bu.blocks[5 - i], P @ bu.blocks[i] @ P.T)
