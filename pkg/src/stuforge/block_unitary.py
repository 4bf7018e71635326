"""
Block unitaries on the LCS decomposition and STU verification.

Block i acts on span{|j, j+i>}. Block 0 is U_q. A block-form joint state is
the list of d x d matrices ``U_i diag(v_i) U_i^T``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import verify_tol
from .errors import DimensionMismatch
from .lcs import (decompose, equal_marginal_vector, is_midpoint, n_free, JointDiagonal)
from .majorize import horn_lift
from .spectra import EnergySpectrum, entropy, thermal_vector


def _lcs_index(d, i, j):
    """Flat index of |j, j+i> in the row-major A (x) B basis."""
    return j * d + (j + i) % d


@dataclass(frozen=True)
class BlockUnitary:
    blocks: tuple

    @property
    def d(self):
        return len(self.blocks)

    @classmethod
    def identity(cls, d):
        return cls(tuple(np.eye(d) for _ in range(d)))

    def check(self, tol=1e-10):
        d = self.d
        for U in self.blocks:
            if U.shape != (d, d):
                raise DimensionMismatch("every block must be d x d")
            if np.max(np.abs(U.T @ U - np.eye(d))) > tol:
                raise DimensionMismatch("block is not orthogonal")

    def dense(self):
        d = self.d
        W = np.zeros((d * d, d * d))
        for i, U in enumerate(self.blocks):
            idx = [_lcs_index(d, i, j) for j in range(d)]
            W[np.ix_(idx, idx)] = U
        return W

    def to_json(self):
        return {"d": self.d, "blocks": [U.tolist() for U in self.blocks]}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(np.array(b, dtype=float) for b in obj["blocks"]))


@dataclass(frozen=True)
class JointState:
    blocks: tuple

    @property
    def d(self):
        return len(self.blocks)

    @classmethod
    def from_joint_diagonal(cls, joint):
        dec = decompose(joint)
        return cls(tuple(np.diag(dec.component(i)) for i in range(dec.d)))

    def dense(self):
        d = self.d
        rho = np.zeros((d * d, d * d))
        for i, B in enumerate(self.blocks):
            idx = [_lcs_index(d, i, j) for j in range(d)]
            rho[np.ix_(idx, idx)] = B
        return rho

    @classmethod
    def from_dense(cls, rho):
        n = rho.shape[0]
        d = int(round(np.sqrt(n)))
        blocks = []
        for i in range(d):
            idx = [_lcs_index(d, i, j) for j in range(d)]
            blocks.append(np.array(rho[np.ix_(idx, idx)]))
        return cls(tuple(blocks))

    def eigenvalues(self):
        return np.concatenate([np.linalg.eigvalsh(0.5 * (B + B.T)) for B in self.blocks])

    def trace(self):
        return float(sum(np.trace(B) for B in self.blocks))


def apply_blocks(blocks, dec):
    if blocks.d != dec.d:
        raise DimensionMismatch(f"blocks have d={blocks.d}, state has d={dec.d}")
    return JointState(tuple(U @ np.diag(dec.component(i)) @ U.T
                            for i, U in enumerate(blocks.blocks)))


def assemble_and_apply(blocks, spectrum, beta):
    """``U_AB (tau (x) tau) U_AB^T`` in block form."""
    return apply_blocks(blocks, decompose(JointDiagonal.thermal(spectrum, beta)))


def partial_trace_marginals(state):
    """Reduced states of A and B as d x d matrices."""
    if isinstance(state, JointState):
        d = state.d
        pA = np.zeros(d)
        pB = np.zeros(d)
        for i, B in enumerate(state.blocks):
            diag = np.diag(B)
            pA += diag
            pB += np.roll(diag, i)
        return np.diag(pA), np.diag(pB)
    return dense_partial_traces(np.asarray(state))


def dense_partial_traces(rho):
    n = rho.shape[0]
    d = int(round(np.sqrt(n)))
    t = rho.reshape(d, d, d, d)
    return np.einsum("ajbj->ab", t), np.einsum("iaib->ab", t)


def lift_transforms(dec, Mq, Mr):
    """
    Blocks realising the equal-marginal transform ``(Mq, Mr)``.

    Each free block is horn-lifted on its own subspace vector, so its
    post-rotation diagonal is ``M v``. Partner blocks are the conjugates
    ``Pi^i U Pi^-i``; the even-d midpoint targets ``(1 + Pi^{d/2}) M r / 2``.
    """
    d = dec.d
    blocks = [None] * d
    blocks[0] = horn_lift(dec.q, Mq @ dec.q)
    for i in range(1, n_free(d) + 1):
        r = dec.r[i - 1]
        t = Mr[i - 1] @ r
        if is_midpoint(i, d):
            t = 0.5 * (t + np.roll(t, i))
            blocks[i] = horn_lift(r, t)
            continue
        U = horn_lift(r, t)
        blocks[i] = U
        P = np.roll(np.eye(d), i, axis=0)
        blocks[d - i] = P @ U @ P.T
    return BlockUnitary(tuple(blocks))


def blocks_for_transform(spectrum, beta, Mq, Mr):
    dec = decompose(JointDiagonal.thermal(spectrum, beta))
    return lift_transforms(dec, Mq, Mr), equal_marginal_vector(dec, Mq, Mr)


@dataclass
class StuReport:
    d: int
    beta: float
    beta_prime: float
    marginal_A: list
    marginal_B: list
    deviation_A: float
    deviation_B: float
    leakage: float
    dense_crosscheck: float
    entropy_before: float
    entropy_after: float
    min_eigenvalue: float
    delta_E: float
    delta_E_global: float
    delta_S_A: float
    delta_S_B: float
    delta_I: float
    tol: float
    passed: bool = field(default=False)

    @property
    def deviation(self):
        return max(self.deviation_A, self.deviation_B)

    def to_json(self):
        return json.loads(json.dumps(asdict(self), default=float))

    CSV_HEADER = ("beta", "beta_prime", "deviation_A", "deviation_B", "delta_E", "delta_I", "pass")

    def csv_row(self):
        buf = io.StringIO()
        csv.writer(buf).writerow([repr(self.beta), repr(self.beta_prime), repr(self.deviation_A),
                                  repr(self.deviation_B), repr(self.delta_E), repr(self.delta_I),
                                  int(self.passed)])
        return buf.getvalue().strip()


def verify_stu(blocks, spectrum, beta, beta_prime, tol=None):
    """Apply ``blocks`` to tau(beta) (x) tau(beta) and compare with tau(beta')."""
    tol = verify_tol() if tol is None else tol
    spec = spectrum if isinstance(spectrum, EnergySpectrum) else EnergySpectrum.from_values(spectrum)
    blocks.check()
    p = thermal_vector(spec, beta).probs
    target = thermal_vector(spec, beta_prime).probs
    state = assemble_and_apply(blocks, spec, beta)
    rhoA, rhoB = partial_trace_marginals(state)
    pA, pB = np.diag(rhoA).copy(), np.diag(rhoB).copy()

    rho = state.dense()
    dA, dB = dense_partial_traces(rho)
    leak = max(np.max(np.abs(dA - np.diag(np.diag(dA)))), np.max(np.abs(dB - np.diag(np.diag(dB)))))
    cross = max(np.max(np.abs(np.diag(dA) - pA)), np.max(np.abs(np.diag(dB) - pB)))

    E = spec.array
    ev = state.eigenvalues()
    S0 = entropy(p)
    dE = float((pA + pB) @ E - 2 * p @ E)
    Hglob = np.add.outer(E, E).ravel()
    dE_glob = float(np.diag(rho) @ Hglob - 2 * p @ E)
    dSA = entropy(pA) - S0
    dSB = entropy(pB) - S0
    devA = float(np.max(np.abs(pA - target)))
    devB = float(np.max(np.abs(pB - target)))
    report = StuReport(
        d=spec.d, beta=float(beta), beta_prime=float(beta_prime),
        marginal_A=pA.tolist(), marginal_B=pB.tolist(),
        deviation_A=devA, deviation_B=devB, leakage=float(leak), dense_crosscheck=float(cross),
        entropy_before=2 * S0, entropy_after=entropy(np.clip(ev, 0, None)),
        min_eigenvalue=float(ev.min()), delta_E=dE, delta_E_global=dE_glob,
        delta_S_A=dSA, delta_S_B=dSB, delta_I=dSA + dSB, tol=tol)
    report.passed = bool(devA <= tol and devB <= tol and leak <= tol and cross <= tol
                         and report.min_eigenvalue >= -1e-9 and abs(state.trace() - 1) <= 1e-10)
    return report
