"""
Majorised-marginal construction in d=3 and the d=4 obstructions.

In d=3 every doubly stochastic M has a companion M~ with
``M (1 + Pi) = (1 + Pi) M~``, obtained by relabelling the anticyclic
permutations in a Birkhoff decomposition. Then ``M_q q + (1 + Pi) M~ r = M_q p``
so any target majorised by p is reachable with equal marginals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .block_unitary import lift_transforms
from .errors import CompanionFailure, NotMajorised, UnsupportedDimension
from .lcs import cyclic, labeled_permutations, perm_label, thermal_decomposition
from .lp import phase_one
from .majorize import birkhoff_decompose, check_doubly_stochastic, hlp_matrix, majorizes
from .spectra import thermal_vector

# anticyclic labels move 6 -> 2 -> 4 -> 6; cyclic ones (1, 3, 5) stay
COMPANION_LABEL = {1: 1, 3: 3, 5: 5, 6: 2, 2: 4, 4: 6}


@dataclass
class CompanionResult:
    matrix: np.ndarray
    residual: float
    weights: dict = field(default_factory=dict)


def companion_matrix_d3(M):
    M = check_doubly_stochastic(M)
    if M.shape != (3, 3):
        raise UnsupportedDimension("the companion relation is specific to d=3")
    perms = labeled_permutations(3)
    weights = {}
    for w, P in birkhoff_decompose(M):
        lab = perm_label(P)
        weights[lab] = weights.get(lab, 0.0) + w
    Mt = sum(w * perms[COMPANION_LABEL[lab]] for lab, w in weights.items())
    S = np.eye(3) + cyclic(3)
    residual = float(np.max(np.abs(M @ S - S @ Mt)))
    return CompanionResult(Mt, residual, weights)


def reach_majorised_marginal_d3(spectrum, beta, target, check_tol=1e-10):
    """Blocks whose two marginals both equal ``target`` (which must be majorised by p)."""
    p = thermal_vector(spectrum, beta).probs
    target = np.asarray(target, dtype=float)
    if p.size != 3:
        raise UnsupportedDimension("majorised construction is for d=3")
    if not majorizes(p, target):
        raise NotMajorised("target is not majorised by the thermal vector")
    dec = thermal_decomposition(spectrum, beta)
    Mq = hlp_matrix(p, target)
    comp = companion_matrix_d3(Mq)
    if comp.residual > check_tol:
        raise CompanionFailure(f"companion residual {comp.residual}")
    lhs = Mq @ dec.q + (np.eye(3) + cyclic(3)) @ comp.matrix @ dec.r[0]
    if np.max(np.abs(lhs - Mq @ p)) > check_tol:
        raise CompanionFailure("M_q q + (1+Pi) M_r r differs from M_q p")
    return lift_transforms(dec, Mq, [comp.matrix])


def build_stu_majorised(spectrum, beta, beta_prime):
    return reach_majorised_marginal_d3(spectrum, beta, thermal_vector(spectrum, beta_prime).probs)


# The 4x4 permutation without a companion in the Birkhoff polytope.
COUNTEREXAMPLE_M = np.array([[1, 0, 0, 0],
                             [0, 0, 0, 1],
                             [0, 1, 0, 0],
                             [0, 0, 1, 0]], dtype=float)


def _birkhoff_rows(d):
    """Row and column sum constraints on a row-major d x d variable."""
    rows = []
    for i in range(d):
        a = np.zeros((d, d))
        a[i, :] = 1
        rows.append(a.ravel())
    for j in range(d):
        a = np.zeros((d, d))
        a[:, j] = 1
        rows.append(a.ravel())
    return np.array(rows), np.ones(2 * d)


def companion_lp(M, rng=None):
    """Feasibility of ``M (1 + Pi) = (1 + Pi) X`` with X doubly stochastic."""
    d = M.shape[0]
    S = np.eye(d) + cyclic(d)
    A1, b1 = _birkhoff_rows(d)
    # (S X)_{ab} = sum_c S_{ac} X_{cb}
    A2 = np.kron(S, np.eye(d))
    b2 = (M @ S).ravel()
    A = np.vstack([A1, A2])
    b = np.concatenate([b1, b2])
    if rng is not None:
        order = rng.permutation(A.shape[0])
        A, b = A[order], b[order]
    return phase_one(A, b)


def companion_vector_lp(M, v, rng=None):
    """Feasibility of ``M (1 + Pi) v = (1 + Pi) X v`` with X doubly stochastic."""
    d = M.shape[0]
    S = np.eye(d) + cyclic(d)
    A1, b1 = _birkhoff_rows(d)
    # (X v)_c = sum_b X_{cb} v_b
    Xv = np.kron(np.eye(d), np.asarray(v, dtype=float)[None, :])
    A2 = S @ Xv
    b2 = M @ S @ np.asarray(v, dtype=float)
    A = np.vstack([A1, A2])
    b = np.concatenate([b1, b2])
    if rng is not None:
        order = rng.permutation(A.shape[0])
        A, b = A[order], b[order]
    return phase_one(A, b)


def counterexamples_d4(shuffles=10, seed=0):
    """LP certificates that the d=3 companion trick fails in d=4."""
    rng = np.random.default_rng(seed)
    v = np.array([1.0, 0.0, 0.0, 0.0])
    claim1 = companion_lp(COUNTEREXAMPLE_M)
    claim2 = companion_vector_lp(COUNTEREXAMPLE_M, v)
    shuffled1 = [companion_lp(COUNTEREXAMPLE_M, rng).gap for _ in range(shuffles)]
    shuffled2 = [companion_vector_lp(COUNTEREXAMPLE_M, v, rng).gap for _ in range(shuffles)]
    ident = companion_lp(np.eye(4))
    cyc = companion_lp(cyclic(4))
    return {
        "matrix": COUNTEREXAMPLE_M.tolist(),
        "claim1": {"feasible": claim1.feasible, "gap": claim1.gap,
                   "shuffled_gaps": shuffled1},
        "claim2": {"vector": v.tolist(), "lhs": (COUNTEREXAMPLE_M @ (np.eye(4) + cyclic(4)) @ v).tolist(),
                   "feasible": claim2.feasible, "gap": claim2.gap, "shuffled_gaps": shuffled2},
        "controls": {"identity": {"feasible": ident.feasible, "gap": ident.gap},
                     "cyclic": {"feasible": cyc.feasible, "gap": cyc.gap}},
        "certified": bool(not claim1.feasible and not claim2.feasible
                          and claim1.gap > 1e-6 and claim2.gap > 1e-6
                          and ident.feasible and cyc.feasible),
    }
