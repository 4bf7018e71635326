"""
Majorisation toolkit: predicates, constructive HLP matrices built from
T-transforms, Birkhoff decomposition, and an orthogonal Schur-Horn lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch, NotDoublyStochastic, NotMajorised, SumMismatch


def sort_desc(v):
    """Stable descending order: ties keep the original index order."""
    v = np.asarray(v, dtype=float)
    return np.argsort(-v, kind="stable")


def majorizes(y, x, tol=1e-12, sum_tol=1e-9):
    """True iff ``y`` majorises ``x`` (``x`` is more mixed than ``y``)."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if y.shape != x.shape:
        raise LengthMismatch(f"lengths differ: {y.size} vs {x.size}")
    scale = max(1.0, float(np.abs(y).sum()))
    if abs(y.sum() - x.sum()) > sum_tol * scale:
        raise SumMismatch(f"sums differ: {y.sum()} vs {x.sum()}")
    cy = np.cumsum(y[sort_desc(y)])
    cx = np.cumsum(x[sort_desc(x)])
    return bool(np.all(cx[:-1] <= cy[:-1] + tol * scale))


def weakly_majorizes(y, x, tol=1e-12):
    """Majorisation test that returns False instead of raising on unequal sums."""
    try:
        return majorizes(y, x, tol=tol)
    except (SumMismatch, LengthMismatch):
        return False


def is_doubly_stochastic(M, tol=1e-10):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    return bool(np.all(M >= -tol)
                and np.all(np.abs(M.sum(axis=0) - 1) <= tol)
                and np.all(np.abs(M.sum(axis=1) - 1) <= tol))


def check_doubly_stochastic(M, tol=1e-10):
    """Validate and clamp entries within rounding of [0, 1]."""
    M = np.asarray(M, dtype=float)
    if not is_doubly_stochastic(M, tol) or np.any(M > 1 + 1e-12):
        raise NotDoublyStochastic("matrix is not doubly stochastic")
    return np.clip(M, 0.0, 1.0)


@dataclass(frozen=True)
class TTransform:
    j: int
    k: int
    t: float

    def matrix(self, d):
        T = np.eye(d)
        s = 1.0 - self.t
        T[self.j, self.j] = T[self.k, self.k] = self.t
        T[self.j, self.k] = T[self.k, self.j] = s
        return T


@dataclass(frozen=True)
class TTransformSequence:
    """``M = T_m ... T_1 @ P``; ``P`` aligns the sorted orders of y and x."""

    steps: tuple
    perm: np.ndarray = field(repr=False)

    def matrix(self):
        M = self.perm.copy()
        d = M.shape[0]
        for s in self.steps:
            M = s.matrix(d) @ M
        return M


def _hlp_chain(ys, xs, tol):
    """
    T-transform chain taking sorted ``ys`` to sorted ``xs``.

    Each step picks the largest j with y_j > x_j and the smallest k > j
    with y_k < x_k, then moves ``min(y_j - x_j, x_k - y_k)`` from j to k.
    Returns (j, k, new_value_j, new_value_k) tuples in sorted positions.
    """
    v = ys.astype(float).copy()
    n = v.size
    steps = []
    for _ in range(4 * n):
        diff = v - xs
        over = np.nonzero(diff > tol)[0]
        if over.size == 0:
            break
        j = int(over[-1])
        under = [k for k in range(j + 1, n) if diff[k] < -tol]
        if not under:
            # rounding slack; everything else already matches
            break
        k = under[0]
        delta = min(diff[j], -diff[k])
        vj, vk = v[j] - delta, v[k] + delta
        if diff[j] <= -diff[k]:
            vj = xs[j]
        else:
            vk = xs[k]
        steps.append((j, k, vj, vk, v[j], v[k]))
        v[j], v[k] = vj, vk
    return steps


def _sorted_frames(y, x, tol):
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if not majorizes(y, x, tol=max(tol, 1e-12)):
        raise NotMajorised("y does not majorise x")
    return y, x, sort_desc(y), sort_desc(x)


def hlp_construct(y, x, tol=1e-10):
    """
    Doubly stochastic M with ``M @ y = x`` as a product of T-transforms.

    Returns
    -------
    (M, TTransformSequence)
    """
    y, x, sig, tau = _sorted_frames(y, x, tol)
    d = y.size
    chain = _hlp_chain(y[sig], x[tau], tol=1e-15)
    P = np.zeros((d, d))
    P[tau, sig] = 1.0
    steps = []
    for j, k, vj, vk, oj, ok in chain:
        gap = oj - ok
        t = 1.0 if gap <= 0 else 1.0 - (oj - vj) / gap
        steps.append(TTransform(int(tau[j]), int(tau[k]), float(min(1.0, max(0.0, t)))))
    seq = TTransformSequence(tuple(steps), P)
    M = seq.matrix()
    if np.max(np.abs(M @ y - x)) > max(tol, 1e-10) * max(1.0, np.abs(y).sum()):
        raise NotMajorised("HLP construction did not reach the target")
    return M, seq


def hlp_matrix(y, x, tol=1e-10):
    return hlp_construct(y, x, tol)[0]


def birkhoff_decompose(M, tol=1e-12):
    """
    Greedy Birkhoff-von Neumann decomposition.

    Each step takes a permutation supported on the positive entries (a
    maximum log-weight matching) with weight equal to its smallest entry.

    Returns
    -------
    list of (weight, permutation matrix)
    """
    M = check_doubly_stochastic(M, tol=1e-9)
    d = M.shape[0]
    R = M.copy()
    out = []
    for _ in range((d - 1) ** 2 + 1 + d):
        if R.max() <= tol:
            break
        with np.errstate(divide="ignore"):
            cost = np.where(R > tol, -np.log(np.maximum(R, 1e-300)), 1e6)
        rows, cols = linear_sum_assignment(cost)
        w = float(R[rows, cols].min())
        if w <= tol:
            break
        P = np.zeros((d, d))
        P[rows, cols] = 1.0
        out.append((w, P))
        R = R - w * P
        R[np.abs(R) <= tol] = 0.0
    recon = sum(w * P for w, P in out) if out else np.zeros_like(M)
    if np.max(np.abs(recon - M)) > 1e-9:
        raise NotDoublyStochastic("Birkhoff decomposition did not close")
    return out


def _rotate_to(A, i, l, target):
    """Givens rotation on plane (i, l) so that ``(G A G^T)[i, i] = target``."""
    a, c, b = A[i, i], A[l, l], A[i, l]
    m, h = 0.5 * (a + c), 0.5 * (a - c)
    R = math.hypot(h, b)
    d = A.shape[0]
    G = np.eye(d)
    if R == 0.0:
        return G
    phi = math.atan2(b, h)
    two_theta = math.acos(max(-1.0, min(1.0, (target - m) / R))) - phi
    cs, sn = math.cos(0.5 * two_theta), math.sin(0.5 * two_theta)
    G[i, i] = G[l, l] = cs
    G[i, l] = -sn
    G[l, i] = sn
    return G


def horn_lift(y, x, tol=1e-10):
    """
    Orthogonal U with ``diag(U diag(y) U^T) = x``.

    Runs the HLP T-transform chain on the diagonal, realising each step as a
    plane rotation. A rotation in plane (i, l) changes only diagonal entries
    i and l, and any value between them is reachable, so the chain composes.
    """
    y, x, sig, tau = _sorted_frames(y, x, tol)
    d = y.size
    chain = _hlp_chain(y[sig], x[tau], tol=1e-15)
    A = np.diag(y)
    U = np.eye(d)
    for j, k, vj, _vk, _oj, _ok in chain:
        G = _rotate_to(A, int(sig[j]), int(sig[k]), vj)
        A = G @ A @ G.T
        U = G @ U
    P = np.zeros((d, d))
    P[tau, sig] = 1.0
    return P @ U


def lift_diagonal(U, y):
    """diag(U diag(y) U^T) computed as (U o U) y."""
    U = np.asarray(U)
    return (U * U) @ np.asarray(y)
