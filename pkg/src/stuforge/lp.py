"""
Phase-1 simplex on a dense tableau with Bland's anti-cycling rule.

Solves the feasibility problem ``A x = b, x >= 0`` by minimising the sum of
artificial variables. The optimum of that auxiliary problem is the
infeasibility gap: zero iff the original system is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class PhaseOneResult:
    feasible: bool
    gap: float
    x: np.ndarray = field(repr=False)
    iterations: int
    basis: list = field(repr=False, default_factory=list)


def phase_one(A, b, feas_tol=1e-9, pivot_tol=1e-12, max_iter=None):
    A = np.array(A, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # rows 0..m-1 are constraints, row m is the reduced-cost row
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    if max_iter is None:
        max_iter = 50 * (n + m) + 1000

    it = 0
    while it < max_iter:
        costs = T[m, :n + m]
        entering = np.nonzero(costs < -pivot_tol)[0]
        if entering.size == 0:
            break
        col = int(entering[0])
        column = T[:m, col]
        pos = np.nonzero(column > pivot_tol)[0]
        if pos.size == 0:
            # unbounded direction cannot occur in phase 1; drop the column
            T[m, col] = 0.0
            continue
        ratios = T[pos, -1] / column[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-15 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        T[row] /= T[row, col]
        others = np.arange(m + 1) != row
        T[others] -= np.outer(T[others, col], T[row])
        basis[row] = col
        it += 1

    x_full = np.zeros(n + m)
    for r, var in enumerate(basis):
        x_full[var] = T[r, -1]
    x = np.maximum(x_full[:n], 0.0)
    gap = float(max(0.0, x_full[n:].sum()))
    return PhaseOneResult(gap <= feas_tol, gap, x, it, basis)
