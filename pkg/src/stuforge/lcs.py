"""
Locally classical subspaces (LCS) of a diagonal two-party state.

The joint diagonal p_{ij} splits into ``q_j = p_{jj}`` and
``(r_i)_j = p_{j, j+i mod d}``. Marginal A is ``q + sum r_i`` and marginal B
is ``q + sum Pi^i r_i`` with the cyclic shift ``(Pi v)_j = v_{j-1}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotLatinSquare
from .spectra import thermal_vector


def cyclic(d, power=1):
    """Dense matrix of Pi^power, where ``Pi[i, j] = 1`` iff ``i = j + 1 mod d``."""
    return np.roll(np.eye(d), power % d, axis=0)


@dataclass(frozen=True)
class CyclicPermutation:
    d: int
    power: int = 1

    @property
    def matrix(self):
        return cyclic(self.d, self.power)

    def apply(self, v):
        return np.roll(np.asarray(v), self.power % self.d)

    def inverse(self):
        return CyclicPermutation(self.d, -self.power % self.d)


def n_free(d):
    """Number of independent off-diagonal subspaces, (d-1)//2 or d/2."""
    return d // 2


def prefactor(i, d):
    """(floor(2i/d) + 1)^-1: 1/2 for the even-d midpoint subspace, else 1."""
    return 1.0 / (2 * i // d + 1)


def is_midpoint(i, d):
    return d % 2 == 0 and 2 * i == d


@dataclass(frozen=True)
class JointDiagonal:
    """Diagonal of a two-party state as a d x d array ``p[i, j]``."""

    entries: np.ndarray

    @property
    def d(self):
        return self.entries.shape[0]

    @classmethod
    def product(cls, pA, pB=None):
        pA = np.asarray(pA, dtype=float)
        pB = pA if pB is None else np.asarray(pB, dtype=float)
        return cls(np.outer(pA, pB))

    @classmethod
    def thermal(cls, spectrum, beta):
        return cls.product(thermal_vector(spectrum, beta).probs)


@dataclass(frozen=True)
class LcsDecomposition:
    q: np.ndarray
    r: np.ndarray  # shape (d-1, d); r[i-1] is r_i
    symmetric: bool

    @property
    def d(self):
        return self.q.size

    def component(self, i):
        return self.q if i == 0 else self.r[i - 1]

    def norms(self):
        out = {"q": float(self.q.sum())}
        for i in range(1, self.d):
            out[f"r_{i}"] = float(self.r[i - 1].sum())
        return out

    def to_json(self):
        return {"d": self.d, "q": self.q.tolist(), "r": self.r.tolist(),
                "norms": self.norms()}

    @classmethod
    def from_json(cls, obj):
        q = np.array(obj["q"], dtype=float)
        r = np.array(obj["r"], dtype=float).reshape(len(q) - 1, len(q))
        return cls(q, r, _is_symmetric(q, r))


def _is_symmetric(q, r, tol=1e-12):
    d = q.size
    for i in range(1, d):
        if np.max(np.abs(r[d - i - 1] - np.roll(r[i - 1], i))) > tol:
            return False
    return True


def decompose(joint):
    """Split a joint diagonal into q and r_1..r_{d-1}."""
    P = joint.entries if isinstance(joint, JointDiagonal) else np.asarray(joint, float)
    d = P.shape[0]
    if P.shape != (d, d):
        raise DimensionMismatch("joint diagonal must be square")
    idx = np.arange(d)
    q = P[idx, idx].copy()
    r = np.array([P[idx, (idx + i) % d] for i in range(1, d)])
    return LcsDecomposition(q, r.reshape(d - 1, d), _is_symmetric(q, r.reshape(d - 1, d)))


def thermal_decomposition(spectrum, beta):
    return decompose(JointDiagonal.thermal(spectrum, beta))


def reconstruct_marginals(dec):
    pA = dec.q + dec.r.sum(axis=0)
    pB = dec.q.copy()
    for i in range(1, dec.d):
        pB = pB + np.roll(dec.r[i - 1], i)
    return pA, pB


def equal_marginal_vector(dec, Mq, Mr):
    """
    Marginal produced by the transform engine under the equal-marginal rule.

    ``Mr[i-1]`` acts on r_i for i = 1..d//2; the partner subspaces follow
    from M_{r_{d-i}} = Pi^i M_{r_i} Pi^-i.
    """
    d = dec.d
    out = Mq @ dec.q
    for i in range(1, n_free(d) + 1):
        t = Mr[i - 1] @ dec.r[i - 1]
        out = out + prefactor(i, d) * (t + np.roll(t, i))
    return out


def general_transform_marginals(dec, matrices):
    """Both marginals for an arbitrary list ``[M_q, M_{r_1}, ..., M_{r_{d-1}}]``."""
    d = dec.d
    pA = matrices[0] @ dec.q
    pB = pA.copy()
    for i in range(1, d):
        t = matrices[i] @ dec.r[i - 1]
        pA = pA + t
        pB = pB + np.roll(t, i)
    return pA, pB


# Permutation labels. d=3 follows the explicit enumeration used for the
# companion relations; larger d uses lexicographic order of the row image.
_D3_ROWS = ((0, 1, 2), (0, 2, 1), (1, 2, 0), (2, 1, 0), (2, 0, 1), (1, 0, 2))


def perm_matrix(rows):
    """Matrix with a 1 at ``(i, rows[i])``."""
    d = len(rows)
    M = np.zeros((d, d))
    M[np.arange(d), list(rows)] = 1.0
    return M


@lru_cache(maxsize=None)
def permutation_rows(d):
    if d == 3:
        return _D3_ROWS
    return tuple(itertools.permutations(range(d)))


def labeled_permutations(d):
    """Dict ``label -> matrix`` with labels 1..d!."""
    return {k + 1: perm_matrix(rows) for k, rows in enumerate(permutation_rows(d))}


def perm_label(M):
    rows = tuple(int(c) for c in np.argmax(np.asarray(M), axis=1))
    return permutation_rows(len(rows)).index(rows) + 1


@dataclass(frozen=True)
class LatinSquareLcs:
    """Family of permutations P_i with ``P_i(j)`` a Latin square."""

    perms: tuple

    @property
    def d(self):
        return len(self.perms)

    def scatter(self, i):
        """Matrix sending entry j of a vector to index P_i(j) (P_i^-1 in matrix form)."""
        d = self.d
        M = np.zeros((d, d))
        M[list(self.perms[i]), np.arange(d)] = 1.0
        return M


def latin_square_lcs(perms):
    perms = tuple(tuple(int(v) for v in p) for p in perms)
    d = len(perms)
    grid = np.array(perms)
    if grid.shape != (d, d):
        raise NotLatinSquare("need d permutations of length d")
    target = set(range(d))
    for row in grid:
        if set(row.tolist()) != target:
            raise NotLatinSquare(f"row {row.tolist()} repeats a symbol")
    for col in grid.T:
        if set(col.tolist()) != target:
            raise NotLatinSquare(f"column {col.tolist()} repeats a symbol")
    return LatinSquareLcs(perms)


def cyclic_latin_square(d):
    return latin_square_lcs([[(j + i) % d for j in range(d)] for i in range(d)])


def general_marginals(lcs, matrices, joint):
    """pA = sum M_i r~_i and pB = sum P_i^-1 M_i r~_i with (r~_i)_j = p_{j, P_i(j)}."""
    P = joint.entries if isinstance(joint, JointDiagonal) else np.asarray(joint, float)
    d = lcs.d
    if P.shape != (d, d) or len(matrices) != d:
        raise DimensionMismatch("matrices and joint must match the Latin square size")
    idx = np.arange(d)
    pA = np.zeros(d)
    pB = np.zeros(d)
    for i in range(d):
        rt = P[idx, list(lcs.perms[i])]
        t = np.asarray(matrices[i]) @ rt
        pA += t
        pB += lcs.scatter(i) @ t
    return pA, pB
