"""
Brute-force cross-checks: random block unitaries against the vertex
polytope, agreement between builders, and random pure states against the
asymmetric optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .block_unitary import BlockUnitary, apply_blocks, partial_trace_marginals, verify_stu
from .bounds import asym_pure_optimum
from .errors import StuforgeError, UnsupportedDimension
from .lcs import is_midpoint, n_free, thermal_decomposition
from .majorize import horn_lift
from .spectra import entropy
from .stu_geometric import hull_membership, to_coords, vertex_set


def random_orthogonal(n, rng):
    """QR of a Gaussian matrix with the sign of diag(R) folded into Q."""
    Z = rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    return Q * np.sign(np.diag(R))


def random_symmetric_blocks(dec, rng):
    """
    Random blocks that keep both marginals equal.

    Free blocks are random orthogonals; partners are their cyclic
    conjugates. The even-d midpoint block is lifted onto the symmetrised
    diagonal of a random orthogonal, so it stays equal-marginal as well.
    """
    d = dec.d
    blocks = [None] * d
    blocks[0] = random_orthogonal(d, rng)
    for i in range(1, n_free(d) + 1):
        V = random_orthogonal(d, rng)
        if is_midpoint(i, d):
            r = dec.r[i - 1]
            t = (V * V) @ r
            blocks[i] = horn_lift(r, 0.5 * (t + np.roll(t, i)))
            continue
        P = np.roll(np.eye(d), i, axis=0)
        blocks[i] = V
        blocks[d - i] = P @ V @ P.T
    return BlockUnitary(tuple(blocks))


@dataclass
class ReachabilitySample:
    seed: int
    count: int
    points: np.ndarray
    inside: np.ndarray
    max_asymmetry: float
    blocks: list = field(default_factory=list, repr=False)

    @property
    def escapes(self):
        return int(np.sum(~self.inside))


def sample_reachable(spectrum, beta, count, seed, keep_blocks=False, tol=1e-9):
    """Random equal-marginal block unitaries; every marginal is tested against the hull."""
    d = spectrum.d
    if d > 4:
        raise UnsupportedDimension("sampling is checked against exhaustive vertices (d <= 4)")
    rng = np.random.default_rng(seed)
    dec = thermal_decomposition(spectrum, beta)
    verts = vertex_set(spectrum, beta)
    pts = np.zeros((count, d - 1))
    inside = np.zeros(count, dtype=bool)
    asym = 0.0
    kept = []
    for s in range(count):
        blocks = random_symmetric_blocks(dec, rng)
        rA, rB = partial_trace_marginals(apply_blocks(blocks, dec))
        pA, pB = np.diag(rA), np.diag(rB)
        asym = max(asym, float(np.max(np.abs(pA - pB))))
        pts[s] = to_coords(pA)
        inside[s] = hull_membership(pts[s], verts, tol=tol).feasible
        if keep_blocks:
            kept.append(blocks)
    return ReachabilitySample(seed, count, pts, inside, asym, kept)


def applicable_methods(d):
    if d == 3:
        return ("majorised", "norm", "geometric")
    if d in (2, 4):
        return ("norm", "geometric")
    raise UnsupportedDimension("cross checks cover d in {2, 3, 4}")


def cross_method_check(spectrum, beta, beta_prime, tol=None):
    """Build with every applicable method and compare the verified marginals."""
    from .copies import _builders
    builders = _builders()
    out = {"d": spectrum.d, "beta": beta, "beta_prime": beta_prime, "methods": {}}
    margins = []
    for m in applicable_methods(spectrum.d):
        try:
            rep = verify_stu(builders[m](spectrum, beta, beta_prime), spectrum, beta, beta_prime, tol=tol)
        except StuforgeError as exc:
            out["methods"][m] = {"built": False, "error": type(exc).__name__,
                                 "flag": getattr(exc, "flag", None), "message": str(exc)}
            continue
        out["methods"][m] = {"built": True, "passed": rep.passed, "deviation": rep.deviation,
                             "delta_E": rep.delta_E, "delta_I": rep.delta_I}
        margins.append(np.array(rep.marginal_A))
    built = [v for v in out["methods"].values() if v["built"]]
    spread = max((float(np.max(np.abs(a - margins[0]))) for a in margins), default=0.0)
    out["agree"] = bool(built and all(v["passed"] for v in built))
    out["marginal_spread"] = spread
    out["n_built"] = len(built)
    return out


def asym_oracle(problem, samples, seed):
    """
    Largest ``S(rho_A) + S(rho_B)`` over random pure states within the budget.

    Each sample is a random orthogonal applied to the joint ground state.
    Over-budget samples are pulled toward the ground state until the
    energy equals the budget (H annihilates the ground state, so the
    energy scales with the weight of the orthogonal part).
    """
    rng = np.random.default_rng(seed)
    dA, dB = problem.spectrumA.d, problem.spectrumB.d
    H = problem.hamiltonian_diagonal()
    c = problem.budget
    best = 0.0
    worst_energy = 0.0
    for _ in range(samples):
        psi = random_orthogonal(dA * dB, rng)[:, 0]
        perp = psi.copy()
        perp[0] = 0.0
        e = float(H @ psi ** 2)
        if e > c:
            s = c / e
            perp = np.sqrt(s) * perp
            psi = perp
            psi[0] = np.sqrt(max(0.0, 1.0 - perp @ perp))
            e = float(H @ psi ** 2)
        worst_energy = max(worst_energy, e)
        sv = np.linalg.svd(psi.reshape(dA, dB), compute_uv=False)
        best = max(best, 2 * entropy(sv ** 2))
    opt = asym_pure_optimum(problem)
    return {"samples": samples, "seed": seed, "oracle_max": best,
            "optimum": opt.mutual_information, "excess": best - opt.mutual_information,
            "max_sample_energy": worst_energy, "budget": c}
