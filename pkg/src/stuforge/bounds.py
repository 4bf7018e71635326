"""
Upper bounds on correlations created for a given energy investment.

Symmetric thermal inputs: the optimum is the product of thermal states at
the hotter temperature that saturates the energy budget. Asymmetric pure
ground-state inputs: the optimum is a pure state whose Schmidt
coefficients are thermal for the effective spectrum ``E^A_i + E^B_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBudget
from .spectra import (EnergySpectrum, beta_for_energy, entropy, mean_energy, thermal_probs,
                      thermal_vector)


@dataclass(frozen=True)
class CurvePoint:
    delta_E: float
    delta_I: float
    beta_bar: float


def max_correlation_curve(spectrum, beta, delta_E_grid):
    """
    Optimal mutual information ``2 [S(tau(beta_bar)) - S(tau(beta))]`` per budget.

    Each side receives half of ``delta_E``; budgets beyond the uniform state
    are clamped at ``beta_bar = 0``.
    """
    E0 = mean_energy(spectrum, beta)
    S0 = entropy(thermal_vector(spectrum, beta).probs)
    top = float(spectrum.array.mean())
    out = []
    for dE in np.atleast_1d(np.asarray(delta_E_grid, dtype=float)):
        if dE < 0:
            raise InvalidBudget("energy investment must be nonnegative")
        if dE == 0:
            out.append(CurvePoint(0.0, 0.0, float(beta)))
            continue
        target = E0 + dE / 2
        bb = 0.0 if target >= top else beta_for_energy(spectrum, target)
        dI = 2 * (entropy(thermal_vector(spectrum, bb).probs) - S0)
        out.append(CurvePoint(float(dE), float(dI), float(bb)))
    return out


def curve_value(spectrum, beta, delta_E):
    return max_correlation_curve(spectrum, beta, [delta_E])[0]


@dataclass(frozen=True)
class AsymmetricProblem:
    spectrumA: EnergySpectrum
    spectrumB: EnergySpectrum
    budget: float

    def __post_init__(self):
        if not self.budget >= 0:
            raise InvalidBudget(f"energy budget must be >= 0, got {self.budget!r}")

    @classmethod
    def from_values(cls, ea, eb, budget):
        """Energies are used as given (shifted to a zero ground level, not rescaled)."""
        return cls(EnergySpectrum.from_values(ea, normalize=False),
                   EnergySpectrum.from_values(eb, normalize=False), float(budget))

    @property
    def d(self):
        return min(self.spectrumA.d, self.spectrumB.d)

    def effective_spectrum(self):
        d = self.d
        return self.spectrumA.array[:d] + self.spectrumB.array[:d]

    def hamiltonian_diagonal(self):
        return np.add.outer(self.spectrumA.array, self.spectrumB.array).ravel()


@dataclass
class AsymmetricSolution:
    beta_of_c: float
    schmidt_probs: np.ndarray
    effective_spectrum: np.ndarray
    mutual_information: float
    mutual_information_closed: float
    energy: float

    def to_json(self):
        return {"beta_of_c": self.beta_of_c, "schmidt_probs": self.schmidt_probs.tolist(),
                "effective_spectrum": self.effective_spectrum.tolist(),
                "mutual_information": self.mutual_information,
                "mutual_information_closed": self.mutual_information_closed,
                "energy": self.energy}


def asym_pure_optimum(problem):
    """Optimal ``S(rho_A) + S(rho_B)`` from the joint ground state within the budget."""
    Et = problem.effective_spectrum()
    d = Et.size
    c = problem.budget
    if np.all(Et == 0):
        # effective Hamiltonian is proportional to the identity
        p = np.full(d, 1.0 / d)
        return AsymmetricSolution(0.0, p, Et, 2 * math.log(d), 2 * math.log(d), 0.0)
    if c == 0:
        # beta c -> 0 and Z -> ground degeneracy
        p = thermal_probs(Et, math.inf)
        g = int(np.sum(Et == 0))
        return AsymmetricSolution(math.inf, p, Et, 2 * entropy(p), 2 * math.log(g), 0.0)
    if c >= Et.mean():
        beta = 0.0
    else:
        beta = beta_for_energy(EnergySpectrum(tuple(Et.tolist()), normalized=False), c)
    p = thermal_probs(Et, beta)
    energy = float(p @ Et)
    Z = float(np.exp(-beta * Et).sum())
    closed = 2 * beta * energy + 2 * math.log(Z)
    return AsymmetricSolution(float(beta), p, Et, 2 * entropy(p), float(closed), energy)


def subadditivity_check(S_A, S_B, S_A_prime, S_B_prime, tol=1e-12):
    """
    Whether final local entropies are compatible with a global unitary.

    The final global entropy is ``S_A + S_B`` for a product input, and the
    Araki-Lieb inequality demands ``|S_A' - S_B'| <= S(rho_AB)``.
    """
    return bool(abs(S_A_prime - S_B_prime) <= S_A + S_B + tol)
