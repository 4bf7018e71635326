"""
Energy spectra, Gibbs distributions and inverse-temperature root finding.

Energies are stored relative to the ground level and, by default, in units
of the first excited energy E_1. ``beta = math.inf`` is the ground state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpectrum, OutOfRange

INF = math.inf


@dataclass(frozen=True)
class EnergySpectrum:
    """Sorted local energy levels with ``energies[0] == 0``."""

    energies: tuple
    normalized: bool = True

    def __post_init__(self):
        e = tuple(float(v) for v in self.energies)
        if len(e) < 2:
            raise InvalidSpectrum("a spectrum needs at least two levels")
        if any(not math.isfinite(v) for v in e):
            raise InvalidSpectrum("energies must be finite")
        if any(b < a for a, b in zip(e, e[1:])):
            raise InvalidSpectrum("energies must be nondecreasing")
        if e[0] != 0.0:
            raise InvalidSpectrum("energies[0] must be 0; use from_values to shift")
        object.__setattr__(self, "energies", e)

    @classmethod
    def from_values(cls, values, normalize=True):
        """Shift so the ground level is 0 and, if asked, divide by E_1."""
        e = np.asarray(values, dtype=float)
        if e.ndim != 1 or e.size < 2:
            raise InvalidSpectrum("a spectrum needs at least two levels")
        if np.any(np.diff(e) < 0):
            raise InvalidSpectrum("energies must be nondecreasing")
        e = e - e[0]
        if normalize and e[1] > 0:
            e = e / e[1]
        e[0] = 0.0
        return cls(tuple(e.tolist()), normalized=bool(normalize))

    @classmethod
    def parse(cls, text, normalize=True):
        """Parse the comma separated literal, e.g. ``"0,1,2.5,4"``."""
        try:
            vals = [float(t) for t in text.split(",") if t.strip()]
        except ValueError as exc:
            raise InvalidSpectrum(f"cannot parse spectrum {text!r}") from exc
        return cls.from_values(vals, normalize=normalize)

    @property
    def d(self):
        return len(self.energies)

    @property
    def array(self):
        return np.array(self.energies)

    def gap(self, i):
        return self.energies[i + 1] - self.energies[i]

    def gaps(self):
        return np.diff(self.array)

    def equally_spaced(self, tol=1e-12):
        g = self.gaps()
        return bool(np.all(np.abs(g - g[0]) <= tol))

    def __str__(self):
        return ",".join(repr(v) for v in self.energies)


@dataclass(frozen=True)
class ThermalDistribution:
    probs: np.ndarray = field(repr=False)
    beta: float
    spectrum: EnergySpectrum

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probs, dtype=dtype)


def _as_spectrum(spectrum):
    if isinstance(spectrum, EnergySpectrum):
        return spectrum
    return EnergySpectrum.from_values(spectrum)


def check_beta(beta):
    b = float(beta)
    if math.isnan(b) or b < 0:
        raise OutOfRange(f"beta must be >= 0 or inf, got {beta!r}")
    return b


def boltzmann_weights(energies, beta):
    """Unnormalized weights exp(-beta (E_i - E_0)), shifted for stability."""
    e = np.asarray(energies, dtype=float)
    b = check_beta(beta)
    if b == INF:
        return (e == e.min()).astype(float)
    return np.exp(-b * (e - e.min()))


def thermal_probs(energies, beta):
    w = boltzmann_weights(energies, beta)
    return w / w.sum()


def thermal_vector(spectrum, beta):
    """Gibbs distribution ``p_i = exp(-beta E_i) / Z``."""
    spec = _as_spectrum(spectrum)
    b = check_beta(beta)
    return ThermalDistribution(thermal_probs(spec.energies, b), b, spec)


def partition_function(spectrum, beta):
    """Z(beta) relative to the ground level; ground degeneracy at beta=inf."""
    spec = _as_spectrum(spectrum)
    return float(boltzmann_weights(spec.energies, beta).sum())


def entropy(p):
    """Shannon entropy in nats with 0 ln 0 = 0."""
    p = np.asarray(p, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def entropy_and_energy(dist, spectrum):
    p = np.asarray(dist, dtype=float)
    e = _as_spectrum(spectrum).array
    return entropy(p), float(p @ e)


def mean_energy(spectrum, beta):
    spec = _as_spectrum(spectrum)
    return float(thermal_probs(spec.energies, beta) @ spec.array)


def beta_for_energy(spectrum, target_energy, tol=None):
    """
    Invert the mean energy by bisection.

    The mean energy is strictly decreasing in beta, so a doubling search
    for an upper bracket followed by bisection always converges.

    Raises
    ------
    OutOfRange
        If the target lies outside [E_ground, mean energy at beta=0].
    """
    spec = _as_spectrum(spectrum)
    e = spec.array
    target = float(target_energy)
    top = float(e.mean())
    if tol is None:
        tol = 1e-10 * max(1.0, abs(target))
    if target > top + tol or target < -tol:
        raise OutOfRange(
            f"target energy {target} outside [0, {top}] (bracket beta in [0, inf])")
    if target >= top - 1e-15 * max(1.0, top):
        return 0.0
    if target <= 0.0 or np.all(e[1:] == 0):
        return INF
    lo, hi = 0.0, 1.0
    while mean_energy(spec, hi) > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            return INF
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if mean_energy(spec, mid) > target:
            lo = mid
        else:
            hi = mid
    beta = 0.5 * (lo + hi)
    if abs(mean_energy(spec, beta) - target) > tol:
        raise OutOfRange(f"bisection did not reach tolerance on [{lo}, {hi}]")
    return beta
