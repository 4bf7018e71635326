"""
Grid checks of the supporting lemmas over random spectra and temperatures.

Each check returns ``{"points": n, "violations": k, "examples": [...]}`` with
at most a few offending cases kept for inspection.
"""

from __future__ import annotations

import numpy as np

from .errors import SignCheckFailure
from .lcs import labeled_permutations, thermal_decomposition
from .spectra import EnergySpectrum
from .stu_geometric import curve_coefficients, ratio_monotonicity
from .stu_majorised import companion_matrix_d3
from .stu_norm import _maj_normalized, check_conditions

BETAS = (0.1, 0.5, 1.0, 2.0, 5.0)
FRACTIONS = (0.0, 0.25, 0.5, 0.9)
GUARD = 1e-12
MAX_EXAMPLES = 5


def random_spectrum(rng, d, kind="any", top=10.0):
    """
    Normalized spectrum with ``E_1 = 1``.

    kind is "any", "decreasing" (gaps nonincreasing) or "increasing".
    """
    if kind == "any":
        rest = np.sort(rng.uniform(1.0, top, d - 2))
        return EnergySpectrum.from_values(np.concatenate([[0.0, 1.0], rest]))
    g = np.sort(rng.uniform(0.05, 1.0, d - 2))
    if kind == "decreasing":
        gaps = np.concatenate([[1.0], g[::-1]])
    elif kind == "increasing":
        gaps = np.concatenate([[1.0], 1.0 + np.sort(rng.uniform(0.0, top, d - 2))])
    else:
        raise ValueError(kind)
    return EnergySpectrum.from_values(np.concatenate([[0.0], np.cumsum(gaps)]))


def _grid():
    for b in BETAS:
        for f in FRACTIONS:
            yield b, f * b


def _tally(out, ok, example):
    out["points"] += 1
    if not ok:
        out["violations"] += 1
        if len(out["examples"]) < MAX_EXAMPLES:
            out["examples"].append(example)


def _new():
    return {"points": 0, "violations": 0, "examples": []}


def lemma2_grid(rng, dims=(2, 3, 4, 5, 6), spectra=50):
    """|q(b)| >= |q(b')| and r_i(b)/|r_i(b)| majorises r_i(b')/|r_i(b')|."""
    out = _new()
    for d in dims:
        for _ in range(spectra):
            spec = random_spectrum(rng, d)
            for b, bp in _grid():
                dec = thermal_decomposition(spec, b)
                tgt = thermal_decomposition(spec, bp)
                ok = dec.q.sum() >= tgt.q.sum() - GUARD
                ok = ok and all(_maj_normalized(dec.r[i], tgt.r[i], GUARD) for i in range(d - 1))
                _tally(out, ok, {"E": spec.energies, "beta": b, "beta_prime": bp})
    return out


def strong_grid(rng, d, kind, spectra):
    out = _new()
    for _ in range(spectra):
        spec = random_spectrum(rng, d, kind)
        for b, bp in _grid():
            if bp == b:
                continue
            cond = check_conditions(spec, b, bp)
            _tally(out, cond["cond_i"] and cond["cond_ii_strong"],
                   {"E": spec.energies, "beta": b, "beta_prime": bp})
    return out


def lemma3_grid(rng, spectra=200):
    return strong_grid(rng, 3, "any", spectra)


def lemma4_grid(rng, spectra=200):
    return strong_grid(rng, 4, "decreasing", spectra)


def strong_failure_regime(rng, spectra=100, e3_min=10.0):
    """Increasing gaps with E_3 >= e3_min: count cases where the strong condition fails."""
    fails = 0
    total = 0
    example = None
    for _ in range(spectra):
        spec = random_spectrum(rng, 4, "increasing", top=20.0)
        if spec.energies[3] < e3_min:
            spec = EnergySpectrum.from_values(list(spec.energies[:3]) + [e3_min + spec.energies[3]])
        for b, bp in ((2.0, 1.0), (1.0, 0.5), (5.0, 2.5)):
            total += 1
            if not check_conditions(spec, b, bp)["cond_ii_strong"]:
                fails += 1
                example = example or {"E": spec.energies, "beta": b, "beta_prime": bp}
    return {"points": total, "strong_failures": fails, "example": example}


def lemma5_grid(rng, dims=(2, 3, 4, 5, 6), spectra=50):
    """Curve coefficients nonnegative and summing to one."""
    out = _new()
    for d in dims:
        for _ in range(spectra):
            spec = random_spectrum(rng, d)
            for b, bp in _grid():
                try:
                    a = curve_coefficients(spec, b, bp, guard=GUARD).a
                    ok = abs(a.sum() - 1.0) <= 1e-10
                except SignCheckFailure:
                    ok = False
                _tally(out, ok, {"E": spec.energies, "beta": b, "beta_prime": bp})
    return out


def ratio_grid(rng, dims=(3, 4, 5, 6), spectra=20):
    """x_{m+1} / x_m nonincreasing in beta."""
    out = _new()
    betas = np.geomspace(0.05, 10.0, 40)
    for d in dims:
        for _ in range(spectra):
            spec = random_spectrum(rng, d)
            worst = ratio_monotonicity(spec, betas)
            _tally(out, worst <= 1e-9, {"E": spec.energies, "max_derivative": worst})
    return out


def lemma1_grid(rng, count=200):
    """Companion residual of random 3x3 doubly stochastic matrices."""
    out = _new()
    perms = labeled_permutations(3)
    for _ in range(count):
        w = rng.dirichlet(np.ones(6))
        M = sum(wi * perms[k] for wi, k in zip(w, sorted(perms)))
        res = companion_matrix_d3(M).residual
        _tally(out, res <= 1e-10, {"residual": res})
    return out


FAMILIES = {
    "lemma1": lemma1_grid,
    "lemma2": lemma2_grid,
    "lemma3": lemma3_grid,
    "lemma4": lemma4_grid,
    "lemma5": lemma5_grid,
    "ratio_monotonicity": ratio_grid,
    "strong_failure_regime": strong_failure_regime,
}


def _run_family(args):
    name, seq = args
    return name, FAMILIES[name](np.random.default_rng(seq))


def check_all(seed=0, jobs=1):
    """
    Run every family; each draws from its own spawned seed, so results do
    not depend on ``jobs``.
    """
    seqs = np.random.SeedSequence(seed).spawn(len(FAMILIES))
    tasks = list(zip(FAMILIES, seqs))
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = dict(ex.map(_run_family, tasks))
    else:
        out = dict(map(_run_family, tasks))
    keys = [k for k in FAMILIES if k != "strong_failure_regime"]
    out["total_points"] = sum(out[k]["points"] for k in keys)
    out["total_violations"] = sum(out[k]["violations"] for k in keys)
    out["passed"] = out["total_violations"] == 0 and out["strong_failure_regime"]["strong_failures"] > 0
    return out
