"""
Round-robin protocol on n copies of a thermal pair.

Round j (0-based) applies an STU to ``(A_i, B_{(i + j) mod n})`` for every i.
Small instances are simulated exactly on the full 2n-party density matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionBudgetExceeded, StepUnbuildable, StuforgeError
from .spectra import entropy, thermal_vector

EXACT_BUDGET = 1024


@dataclass(frozen=True)
class PairingSchedule:
    n: int
    rounds: tuple

    def pairs(self):
        return [p for rnd in self.rounds for p in rnd]

    def check(self):
        """Every round is a perfect matching and no (A_i, B_j) repeats."""
        for rnd in self.rounds:
            if sorted(a for a, _ in rnd) != list(range(self.n)):
                return False
            if sorted(b for _, b in rnd) != list(range(self.n)):
                return False
        pairs = self.pairs()
        return len(set(pairs)) == len(pairs) == self.n ** 2


def pairing_schedule(n):
    if n < 1:
        raise ValueError("need at least one copy")
    rounds = tuple(tuple((i, (i + j) % n) for i in range(n)) for j in range(n))
    sched = PairingSchedule(n, rounds)
    if not sched.check():
        raise AssertionError("pairing schedule repeats a pair")
    return sched


def _builders():
    from .stu_geometric import build_stu_geometric
    from .stu_majorised import build_stu_majorised
    from .stu_norm import build_stu_norm
    return {"geometric": build_stu_geometric, "norm": build_stu_norm,
            "majorised": build_stu_majorised}


METHODS = ("geometric", "norm", "majorised")


def build_step(method, spectrum, beta, beta_prime):
    builders = _builders()
    if method not in builders:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    try:
        return builders[method](spectrum, beta, beta_prime)
    except StuforgeError as exc:
        raise StepUnbuildable(f"{method} cannot build {beta} -> {beta_prime}: {exc}") from exc


# --------------------------------------------------------------------------
# dense multi-party helpers
# --------------------------------------------------------------------------

def apply_two_site(rho, W, d, N, s1, s2):
    """``W rho W^T`` with W acting on sites (s1, s2) of N d-level sites."""
    W4 = W.reshape(d, d, d, d)
    T = rho.reshape([d] * (2 * N))
    for a, b in ((s1, s2), (N + s1, N + s2)):
        T = np.tensordot(W4, T, axes=([2, 3], [a, b]))
        T = np.moveaxis(T, [0, 1], [a, b])
    return T.reshape(d ** N, d ** N)


def reduced_state(rho, d, N, keep):
    keep = list(keep)
    rest = [s for s in range(N) if s not in keep]
    T = rho.reshape([d] * (2 * N))
    order = keep + rest + [N + s for s in keep] + [N + s for s in rest]
    k = d ** len(keep)
    T = np.transpose(T, order).reshape(k, d ** len(rest), k, d ** len(rest))
    return np.einsum("arbr->ab", T)


def _von_neumann(rho):
    return entropy(np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.T)), 0.0, None))


@dataclass
class RoundRecord:
    round: int
    beta_in: float
    beta_out: float
    pair_product_deviation: float
    marginal_deviation: float
    entropy_drift: float
    passed: bool


@dataclass
class ProtocolTrace:
    n: int
    d: int
    method: str
    betas: list
    exact: bool
    rounds: list = field(default_factory=list)
    tol: float = 1e-9

    @property
    def passed(self):
        return all(r.passed for r in self.rounds)

    def to_json(self):
        return {"n": self.n, "d": self.d, "method": self.method, "betas": self.betas,
                "exact": self.exact, "tol": self.tol, "passed": self.passed,
                "rounds": [r.__dict__ for r in self.rounds]}


def simulate_copies(spectrum, beta, n, schedule, method="geometric", tol=1e-9):
    """
    Exact simulation of the protocol.

    Parameters
    ----------
    schedule : sequence of float
        Target inverse temperatures, one per round, each below the last.

    Returns
    -------
    ProtocolTrace
        Per round: product deviation of the interacting pairs before the
        unitaries, worst single-party deviation from ``tau(beta_out)``
        afterwards, and drift of the global entropy.
    """
    d = spectrum.d
    N = 2 * n
    if d ** N > EXACT_BUDGET:
        raise DimensionBudgetExceeded(f"d^(2n) = {d ** N} exceeds {EXACT_BUDGET}")
    schedule = [float(b) for b in schedule]
    if len(schedule) != n:
        raise ValueError(f"need {n} per-round targets, got {len(schedule)}")
    sched = pairing_schedule(n)
    p = thermal_vector(spectrum, beta).probs
    diag = p
    for _ in range(N - 1):
        diag = np.kron(diag, p)
    rho = np.diag(diag)
    S0 = entropy(diag)
    betas = [float(beta)] + schedule
    trace = ProtocolTrace(n, d, method, betas, exact=True, tol=tol)
    for j, rnd in enumerate(sched.rounds):
        b_in, b_out = betas[j], betas[j + 1]
        W = build_step(method, spectrum, b_in, b_out).dense()
        prod_dev = 0.0
        for a, b in rnd:
            sa, sb = a, n + b
            pair = reduced_state(rho, d, N, [sa, sb])
            ra = reduced_state(rho, d, N, [sa])
            rb = reduced_state(rho, d, N, [sb])
            prod_dev = max(prod_dev, float(np.max(np.abs(pair - np.kron(ra, rb)))))
            rho = apply_two_site(rho, W, d, N, sa, sb)
        target = np.diag(thermal_vector(spectrum, b_out).probs)
        marg_dev = max(float(np.max(np.abs(reduced_state(rho, d, N, [s]) - target)))
                       for s in range(N))
        drift = abs(_von_neumann(rho) - S0)
        ok = prod_dev <= tol and marg_dev <= tol and drift <= tol
        trace.rounds.append(RoundRecord(j, b_in, b_out, prod_dev, marg_dev, drift, bool(ok)))
    return trace


def log_schedule(beta, beta_final, n):
    """Targets equally spaced in log beta, ending at ``beta_final``."""
    if beta_final <= 0:
        return list(np.linspace(beta, beta_final, n + 1)[1:])
    return list(np.exp(np.linspace(math.log(beta), math.log(beta_final), n + 1))[1:])
