"""
"Passing on the norm": the subspace vectors at beta are mapped onto those
at beta' (a = q(beta'), b_i = r_i(beta')) while the norm lost by each r_i is
handed to the q block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .block_unitary import lift_transforms
from .errors import ConditionsNotMet, OutOfRange
from .lcs import n_free, prefactor, thermal_decomposition
from .majorize import hlp_matrix, weakly_majorizes
from .spectra import EnergySpectrum


def _normalized(v):
    s = v.sum()
    return v / s if s > 0 else v


def _maj_normalized(y, x, tol=1e-12):
    """y/|y| majorises x/|x|; vacuous when y has zero norm (nothing to move)."""
    if y.sum() <= 0:
        return True
    if x.sum() <= 0:
        return False
    return weakly_majorizes(_normalized(y), _normalized(x), tol)


def norm_derivatives(spectrum, beta):
    """Closed forms for d|q|/dbeta and d|r_i|/dbeta, i = 1..d-1."""
    E = spectrum.array if isinstance(spectrum, EnergySpectrum) else np.asarray(spectrum, float)
    d = E.size
    w = np.exp(-beta * E)
    z = w.sum()
    dq = 0.0
    for i in range(d):
        for m in range(i + 1, d):
            dq += (E[m] - E[i]) * (w[i] ** 2 * w[m] - w[i] * w[m] ** 2)
    dq *= 2.0 / z ** 3
    dr = []
    for i in range(1, d):
        s = 0.0
        for j in range(d):
            k = (j + i) % d
            s += np.sum((2 * E - E[j] - E[k]) * w * w[j] * w[k])
        dr.append(s / z ** 3)
    return float(dq), [float(v) for v in dr]


def _fd_norms(spectrum, beta, h):
    lo = thermal_decomposition(spectrum, max(beta - h, 0.0))
    hi = thermal_decomposition(spectrum, beta + h)
    span = (beta + h) - max(beta - h, 0.0)
    dq = (hi.q.sum() - lo.q.sum()) / span
    dr = [(hi.r[i].sum() - lo.r[i].sum()) / span for i in range(hi.d - 1)]
    return float(dq), [float(v) for v in dr]


@dataclass
class NormReport:
    d: int
    beta: float
    beta_prime: float
    norm_q: float
    norm_a: float
    norms_r: list
    norms_b: list
    q_dominates_a: bool
    r_majorises_b: list
    q_majorises_2b: list
    norm_identity: float
    dq_fd: float = math.nan
    dr_fd: list = field(default_factory=list)
    dq_analytic: float = math.nan
    dr_analytic: list = field(default_factory=list)

    def to_json(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def decomposition_norms(spectrum, beta, beta_prime):
    if beta_prime > beta:
        raise OutOfRange("need beta' <= beta")
    dec = thermal_decomposition(spectrum, beta)
    tgt = thermal_decomposition(spectrum, beta_prime)
    d = dec.d
    k = n_free(d)
    nr = [float(dec.r[i].sum()) for i in range(d - 1)]
    nb = [float(tgt.r[i].sum()) for i in range(d - 1)]
    r_flags = [_maj_normalized(dec.r[i], tgt.r[i]) for i in range(d - 1)]
    q_flags = []
    for i in range(1, k + 1):
        b = tgt.r[i - 1]
        twob = b + np.roll(b, i)
        q_flags.append(_maj_normalized(dec.q, twob))
    identity = float(dec.q.sum() + 2 * sum(prefactor(i, d) * nr[i - 1] for i in range(1, k + 1)))
    rep = NormReport(d, float(beta), float(beta_prime), float(dec.q.sum()), float(tgt.q.sum()),
                     nr, nb, bool(dec.q.sum() >= tgt.q.sum() - 1e-15), r_flags, q_flags, identity)
    if math.isfinite(beta):
        h = 1e-5 * max(1.0, beta)
        rep.dq_fd, rep.dr_fd = _fd_norms(spectrum, beta, h)
        rep.dq_analytic, rep.dr_analytic = norm_derivatives(spectrum, beta)
    return rep


@dataclass
class AlphaSplit:
    alpha0: float
    alphas: list

    @property
    def total(self):
        return self.alpha0 + sum(self.alphas)


def alpha_split(spectrum, beta, beta_prime):
    dec = thermal_decomposition(spectrum, beta)
    tgt = thermal_decomposition(spectrum, beta_prime)
    d = dec.d
    nq = dec.q.sum()
    a0 = tgt.q.sum() / nq
    alphas = [2 * prefactor(i, d) * (tgt.r[i - 1].sum() - dec.r[i - 1].sum()) / nq
              for i in range(1, n_free(d) + 1)]
    return AlphaSplit(float(a0), [float(a) for a in alphas])


def weak_target(spectrum, beta, beta_prime):
    """a + sum_i c_i (1 - |r_i|/|b_i|)(1 + Pi^i) b_i, the vector M_q q must hit."""
    dec = thermal_decomposition(spectrum, beta)
    tgt = thermal_decomposition(spectrum, beta_prime)
    d = dec.d
    w = tgt.q.copy()
    for i in range(1, n_free(d) + 1):
        b = tgt.r[i - 1]
        nb = b.sum()
        if nb <= 0:
            continue
        w = w + prefactor(i, d) * (1 - dec.r[i - 1].sum() / nb) * (b + np.roll(b, i))
    return w


def check_conditions(spectrum, beta, beta_prime):
    rep = decomposition_norms(spectrum, beta, beta_prime)
    k = n_free(rep.d)
    dec = thermal_decomposition(spectrum, beta)
    tgt = thermal_decomposition(spectrum, beta_prime)
    q_maj_a = _maj_normalized(dec.q, tgt.q)
    cond_i = bool(rep.q_dominates_a and q_maj_a and all(rep.r_majorises_b))
    norm_ok = [rep.norms_r[i - 1] <= rep.norms_b[i - 1] * (1 + 1e-12) + 1e-300 for i in range(1, k + 1)]
    strong = bool(all(norm_ok) and all(rep.q_majorises_2b))
    w = weak_target(spectrum, beta, beta_prime)
    weak = bool(np.all(w >= -1e-15) and weakly_majorizes(dec.q, w))
    witnesses = {
        "q_majorises_a": q_maj_a, "norm_q": rep.norm_q, "norm_a": rep.norm_a,
        "norms_r": rep.norms_r[:k], "norms_b": rep.norms_b[:k],
        "r_majorises_b": rep.r_majorises_b, "q_majorises_2b": rep.q_majorises_2b,
        "norm_r_le_norm_b": norm_ok, "weak_vector": w.tolist(),
    }
    return {"cond_i": cond_i, "cond_ii_strong": strong, "cond_ii_weak": weak,
            "witnesses": witnesses}


def norm_transforms(spectrum, beta, beta_prime):
    """(M_q, [M_{r_1}, ...]) assembled from the alpha split."""
    if not math.isfinite(beta):
        raise ConditionsNotMet("finite_beta", "the norm builder needs finite beta")
    if beta_prime > beta:
        raise OutOfRange("need beta' <= beta")
    cond = check_conditions(spectrum, beta, beta_prime)
    if not cond["cond_i"]:
        raise ConditionsNotMet("cond_i")
    if not cond["cond_ii_strong"]:
        raise ConditionsNotMet("cond_ii_strong")
    dec = thermal_decomposition(spectrum, beta)
    tgt = thermal_decomposition(spectrum, beta_prime)
    d = dec.d
    k = n_free(d)
    split = alpha_split(spectrum, beta, beta_prime)
    qh = _normalized(dec.q)
    Mq = split.alpha0 * hlp_matrix(qh, _normalized(tgt.q))
    Mr = []
    for i in range(1, k + 1):
        r, b = dec.r[i - 1], tgt.r[i - 1]
        Mr.append(hlp_matrix(_normalized(r), _normalized(b)))
        if split.alphas[i - 1] > 0:
            twob = _normalized(b + np.roll(b, i))
            Mq = Mq + split.alphas[i - 1] * hlp_matrix(qh, twob)
    # rounding left over from the split goes on the identity
    Mq = Mq + (1.0 - split.alpha0 - sum(max(a, 0.0) for a in split.alphas)) * np.eye(d)
    return Mq, Mr, split


def build_stu_norm(spectrum, beta, beta_prime):
    if beta_prime == beta:
        d = spectrum.d
        return lift_transforms(thermal_decomposition(spectrum, beta), np.eye(d),
                               [np.eye(d)] * n_free(d))
    Mq, Mr, _ = norm_transforms(spectrum, beta, beta_prime)
    return lift_transforms(thermal_decomposition(spectrum, beta), Mq, Mr)


def lemma_strong_holds(spectrum, beta, beta_prime):
    return check_conditions(spectrum, beta, beta_prime)["cond_ii_strong"]


def increasing_gaps(spectrum):
    return bool(np.all(np.diff(spectrum.gaps()) >= 0))


def decreasing_gaps(spectrum):
    return bool(np.all(np.diff(spectrum.gaps()) <= 0))
