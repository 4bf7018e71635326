"""
Geometric construction of STUs.

Marginals are mapped to reduced coordinates
``x_n = (n+1) p_{n+1} - sum_{i<=n} p_i`` (n = 0..d-2). The reachable set is
the polytope spanned by permutation vertices of the transform engine. A
target thermal point is written as a convex combination of the vertices
``v_0 = p(beta)``, ``v_j`` (first j coordinates zeroed) and the origin, and
every vertex comes with an explicit pair of doubly stochastic matrices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .block_unitary import lift_transforms, verify_stu
from .errors import (DegenerateCoordinate, InvalidPreimage, SignCheckFailure, TooLarge,
                     UnsupportedDimension)
from .lcs import (cyclic, equal_marginal_vector, labeled_permutations, n_free, perm_matrix,
                  prefactor, thermal_decomposition)
from .lp import phase_one
from .majorize import hlp_matrix, weakly_majorizes
from .spectra import EnergySpectrum, thermal_vector

VERTEX_LIMIT = 13824


# --------------------------------------------------------------------------
# coordinates
# --------------------------------------------------------------------------

def coord_matrix(d):
    """Rows map p to (x_0, ..., x_{d-2}, -sum p)."""
    C = np.zeros((d, d))
    for n in range(d - 1):
        C[n, : n + 1] = -1.0
        C[n, n + 1] = n + 1
    C[d - 1, :] = -1.0
    return C


def to_coords(p):
    p = np.asarray(p, dtype=float)
    return (coord_matrix(p.size) @ p)[:-1]


def shifted_coords(p):
    """x_n + 1 = (n+1) p_{n+1} + sum_{i>n} p_i, free of cancellation near the ground state."""
    p = np.asarray(p, dtype=float)
    tail = np.cumsum(p[::-1])[::-1]
    return np.array([(n + 1) * p[n + 1] + tail[n + 1] for n in range(p.size - 1)])


def from_coords(x, tol=1e-12):
    x = np.asarray(x, dtype=float)
    d = x.size + 1
    p = np.linalg.solve(coord_matrix(d), np.append(x, -1.0))
    if np.any(p < -tol):
        raise InvalidPreimage(f"coordinates {x.tolist()} have no probability preimage")
    return p


# --------------------------------------------------------------------------
# vertex set and membership
# --------------------------------------------------------------------------

@dataclass
class PolytopeVertexSet:
    points: np.ndarray          # reduced coordinates, one row per distinct vertex
    labels: list                # generator labels (i_0, ..., i_k) per row
    probs: np.ndarray = field(repr=False)
    raw_count: int = 0

    @property
    def count(self):
        return len(self.labels)

    def to_csv(self):
        d1 = self.points.shape[1]
        head = ",".join([f"x{n}" for n in range(d1)] + ["label"])
        rows = [head]
        for pt, lab in zip(self.points, self.labels):
            rows.append(",".join([repr(float(v)) for v in pt] + ["-".join(map(str, lab))]))
        return "\n".join(rows)


def vertex_set(spectrum, beta, force=False, dedup_tol=1e-12):
    """
    All points ``Pi^(i0) q + sum_n c_n (1 + Pi^n) Pi^(in) r_n`` with labels.

    Points closer than ``dedup_tol`` keep the first label encountered.
    """
    dec = thermal_decomposition(spectrum, beta)
    d = dec.d
    k = n_free(d)
    perms = labeled_permutations(d)
    total = len(perms) ** (k + 1)
    if total > VERTEX_LIMIT and not force:
        raise TooLarge(f"{total} vertices exceed {VERTEX_LIMIT}; pass force=True")
    labs = sorted(perms)
    stack = np.array([perms[l] for l in labs])                # (n!, d, d)
    parts = [stack @ dec.q]                                   # (n!, d)
    for i in range(1, k + 1):
        v = stack @ dec.r[i - 1]
        parts.append(prefactor(i, d) * (v + np.roll(v, i, axis=1)))
    # unique contributions per factor shrink the product dramatically
    uniq = []
    for part in parts:
        keys = {}
        for lab, row in zip(labs, part):
            key = tuple(np.round(row / dedup_tol).astype(np.int64)) if dedup_tol > 0 else lab
            keys.setdefault(key, (lab, row))
        uniq.append(list(keys.values()))
    probs, labels = [], []
    seen = {}
    for combo in itertools.product(*uniq):
        vec = sum(row for _, row in combo)
        key = tuple(np.round(vec / dedup_tol).astype(np.int64))
        if key in seen:
            continue
        seen[key] = len(labels)
        labels.append(tuple(lab for lab, _ in combo))
        probs.append(vec)
    probs = np.array(probs)
    pts = (coord_matrix(d) @ probs.T).T[:, :-1]
    return PolytopeVertexSet(pts, labels, probs, raw_count=total)


@dataclass
class MembershipCertificate:
    feasible: bool
    weights: dict = field(default_factory=dict)
    gap: float = 0.0
    residual: float = math.nan


def hull_membership(point, vertices, tol=1e-9):
    """Phase-1 simplex over convex weights; certificate names generators."""
    pts = vertices.points if isinstance(vertices, PolytopeVertexSet) else np.asarray(vertices, float)
    labels = vertices.labels if isinstance(vertices, PolytopeVertexSet) else list(range(len(pts)))
    point = np.asarray(point, dtype=float)
    if pts.shape[1] != point.size:
        raise ValueError("dimension mismatch between point and vertices")
    A = np.vstack([pts.T, np.ones(len(pts))])
    b = np.append(point, 1.0)
    res = phase_one(A, b, feas_tol=tol)
    if not res.feasible:
        return MembershipCertificate(False, {}, res.gap)
    w = res.x
    nz = np.nonzero(w > 0)[0]
    weights = {labels[i]: float(w[i]) for i in nz}
    recon = pts[nz].T @ w[nz]
    resid = float(np.max(np.abs(recon - point))) if nz.size else float(np.max(np.abs(point)))
    return MembershipCertificate(resid <= tol, weights, res.gap, resid)


# --------------------------------------------------------------------------
# curve coefficients and convexity
# --------------------------------------------------------------------------

@dataclass
class CurveCoefficients:
    a: np.ndarray
    ratios: np.ndarray

    def to_json(self):
        return {"a": self.a.tolist(), "ratios": self.ratios.tolist()}


def target_vertices(spectrum, beta):
    """Probability vectors of v_0..v_{d-1}: v_j averages the top j+1 entries."""
    p = thermal_vector(spectrum, beta).probs
    d = p.size
    out = []
    for j in range(d):
        v = p.copy()
        v[: j + 1] = p[: j + 1].mean()
        out.append(v)
    out[-1] = np.full(d, 1.0 / d)
    return out


def curve_coefficients(spectrum, beta, beta_prime, guard=1e-12):
    """a_i = x_i(b')/x_i(b) - x_{i-1}(b')/x_{i-1}(b), with the end ratios 0 and 1."""
    if beta_prime > beta:
        raise ValueError("need beta' <= beta")
    p = thermal_vector(spectrum, beta).probs
    pp = thermal_vector(spectrum, beta_prime).probs
    x = to_coords(p)
    xp = to_coords(pp)
    if np.any(np.abs(x) <= 1e-300):
        raise DegenerateCoordinate("some x_i(beta) vanishes")
    rho = np.concatenate([xp / x, [1.0]])
    a = np.diff(np.concatenate([[0.0], rho]))
    if np.any(a < -guard):
        raise SignCheckFailure(f"negative curve coefficient {a.min()}")
    if abs(a.sum() - 1.0) > 1e-10:
        raise SignCheckFailure(f"curve coefficients sum to {a.sum()}")
    return CurveCoefficients(np.clip(a, 0.0, None), rho)


def ratio_monotonicity(spectrum, betas):
    """Max over m and grid of d/dbeta (x_{m+1} / x_m); should be <= 0."""
    worst = -math.inf
    h = 1e-6
    for b in betas:
        lo = to_coords(thermal_vector(spectrum, max(b - h, 0)).probs)
        hi = to_coords(thermal_vector(spectrum, b + h).probs)
        span = b + h - max(b - h, 0)
        r = (hi[1:] / hi[:-1] - lo[1:] / lo[:-1]) / span
        worst = max(worst, float(r.max()))
    return worst


def _ew(E, b):
    return np.exp(-b * np.asarray(E, dtype=float))


def d3_derivatives(E, beta):
    """Analytic f_x, f_y, their beta-derivatives and Z for d=3."""
    E1, E2 = float(E[1]), float(E[2])
    e1, e2 = math.exp(-beta * E1), math.exp(-beta * E2)
    Z = 1 + e1 + e2
    fx = E1 * e1 * (2 + e2) + E2 * e2 * (1 - e1)
    fy = (E2 - E1) * e1 * e2 + E2 * e2
    dfx = (E2 ** 2 - E1 ** 2) * e1 * e2 - 2 * E1 ** 2 * e1 - E2 ** 2 * e2
    dfy = -(E2 ** 2 - E1 ** 2) * e1 * e2 - E2 ** 2 * e2
    return {"Z": Z, "f": np.array([fx, fy]), "df": np.array([dfx, dfy]),
            "dcoords": np.array([-fx, -3 * fy]) / Z ** 2,
            "d2y_dx2": 3 * Z ** 2 * (fy * dfx - fx * dfy) / fx ** 3,
            "d2y_dx2_closed": 6 * Z ** 3 * E1 * E2 * (E2 - E1) * e1 * e2 / fx ** 3}


def d4_derivatives(E, beta):
    """Analytic f_x, f_y, f_z, their beta-derivatives and the second-order combinations for d=4."""
    E1, E2, E3 = (float(v) for v in E[1:4])
    e1, e2, e3 = (math.exp(-beta * v) for v in (E1, E2, E3))
    Z = 1 + e1 + e2 + e3
    fx = E1 * e1 * (2 + e2 + e3) + (E2 * e2 + E3 * e3) * (1 - e1)
    fy = (3 * (E2 - E1) * e1 * e2 + 3 * E2 * e2 + E3 * e3 * (1 + e1 - 2 * e2)
          + e3 * (2 * E2 * e2 - E1 * e1))
    fz = 4 * e3 * (E3 + e1 * (E3 - E1) + e2 * (E3 - E2))
    dfx = -E1 ** 2 * e1 * (2 + e2 + e3) - (E2 ** 2 * e2 + E3 ** 2 * e3) * (1 - e1)
    dfy = (E1 ** 2 * e1 * (3 * e2 + e3) - E2 ** 2 * e2 * (3 + 3 * e1 + 2 * e3)
           - E3 ** 2 * e3 * (1 + e1 - 2 * e2))
    dfz = 4 * e3 * (E1 ** 2 * e1 + E2 ** 2 * e2 - E3 ** 2 * (1 + e1 + e2))
    f = np.array([fx, fy, fz])
    df = np.array([dfx, dfy, dfz])
    combos = np.array([fy * dfx - fx * dfy, fz * dfx - fx * dfz, fz * dfy - fy * dfz])
    closed = np.array([
        2 * (E1 * E2 * e1 * e2 * (E2 - E1) + E1 * E3 * e1 * e3 * (E3 - E1)) * (3 + e3) * Z
        + 2 * E2 * E3 * e2 * e3 * (E3 - E2) * (1 + e1) * (2 + 2 * e1 - e2 + e3),
        4 * Z * e3 * (E1 * e1 * (E2 - E1) * (e2 * (E3 - E2) + 2 * E3)
                      + (E3 - E2) * E3 * (E1 * e1 * e2 + 2 * E1 * e1 + E2 * e2 * (1 - e1))),
        12 * Z * e2 * e3 * (E3 - E2) * (E1 ** 2 * e1 + E3 * (E2 - E1) * e1 + E2 * (E3 - e1 * E1)),
    ])
    second = Z ** 2 * combos / np.array([fx ** 3, fx ** 3, fy ** 3])
    return {"Z": Z, "f": f, "df": df, "dcoords": -f / Z ** 2, "combos": combos,
            "combos_closed": closed, "second": second}


def _rel(a, b, floor=1e-300):
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def _fd_shifted(E, beta, h):
    lo = shifted_coords(thermal_vector(EnergySpectrum.from_values(E, normalize=False), beta - h).probs)
    hi = shifted_coords(thermal_vector(EnergySpectrum.from_values(E, normalize=False), beta + h).probs)
    return (hi - lo) / (2 * h)


def convexity_certify(spectrum, beta_range=(0.05, 10.0), n=60, h=None):
    """
    Compare the analytic slope functions with central differences and
    evaluate the sign claims along the thermal curve.
    """
    E = spectrum.array
    d = E.size
    if d not in (3, 4):
        raise UnsupportedDimension("analytic derivatives exist for d=3 and d=4")
    betas = np.geomspace(beta_range[0], beta_range[1], n)
    rep = {"d": d, "max_rel_dcoords": 0.0, "max_rel_df": 0.0, "max_rel_second": 0.0,
           "sign_violations": 0, "closed_form_rel": [], "min_values": {}}
    mins = {}

    def upd(key, val):
        mins[key] = min(mins.get(key, math.inf), float(val))

    fn = d3_derivatives if d == 3 else d4_derivatives
    step = 1e-5 if h is None else h
    h2 = 1e-4
    for b in betas:
        an = fn(E, b)
        fd = _fd_shifted(E, b, step)
        rep["max_rel_dcoords"] = max(rep["max_rel_dcoords"], _rel(fd, an["dcoords"]))
        dfd = (fn(E, b + step)["f"] - fn(E, b - step)["f"]) / (2 * step)
        rep["max_rel_df"] = max(rep["max_rel_df"], _rel(dfd, an["df"]))
        # second derivatives along the curve through the beta parametrization
        spec = EnergySpectrum.from_values(E, normalize=False)
        c0, cp, cm = (shifted_coords(thermal_vector(spec, t).probs) for t in (b, b + h2, b - h2))
        d1 = (cp - cm) / (2 * h2)
        d2 = (cp - 2 * c0 + cm) / h2 ** 2
        if d == 3:
            num = np.array([(d2[1] * d1[0] - d1[1] * d2[0]) / d1[0] ** 3])
            ana = np.array([an["d2y_dx2"]])
            rep["closed_form_rel"].append(_rel(np.array([an["d2y_dx2_closed"]]), ana))
            upd("f_x", an["f"][0]); upd("f_y", an["f"][1])
            upd("dy_dx", 3 * an["f"][1] / an["f"][0]); upd("d2y_dx2", an["d2y_dx2"])
        else:
            pairs = ((1, 0), (2, 0), (2, 1))
            num = np.array([(d2[m] * d1[n] - d1[m] * d2[n]) / d1[n] ** 3 for m, n in pairs])
            ana = an["second"]
            rep["closed_form_rel"].append([_rel(an["combos_closed"][i:i + 1], an["combos"][i:i + 1])
                                           for i in range(3)])
            for key, val in zip(("f_x", "f_y", "f_z"), an["f"]):
                upd(key, val)
            for key, val in zip(("d2y_dx2", "d2z_dx2", "d2z_dy2"), ana):
                upd(key, val)
        # skip second-difference noise where the curvature is negligible
        mask = np.abs(ana) > 1e-6 * max(1.0, float(np.max(np.abs(ana))))
        if mask.any():
            rep["max_rel_second"] = max(rep["max_rel_second"], _rel(num[mask], ana[mask]))
    rep["min_values"] = mins
    rep["sign_violations"] = int(sum(1 for v in mins.values() if v < -1e-12))
    return rep


# --------------------------------------------------------------------------
# vertex constructions
# --------------------------------------------------------------------------

@dataclass
class VertexTransform:
    name: str
    Mq: np.ndarray
    Mr: list
    point: np.ndarray = None


def _pair_mixer(d, a, b, m):
    M = np.eye(d)
    M[a, a] = M[b, b] = m
    M[a, b] = M[b, a] = 1.0 - m
    return M


def d4_five_points():
    """Labels and matrices of A, B, C, D, E: (M_q, M_{r_1}); M_{r_2} is the identity."""
    I = np.eye(4)
    P7 = perm_matrix((1, 0, 2, 3))
    P9 = perm_matrix((1, 2, 0, 3))
    P13 = perm_matrix((2, 0, 1, 3))
    return {"A": (I, I), "B": (P7, I), "C": (P13, P7), "D": (P9, P7), "E": (P9, I)}


def d4_sign_checks(p):
    """Closed-form coordinates and cross products for the five-point argument."""
    p0, p1, p2, p3 = (float(v) for v in p)
    return {
        "x_B": (p0 - p1) * (2 * p0 + 2 * p1 - 1),
        "x_C": (p0 - p1) * (2 * p0 + 2 * p1 + p2 - 1) + (p1 - p2) * (p0 + p1 + p2),
        "y_D": 3 * (p0 - p1) * (p0 + p1 + p2 - 1 / 3) + 3 * (p1 - p2) * (p0 + p1 + p2 - 2 / 3),
        "x_E": -((p0 - p1) * (1 - p0 - p1) + (p1 - p2) * (p1 + p2)),
        "AO_x_AE": ((p0 - p1) ** 2 * (2 * p0 - 2 * p1 + 3 * p2)
                    + (p0 - p1) * (p1 - p2) * (p0 - p1 + 4 * p2) + 2 * (p1 - p2) ** 2 * (p1 + p2)),
        "EO_x_ED": 2 * p1 * (p0 - p2) * ((p0 - p1) * (1 - p1 + p2) + (p1 - p2) * (p1 + 2 * p2 - p3)),
        "DO_x_DC": ((p0 - p1) ** 2 * (p0 + p2) * ((3 * p0 + 3 * p1 - 1) + 3 * (p1 - p3))
                    + (p0 - p1) * (p1 - p2) * (3 * (p0 - p1) * (p0 + p1) + 6 * p0 * (p2 - p3)
                                               + 2 * p2 * (2 * p0 + 5 * p1 + 2 * p2 - p3))
                    + (p1 - p2) ** 2 * ((p0 - 3 * p3 * (1 - p3) + 6 * p1 * p2) + (p1 - p2)
                                        + 3 * p2 ** 2 + 2 * (p0 - p1) * (1 + 3 * p0))),
    }


def _cross_z(X, Y, Z):
    u, v = Y - X, Z - X
    return float(u[0] * v[1] - u[1] * v[0])


def d4_five_point_geometry(spectrum, beta):
    """Numerical coordinates of A..E and the three cross products, next to the closed forms."""
    dec = thermal_decomposition(spectrum, beta)
    I = np.eye(4)
    pts = {}
    for name, (Mq, Mr1) in d4_five_points().items():
        pts[name] = to_coords(equal_marginal_vector(dec, Mq, [Mr1, I]))
    O = np.array([0.0, 0.0, pts["A"][2]])
    numeric = {
        "x_B": pts["B"][0], "x_C": pts["C"][0], "y_D": pts["D"][1], "x_E": pts["E"][0],
        "AO_x_AE": _cross_z(pts["A"], O, pts["E"]),
        "EO_x_ED": _cross_z(pts["E"], O, pts["D"]),
        "DO_x_DC": _cross_z(pts["D"], O, pts["C"]),
    }
    closed = d4_sign_checks(thermal_vector(spectrum, beta).probs)
    return {"points": pts, "numeric": numeric, "closed": closed}


def _uniform_transform(d):
    J = np.full((d, d), 1.0 / d)
    return VertexTransform("uniform", J, [J] * n_free(d))


def vertex_transforms(spectrum, beta):
    """(M_q, M_r) pairs reaching v_0..v_{d-1} for d in {2, 3, 4}."""
    p = thermal_vector(spectrum, beta).probs
    d = p.size
    if d not in (2, 3, 4):
        raise UnsupportedDimension("explicit vertex constructions exist for d <= 4")
    k = n_free(d)
    I = np.eye(d)
    out = [VertexTransform("v0", I, [I] * k)]
    if d >= 3:
        s = p[0] + p[1]
        m = 1.0 - 1.0 / (2.0 * s)
        out.append(VertexTransform("v1", _pair_mixer(d, 0, 1, m), [I] * k))
    if d == 4:
        out.append(_d4_v2(spectrum, beta))
    out.append(_uniform_transform(d))
    dec = thermal_decomposition(spectrum, beta)
    for vt in out:
        vt.point = equal_marginal_vector(dec, vt.Mq, vt.Mr)
    return out


def _d4_v2(spectrum, beta):
    geo = d4_five_point_geometry(spectrum, beta)
    num = geo["numeric"]
    guard = -1e-12
    if (num["x_B"] < guard or num["x_C"] < guard or num["y_D"] < guard or num["x_E"] > -guard
            or min(num["AO_x_AE"], num["EO_x_ED"], num["DO_x_DC"]) < guard):
        raise SignCheckFailure(f"five-point signs fail: {num}")
    names = list(d4_five_points())
    pts = np.array([geo["points"][n] for n in names])
    target = np.array([0.0, 0.0, pts[0][2]])
    cert = hull_membership(target, PolytopeVertexSet(pts, names, None))
    if not cert.feasible:
        raise SignCheckFailure("v2 is not inside the five-point polygon")
    I = np.eye(4)
    Mq = np.zeros((4, 4))
    Mr1 = np.zeros((4, 4))
    five = d4_five_points()
    total = sum(cert.weights.values())
    for name, w in cert.weights.items():
        Mq += w / total * five[name][0]
        Mr1 += w / total * five[name][1]
    return VertexTransform("v2", Mq, [Mr1, I])


def reach_boundary_vertices(spectrum, beta):
    """Blocks reaching v_1..v_{d-2}."""
    dec = thermal_decomposition(spectrum, beta)
    return [lift_transforms(dec, vt.Mq, vt.Mr) for vt in vertex_transforms(spectrum, beta)[1:-1]]


def _mix(transforms, weights):
    d = transforms[0].Mq.shape[0]
    k = len(transforms[0].Mr)
    Mq = np.zeros((d, d))
    Mr = [np.zeros((d, d)) for _ in range(k)]
    for vt, w in zip(transforms, weights):
        Mq += w * vt.Mq
        for i in range(k):
            Mr[i] += w * vt.Mr[i]
    return Mq, Mr


def geometric_transforms(spectrum, beta, beta_prime):
    p = thermal_vector(spectrum, beta).probs
    d = p.size
    if d not in (2, 3, 4):
        raise UnsupportedDimension("geometric builder supports d in {2, 3, 4}")
    if beta_prime > beta:
        raise ValueError("need beta' <= beta")
    if beta_prime == beta:
        I = np.eye(d)
        return I, [I] * n_free(d)
    try:
        coeffs = curve_coefficients(spectrum, beta, beta_prime)
    except DegenerateCoordinate:
        return _lp_fallback(spectrum, beta, beta_prime)
    return _mix(vertex_transforms(spectrum, beta), coeffs.a)


def _lp_fallback(spectrum, beta, beta_prime):
    d = spectrum.d
    vs = vertex_set(spectrum, beta)
    target = to_coords(thermal_vector(spectrum, beta_prime).probs)
    cert = hull_membership(target, vs)
    if not cert.feasible:
        raise DegenerateCoordinate("target outside the vertex polytope")
    perms = labeled_permutations(d)
    k = n_free(d)
    Mq = np.zeros((d, d))
    Mr = [np.zeros((d, d)) for _ in range(k)]
    total = sum(cert.weights.values())
    for lab, w in cert.weights.items():
        Mq += w / total * perms[lab[0]]
        for i in range(k):
            Mr[i] += w / total * perms[lab[i + 1]]
    return Mq, Mr


def build_stu_geometric(spectrum, beta, beta_prime):
    Mq, Mr = geometric_transforms(spectrum, beta, beta_prime)
    return lift_transforms(thermal_decomposition(spectrum, beta), Mq, Mr)


def partner_point_d3(spectrum, beta):
    """Coordinates of Pi^(6) q + (1 + Pi) r, the swapped-q partner of p(beta)."""
    dec = thermal_decomposition(spectrum, beta)
    P6 = labeled_permutations(3)[6]
    return to_coords(equal_marginal_vector(dec, P6, [np.eye(3)]))


# --------------------------------------------------------------------------
# d = 5 recursive outlook
# --------------------------------------------------------------------------

def _d5_matrices(p):
    """Closed-form quantities and the (M_{r_1})_i family for v_1, v_2, v_3."""
    p0, p1, p2, p3, p4 = (float(v) for v in p)
    a2 = max(0.0, (p0 - p1) * (0.5 - p0 - p1))
    den1 = p0 * p1 - p2 * p3
    den2 = p4 * (p0 - p3)
    m1 = a2 / den1 if den1 > 0 else math.inf
    m2 = a2 / den2 if den2 > 0 else math.inf
    a1 = m1 * p2 * (p1 - p3) if math.isfinite(m1) else math.inf
    num2 = p0 + p1 - 2 * p2 - 3 * (p0 ** 2 - p2 ** 2)
    om2 = max(0.0, num2 / (3 * p1 * (p0 - p2))) if p1 * (p0 - p2) > 0 else math.inf
    num3 = p0 + p1 + p2 - 3 * p3 - 4 * (p0 ** 2 - p3 ** 2)
    om3 = max(0.0, num3 / (4 * p2 * (p1 - p3))) if p2 * (p1 - p3) > 0 else math.inf
    closed = {
        "a2": a2, "a1": a1, "m1": m1, "m2": m2,
        "ratio_m1_le_1": bool(m1 <= 1.0),
        "ratio_m2_le_1": bool(m2 <= 1.0),
        "lastappcond31": bool(a1 <= p0 ** 2 - p2 ** 2 - (p0 - p1) / 2 + 1e-15),
        "reld5d4": bool(num2 <= 3 * p1 * (p0 - p2) + 1e-15),
        "proofd5last": bool(num3 <= 4 * p2 * (p1 - p3) + 1e-15),
        "one_minus_m_v2": om2, "one_minus_m_v3": om3,
        # sufficient criteria under which the two inequalities are proven
        "reld5d4_proven_region": bool(p0 + p1 + p2 >= 2 / 3),
        "proofd5last_proven_region": bool(p0 + p2 + p3 >= 0.75),
    }
    mats = {}
    if closed["ratio_m1_le_1"] and closed["ratio_m2_le_1"]:
        M = np.eye(5)
        M[:3, :3] = [[1 - m1, m1, 0], [0, 1 - m1, m1], [m1, 0, 1 - m1]]
        M[3:, 3:] = [[1 - m2, m2], [m2, 1 - m2]]
        mats["v1"] = M
    if om2 <= 1.0:
        mats["v2"] = _pair_mixer(5, 0, 1, 1.0 - om2)
    if om3 <= 1.0:
        mats["v3"] = _pair_mixer(5, 1, 2, 1.0 - om3)
    return closed, mats


def d5_region_check(spectrum, beta, beta_prime=None, tol=None):
    """
    Evaluate the d=5 recursive conditions and, where every vertex is
    constructible, build and verify the STU towards ``beta_prime``.

    A vertex counts as resolved only when its closed-form conditions hold
    *and* the resulting vector ``v - p + q - (1 + Pi)(M_{r_1} - 1) r_1`` is
    nonnegative and majorised by q (the actual requirement on M_q).
    """
    p = thermal_vector(spectrum, beta).probs
    if p.size != 5:
        raise UnsupportedDimension("d5_region_check needs d=5")
    dec = thermal_decomposition(spectrum, beta)
    closed, mats = _d5_matrices(p)
    verts = target_vertices(spectrum, beta)
    I = np.eye(5)
    S = I + cyclic(5)
    needs = {"v1": ["ratio_m1_le_1", "ratio_m2_le_1", "lastappcond31"],
             "v2": ["reld5d4"], "v3": ["proofd5last"]}
    status = {}
    transforms = [VertexTransform("v0", I, [I, I])]
    for j, name in enumerate(("v1", "v2", "v3"), start=1):
        failed = [c for c in needs[name] if not closed[c]]
        entry = {"closed_form_ok": not failed, "failed_conditions": failed}
        if name not in mats:
            entry.update(constructed=False, majorised=False, resolved=False)
            entry["failed_conditions"] = failed + ["not_constructible"]
            status[name] = entry
            continue
        Mr1 = mats[name]
        w = verts[j] - p + dec.q - S @ (Mr1 - I) @ dec.r[0]
        nonneg = bool(np.all(w >= -1e-15))
        maj = bool(nonneg and weakly_majorizes(dec.q, w))
        entry.update(constructed=True, nonnegative=nonneg, majorised=maj,
                     resolved=bool(maj and not failed))
        if not maj:
            entry["failed_conditions"] = failed + ["majorisation"]
        status[name] = entry
        if entry["resolved"]:
            Mq = hlp_matrix(dec.q, np.clip(w, 0.0, None))
            transforms.append(VertexTransform(name, Mq, [Mr1, I]))
    transforms.append(_uniform_transform(5))
    resolved = all(status[n]["resolved"] for n in ("v1", "v2", "v3"))
    report = {"d": 5, "beta": float(beta), "closed_form": closed, "vertices": status,
              "resolved": resolved, "p0+p1": float(p[0] + p[1]),
              "p0+p1+p2": float(p[:3].sum()), "p0+p2+p3": float(p[0] + p[2] + p[3])}
    if resolved:
        for vt in transforms:
            vt.point = equal_marginal_vector(dec, vt.Mq, vt.Mr)
        report["vertex_errors"] = [float(np.max(np.abs(vt.point - v))) for vt, v in zip(transforms, verts)]
        bp = beta / 2 if beta_prime is None else beta_prime
        coeffs = curve_coefficients(spectrum, beta, bp)
        Mq, Mr = _mix(transforms, coeffs.a)
        blocks = lift_transforms(dec, Mq, Mr)
        stu = verify_stu(blocks, spectrum, beta, bp, tol=tol)
        report["beta_prime"] = float(bp)
        report["stu"] = {"passed": stu.passed, "deviation": stu.deviation}
    return report
