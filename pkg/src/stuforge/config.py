"""Default tolerances. ``STUFORGE_TOL`` overrides the verification tolerance."""

import os

CONSTRUCTION_TOL = 1e-10
SUM_TOL = 1e-12
DEFAULT_VERIFY_TOL = 1e-9


def verify_tol():
    raw = os.environ.get("STUFORGE_TOL")
    if raw is None or raw == "":
        return DEFAULT_VERIFY_TOL
    return float(raw)
