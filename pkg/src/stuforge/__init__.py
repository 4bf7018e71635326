"""
stuforge: explicit symmetrically thermalizing unitaries (STUs) for pairs of
identical thermal qudits, with the conditions, bounds and cross-checks
needed to verify them.
"""

__version__ = "0.1.0"

from .block_unitary import BlockUnitary, StuReport, verify_stu
from .bounds import AsymmetricProblem, asym_pure_optimum, max_correlation_curve, subadditivity_check
from .lcs import decompose, thermal_decomposition
from .majorize import birkhoff_decompose, hlp_construct, horn_lift, majorizes
from .spectra import EnergySpectrum, beta_for_energy, entropy, thermal_vector
from .stu_geometric import build_stu_geometric
from .stu_majorised import build_stu_majorised
from .stu_norm import build_stu_norm

__all__ = [
    "AsymmetricProblem", "BlockUnitary", "EnergySpectrum", "StuReport", "asym_pure_optimum",
    "beta_for_energy", "birkhoff_decompose", "build_stu_geometric", "build_stu_majorised",
    "build_stu_norm", "decompose", "entropy", "hlp_construct", "horn_lift", "majorizes",
    "max_correlation_curve", "subadditivity_check", "thermal_decomposition", "thermal_vector",
    "verify_stu",
]
