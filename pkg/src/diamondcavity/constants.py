"""Physical constants and package-wide defaults (SI unless suffixed)."""

from scipy.constants import c as SPEED_OF_LIGHT  # m/s
from scipy.constants import h as PLANCK  # J s
from scipy.constants import k as BOLTZMANN  # J/K

__all__ = [
    "SPEED_OF_LIGHT",
    "PLANCK",
    "BOLTZMANN",
    "DIAMOND_INDEX",
    "FUSED_SILICA_INDEX",
    "COATING_N_HIGH",
    "COATING_N_LOW",
    "DESIGN_WAVELENGTH_NM",
    "COATING_TARGET_TRANSMISSION",
    "ZPL_WAVELENGTH_NM",
    "GROUND_SPIN_ORBIT_GHZ",
    "EXCITED_SPIN_ORBIT_GHZ",
    "T2_CALIBRATION_PLACEHOLDER",
]

# Refractive index of diamond near 737 nm (configurable everywhere it is used).
DIAMOND_INDEX = 2.417

# Fused-silica mirror substrate, constant-index approximation near 737 nm.
FUSED_SILICA_INDEX = 1.45

# Representative quarter-wave coating. The production coating design is
# proprietary; this pair choice reaches 1000 ppm transmission at 737 nm with
# a stopband comfortably wider than 100 nm, which is all that downstream
# results depend on.
COATING_N_HIGH = 2.1
COATING_N_LOW = 1.45
DESIGN_WAVELENGTH_NM = 737.0
COATING_TARGET_TRANSMISSION = 1000e-6

# Silicon-vacancy zero-phonon line and unstrained spin-orbit splittings.
ZPL_WAVELENGTH_NM = 737.0
GROUND_SPIN_ORBIT_GHZ = 48.0
EXCITED_SPIN_ORBIT_GHZ = 259.0

# Calibration constant for the single-phonon coherence estimate,
# T2 = K / (Delta^3 * n_bar).  Units: s * Hz^3.  Placeholder magnitude chosen
# so the unstrained splitting at 4 K lands in the tens of nanoseconds; it sets
# an overall scale only and must be calibrated against a measured T2 before
# any absolute claim.
T2_CALIBRATION_PLACEHOLDER = 5.7e24
