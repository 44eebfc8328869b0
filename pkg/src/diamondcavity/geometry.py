"""Gaussian-mode geometry of the hemispherical cavity.

Lengths are in micrometers and wavelengths in nanometers unless stated
otherwise.  The fundamental-mode relations used throughout:

    w0 = sqrt(lambda/pi) * (L*RoC - L^2)^(1/4)      beam waist
    V  = (pi/4) * L * w0^2                          mode volume
    A  = pi * w0^2 / 4                              mode area
    w_fs = 2*lambda / (pi * NA)                     confocal beam waist

Elliptic mirrors are handled per axis; scalar outputs use the geometric mean
of the two per-axis waists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .constants import SPEED_OF_LIGHT
from .errors import StabilityError, ValidationError

__all__ = [
    "CavityGeometry",
    "beam_waist_um",
    "beam_waist_axes_um",
    "mode_volume",
    "mode_area_um2",
    "confocal_waist_um",
    "confocal_area_um2",
    "free_spectral_range_thz",
    "linewidth_from_finesse_ghz",
    "mode_number",
    "effective_length_um",
]


@dataclass(frozen=True)
class CavityGeometry:
    """Hemispherical cavity: effective length, mirror curvature, wavelength."""

    effective_length_um: float
    roc_x_um: float
    roc_y_um: float = None
    wavelength_nm: float = 737.0
    numerical_aperture: float = None

    def __post_init__(self):
        if self.roc_y_um is None:
            object.__setattr__(self, "roc_y_um", self.roc_x_um)
        if self.wavelength_nm <= 0:
            raise ValidationError("wavelength must be > 0")
        if self.effective_length_um <= 0:
            raise ValidationError("effective length must be > 0")
        if self.effective_length_um >= min(self.roc_x_um, self.roc_y_um):
            raise StabilityError(
                f"unstable geometry: L_eff = {self.effective_length_um} um must be "
                f"below the smallest radius of curvature "
                f"{min(self.roc_x_um, self.roc_y_um)} um"
            )
        if self.numerical_aperture is not None and not (0 < self.numerical_aperture <= 1):
            raise ValidationError("numerical aperture must be in (0, 1]")


def _axis_waist_m(wavelength_m, length_m, roc_m):
    if length_m >= roc_m:
        raise StabilityError("cavity length must be below the radius of curvature")
    return math.sqrt(wavelength_m / math.pi) * (length_m * roc_m - length_m**2) ** 0.25


def beam_waist_axes_um(geometry):
    """Per-axis fundamental waists (w_x, w_y) in micrometers."""
    lam = geometry.wavelength_nm * 1e-9
    length = geometry.effective_length_um * 1e-6
    wx = _axis_waist_m(lam, length, geometry.roc_x_um * 1e-6)
    wy = _axis_waist_m(lam, length, geometry.roc_y_um * 1e-6)
    return wx * 1e6, wy * 1e6


def beam_waist_um(geometry):
    """Scalar beam waist: geometric mean of the per-axis waists."""
    wx, wy = beam_waist_axes_um(geometry)
    return math.sqrt(wx * wy)


class ModeVolume(NamedTuple):
    um3: float
    lambda_cubed: float


def mode_volume(geometry):
    """Fundamental mode volume, in um^3 and in cubic wavelengths."""
    w0 = beam_waist_um(geometry)
    v_um3 = (math.pi / 4.0) * geometry.effective_length_um * w0**2
    lam_um = geometry.wavelength_nm * 1e-3
    return ModeVolume(v_um3, v_um3 / lam_um**3)


def mode_area_um2(geometry):
    w0 = beam_waist_um(geometry)
    return math.pi * w0**2 / 4.0


def confocal_waist_um(wavelength_nm, numerical_aperture):
    """Free-space confocal beam waist 2*lambda/(pi*NA), in micrometers."""
    if not (0 < numerical_aperture <= 1):
        raise ValidationError("numerical aperture must be in (0, 1]")
    if wavelength_nm <= 0:
        raise ValidationError("wavelength must be > 0")
    return 2.0 * (wavelength_nm * 1e-3) / (math.pi * numerical_aperture)


def confocal_area_um2(wavelength_nm, numerical_aperture):
    w = confocal_waist_um(wavelength_nm, numerical_aperture)
    return math.pi * w**2 / 4.0


def free_spectral_range_thz(effective_length_um):
    """FSR = c / (2 L_eff)."""
    if effective_length_um <= 0:
        raise ValidationError("effective length must be > 0")
    return SPEED_OF_LIGHT / (2.0 * effective_length_um * 1e-6) / 1e12


def linewidth_from_finesse_ghz(effective_length_um, finesse):
    """Cavity linewidth kappa/2pi = FSR / finesse, in GHz."""
    if finesse <= 0:
        raise ValidationError("finesse must be > 0")
    return free_spectral_range_thz(effective_length_um) * 1e3 / finesse


def mode_number(effective_length_um, wavelength_nm):
    """Longitudinal mode number from L_eff = m * lambda / 2 (rounded)."""
    return int(round(2.0 * effective_length_um * 1e3 / wavelength_nm))


def effective_length_um(mode_num, wavelength_nm):
    """Effective length of longitudinal mode m at the given wavelength."""
    if mode_num < 1:
        raise ValidationError("mode number must be >= 1")
    return mode_num * wavelength_nm * 1e-3 / 2.0
