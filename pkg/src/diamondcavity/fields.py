"""Standing-wave intensity profiles inside layer stacks and ion-depth overlap.

The field solver reconstructs forward/backward plane-wave amplitudes region
by region from the exit side (transmitted amplitude set to 1), which keeps
tangential-field continuity exact at every interface.  Depth is measured from
the first interface (incidence medium at negative depth) in nanometers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "FieldProfile",
    "DepthDistribution",
    "OverlapResult",
    "field_profile",
    "field_overlap",
]


def _region_waves(stack, wavelength_nm):
    """Per-region (forward, backward, wavenumber) amplitudes, exit wave = 1.

    Regions run from the incidence medium through every interior layer to the
    exit medium.  Local coordinates start at each region's left edge; the
    incidence medium uses the first interface as its origin (coordinates are
    negative inside it).
    """
    lam = float(wavelength_nm)
    if lam <= 0:
        raise ValidationError("wavelength must be > 0")
    n_exit = stack.n_exit
    k_exit = 2.0 * np.pi * n_exit / lam
    regions = [(1.0 + 0.0j, 0.0 + 0.0j, k_exit)]
    e_tan = 1.0 + 0.0j                # tangential E at the working interface
    h_tan = n_exit * (1.0 + 0.0j)     # tangential H in admittance units
    for layer in reversed(stack.interior):
        n = layer.index_at(lam)
        k = 2.0 * np.pi * n / lam
        phase = np.exp(1j * k * layer.thickness_nm)
        fwd_end = 0.5 * (e_tan + h_tan / n)
        bwd_end = 0.5 * (e_tan - h_tan / n)
        fwd = fwd_end / phase
        bwd = bwd_end * phase
        regions.append((fwd, bwd, k))
        e_tan = fwd + bwd
        h_tan = n * (fwd - bwd)
    n0 = stack.n_incident
    k0 = 2.0 * np.pi * n0 / lam
    fwd0 = 0.5 * (e_tan + h_tan / n0)
    bwd0 = 0.5 * (e_tan - h_tan / n0)
    regions.append((fwd0, bwd0, k0))
    regions.reverse()
    return regions


@dataclass(frozen=True)
class FieldProfile:
    """|E|^2 through a stack, normalized so the global peak equals 1."""

    depth_nm: np.ndarray
    intensity: np.ndarray
    layer_edges_nm: np.ndarray
    wavelength_nm: float
    label: str = ""

    def __post_init__(self):
        if np.any(self.intensity < 0):
            raise ValidationError("intensity must be non-negative")
        if self.intensity.size and self.intensity.max() != 1.0:
            raise ValidationError("intensity must be normalized to peak 1")

    def intensity_at(self, depth_nm):
        return np.interp(depth_nm, self.depth_nm, self.intensity)

    def integral_between(self, z0_nm, z1_nm):
        """Trapezoidal integral of the intensity over [z0, z1]."""
        if z1_nm <= z0_nm:
            raise ValidationError("need z1 > z0")
        lo = max(z0_nm, float(self.depth_nm[0]))
        hi = min(z1_nm, float(self.depth_nm[-1]))
        if hi <= lo:
            return 0.0
        inside = self.depth_nm[(self.depth_nm > lo) & (self.depth_nm < hi)]
        z = np.concatenate([[lo], inside, [hi]])
        return float(np.trapezoid(self.intensity_at(z), z))


def field_profile(
    stack,
    wavelength_nm,
    grid_step_nm=1.0,
    incident_margin_nm=200.0,
    exit_margin_nm=200.0,
    label="",
):
    """Sample |E|^2 through the stack on a uniform depth grid.

    The grid extends ``incident_margin_nm`` into the incidence medium and
    ``exit_margin_nm`` into the exit medium.  The step must be at most 5 nm
    and no coarser than a quarter of the thinnest interior layer.
    """
    if grid_step_nm <= 0 or grid_step_nm > 5.0:
        raise ValidationError("grid step must be in (0, 5] nm")
    interior = stack.interior
    if interior:
        thinnest = min(l.thickness_nm for l in interior)
        if grid_step_nm > thinnest / 4.0:
            raise ValidationError(
                f"grid step {grid_step_nm} nm too coarse for thinnest layer "
                f"{thinnest:.3g} nm (need <= {thinnest / 4.0:.3g} nm)"
            )
    regions = _region_waves(stack, wavelength_nm)
    edges = stack.interface_positions_nm()
    total = edges[-1]
    z = np.arange(-incident_margin_nm, total + exit_margin_nm + 0.5 * grid_step_nm,
                  grid_step_nm)
    # Region index per sample: 0 = incidence medium, 1..N interior, N+1 exit.
    idx = np.searchsorted(edges, z, side="right")
    # Local coordinate relative to the region's left edge (first interface for
    # the incidence medium, so its coordinates are negative).
    left = np.concatenate([[0.0], edges])[idx]
    local = z - left
    fwd = np.array([r[0] for r in regions])
    bwd = np.array([r[1] for r in regions])
    kv = np.array([r[2] for r in regions])
    e = fwd[idx] * np.exp(1j * kv[idx] * local) + bwd[idx] * np.exp(-1j * kv[idx] * local)
    intensity = np.abs(e) ** 2
    intensity = intensity / intensity.max()
    return FieldProfile(z, intensity, edges, float(wavelength_nm), label=label)


@dataclass(frozen=True)
class DepthDistribution:
    """Probability density over depth (1/nm), e.g. an implantation profile."""

    depth_nm: np.ndarray
    density_per_nm: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.depth_nm, dtype=float)
        rho = np.asarray(self.density_per_nm, dtype=float)
        object.__setattr__(self, "depth_nm", z)
        object.__setattr__(self, "density_per_nm", rho)
        if z.ndim != 1 or z.shape != rho.shape or z.size < 2:
            raise ValidationError("need matching 1-d depth and density arrays")
        if np.any(np.diff(z) <= 0):
            raise ValidationError("depth grid must be strictly increasing")
        if np.any(rho < 0):
            raise ValidationError("density must be non-negative")
        norm = np.trapezoid(rho, z)
        if abs(norm - 1.0) > 1e-6:
            raise ValidationError(f"density must integrate to 1, got {norm:.8f}")

    @classmethod
    def uniform(cls, lo_nm, hi_nm, samples=201):
        if hi_nm <= lo_nm:
            raise ValidationError("need hi > lo")
        z = np.linspace(lo_nm, hi_nm, samples)
        rho = np.full_like(z, 1.0 / (hi_nm - lo_nm))
        return cls(z, rho)

    @classmethod
    def gaussian(cls, mean_nm, sigma_nm, half_span_sigmas=5.0, samples=501):
        if sigma_nm <= 0:
            raise ValidationError("sigma must be > 0")
        z = np.linspace(mean_nm - half_span_sigmas * sigma_nm,
                        mean_nm + half_span_sigmas * sigma_nm, samples)
        rho = np.exp(-0.5 * ((z - mean_nm) / sigma_nm) ** 2)
        rho /= np.trapezoid(rho, z)
        return cls(z, rho)

    def mode_depth_nm(self):
        """Depth of maximum density; the midpoint of a flat-topped maximum."""
        rho = self.density_per_nm
        top = np.flatnonzero(rho >= rho.max() * (1.0 - 1e-12))
        return float(0.5 * (self.depth_nm[top[0]] + self.depth_nm[top[-1]]))


@dataclass(frozen=True)
class OverlapResult:
    overlap: float
    mode_depth_nm: float
    intensity_at_mode: float


def field_overlap(profile, ions):
    """Density-weighted mean intensity, plus the intensity at the density mode.

    Integrates density(z) * intensity(z) over the common depth range of the
    two inputs; with the profile normalized to peak 1 the result lies in
    [0, 1].  Density mass outside the profile's grid is not counted.
    """
    lo = max(float(profile.depth_nm[0]), float(ions.depth_nm[0]))
    hi = min(float(profile.depth_nm[-1]), float(ions.depth_nm[-1]))
    if hi <= lo:
        raise ValidationError("field profile and depth distribution do not overlap")
    mask = (ions.depth_nm >= lo) & (ions.depth_nm <= hi)
    z = ions.depth_nm[mask]
    if z.size < 2:
        raise ValidationError("overlap region contains fewer than two density samples")
    rho = ions.density_per_nm[mask]
    overlap = float(np.trapezoid(rho * profile.intensity_at(z), z))
    mode = ions.mode_depth_nm()
    return OverlapResult(overlap, mode, float(profile.intensity_at(mode)))
