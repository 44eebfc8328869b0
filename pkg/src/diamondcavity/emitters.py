"""Group-IV color-center fine structure under strain and ensemble spectra.

Both the orbital ground and excited doublets split as
Delta = sqrt(lambda_SO^2 + Upsilon^2), where lambda_SO is the spin-orbit
splitting and Upsilon the transverse-strain coupling; longitudinal strain
shifts the whole line pattern.  The four optical transitions sit at

    center +/- Delta_es/2 -/+ Delta_gs/2        (labeled A > B > C > D)

with the A and B lines fed from the upper excited branch and therefore
thermally weighted by exp(-h * Delta_es / kT).

Frequencies are in GHz for splittings and THz for absolute positions;
wavelengths in nm.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.special import voigt_profile

from .constants import (
    BOLTZMANN,
    EXCITED_SPIN_ORBIT_GHZ,
    GROUND_SPIN_ORBIT_GHZ,
    PLANCK,
    SPEED_OF_LIGHT,
    ZPL_WAVELENGTH_NM,
)
from .errors import ValidationError

__all__ = [
    "GroupIVLevels",
    "StrainState",
    "FineStructure",
    "EnsembleSpec",
    "splittings_from_strain",
    "strain_from_splitting",
    "splitting_to_wavelength_span_nm",
    "synthesize_zpl_spectrum",
    "synthesize_linescan",
    "load_strain_field_csv",
    "t2_phonon_limit_s",
    "thermal_occupation",
    "emitter_count",
    "density_from_fluence",
]

LINE_LABELS = ("A", "B", "C", "D")


def wavelength_to_thz(wavelength_nm):
    return SPEED_OF_LIGHT / (np.asarray(wavelength_nm) * 1e-9) / 1e12


def thz_to_wavelength_nm(frequency_thz):
    return SPEED_OF_LIGHT / (np.asarray(frequency_thz) * 1e12) / 1e-9


@dataclass(frozen=True)
class GroupIVLevels:
    """Unstrained level parameters of a group-IV center."""

    zpl_thz: float = wavelength_to_thz(ZPL_WAVELENGTH_NM)
    so_ground_ghz: float = GROUND_SPIN_ORBIT_GHZ
    so_excited_ghz: float = EXCITED_SPIN_ORBIT_GHZ

    def __post_init__(self):
        if min(self.zpl_thz, self.so_ground_ghz, self.so_excited_ghz) <= 0:
            raise ValidationError("level parameters must be positive")
        if self.so_excited_ghz <= self.so_ground_ghz:
            raise ValidationError("excited spin-orbit splitting must exceed the ground one")


@dataclass(frozen=True)
class StrainState:
    """Local strain acting on one orientation class.

    ``axial_ghz`` shifts all four lines together; the transverse couplings
    enter the ground/excited splittings in quadrature with the spin-orbit
    terms.  ``orientation_class`` is 1 or 2 (the two projected dipole classes
    on a <100> facet).
    """

    axial_ghz: float = 0.0
    transverse_ground_ghz: float = 0.0
    transverse_excited_ghz: float = 0.0
    orientation_class: int = 1

    def __post_init__(self):
        if self.transverse_ground_ghz < 0 or self.transverse_excited_ghz < 0:
            raise ValidationError("transverse strain magnitudes must be >= 0")
        if self.orientation_class not in (1, 2):
            raise ValidationError("orientation class must be 1 or 2")


@dataclass(frozen=True)
class FineStructure:
    """The four optical lines plus the two splittings that generate them."""

    line_a_thz: float
    line_b_thz: float
    line_c_thz: float
    line_d_thz: float
    gs_splitting_ghz: float
    es_splitting_ghz: float

    def __post_init__(self):
        lines = (self.line_a_thz, self.line_b_thz, self.line_c_thz, self.line_d_thz)
        if not all(x > y for x, y in zip(lines, lines[1:])):
            raise ValidationError("lines must satisfy A > B > C > D")

    @property
    def lines_thz(self):
        return np.array([self.line_a_thz, self.line_b_thz,
                         self.line_c_thz, self.line_d_thz])

    @property
    def center_thz(self):
        return 0.5 * (self.line_a_thz + self.line_d_thz)


def splittings_from_strain(levels, strain):
    """Four-line structure of one orientation class under strain."""
    gs = float(np.hypot(levels.so_ground_ghz, strain.transverse_ground_ghz))
    es = float(np.hypot(levels.so_excited_ghz, strain.transverse_excited_ghz))
    if es <= gs:
        raise ValidationError(
            f"excited splitting {es:.1f} GHz must exceed ground splitting "
            f"{gs:.1f} GHz for the A-D labeling to hold"
        )
    center = levels.zpl_thz + strain.axial_ghz * 1e-3
    half_es = 0.5 * es * 1e-3
    half_gs = 0.5 * gs * 1e-3
    return FineStructure(
        line_a_thz=center + half_es + half_gs,
        line_b_thz=center + half_es - half_gs,
        line_c_thz=center - half_es + half_gs,
        line_d_thz=center - half_es - half_gs,
        gs_splitting_ghz=gs,
        es_splitting_ghz=es,
    )


def strain_from_splitting(so_ghz, observed_splitting_ghz):
    """Transverse strain magnitude that produces an observed splitting."""
    if observed_splitting_ghz < so_ghz:
        raise ValidationError(
            f"observed splitting {observed_splitting_ghz} GHz below the "
            f"spin-orbit floor {so_ghz} GHz"
        )
    return float(np.sqrt(observed_splitting_ghz**2 - so_ghz**2))


def splitting_to_wavelength_span_nm(splitting_ghz, wavelength_nm=ZPL_WAVELENGTH_NM):
    """Wavelength span of a frequency splitting: dlambda = lambda^2 dnu / c."""
    return (wavelength_nm * 1e-9) ** 2 * splitting_ghz * 1e9 / SPEED_OF_LIGHT / 1e-9


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble line-shape and population parameters.

    The homogeneous Lorentzian FWHM follows Gamma(T) = Gamma0 + a*T^3 with
    ``t3_coefficient_mhz_per_k3`` the (configurable) cubic coefficient; the
    Gaussian inhomogeneous broadening is a standard deviation.
    ``class_mix`` is the population fraction in orientation class 1.
    """

    homogeneous_fwhm_mhz: float
    inhomogeneous_sigma_ghz: float
    temperature_k: float
    emitter_density_per_cm2: float = 0.0
    class_mix: float = 0.5
    t3_coefficient_mhz_per_k3: float = 0.0
    line_amplitudes: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.homogeneous_fwhm_mhz <= 0 or self.inhomogeneous_sigma_ghz < 0:
            raise ValidationError("linewidths must be positive")
        if self.temperature_k <= 0:
            raise ValidationError("temperature must be > 0")
        if not 0.0 <= self.class_mix <= 1.0:
            raise ValidationError("class mix must lie in [0, 1]")
        for key in self.line_amplitudes:
            if key not in LINE_LABELS:
                raise ValidationError(f"unknown line label {key!r}")

    def homogeneous_fwhm_at_temperature_mhz(self):
        return self.homogeneous_fwhm_mhz + \
            self.t3_coefficient_mhz_per_k3 * self.temperature_k**3


def thermal_occupation(splitting_ghz, temperature_k):
    """Boltzmann weight exp(-h * Delta / kT) of the upper branch."""
    return float(np.exp(-PLANCK * splitting_ghz * 1e9 /
                        (BOLTZMANN * temperature_k)))


def _line_weights(structure, spec):
    upper = thermal_occupation(structure.es_splitting_ghz, spec.temperature_k)
    weights = {"A": upper, "B": upper, "C": 1.0, "D": 1.0}
    for label, factor in spec.line_amplitudes.items():
        weights[label] *= factor
    return weights


def zpl_spectrum_thz(levels, strains, spec, frequency_grid_thz):
    """Ensemble spectrum versus absolute frequency (THz).

    ``strains`` is one StrainState or a sequence of them (one per orientation
    class); class weights come from ``spec.class_mix``.  Each line is a unit
    area Voigt profile (homogeneous Lorentzian x inhomogeneous Gaussian)
    scaled by its thermal weight, so the integrated spectrum equals the sum
    of the line weights regardless of the widths.
    """
    grid = np.asarray(frequency_grid_thz, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValidationError("need a 1-d frequency grid")
    if isinstance(strains, StrainState):
        strains = (strains,)
    sigma_thz = spec.inhomogeneous_sigma_ghz * 1e-3
    gamma_hwhm_thz = 0.5 * spec.homogeneous_fwhm_at_temperature_mhz() * 1e-6
    out = np.zeros_like(grid)
    uncovered = []
    for strain in strains:
        structure = splittings_from_strain(levels, strain)
        weights = _line_weights(structure, spec)
        class_weight = spec.class_mix if strain.orientation_class == 1 \
            else 1.0 - spec.class_mix
        for label, line in zip(LINE_LABELS, structure.lines_thz):
            if not grid[0] <= line <= grid[-1]:
                uncovered.append(f"{label} (class {strain.orientation_class}) "
                                 f"at {line:.6f} THz")
                continue
            out += class_weight * weights[label] * \
                voigt_profile(grid - line, sigma_thz, gamma_hwhm_thz)
    if uncovered:
        raise ValidationError("grid does not cover lines: " + "; ".join(uncovered))
    return out


def synthesize_zpl_spectrum(levels, strains, spec, wavelength_grid_nm):
    """Ensemble spectrum sampled on a wavelength grid (nm)."""
    grid = np.asarray(wavelength_grid_nm, dtype=float)
    if np.any(grid <= 0):
        raise ValidationError("wavelengths must be positive")
    freq = wavelength_to_thz(grid)
    order = np.argsort(freq)
    spectrum = zpl_spectrum_thz(levels, strains, spec, freq[order])
    out = np.empty_like(spectrum)
    out[order] = spectrum
    return out


def synthesize_linescan(strain_field, positions_um, levels, spec, wavelength_grid_nm):
    """Spectrum per position: a (len(positions), len(grid)) intensity map.

    ``strain_field`` maps a position (um) to a sequence of StrainState, one
    per orientation class present at that position.
    """
    rows = []
    for x in np.asarray(positions_um, dtype=float):
        rows.append(synthesize_zpl_spectrum(levels, strain_field(x), spec,
                                            wavelength_grid_nm))
    return np.vstack(rows)


def load_strain_field_csv(path, excited_transverse_ratio=1.0):
    """Strain field from ``position_um,class,axial_ghz,transverse_ghz`` rows.

    ``transverse_ghz`` is the ground-state transverse coupling; the excited
    coupling is scaled from it by ``excited_transverse_ratio``.  Returns a
    callable position -> tuple of per-class StrainState, linearly
    interpolating between the tabulated positions.
    """
    per_class = {}
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader, None)
        expected = ["position_um", "class", "axial_ghz", "transverse_ghz"]
        if header is None or [h.strip() for h in header] != expected:
            raise ValidationError(f"strain field {path} must start with "
                                  f"header {','.join(expected)}")
        for row in reader:
            if not row:
                continue
            try:
                x = float(row[0])
                cls = int(row[1])
                axial = float(row[2])
                transverse = float(row[3])
            except (IndexError, ValueError) as exc:
                raise ValidationError(f"bad strain row {row!r} in {path}") from exc
            per_class.setdefault(cls, []).append((x, axial, transverse))
    if not per_class:
        raise ValidationError(f"no strain rows in {path}")
    tables = {}
    for cls, rows in per_class.items():
        rows.sort()
        arr = np.array(rows, dtype=float)
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise ValidationError(f"duplicate positions for class {cls} in {path}")
        tables[cls] = arr

    def strain_at(position_um):
        states = []
        for cls in sorted(tables):
            arr = tables[cls]
            axial = np.interp(position_um, arr[:, 0], arr[:, 1])
            transverse = np.interp(position_um, arr[:, 0], arr[:, 2])
            states.append(StrainState(
                axial_ghz=float(axial),
                transverse_ground_ghz=float(transverse),
                transverse_excited_ghz=float(transverse) * excited_transverse_ratio,
                orientation_class=cls,
            ))
        return tuple(states)

    return strain_at


def t2_phonon_limit_s(gs_splitting_ghz, temperature_k, calibration,
                      saturation_s=1.0):
    """Order-of-magnitude coherence time from the single-phonon process.

    T2 = K / (Delta^3 * n_bar) with n_bar the Bose occupation of the
    ground-state splitting.  ``calibration`` (units s * Hz^3) must be pinned
    to a measured coherence time; as T -> 0 the occupation vanishes, so the
    estimate is capped at ``saturation_s``.
    """
    if gs_splitting_ghz <= 0 or temperature_k <= 0 or calibration <= 0:
        raise ValidationError("splitting, temperature and calibration must be > 0")
    delta_hz = gs_splitting_ghz * 1e9
    x = PLANCK * delta_hz / (BOLTZMANN * temperature_k)
    if x > 700.0:  # occupation underflows; the cap applies
        return saturation_s
    occupation = 1.0 / np.expm1(x)
    if occupation == 0.0:
        return saturation_s
    return float(min(calibration / (delta_hz**3 * occupation), saturation_s))


def emitter_count(density_per_cm2, area_um2):
    """Expected emitters inside an area (1 um^2 = 1e-8 cm^2)."""
    if density_per_cm2 < 0 or area_um2 < 0:
        raise ValidationError("density and area must be >= 0")
    return density_per_cm2 * area_um2 * 1e-8


def density_from_fluence(fluence_per_cm2, creation_yield):
    """Emitter areal density from implantation fluence and creation yield."""
    if fluence_per_cm2 < 0:
        raise ValidationError("fluence must be >= 0")
    if not 0.0 <= creation_yield <= 1.0:
        raise ValidationError("creation yield must lie in [0, 1]")
    return fluence_per_cm2 * creation_yield
