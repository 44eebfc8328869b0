"""Project configuration: one JSON file wiring the library modules together.

Every numeric key carries its unit as a suffix (``_nm``, ``_um``, ``_ghz``,
...); unknown keys are rejected so that a typo cannot silently fall back to
a default.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .constants import (
    DIAMOND_INDEX,
    EXCITED_SPIN_ORBIT_GHZ,
    GROUND_SPIN_ORBIT_GHZ,
)
from .emitters import EnsembleSpec, GroupIVLevels
from .errors import ValidationError
from .geometry import CavityGeometry
from .stacks import default_coating, load_stack

__all__ = ["ProjectConfig", "load_config", "default_config_dict"]


def default_config_dict():
    """The configuration equivalent to passing no config file at all."""
    return {
        "stack_file": None,
        "geometry": {
            "effective_length_um": 10.7,
            "roc_x_um": 20.3,
            "roc_y_um": 20.3,
            "wavelength_nm": 737.0,
            "numerical_aperture": 0.55,
        },
        "membrane": {
            "thickness_nm": 2200.0,
            "refractive_index": DIAMOND_INDEX,
            "air_gap_nm": 0.0,
        },
        "emitter": {
            "ground_spin_orbit_ghz": GROUND_SPIN_ORBIT_GHZ,
            "excited_spin_orbit_ghz": EXCITED_SPIN_ORBIT_GHZ,
            "homogeneous_fwhm_mhz": 300.0,
            "inhomogeneous_sigma_ghz": 15.0,
            "temperature_k": 4.0,
            "fluence_per_cm2": 3e11,
            "creation_yield": 0.1,
        },
        "spectrum": {"min_nm": 550.0, "max_nm": 850.0, "points": 601},
        "dispersion": {
            "wavelength_min_nm": 707.0,
            "wavelength_max_nm": 807.0,
            "wavelength_points": 26,
            "gap_min_nm": 4000.0,
            "gap_max_nm": 6500.0,
        },
        "implantation": {"depth_min_nm": 25.0, "depth_max_nm": 75.0},
        "analysis": {"ple_window_fwhm": 1.0, "lifetime_guard_samples": 2},
        "output_dir": "out",
    }


_SECTION_KEYS = {
    "geometry": {"effective_length_um", "roc_x_um", "roc_y_um", "wavelength_nm",
                 "numerical_aperture"},
    "membrane": {"thickness_nm", "refractive_index", "air_gap_nm"},
    "emitter": {"ground_spin_orbit_ghz", "excited_spin_orbit_ghz",
                "homogeneous_fwhm_mhz", "inhomogeneous_sigma_ghz",
                "temperature_k", "fluence_per_cm2", "creation_yield"},
    "spectrum": {"min_nm", "max_nm", "points"},
    "dispersion": {"wavelength_min_nm", "wavelength_max_nm", "wavelength_points",
                   "gap_min_nm", "gap_max_nm"},
    "implantation": {"depth_min_nm", "depth_max_nm"},
    "analysis": {"ple_window_fwhm", "lifetime_guard_samples"},
}


@dataclass(frozen=True)
class ProjectConfig:
    raw: dict
    base_dir: str = "."

    def __post_init__(self):
        merged = default_config_dict()
        for key, value in self.raw.items():
            if key in ("stack_file", "output_dir"):
                merged[key] = value
                continue
            if key not in _SECTION_KEYS:
                raise ValidationError(f"unknown config section {key!r}")
            if not isinstance(value, dict):
                raise ValidationError(f"config section {key!r} must be an object")
            unknown = set(value) - _SECTION_KEYS[key]
            if unknown:
                raise ValidationError(
                    f"unknown keys in config section {key!r}: {sorted(unknown)} "
                    "(units are part of the key name)")
            merged[key].update(value)
        object.__setattr__(self, "raw", merged)
        if merged["stack_file"] is not None:
            path = self._resolve(merged["stack_file"])
            if not os.path.exists(path):
                raise ValidationError(f"stack file not found: {path}")

    def _resolve(self, path):
        if os.path.isabs(path):
            return path
        return os.path.join(self.base_dir, path)

    def coating(self):
        if self.raw["stack_file"] is None:
            return default_coating()
        return load_stack(self._resolve(self.raw["stack_file"]))

    def geometry(self):
        g = self.raw["geometry"]
        return CavityGeometry(
            effective_length_um=float(g["effective_length_um"]),
            roc_x_um=float(g["roc_x_um"]),
            roc_y_um=float(g["roc_y_um"]),
            wavelength_nm=float(g["wavelength_nm"]),
            numerical_aperture=float(g["numerical_aperture"]),
        )

    def levels(self):
        e = self.raw["emitter"]
        from .emitters import wavelength_to_thz
        return GroupIVLevels(
            zpl_thz=float(wavelength_to_thz(self.raw["geometry"]["wavelength_nm"])),
            so_ground_ghz=float(e["ground_spin_orbit_ghz"]),
            so_excited_ghz=float(e["excited_spin_orbit_ghz"]),
        )

    def ensemble(self):
        e = self.raw["emitter"]
        from .emitters import density_from_fluence
        return EnsembleSpec(
            homogeneous_fwhm_mhz=float(e["homogeneous_fwhm_mhz"]),
            inhomogeneous_sigma_ghz=float(e["inhomogeneous_sigma_ghz"]),
            temperature_k=float(e["temperature_k"]),
            emitter_density_per_cm2=density_from_fluence(
                float(e["fluence_per_cm2"]), float(e["creation_yield"])),
        )

    def output_dir(self):
        return self._resolve(self.raw["output_dir"])


def load_config(path=None):
    """Config from a JSON file, or the built-in defaults when path is None."""
    if path is None:
        return ProjectConfig({}, base_dir=os.getcwd())
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config {path} must hold a JSON object")
    return ProjectConfig(raw, base_dir=os.path.dirname(os.path.abspath(path)))
