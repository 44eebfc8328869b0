"""Transfer-matrix optics for planar layer stacks at normal incidence.

Conventions
-----------
Complex refractive indices follow n = n' + i*n'' with n'' >= 0 for absorbing
media (time dependence exp(-i*omega*t), forward waves exp(+i*k*z)).  A stack
is an ordered list of layers from the incidence side to the exit side; the
first and last layers are semi-infinite boundary media and must be lossless
so that reflectance and transmittance are well defined.  Transmittance uses
the admittance factor Re(n_exit)/Re(n_incident), so unequal boundary media
are handled correctly.

All thicknesses and wavelengths are in nanometers.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    COATING_N_HIGH,
    COATING_N_LOW,
    COATING_TARGET_TRANSMISSION,
    DESIGN_WAVELENGTH_NM,
    FUSED_SILICA_INDEX,
)
from .errors import StackError, ValidationError

__all__ = [
    "OpticalLayer",
    "LayerStack",
    "SpectralResponse",
    "stack_response",
    "stack_spectrum",
    "design_quarter_wave_dbr",
    "default_coating",
    "load_stack",
    "save_stack",
    "write_spectrum_csv",
]


@dataclass(frozen=True)
class OpticalLayer:
    """One homogeneous layer: complex index plus thickness in nm.

    Semi-infinite boundary layers set ``semi_infinite=True``; their thickness
    is ignored.  ``index_table`` optionally supplies tabulated dispersion as
    ``(wavelengths_nm, complex_indices)``; between samples the index is
    linearly interpolated and ``refractive_index`` is used outside the table
    range.
    """

    refractive_index: complex
    thickness_nm: float = 0.0
    semi_infinite: bool = False
    index_table: tuple | None = None

    def __post_init__(self):
        n = complex(self.refractive_index)
        if not (np.isfinite(n.real) and np.isfinite(n.imag)):
            raise StackError("refractive index must be finite")
        if n.real < 1.0:
            raise StackError(f"refractive index real part must be >= 1, got {n.real}")
        if n.imag < 0.0:
            raise StackError(f"refractive index imaginary part must be >= 0, got {n.imag}")
        if not self.semi_infinite:
            if not np.isfinite(self.thickness_nm) or self.thickness_nm <= 0.0:
                raise StackError(
                    f"finite layer thickness must be > 0 nm, got {self.thickness_nm}"
                )
        if self.index_table is not None:
            lam, idx = self.index_table
            lam = np.asarray(lam, dtype=float)
            idx = np.asarray(idx, dtype=complex)
            if lam.ndim != 1 or lam.shape != idx.shape or lam.size < 2:
                raise StackError("index_table must be two equal-length 1-d arrays")
            if np.any(np.diff(lam) <= 0):
                raise StackError("index_table wavelengths must be strictly increasing")

    def index_at(self, wavelength_nm):
        """Complex index at the given wavelength(s)."""
        if self.index_table is None:
            return complex(self.refractive_index)
        lam, idx = self.index_table
        lam = np.asarray(lam, dtype=float)
        idx = np.asarray(idx, dtype=complex)
        w = np.asarray(wavelength_nm, dtype=float)
        re = np.interp(w, lam, idx.real, left=self.refractive_index.real,
                       right=self.refractive_index.real)
        im = np.interp(w, lam, idx.imag, left=self.refractive_index.imag,
                       right=self.refractive_index.imag)
        return re + 1j * im


@dataclass(frozen=True)
class LayerStack:
    """Ordered layers from the incidence side to the exit side.

    Exactly the first and last layers are semi-infinite, and both must be
    lossless.  Interior layers have finite positive thickness.
    """

    layers: tuple
    label: str = ""

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) < 2:
            raise StackError("a stack needs at least two layers (both boundaries)")
        if not (layers[0].semi_infinite and layers[-1].semi_infinite):
            raise StackError("first and last layers must be semi-infinite")
        for lyr in layers[1:-1]:
            if lyr.semi_infinite:
                raise StackError("only the first and last layers may be semi-infinite")
        for lyr in (layers[0], layers[-1]):
            if complex(lyr.refractive_index).imag != 0.0:
                raise StackError("boundary media must be lossless (zero imaginary index)")

    @property
    def interior(self):
        return self.layers[1:-1]

    @property
    def n_incident(self):
        return complex(self.layers[0].refractive_index).real

    @property
    def n_exit(self):
        return complex(self.layers[-1].refractive_index).real

    @property
    def total_interior_thickness_nm(self):
        return float(sum(l.thickness_nm for l in self.interior))

    def interface_positions_nm(self):
        """Depth of every interface, measured from the first interface."""
        d = np.array([l.thickness_nm for l in self.interior], dtype=float)
        return np.concatenate([[0.0], np.cumsum(d)])

    def reversed(self):
        return LayerStack(tuple(self.layers[::-1]), label=self.label)

    def with_interior_inserted(self, position, layer):
        """New stack with ``layer`` inserted before interior index ``position``."""
        inner = list(self.interior)
        inner.insert(position, layer)
        return LayerStack((self.layers[0], *inner, self.layers[-1]), label=self.label)


@dataclass(frozen=True)
class SpectralResponse:
    """Reflectance/transmittance/absorptance on a wavelength grid."""

    wavelength_nm: np.ndarray
    reflectance: np.ndarray
    transmittance: np.ndarray
    absorptance: np.ndarray

    def __post_init__(self):
        for name in ("reflectance", "transmittance", "absorptance"):
            v = getattr(self, name)
            if np.any(v < -1e-9) or np.any(v > 1.0 + 1e-9):
                raise ValidationError(f"{name} outside [0, 1]")
        budget = self.reflectance + self.transmittance + self.absorptance
        if np.max(np.abs(budget - 1.0)) > 1e-9:
            raise ValidationError("R + T + A deviates from 1 beyond 1e-9")


def _accumulate_matrix(stack, wavelength_nm, thickness_override=None):
    """Characteristic matrix of the interior layers, left-multiplied in order.

    ``thickness_override`` is an optional ``(interior_index, values_nm)`` pair
    used to sweep one layer's thickness; values broadcast against the
    wavelength argument.
    """
    lam = np.asarray(wavelength_nm, dtype=float)
    if np.any(lam <= 0):
        raise ValidationError("wavelength must be > 0")
    shape = lam.shape
    if thickness_override is not None:
        shape = np.broadcast_shapes(shape, np.shape(thickness_override[1]))
    m00 = np.ones(shape, dtype=complex)
    m11 = np.ones(shape, dtype=complex)
    m01 = np.zeros(shape, dtype=complex)
    m10 = np.zeros(shape, dtype=complex)
    for i, layer in enumerate(stack.interior):
        d = layer.thickness_nm
        if thickness_override is not None and i == thickness_override[0]:
            d = np.asarray(thickness_override[1], dtype=float)
        n = layer.index_at(lam)
        delta = 2.0 * np.pi * n * d / lam
        cosd = np.cos(delta)
        sind = np.sin(delta)
        # Off-diagonal sign follows the exp(+ikz - i*omega*t) convention with
        # Im(n) >= 0 absorbing, matching the field solver in fields.py.
        a01 = -1j * sind / n
        a10 = -1j * n * sind
        new00 = m00 * cosd + m01 * a10
        new01 = m00 * a01 + m01 * cosd
        new10 = m10 * cosd + m11 * a10
        new11 = m10 * a01 + m11 * cosd
        m00, m01, m10, m11 = new00, new01, new10, new11
    return m00, m01, m10, m11


def _stack_amplitudes(stack, wavelength_nm, thickness_override=None):
    """Complex reflection and transmission amplitudes (r, t)."""
    m00, m01, m10, m11 = _accumulate_matrix(stack, wavelength_nm, thickness_override)
    n0 = stack.n_incident
    ns = stack.n_exit
    b = m00 + m01 * ns
    c = m10 + m11 * ns
    denom = n0 * b + c
    r = (n0 * b - c) / denom
    t = 2.0 * n0 / denom
    return r, t


def stack_response(stack, wavelength_nm, thickness_override=None):
    """(R, T, A) of a stack at normal incidence.

    ``wavelength_nm`` may be a scalar or an array.  R and T come from the
    field amplitudes independently; A = 1 - R - T is the absorbed fraction
    and vanishes (to rounding) for lossless stacks.
    """
    r, t = _stack_amplitudes(stack, wavelength_nm, thickness_override)
    refl = np.abs(r) ** 2
    trans = (stack.n_exit / stack.n_incident) * np.abs(t) ** 2
    absorbed = 1.0 - refl - trans
    # Lossless stacks leave A at rounding level, occasionally just below zero.
    absorbed = np.where(np.abs(absorbed) < 1e-12, 0.0, absorbed)
    if np.ndim(wavelength_nm) == 0 and thickness_override is None:
        return float(refl), float(trans), float(absorbed)
    return refl, trans, absorbed


def stack_spectrum(stack, wavelength_grid_nm):
    """Evaluate ``stack_response`` on a grid and bundle a SpectralResponse."""
    grid = np.asarray(wavelength_grid_nm, dtype=float)
    refl, trans, absorbed = stack_response(stack, grid)
    return SpectralResponse(grid, refl, trans, np.clip(absorbed, 0.0, 1.0))


def quarter_wave_pairs(n_pairs, n_high, n_low, design_wavelength_nm):
    """Interior layers of ``n_pairs`` high/low quarter-wave pairs, high first."""
    high = OpticalLayer(complex(n_high), design_wavelength_nm / (4.0 * n_high))
    low = OpticalLayer(complex(n_low), design_wavelength_nm / (4.0 * n_low))
    return (high, low) * n_pairs


def design_quarter_wave_dbr(
    n_high,
    n_low,
    n_substrate,
    design_wavelength_nm,
    target_transmission,
    n_incident=1.0,
    max_pairs=60,
):
    """Smallest quarter-wave mirror meeting a transmission target.

    Builds incident | (H L) x N | substrate with the high-index layer facing
    the incidence medium and returns the first N (starting at 0, the bare
    interface) whose transmission at the design wavelength is at or below
    ``target_transmission``.
    """
    if not (n_high > n_low >= 1.0):
        raise ValidationError("require n_high > n_low >= 1")
    if not (0.0 < target_transmission <= 1.0):
        raise ValidationError("target transmission must be in (0, 1]")
    if design_wavelength_nm <= 0:
        raise ValidationError("design wavelength must be > 0")
    ambient = OpticalLayer(complex(n_incident), semi_infinite=True)
    substrate = OpticalLayer(complex(n_substrate), semi_infinite=True)
    best = math.inf
    for n_pairs in range(max_pairs + 1):
        stack = LayerStack(
            (ambient, *quarter_wave_pairs(n_pairs, n_high, n_low, design_wavelength_nm),
             substrate),
            label=f"{n_pairs}-pair quarter-wave mirror",
        )
        _, trans, _ = stack_response(stack, design_wavelength_nm)
        best = min(best, trans)
        if trans <= target_transmission:
            return stack
    raise ValidationError(
        f"target transmission {target_transmission:.3g} unreachable with "
        f"{max_pairs} pairs; best achieved {best:.3g}"
    )


def default_coating():
    """The packaged representative mirror coating (air | pairs | silica)."""
    path = os.path.join(os.path.dirname(__file__), "data", "default_coating.json")
    return load_stack(path, label="default coating")


def load_stack(path, label=None):
    """Read a stack from a JSON list of layer records.

    Each record holds ``index_real``, ``index_imag``, ``thickness_nm`` and,
    on the two boundary entries, ``"semi_infinite": true``.
    """
    try:
        with open(path) as fh:
            records = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid stack file {path}: {exc}") from exc
    if not isinstance(records, list):
        raise ValidationError(f"stack file {path} must contain a JSON list")
    layers = []
    for rec in records:
        try:
            n = complex(float(rec["index_real"]), float(rec.get("index_imag", 0.0)))
            semi = bool(rec.get("semi_infinite", False))
            thick = float(rec.get("thickness_nm", 0.0))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad layer record in {path}: {rec!r}") from exc
        layers.append(OpticalLayer(n, thick, semi_infinite=semi))
    if label is None:
        label = os.path.splitext(os.path.basename(path))[0]
    return LayerStack(tuple(layers), label=label)


def save_stack(stack, path):
    records = []
    for lyr in stack.layers:
        n = complex(lyr.refractive_index)
        rec = {"index_real": n.real, "index_imag": n.imag}
        if lyr.semi_infinite:
            rec["semi_infinite"] = True
        else:
            rec["thickness_nm"] = lyr.thickness_nm
        records.append(rec)
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")
    os.replace(tmp, path)


def write_spectrum_csv(spectrum, path):
    """Emit ``wavelength_nm,R,T,A`` rows with stable formatting."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("wavelength_nm,R,T,A\n")
        for lam, r, t, a in zip(
            spectrum.wavelength_nm,
            spectrum.reflectance,
            spectrum.transmittance,
            spectrum.absorptance,
        ):
            fh.write(f"{lam:.6f},{r:.12g},{t:.12g},{a:.12g}\n")
    os.replace(tmp, path)
