"""Resonance dispersion of the tunable membrane cavity.

Scans the air gap of a mirror | gap | (membrane) | mirror stack over a
wavelength range, refines every transmission maximum, and organizes the
resonances into branches of constant longitudinal mode number.  Each branch
point carries the fraction of electric field energy (n^2 |E|^2) stored in the
air gap versus the membrane, which classifies it as air-like or diamond-like
at the 50% threshold.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .constants import DIAMOND_INDEX
from .errors import ValidationError
from .fields import _region_waves
from .stacks import LayerStack, OpticalLayer, default_coating, stack_response

__all__ = [
    "TunableCavity",
    "bare_cavity",
    "hybrid_cavity",
    "BranchPoint",
    "Branch",
    "ModeChart",
    "resonance_dispersion",
    "write_mode_chart_csv",
]

AIR_LIKE = "air-like"
DIAMOND_LIKE = "diamond-like"


@dataclass(frozen=True)
class TunableCavity:
    """A stack with one designated interior layer acting as the tunable gap."""

    stack: LayerStack
    gap_layer: int
    membrane_layer: int | None = None

    def __post_init__(self):
        n = len(self.stack.interior)
        if not 0 <= self.gap_layer < n:
            raise ValidationError("gap layer index outside the interior range")
        if self.membrane_layer is not None and not 0 <= self.membrane_layer < n:
            raise ValidationError("membrane layer index outside the interior range")

    def at_gap(self, gap_nm):
        """Concrete stack with the gap layer set to ``gap_nm``."""
        inner = list(self.stack.interior)
        inner[self.gap_layer] = replace(inner[self.gap_layer], thickness_nm=float(gap_nm))
        return LayerStack((self.stack.layers[0], *inner, self.stack.layers[-1]),
                          label=self.stack.label)

    def membrane_optical_thickness_nm(self):
        if self.membrane_layer is None:
            return 0.0
        lyr = self.stack.interior[self.membrane_layer]
        return complex(lyr.refractive_index).real * lyr.thickness_nm


def _coating_parts(coating):
    if coating is None:
        coating = default_coating()
    return coating.interior, coating.layers[-1]


def bare_cavity(coating=None, placeholder_gap_nm=1000.0):
    """substrate | mirror | air gap | mirror | substrate, no membrane."""
    inner, substrate = _coating_parts(coating)
    layers = (
        substrate,
        *inner[::-1],
        OpticalLayer(1.0 + 0.0j, placeholder_gap_nm),
        *inner,
        substrate,
    )
    return TunableCavity(LayerStack(layers, label="bare cavity"),
                         gap_layer=len(inner))


def hybrid_cavity(membrane_thickness_nm, coating=None, n_diamond=DIAMOND_INDEX,
                  placeholder_gap_nm=1000.0):
    """substrate | mirror | air gap | membrane | mirror | substrate."""
    if membrane_thickness_nm <= 0:
        raise ValidationError("membrane thickness must be > 0")
    inner, substrate = _coating_parts(coating)
    layers = (
        substrate,
        *inner[::-1],
        OpticalLayer(1.0 + 0.0j, placeholder_gap_nm),
        OpticalLayer(complex(n_diamond), float(membrane_thickness_nm)),
        *inner,
        substrate,
    )
    return TunableCavity(LayerStack(layers, label="membrane cavity"),
                         gap_layer=len(inner), membrane_layer=len(inner) + 1)


@dataclass(frozen=True)
class BranchPoint:
    wavelength_nm: float
    gap_nm: float
    mode_number: int
    air_energy_fraction: float
    classification: str


@dataclass
class Branch:
    branch_id: int
    points: list

    @property
    def wavelengths_nm(self):
        return np.array([p.wavelength_nm for p in self.points])

    @property
    def gaps_nm(self):
        return np.array([p.gap_nm for p in self.points])


@dataclass
class ModeChart:
    branches: list
    diagnostic: str = ""

    def all_points(self):
        return [p for b in self.branches for p in b.points]


def _golden_max(func, lo, hi, tol):
    """Golden-section maximization of a unimodal scalar function."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = func(c), func(d)
    while (b - a) > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = func(d)
        else:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = func(c)
    return 0.5 * (a + b)


def _energy_fraction(cavity, wavelength_nm, gap_nm):
    """Fraction of electric field energy (n^2 |E|^2) in the gap vs membrane.

    Evaluated analytically per region from the wave amplitudes, so no
    sampling grid is involved.  Returns 1.0 when there is no membrane.
    """
    if cavity.membrane_layer is None:
        return 1.0
    stack = cavity.at_gap(gap_nm)
    regions = _region_waves(stack, wavelength_nm)

    def region_energy(interior_index):
        layer = stack.interior[interior_index]
        fwd, bwd, k = regions[interior_index + 1]
        d = layer.thickness_nm
        n = complex(layer.index_at(wavelength_nm))
        # integral of |E|^2 = |f e^{ikz} + b e^{-ikz}|^2 over the layer,
        # in closed form (k real for lossless layers).
        kr = float(np.real(k))
        cross = (fwd * np.conj(bwd) * (np.exp(2j * kr * d) - 1.0) / (2j * kr))
        integral = (abs(fwd) ** 2 + abs(bwd) ** 2) * d + 2.0 * cross.real
        return (n.real ** 2) * float(integral)

    in_gap = region_energy(cavity.gap_layer)
    in_membrane = region_energy(cavity.membrane_layer)
    return in_gap / (in_gap + in_membrane)


def resonance_dispersion(
    cavity,
    wavelengths_nm,
    gap_min_nm,
    gap_max_nm,
    coarse_step_nm=None,
    refine_tol_nm=0.01,
    classify=True,
):
    """Mode chart of the tunable cavity over wavelength and gap ranges.

    For each wavelength, transmission maxima over the gap are located on a
    coarse grid (default step lambda/50) and refined by golden-section
    search.  Resonances are grouped into branches by gap continuity across
    wavelengths; mode numbers follow L_eff = gap + membrane optical
    thickness = m * lambda / 2.
    """
    wavelengths = np.atleast_1d(np.asarray(wavelengths_nm, dtype=float))
    if np.any(wavelengths <= 0):
        raise ValidationError("wavelengths must be > 0")
    if not (0 < gap_min_nm < gap_max_nm):
        raise ValidationError("need 0 < gap_min < gap_max")
    membrane_path = cavity.membrane_optical_thickness_nm()

    open_branches = []  # (branch_id, last_gap_nm, last_lambda_nm, points)
    next_id = 0
    found_any = False
    previous_lam = None
    for lam in wavelengths:
        step = coarse_step_nm if coarse_step_nm is not None else lam / 50.0
        gaps = np.arange(gap_min_nm, gap_max_nm + 0.5 * step, step)
        _, trans, _ = stack_response(cavity.stack, lam,
                                     thickness_override=(cavity.gap_layer, gaps))
        interior = np.flatnonzero(
            (trans[1:-1] >= trans[:-2]) & (trans[1:-1] > trans[2:])) + 1

        def transmission(gap, lam=lam):
            _, t, _ = stack_response(cavity.stack, lam,
                                     thickness_override=(cavity.gap_layer, gap))
            return t

        resonances = []
        for i in interior:
            gap = _golden_max(transmission, gaps[i - 1], gaps[i + 1], refine_tol_nm)
            resonances.append(gap)
        resonances.sort()
        found_any = found_any or bool(resonances)

        # Continuity matching: extend the branch whose last gap is nearest,
        # within an eighth of the free spectral range in gap.  Only branches
        # seen at the immediately preceding wavelength stay matchable, so a
        # branch that left the gap window cannot capture a newcomer.
        tol = lam / 8.0
        used = set()
        for gap in resonances:
            best = None
            for bi, (bid, last_gap, last_lam, points) in enumerate(open_branches):
                if bi in used or last_lam != previous_lam:
                    continue
                dist = abs(gap - last_gap)
                if dist < tol and (best is None or dist < best[0]):
                    best = (dist, bi)
            frac = _energy_fraction(cavity, lam, gap) if classify else 1.0
            point = BranchPoint(
                wavelength_nm=float(lam),
                gap_nm=float(gap),
                mode_number=int(round(2.0 * (gap + membrane_path) / lam)),
                air_energy_fraction=float(frac),
                classification=AIR_LIKE if frac >= 0.5 else DIAMOND_LIKE,
            )
            if best is None:
                open_branches.append((next_id, gap, lam, [point]))
                used.add(len(open_branches) - 1)
                next_id += 1
            else:
                _, bi = best
                bid, _, _, points = open_branches[bi]
                points.append(point)
                open_branches[bi] = (bid, gap, lam, points)
                used.add(bi)
        previous_lam = lam

    branches = [Branch(bid, points) for bid, _, _, points in
                sorted(open_branches, key=lambda item: item[0])]
    diagnostic = ""
    if not found_any:
        diagnostic = (
            f"no transmission maxima for any wavelength; gap window "
            f"[{gap_min_nm:g}, {gap_max_nm:g}] nm may miss the resonances"
        )
    return ModeChart(branches, diagnostic)


def write_mode_chart_csv(chart, path):
    """Emit ``branch_id,m,wavelength_nm,air_gap_nm,classification`` rows."""
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write("branch_id,m,wavelength_nm,air_gap_nm,classification\n")
        for branch in chart.branches:
            for p in branch.points:
                fh.write(f"{branch.branch_id},{p.mode_number},"
                         f"{p.wavelength_nm:.4f},{p.gap_nm:.4f},{p.classification}\n")
    os.replace(tmp, path)
