"""Scalar cavity-QED figures of merit and the parameter report.

The chain implemented here:

    F        = 2*pi / (sum of round-trip losses)
    Q        = m * F
    f_P      = (3 / 4 pi^2) * Q / (V_lambda3 * n^3)      (V in cubic wavelengths)
    F_P,eff  = tau_free / tau_cavity = 1 + xi * f_P
    C        = F_P,eff - 1
    beta     = C / (1 + C)
    C        = 4 g^2 / (kappa * gamma)

Rates g, kappa, gamma are all handled as "/2pi" frequencies in GHz; the
cooperativity relation is invariant under that common convention.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from dataclasses import dataclass

from .errors import ValidationError
from .geometry import (
    beam_waist_um,
    linewidth_from_finesse_ghz,
    mode_number,
    mode_volume,
)

__all__ = [
    "finesse_from_losses",
    "quality_factor",
    "purcell_factor",
    "PurcellResult",
    "purcell_effective",
    "coupling_from_cooperativity",
    "cooperativity_from_coupling",
    "free_space_decay_ghz",
    "CQEDReport",
    "build_report",
    "write_report_json",
]


def finesse_from_losses(losses_ppm):
    """Finesse 2*pi over the total round-trip loss (given per pass in ppm)."""
    losses = [float(x) for x in losses_ppm]
    if any(x < 0 for x in losses):
        raise ValidationError("losses must be >= 0")
    total = sum(losses) * 1e-6
    if total <= 0.0:
        raise ValidationError("total loss must be > 0 for a finite finesse")
    return 2.0 * math.pi / total


def quality_factor(mode_num, finesse):
    """Q = m * F for a cavity operated on longitudinal mode m."""
    if mode_num < 1 or finesse <= 0:
        raise ValidationError("need mode number >= 1 and finesse > 0")
    return mode_num * finesse


def purcell_factor(q_factor, mode_volume_lambda3, emitter_index):
    """Ideal-emitter Purcell factor (3 / 4 pi^2) * Q / (V * n^3).

    ``mode_volume_lambda3`` is the mode volume in cubic free-space
    wavelengths; ``emitter_index`` is the refractive index of the medium
    hosting the emitter (diamond for an embedded color center; the choice is
    the caller's because a hybrid cavity leaves it ambiguous).
    """
    if min(q_factor, mode_volume_lambda3, emitter_index) <= 0:
        raise ValidationError("Q, V and n must be positive")
    return (3.0 / (4.0 * math.pi**2)) * q_factor / \
        (mode_volume_lambda3 * emitter_index**3)


@dataclass(frozen=True)
class PurcellResult:
    effective_purcell: float
    cooperativity: float
    beta: float
    inferred_ideal_purcell: float | None  # (F - 1) / xi, when xi given
    enhanced: bool


def purcell_effective(tau_free_ns, tau_cavity_ns, branching_ratio=None):
    """Lifetime-ratio Purcell factor and the derived C and beta.

    ``tau_cavity > tau_free`` is physically possible off resonance and yields
    F < 1 with a warning rather than an error.  With a branching ratio xi the
    ideal-emitter Purcell factor consistent with F = 1 + xi * f_P is
    reported too.
    """
    if tau_free_ns <= 0 or tau_cavity_ns <= 0:
        raise ValidationError("lifetimes must be > 0")
    if branching_ratio is not None and not 0.0 < branching_ratio <= 1.0:
        raise ValidationError("branching ratio must lie in (0, 1]")
    effective = tau_free_ns / tau_cavity_ns
    enhanced = effective >= 1.0
    if not enhanced:
        warnings.warn(
            f"cavity lifetime {tau_cavity_ns} ns exceeds free-space lifetime "
            f"{tau_free_ns} ns: no enhancement", stacklevel=2)
    cooperativity = effective - 1.0
    beta = cooperativity / (1.0 + cooperativity)
    inferred = None
    if branching_ratio is not None:
        inferred = cooperativity / branching_ratio
    return PurcellResult(effective, cooperativity, beta, inferred, enhanced)


def coupling_from_cooperativity(cooperativity, kappa_ghz, gamma_ghz):
    """Coupling rate g/2pi from C = 4 g^2 / (kappa * gamma)."""
    if cooperativity < 0:
        raise ValidationError("cooperativity must be >= 0")
    if kappa_ghz <= 0 or gamma_ghz <= 0:
        raise ValidationError("kappa and gamma must be > 0")
    return 0.5 * math.sqrt(cooperativity * kappa_ghz * gamma_ghz)


def cooperativity_from_coupling(g_ghz, kappa_ghz, gamma_ghz):
    if kappa_ghz <= 0 or gamma_ghz <= 0:
        raise ValidationError("kappa and gamma must be > 0")
    return 4.0 * g_ghz**2 / (kappa_ghz * gamma_ghz)


def free_space_decay_ghz(tau_free_ns, convention="angular"):
    """Emitter decay rate as gamma/2pi in GHz.

    ``convention="angular"`` treats 1/tau as an angular rate, so
    gamma/2pi = 1/(2*pi*tau); ``convention="linear"`` reports 1/tau directly.
    """
    if tau_free_ns <= 0:
        raise ValidationError("lifetime must be > 0")
    rate_ghz = 1.0 / tau_free_ns  # 1/ns = GHz
    if convention == "angular":
        return rate_ghz / (2.0 * math.pi)
    if convention == "linear":
        return rate_ghz
    raise ValidationError("convention must be 'angular' or 'linear'")


@dataclass(frozen=True)
class CQEDReport:
    """Derived cavity/emitter parameter set with per-entry provenance."""

    entries: tuple  # of (name, value, unit, origin)

    def as_dict(self):
        return {name: {"value": value, "unit": unit, "origin": origin}
                for name, value, unit, origin in self.entries}

    def format_table(self):
        rows = [("Parameter", "Value", "Unit", "Origin")]
        for name, value, unit, origin in self.entries:
            if isinstance(value, float):
                text = f"{value:.6g}"
            else:
                text = str(value)
            rows.append((name, text, unit, origin))
        widths = [max(len(r[i]) for r in rows) for i in range(4)]
        lines = []
        for i, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)


def build_report(
    geometry,
    mirror_transmissions_ppm,
    finesse_experimental,
    tau_free_ns,
    tau_cavity_ns,
    extra_losses_ppm=(),
    branching_ratio=None,
    emitter_index=2.417,
    gamma_convention="angular",
):
    """Assemble the derived parameter report from declared inputs.

    Every row carries its origin: which measurement or relation produced it.
    Q uses the experimental finesse and the mode number of the operating
    geometry.
    """
    losses = list(mirror_transmissions_ppm) + list(extra_losses_ppm)
    finesse_theory = finesse_from_losses(losses)
    m = mode_number(geometry.effective_length_um, geometry.wavelength_nm)
    q = quality_factor(m, finesse_experimental)
    kappa = linewidth_from_finesse_ghz(geometry.effective_length_um,
                                       finesse_experimental)
    waist = beam_waist_um(geometry)
    volume = mode_volume(geometry)
    ideal = purcell_factor(q, volume.lambda_cubed, emitter_index)
    purcell = purcell_effective(tau_free_ns, tau_cavity_ns,
                                branching_ratio=branching_ratio)
    gamma = free_space_decay_ghz(tau_free_ns, convention=gamma_convention)
    coupling = coupling_from_cooperativity(max(purcell.cooperativity, 0.0),
                                           kappa, gamma)
    entries = [
        ("finesse_theoretical", finesse_theory, "", "mirror transmission budget"),
        ("finesse_experimental", float(finesse_experimental), "", "cavity length scan"),
        ("mode_number", m, "", "effective length and wavelength"),
        ("quality_factor", q, "", "experimental finesse and mode number"),
        ("kappa_over_2pi", kappa, "GHz", "experimental finesse and effective length"),
        ("beam_waist", waist, "um", "effective length and mirror curvature"),
        ("mode_volume", volume.lambda_cubed, "lambda^3", "beam waist"),
        ("mode_volume_um3", volume.um3, "um^3", "beam waist"),
        ("purcell_ideal", ideal, "", "quality factor and mode volume"),
        ("tau_free", float(tau_free_ns), "ns", "fitted lifetime data"),
        ("tau_cavity", float(tau_cavity_ns), "ns", "fitted lifetime data"),
        ("purcell_effective", purcell.effective_purcell, "", "lifetime ratio"),
        ("cooperativity", purcell.cooperativity, "", "effective Purcell factor"),
        ("beta", purcell.beta, "", "cooperativity"),
        ("gamma_over_2pi", gamma, "GHz", "free-space lifetime"),
        ("g_over_2pi", coupling, "GHz", "cooperativity, kappa and gamma"),
    ]
    if branching_ratio is not None:
        entries.insert(9, ("branching_ratio", float(branching_ratio), "",
                           "declared input"))
        entries.insert(10, ("purcell_ideal_from_lifetimes",
                            purcell.inferred_ideal_purcell, "",
                            "lifetime ratio and branching ratio"))
    return CQEDReport(tuple(entries))


def write_report_json(report, path):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(report.as_dict(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
