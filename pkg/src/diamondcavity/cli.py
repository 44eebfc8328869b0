"""Command-line front end.

Exit codes: 0 on success, 1 when an analysis fails (e.g. a fit does not
converge), 2 for usage, configuration, or I/O errors.  Output files carry no
timestamps and use fixed formatting, so identical inputs give identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analysis, cqed, dispersion, emitters, membrane
from .config import load_config
from .errors import AnalysisError, ValidationError
from .fields import DepthDistribution, field_profile
from .stacks import stack_spectrum, write_spectrum_csv

__all__ = ["main"]


def _write_json(payload, path):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def _ensure_outdir(config, override):
    out = override if override is not None else config.output_dir()
    os.makedirs(out, exist_ok=True)
    return out


def _cmd_stack(args):
    config = load_config(args.config)
    out = _ensure_outdir(config, args.out)
    coating = config.coating()
    mem = config.raw["membrane"]
    stack = membrane.membrane_on_mirror(
        float(mem["thickness_nm"]), coating=coating,
        n_diamond=float(mem["refractive_index"]),
        air_gap_nm=float(mem["air_gap_nm"]))
    wrote = []
    if args.spectrum or not (args.field or args.overlap):
        spec = config.raw["spectrum"]
        grid = np.linspace(float(spec["min_nm"]), float(spec["max_nm"]),
                           int(spec["points"]))
        path = os.path.join(out, "mirror_spectrum.csv")
        write_spectrum_csv(stack_spectrum(coating, grid), path)
        wrote.append(path)
        path = os.path.join(out, "membrane_spectrum.csv")
        write_spectrum_csv(stack_spectrum(stack, grid), path)
        wrote.append(path)
    if args.field:
        lam = float(config.raw["geometry"]["wavelength_nm"])
        profile = field_profile(stack, lam, grid_step_nm=1.0)
        path = os.path.join(out, "field_profile.csv")
        tmp = f"{path}.tmp"
        with open(tmp, "w") as fh:
            fh.write("depth_nm,normalized_intensity\n")
            for z, i in zip(profile.depth_nm, profile.intensity):
                fh.write(f"{z:.3f},{i:.9g}\n")
        os.replace(tmp, path)
        wrote.append(path)
    if args.overlap:
        imp = config.raw["implantation"]
        lam = float(config.raw["geometry"]["wavelength_nm"])
        ions = DepthDistribution.uniform(float(imp["depth_min_nm"]),
                                         float(imp["depth_max_nm"]))
        result = membrane.implantation_overlap(
            float(mem["thickness_nm"]), ions_from_bond=ions,
            wavelength_nm=lam, coating=coating,
            n_diamond=float(mem["refractive_index"]))
        path = os.path.join(out, "implantation_overlap.json")
        _write_json({
            "overlap": result.overlap,
            "mode_depth_from_bond_nm": result.mode_depth_from_bond_nm,
            "intensity_at_mode": result.intensity_at_mode,
            "membrane_peak_fraction": result.membrane_peak_fraction,
        }, path)
        wrote.append(path)
    for path in wrote:
        print(path)
    return 0


def _cmd_dispersion(args):
    config = load_config(args.config)
    out = _ensure_outdir(config, args.out)
    disp = config.raw["dispersion"]
    mem = config.raw["membrane"]
    if float(disp["wavelength_min_nm"]) >= float(disp["wavelength_max_nm"]):
        raise ValidationError("empty wavelength range in dispersion config")
    wavelengths = np.linspace(float(disp["wavelength_min_nm"]),
                              float(disp["wavelength_max_nm"]),
                              int(disp["wavelength_points"]))
    if args.no_membrane:
        cavity = dispersion.bare_cavity(config.coating())
    else:
        cavity = dispersion.hybrid_cavity(
            float(mem["thickness_nm"]), coating=config.coating(),
            n_diamond=float(mem["refractive_index"]))
    chart = dispersion.resonance_dispersion(
        cavity, wavelengths, float(disp["gap_min_nm"]), float(disp["gap_max_nm"]))
    path = os.path.join(out, "mode_chart.csv")
    dispersion.write_mode_chart_csv(chart, path)
    if chart.diagnostic:
        print(f"warning: {chart.diagnostic}", file=sys.stderr)
    print(path)
    return 0


def _cmd_report(args):
    config = load_config(args.config)
    out = _ensure_outdir(config, args.out)
    report = cqed.build_report(
        config.geometry(),
        mirror_transmissions_ppm=args.mirror_loss_ppm,
        finesse_experimental=args.finesse,
        tau_free_ns=args.tau_free,
        tau_cavity_ns=args.tau_cavity,
        branching_ratio=args.branching_ratio,
        emitter_index=float(config.raw["membrane"]["refractive_index"]),
    )
    if args.finesse_reduced is not None:
        from .geometry import mode_area_um2
        loss = analysis.emitter_loss_ppm(args.finesse_reduced, args.finesse)
        area = mode_area_um2(config.geometry())
        sigma = analysis.ensemble_cross_section_cm2(loss, area)
        extra = [
            ("finesse_reduced", float(args.finesse_reduced), "",
             "cavity length scan on resonance with the emitters"),
            ("emitter_loss", loss, "ppm", "finesse reduction"),
            ("mode_area", area, "um^2", "beam waist"),
            ("ensemble_cross_section", sigma, "cm^2", "emitter loss and mode area"),
        ]
        if args.emitter_number is not None:
            extra.append(("single_cross_section",
                          analysis.single_cross_section_cm2(sigma, args.emitter_number),
                          "cm^2", "ensemble cross-section and emitter number"))
        report = cqed.CQEDReport(report.entries + tuple(extra))
    if args.format == "json":
        path = os.path.join(out, "report.json")
        cqed.write_report_json(report, path)
        print(path)
    else:
        print(report.format_table())
    return 0


def _cmd_analyze(args):
    config = load_config(args.config)
    out = _ensure_outdir(config, args.out)
    trace = analysis.read_trace_csv(args.input)
    lam = float(config.raw["geometry"]["wavelength_nm"])
    if args.mode == "scan":
        result = analysis.extract_finesse(trace, lam)
        payload = {
            "finesse": result.finesse,
            "nm_per_unit": result.nm_per_unit,
            "resonances": [
                {"center": f.center, "fwhm": f.fwhm, "amplitude": f.amplitude,
                 "offset": f.offset, "goodness": f.goodness}
                for f in result.resonance_pair
            ],
            "wavelength_nm": lam,
        }
        name = "finesse.json"
    elif args.mode == "lifetime":
        guard = int(config.raw["analysis"]["lifetime_guard_samples"])
        fit = analysis.fit_lifetime(trace, args.pulse_end, guard_samples=guard)
        payload = {
            "tau_ns": fit.tau_ns,
            "amplitude": fit.amplitude,
            "background": fit.background,
            "window_start_ns": fit.window_start_ns,
            "goodness": fit.goodness,
        }
        name = "lifetime.json"
    elif args.mode == "spectrum":
        fit = analysis.analyze_fine_structure(trace)
        payload = {
            "line_centers_thz": [float(v) for v in fit.line_centers_thz],
            "gs_splitting_ghz": fit.gs_splitting_ghz,
            "es_splitting_ghz": fit.es_splitting_ghz,
            "consistency_ghz": fit.consistency_ghz,
        }
        name = "fine_structure.json"
    else:  # ple
        fit = analysis.fit_lorentzian(trace)
        payload = {
            "center": fit.center, "fwhm": fit.fwhm, "amplitude": fit.amplitude,
            "offset": fit.offset, "goodness": fit.goodness,
        }
        name = "resonance.json"
    path = os.path.join(out, name)
    _write_json(payload, path)
    print(path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diamondcavity",
        description="Model membrane microcavities and analyze cavity scan data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stack", help="mirror/membrane spectra, field, ion overlap")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--spectrum", action="store_true", help="R/T/A spectra (default)")
    p.add_argument("--field", action="store_true", help="standing-wave profile")
    p.add_argument("--overlap", action="store_true", help="implantation overlap")
    p.set_defaults(func=_cmd_stack)

    p = sub.add_parser("dispersion", help="resonance mode chart")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--no-membrane", action="store_true",
                   help="bare two-mirror cavity")
    p.set_defaults(func=_cmd_dispersion)

    p = sub.add_parser("report", help="derived cavity/emitter parameter table")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--finesse", type=float, required=True,
                   help="experimental finesse")
    p.add_argument("--tau-free", type=float, required=True, help="ns")
    p.add_argument("--tau-cavity", type=float, required=True, help="ns")
    p.add_argument("--finesse-reduced", type=float, default=None,
                   help="emitter-reduced finesse for the absorption rows")
    p.add_argument("--emitter-number", type=float, default=None)
    p.add_argument("--branching-ratio", type=float, default=None)
    p.add_argument("--mirror-loss-ppm", type=float, nargs="+",
                   default=[1000.0, 1000.0])
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("analyze", help="fit a measurement CSV")
    p.add_argument("mode", choices=("scan", "lifetime", "ple", "spectrum"))
    p.add_argument("input", help="trace CSV (#meta header plus abscissa,value)")
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--pulse-end", type=float, default=0.0,
                   help="laser pulse end (ns) for lifetime fits")
    p.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AnalysisError as exc:
        print(f"analysis failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
