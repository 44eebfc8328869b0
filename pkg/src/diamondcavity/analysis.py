"""Fitting of experimental records: length scans, lifetimes, PLE sweeps.

Every fitter is a deterministic function of the data plus a fixed,
documented initialization rule, so repeated runs are bit-identical:

* Lorentzian: center at the extremum, FWHM from the half-height crossing
  span, offset from the median of the outer quartiles.
* Exponential: background from the trace tail, tau from a log-linear
  regression on the upper half of the decay.

Reflection traces carry dips; they are inverted before fitting based on the
``channel`` metadata.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit
from scipy.signal import find_peaks

from .constants import SPEED_OF_LIGHT
from .errors import AnalysisError, FitConvergenceError, ValidationError

__all__ = [
    "ScanTrace",
    "read_trace_csv",
    "write_trace_csv",
    "lorentzian",
    "ResonanceFit",
    "fit_lorentzian",
    "FinesseResult",
    "extract_finesse",
    "emitter_loss_ppm",
    "ensemble_cross_section_cm2",
    "single_cross_section_cm2",
    "LifetimeFit",
    "fit_lifetime",
    "PLEResult",
    "aggregate_ple",
    "thickness_from_fringes_nm",
    "FineStructureFit",
    "analyze_fine_structure",
]


@dataclass(frozen=True)
class ScanTrace:
    """Sampled record: strictly monotone abscissa plus detector ordinate.

    ``metadata`` keys in use: ``units`` (abscissa unit), ``channel``
    (reflection | transmission | fluorescence), ``temperature_K``,
    ``excitation_nm``.
    """

    abscissa: np.ndarray
    ordinate: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.abscissa, dtype=float)
        y = np.asarray(self.ordinate, dtype=float)
        object.__setattr__(self, "abscissa", x)
        object.__setattr__(self, "ordinate", y)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValidationError("abscissa and ordinate must be matching 1-d arrays")
        if x.size < 16:
            raise ValidationError("a trace needs at least 16 samples")
        steps = np.diff(x)
        if not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValidationError("abscissa must be strictly monotone")

    @property
    def channel(self):
        return str(self.metadata.get("channel", "transmission"))

    def sorted(self):
        if self.abscissa[0] <= self.abscissa[-1]:
            return self
        return ScanTrace(self.abscissa[::-1], self.ordinate[::-1],
                         dict(self.metadata))

    def window(self, lo, hi):
        x = self.abscissa
        mask = (x >= lo) & (x <= hi)
        if mask.sum() < 16:
            raise ValidationError("window keeps fewer than 16 samples")
        return ScanTrace(x[mask], self.ordinate[mask], dict(self.metadata))


def read_trace_csv(path):
    """Read ``abscissa,value`` rows preceded by ``#meta key=value`` lines."""
    metadata = {}
    xs, ys = [], []
    with open(path) as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#meta"):
                body = line[len("#meta"):].strip()
                if "=" not in body:
                    raise ValidationError(f"{path}:{line_no}: bad meta line {line!r}")
                key, value = body.split("=", 1)
                metadata[key.strip()] = value.strip()
                continue
            if line.startswith("#"):
                continue
            parts = line.split(",")
            if parts[0].strip().lower() in ("abscissa", "wavelength_nm", "time_ns"):
                continue  # column header
            try:
                xs.append(float(parts[0]))
                ys.append(float(parts[1]))
            except (IndexError, ValueError) as exc:
                raise ValidationError(f"{path}:{line_no}: bad data row {line!r}") from exc
    if len(xs) < 16:
        raise ValidationError(f"{path}: fewer than 16 data rows")
    return ScanTrace(np.array(xs), np.array(ys), metadata)


def write_trace_csv(trace, path):
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        for key in sorted(trace.metadata):
            fh.write(f"#meta {key}={trace.metadata[key]}\n")
        fh.write("abscissa,value\n")
        for x, y in zip(trace.abscissa, trace.ordinate):
            fh.write(f"{x:.9g},{y:.9g}\n")
    os.replace(tmp, path)


def lorentzian(x, amplitude, center, fwhm, offset):
    """Peak-form Lorentzian: offset + amplitude / (1 + (2(x-c)/fwhm)^2)."""
    return offset + amplitude / (1.0 + (2.0 * (x - center) / fwhm) ** 2)


@dataclass(frozen=True)
class ResonanceFit:
    center: float
    fwhm: float
    amplitude: float
    offset: float
    goodness: float          # rms residual / fitted amplitude
    inverted: bool = False   # True when a reflection dip was fitted

    def __post_init__(self):
        if self.fwhm <= 0:
            raise ValidationError("fitted FWHM must be > 0")
        if not math.isfinite(self.goodness):
            raise ValidationError("fit goodness must be finite")


def _peak_oriented(trace):
    """Ordinate with dips flipped to peaks, based on the channel metadata."""
    y = trace.ordinate
    if trace.channel == "reflection":
        return float(np.max(y)) - y, True
    return y - float(np.min(y)), False


def _half_height_span(x, y, peak_idx):
    """Width of the half-maximum crossing region around a peak."""
    half = 0.5 * y[peak_idx]
    left = x[0]
    for i in range(peak_idx, 0, -1):
        if y[i - 1] <= half:
            left = np.interp(half, [y[i - 1], y[i]], [x[i - 1], x[i]])
            break
    right = x[-1]
    for i in range(peak_idx, len(x) - 1):
        if y[i + 1] <= half:
            right = np.interp(half, [y[i + 1], y[i]], [x[i + 1], x[i]])
            break
    return float(right - left)


def fit_lorentzian(trace, window=None, max_evaluations=10000):
    """Least-squares Lorentzian fit of the dominant resonance.

    ``window`` optionally restricts the abscissa to (lo, hi).  Multi-peak
    windows produce a warning naming the chosen (tallest) peak.
    """
    trace = trace.sorted()
    if window is not None:
        trace = trace.window(*window)
    x = trace.abscissa
    oriented, inverted = _peak_oriented(trace)
    span = float(np.max(oriented) - np.min(oriented))
    if span <= 0 or not np.isfinite(span):
        raise FitConvergenceError("trace is flat: no resonance to fit")
    peaks, _ = find_peaks(oriented, prominence=0.5 * span)
    if len(peaks) > 1:
        chosen = peaks[np.argmax(oriented[peaks])]
        warnings.warn(
            f"{len(peaks)} comparable peaks in window; fitting the tallest "
            f"at abscissa {x[chosen]:.6g}", stacklevel=2)
        peak_idx = int(chosen)
    elif len(peaks) == 1:
        peak_idx = int(peaks[0])
    else:
        peak_idx = int(np.argmax(oriented))

    n = len(x)
    outer = np.concatenate([oriented[: n // 4], oriented[-(n // 4):]])
    offset0 = float(np.median(outer))
    amplitude0 = float(oriented[peak_idx] - offset0)
    if amplitude0 <= 0:
        raise FitConvergenceError("no dominant extremum above the baseline")
    fwhm0 = _half_height_span(x, oriented - offset0, peak_idx)
    if fwhm0 <= 0:
        fwhm0 = float(x[min(peak_idx + 1, n - 1)] - x[max(peak_idx - 1, 0)])
    p0 = (amplitude0, float(x[peak_idx]), fwhm0, offset0)
    try:
        popt, _ = curve_fit(lorentzian, x, oriented, p0=p0, maxfev=max_evaluations)
    except RuntimeError as exc:
        resid = oriented - lorentzian(x, *p0)
        raise FitConvergenceError(
            f"Lorentzian fit did not converge within {max_evaluations} "
            f"evaluations (initial rms residual {np.sqrt(np.mean(resid**2)):.4g})"
        ) from exc
    amplitude, center, fwhm, offset = popt
    fwhm = abs(float(fwhm))
    if amplitude <= 0 or fwhm <= 0:
        raise FitConvergenceError("fit collapsed to a non-positive peak")
    resid = oriented - lorentzian(x, *popt)
    goodness = float(np.sqrt(np.mean(resid**2)) / amplitude)
    if inverted:
        offset = float(np.max(trace.ordinate)) - offset
    return ResonanceFit(float(center), fwhm, float(amplitude), float(offset),
                        goodness, inverted=inverted)


@dataclass(frozen=True)
class FinesseResult:
    finesse: float
    resonance_pair: tuple
    nm_per_unit: float  # abscissa calibration from the lambda/2 spacing

    def __post_init__(self):
        if self.finesse <= 1:
            raise ValidationError("finesse must exceed 1")


def extract_finesse(trace, wavelength_nm):
    """Finesse from a length scan crossing two neighboring resonances.

    The spacing of the two fitted centers is calibrated to lambda/2, turning
    fitted widths into length units: finesse = (lambda/2) / mean(FWHM).
    """
    trace = trace.sorted()
    x = trace.abscissa
    oriented, _ = _peak_oriented(trace)
    span = float(np.max(oriented) - np.min(oriented))
    if span <= 0:
        raise AnalysisError("trace is flat: no resonances found")
    peaks, props = find_peaks(oriented, prominence=0.25 * span)
    if len(peaks) == 0:
        raise AnalysisError("no resonances found; widen the scan window")
    prominences = props["prominences"]
    dominant = peaks[prominences >= 0.5 * prominences.max()]
    if len(dominant) != 2:
        raise AnalysisError(
            f"need exactly two dominant resonances, found {len(dominant)}; "
            "adjust the scan window")
    order = np.argsort(oriented[dominant])[::-1]
    first, second = np.sort(dominant[order][:2])
    separation = float(x[second] - x[first])
    fits = []
    for idx in (first, second):
        lo = float(x[idx]) - 0.35 * separation
        hi = float(x[idx]) + 0.35 * separation
        fits.append(fit_lorentzian(trace, window=(lo, hi)))
    spacing_units = abs(fits[1].center - fits[0].center)
    if spacing_units <= 0:
        raise AnalysisError("resonance fits collapsed onto each other")
    nm_per_unit = (wavelength_nm / 2.0) / spacing_units
    mean_fwhm_nm = 0.5 * (fits[0].fwhm + fits[1].fwhm) * nm_per_unit
    finesse = (wavelength_nm / 2.0) / mean_fwhm_nm
    return FinesseResult(float(finesse), (fits[0], fits[1]), float(nm_per_unit))


def emitter_loss_ppm(finesse_reduced, finesse_bare):
    """Extra intracavity loss from the finesse drop, in ppm.

    L = pi * (1/F_reduced - 1/F_bare); requires 1 < F_reduced <= F_bare.
    """
    if not finesse_reduced > 1:
        raise ValidationError("reduced finesse must exceed 1")
    if finesse_reduced > finesse_bare:
        raise ValidationError(
            "reduced finesse above the bare finesse implies negative absorption")
    return math.pi * (1.0 / finesse_reduced - 1.0 / finesse_bare) * 1e6


def ensemble_cross_section_cm2(loss_ppm, mode_area_um2):
    """sigma = L * A with L the absorbed fraction and A the mode area."""
    if loss_ppm < 0 or mode_area_um2 <= 0:
        raise ValidationError("need loss >= 0 and area > 0")
    return loss_ppm * 1e-6 * mode_area_um2 * 1e-8


def single_cross_section_cm2(sigma_ensemble_cm2, n_emitters):
    if n_emitters <= 0:
        raise ValidationError("emitter number must be > 0")
    return sigma_ensemble_cm2 / n_emitters


@dataclass(frozen=True)
class LifetimeFit:
    tau_ns: float
    amplitude: float
    background: float
    window_start_ns: float
    goodness: float

    def __post_init__(self):
        if self.tau_ns <= 0:
            raise ValidationError("fitted lifetime must be > 0")


def _exp_decay(t, amplitude, tau, background):
    return background + amplitude * np.exp(-t / tau)


def fit_lifetime(trace, pulse_end_ns, guard_samples=2, max_evaluations=10000):
    """Exponential-plus-constant fit of a decay trace (time axis in ns).

    The fit window opens ``guard_samples`` sample periods after
    ``pulse_end_ns``.  A window shorter than three fitted lifetimes only
    warns; a non-decaying trace raises.
    """
    trace = trace.sorted()
    x = trace.abscissa
    y = trace.ordinate
    period = float(np.median(np.diff(x)))
    start = pulse_end_ns + guard_samples * period
    mask = x >= start
    if mask.sum() < 8:
        raise ValidationError("fewer than 8 samples after the pulse end")
    t = x[mask] - start
    counts = y[mask]

    tail = counts[-max(3, len(counts) // 20):]
    background0 = float(np.mean(tail))
    peak = float(counts[0])
    amplitude0 = peak - background0
    if amplitude0 <= 0:
        raise AnalysisError("trace does not decay after the pulse end")
    # Log-linear regression on the upper half of the decay for tau.
    upper = (counts - background0) >= 0.5 * amplitude0
    if upper.sum() >= 3:
        slope, _ = np.polyfit(t[upper], np.log(counts[upper] - background0), 1)
        tau0 = -1.0 / slope if slope < 0 else float(t[-1] - t[0]) / 3.0
    else:
        tau0 = float(t[-1] - t[0]) / 3.0
    if tau0 <= 0:
        tau0 = float(t[-1] - t[0]) / 3.0
    try:
        popt, _ = curve_fit(_exp_decay, t, counts,
                            p0=(amplitude0, tau0, background0),
                            maxfev=max_evaluations)
    except RuntimeError as exc:
        raise FitConvergenceError(
            f"lifetime fit did not converge within {max_evaluations} evaluations"
        ) from exc
    amplitude, tau, background = popt
    if tau <= 0 or amplitude <= 0:
        raise AnalysisError(f"fit returned a non-decaying solution (tau={tau:.4g})")
    window_span = float(t[-1] - t[0])
    if window_span < 3.0 * tau:
        warnings.warn(
            f"fit window spans {window_span:.3g} ns, under 3 lifetimes "
            f"({3 * tau:.3g} ns); tau may be biased", stacklevel=2)
    resid = counts - _exp_decay(t, *popt)
    goodness = float(np.sqrt(np.mean(resid**2)) / amplitude)
    return LifetimeFit(float(tau), float(amplitude), float(background),
                       float(start), goodness)


def _gaussian(x, amplitude, center, sigma, offset):
    return offset + amplitude * np.exp(-0.5 * ((x - center) / sigma) ** 2)


@dataclass(frozen=True)
class PLEResult:
    excitation_nm: np.ndarray
    normalized_counts: np.ndarray
    center_nm: float
    fwhm_nm: float
    fwhm_ghz: float


def aggregate_ple(scans, window_fwhm=1.0):
    """Inhomogeneous lineshape from per-excitation cavity scans.

    ``scans`` is a sequence of (excitation_wavelength_nm, ScanTrace); for each
    trace the fluorescence within +/- ``window_fwhm`` fitted linewidths of the
    cavity resonance is summed.  The resulting curve is peak-normalized and a
    Gaussian fit supplies the inhomogeneous FWHM.
    """
    if len(scans) < 4:
        raise ValidationError("need at least four excitation wavelengths")
    if window_fwhm <= 0:
        raise ValidationError("resonance window must be > 0 linewidths")
    wavelengths = []
    sums = []
    for excitation_nm, trace in scans:
        fit = fit_lorentzian(trace)
        lo = fit.center - window_fwhm * fit.fwhm
        hi = fit.center + window_fwhm * fit.fwhm
        mask = (trace.abscissa >= lo) & (trace.abscissa <= hi)
        if mask.sum() < 3:
            raise ValidationError(
                f"resonance window at {excitation_nm} nm keeps {int(mask.sum())} "
                "samples; need at least 3 (enlarge window_fwhm)")
        wavelengths.append(float(excitation_nm))
        sums.append(float(np.sum(trace.ordinate[mask])))
    order = np.argsort(wavelengths)
    lam = np.array(wavelengths)[order]
    counts = np.array(sums)[order]
    peak = counts.max()
    if peak <= 0:
        raise AnalysisError("no fluorescence collected in any resonance window")
    normalized = counts / peak
    center0 = float(lam[np.argmax(normalized)])
    sigma0 = max((lam[-1] - lam[0]) / 6.0, 1e-6)
    try:
        popt, _ = curve_fit(_gaussian, lam, normalized,
                            p0=(1.0, center0, sigma0, float(normalized.min())),
                            maxfev=10000)
    except RuntimeError as exc:
        raise FitConvergenceError("Gaussian fit of the PLE lineshape failed") from exc
    _, center, sigma, _ = popt
    fwhm_nm = 2.0 * math.sqrt(2.0 * math.log(2.0)) * abs(float(sigma))
    fwhm_ghz = SPEED_OF_LIGHT * fwhm_nm * 1e-9 / (center * 1e-9) ** 2 / 1e9
    return PLEResult(lam, normalized, float(center), fwhm_nm, float(fwhm_ghz))


def thickness_from_fringes_nm(fringe_count, wavelength_nm, refractive_index):
    """Thickness change across interference fringes, lambda/(2n) per fringe."""
    if fringe_count < 0 or wavelength_nm <= 0 or refractive_index < 1:
        raise ValidationError("bad fringe count, wavelength or index")
    return fringe_count * wavelength_nm / (2.0 * refractive_index)


@dataclass(frozen=True)
class FineStructureFit:
    line_centers_thz: np.ndarray  # descending, A to D
    gs_splitting_ghz: float
    es_splitting_ghz: float
    consistency_ghz: float  # |(A-B) - (C-D)|, zero for an ideal pattern


def analyze_fine_structure(trace):
    """Extract the two splittings from a four-line spectrum.

    The trace holds intensity versus wavelength (nm).  The four tallest
    peaks are refined by Lorentzian fits; with descending line frequencies
    A > B > C > D the splittings are Delta_gs = A - B and Delta_es = A - C.
    """
    trace = trace.sorted()
    freq = SPEED_OF_LIGHT / (trace.abscissa * 1e-9) / 1e12  # THz, descending
    order = np.argsort(freq)
    freq_trace = ScanTrace(freq[order], trace.ordinate[order],
                           dict(trace.metadata))
    y = freq_trace.ordinate - float(freq_trace.ordinate.min())
    peaks, props = find_peaks(y, prominence=0.05 * float(y.max()))
    if len(peaks) < 4:
        raise AnalysisError(f"found {len(peaks)} spectral lines, need 4")
    strongest = peaks[np.argsort(props["prominences"])[::-1][:4]]
    centers = []
    x = freq_trace.abscissa
    spacing = np.min(np.diff(np.sort(x[strongest])))
    for idx in np.sort(strongest):
        lo = float(x[idx]) - 0.45 * spacing
        hi = float(x[idx]) + 0.45 * spacing
        centers.append(fit_lorentzian(freq_trace, window=(lo, hi)).center)
    lines = np.sort(np.array(centers))[::-1]
    a, b, c, d = lines
    gs = (a - b) * 1e3
    es = (a - c) * 1e3
    consistency = abs((a - b) - (c - d)) * 1e3
    return FineStructureFit(lines, float(gs), float(es), float(consistency))
