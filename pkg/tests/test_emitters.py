"""Strain fine structure, ensemble spectra, coherence estimate, counting."""

import numpy as np
import pytest

from diamondcavity.constants import BOLTZMANN, PLANCK
from diamondcavity.emitters import (
    EnsembleSpec,
    GroupIVLevels,
    StrainState,
    density_from_fluence,
    emitter_count,
    load_strain_field_csv,
    splitting_to_wavelength_span_nm,
    splittings_from_strain,
    strain_from_splitting,
    synthesize_linescan,
    synthesize_zpl_spectrum,
    t2_phonon_limit_s,
    thermal_occupation,
    zpl_spectrum_thz,
)
from diamondcavity.errors import ValidationError

LEVELS = GroupIVLevels()


def composite_frequency_grid(center_thz, core_halfwidth_thz):
    """Dense core plus geometric tails out to +/- 300 THz of detuning.

    Lorentzian tails fall off as 1/x^2, so capturing the area to 1e-6 needs
    a very wide window; geometric spacing keeps the point count small.
    """
    core = np.linspace(-core_halfwidth_thz, core_halfwidth_thz, 200001)
    tail = np.geomspace(core_halfwidth_thz, 300.0, 1200)
    grid = np.concatenate([-tail[::-1], core[1:-1], tail])
    return np.unique(center_thz + grid)


class TestFineStructure:
    def test_unstrained_defaults(self):
        fs = splittings_from_strain(LEVELS, StrainState())
        assert fs.gs_splitting_ghz == pytest.approx(48.0)
        assert fs.es_splitting_ghz == pytest.approx(259.0)

    def test_line_pattern_reconstruction(self, rng):
        # Line set {center +/- es/2 -/+ gs/2}: the generating splittings must
        # be recoverable from the four lines to 1e-12.
        for _ in range(300):
            strain = StrainState(
                axial_ghz=float(rng.uniform(-500.0, 500.0)),
                transverse_ground_ghz=float(rng.uniform(0.0, 600.0)),
                transverse_excited_ghz=float(rng.uniform(0.0, 900.0)),
            )
            try:
                fs = splittings_from_strain(LEVELS, strain)
            except ValidationError:
                continue  # ground splitting overtook the excited one
            a, b, c, d = fs.lines_thz
            assert (a - b) * 1e3 == pytest.approx(fs.gs_splitting_ghz, abs=1e-9)
            assert (c - d) * 1e3 == pytest.approx(fs.gs_splitting_ghz, abs=1e-9)
            assert (a - c) * 1e3 == pytest.approx(fs.es_splitting_ghz, abs=1e-9)
            assert (b - d) * 1e3 == pytest.approx(fs.es_splitting_ghz, abs=1e-9)

    def test_eleven_fold_splitting_needs_525ghz(self):
        upsilon = strain_from_splitting(48.0, 11 * 48.0)
        assert upsilon == pytest.approx(525.81, abs=0.01)

    def test_splitting_floor(self):
        assert strain_from_splitting(48.0, 48.0) == 0.0
        with pytest.raises(ValidationError):
            strain_from_splitting(48.0, 47.0)

    def test_round_trip_thousand_cases(self, rng):
        for _ in range(1000):
            so = float(rng.uniform(10.0, 400.0))
            upsilon = float(rng.uniform(0.0, 2000.0))
            observed = float(np.hypot(so, upsilon))
            recovered = strain_from_splitting(so, observed)
            assert recovered == pytest.approx(upsilon, rel=1e-9, abs=1e-9)

    def test_ground_splitting_never_below_spin_orbit(self, rng):
        for _ in range(200):
            strain = StrainState(transverse_ground_ghz=float(rng.uniform(0, 2000)),
                                 transverse_excited_ghz=float(rng.uniform(0, 4000)))
            try:
                fs = splittings_from_strain(LEVELS, strain)
            except ValidationError:
                continue
            assert fs.gs_splitting_ghz >= 48.0

    def test_wavelength_span_of_528ghz(self):
        span = splitting_to_wavelength_span_nm(528.0, 737.0)
        assert span == pytest.approx(0.9566, abs=0.001)
        assert abs(span - 0.96) < 0.05

    def test_reordered_labels_rejected(self):
        # Enormous ground-state strain with none on the excited state would
        # scramble the A-D frequency ordering.
        with pytest.raises(ValidationError, match="labeling"):
            splittings_from_strain(LEVELS, StrainState(transverse_ground_ghz=5000.0))


class TestSpectrumSynthesis:
    SPEC = EnsembleSpec(homogeneous_fwhm_mhz=400.0, inhomogeneous_sigma_ghz=6.0,
                        temperature_k=10.0)

    def test_upper_branch_weight_follows_boltzmann_factor(self):
        strain = StrainState(transverse_ground_ghz=120.0,
                             transverse_excited_ghz=160.0)
        fs = splittings_from_strain(LEVELS, strain)
        grid = np.linspace(LEVELS.zpl_thz - 0.8, LEVELS.zpl_thz + 0.8, 160001)
        at_a = np.argmin(np.abs(grid - fs.line_a_thz))
        at_c = np.argmin(np.abs(grid - fs.line_c_thz))
        # At 4 K the A line is visible and its height relative to C tracks
        # the excited-branch occupation.
        warm = EnsembleSpec(homogeneous_fwhm_mhz=400.0,
                            inhomogeneous_sigma_ghz=2.0, temperature_k=4.0)
        spectrum = zpl_spectrum_thz(LEVELS, strain, warm, grid)
        expected = thermal_occupation(fs.es_splitting_ghz, 4.0)
        assert spectrum[at_a] / spectrum[at_c] == pytest.approx(expected, rel=0.05)

    def test_upper_branch_vanishes_toward_zero_temperature(self):
        # Toward T -> 0 the A and B lines drop below even the far Lorentzian
        # tails of C and D.
        strain = StrainState(transverse_ground_ghz=120.0,
                             transverse_excited_ghz=160.0)
        fs = splittings_from_strain(LEVELS, strain)
        grid = np.linspace(LEVELS.zpl_thz - 0.8, LEVELS.zpl_thz + 0.8, 160001)
        at_a = np.argmin(np.abs(grid - fs.line_a_thz))
        at_c = np.argmin(np.abs(grid - fs.line_c_thz))
        cold = EnsembleSpec(homogeneous_fwhm_mhz=400.0,
                            inhomogeneous_sigma_ghz=2.0, temperature_k=0.5)
        muted = EnsembleSpec(homogeneous_fwhm_mhz=400.0,
                             inhomogeneous_sigma_ghz=2.0, temperature_k=0.5,
                             line_amplitudes={"A": 0.0, "B": 0.0})
        full = zpl_spectrum_thz(LEVELS, strain, cold, grid)
        tails_only = zpl_spectrum_thz(LEVELS, strain, muted, grid)
        a_line_height = full[at_a] - tails_only[at_a]
        assert a_line_height / full[at_c] < 1e-10
        assert full[at_a] / full[at_c] < 1e-4  # dominated by the C/D tails

    def test_area_equals_sum_of_weights(self):
        strain = StrainState(transverse_ground_ghz=150.0,
                             transverse_excited_ghz=260.0)
        fs = splittings_from_strain(LEVELS, strain)
        upper = thermal_occupation(fs.es_splitting_ghz, self.SPEC.temperature_k)
        expected = 2.0 * upper + 2.0  # class weight folded out below
        grid = composite_frequency_grid(LEVELS.zpl_thz, 1.5)
        for hom_mhz, inh_ghz in [(200.0, 3.0), (800.0, 3.0), (200.0, 12.0)]:
            spec = EnsembleSpec(homogeneous_fwhm_mhz=hom_mhz,
                                inhomogeneous_sigma_ghz=inh_ghz,
                                temperature_k=self.SPEC.temperature_k,
                                class_mix=1.0)
            spectrum = zpl_spectrum_thz(LEVELS, strain, spec, grid)
            area = np.trapezoid(spectrum, grid)
            assert area == pytest.approx(expected, rel=1e-6)

    def test_distinct_class_strain_splits_c_line(self):
        # Two classes whose C-lines differ by several linewidths: the summed
        # spectrum shows two resolvable C peaks.
        class1 = StrainState(transverse_ground_ghz=50.0,
                             transverse_excited_ghz=80.0, orientation_class=1)
        class2 = StrainState(transverse_ground_ghz=320.0,
                             transverse_excited_ghz=420.0, orientation_class=2)
        fs1 = splittings_from_strain(LEVELS, class1)
        fs2 = splittings_from_strain(LEVELS, class2)
        separation_ghz = abs(fs1.line_c_thz - fs2.line_c_thz) * 1e3
        spec = EnsembleSpec(homogeneous_fwhm_mhz=400.0,
                            inhomogeneous_sigma_ghz=5.0, temperature_k=4.0)
        fwhm_ghz = 2.355 * spec.inhomogeneous_sigma_ghz
        assert separation_ghz > 3.0 * fwhm_ghz
        lo = min(fs1.line_c_thz, fs2.line_c_thz) - 0.05
        hi = max(fs1.line_c_thz, fs2.line_c_thz) + 0.05
        grid = np.linspace(lo, hi, 20001)
        spectrum = zpl_spectrum_thz(LEVELS, (class1, class2), spec, grid)
        interior = np.flatnonzero((spectrum[1:-1] > spectrum[:-2]) &
                                  (spectrum[1:-1] > spectrum[2:])) + 1
        tall = interior[spectrum[interior] > 0.1 * spectrum.max()]
        assert len(tall) == 2

    def test_narrow_grid_lists_uncovered_lines(self):
        strain = StrainState(transverse_ground_ghz=150.0,
                             transverse_excited_ghz=260.0)
        grid = np.linspace(LEVELS.zpl_thz - 0.05, LEVELS.zpl_thz + 0.05, 2001)
        with pytest.raises(ValidationError, match=r"A \(class 1\)"):
            zpl_spectrum_thz(LEVELS, strain, self.SPEC, grid)

    def test_wavelength_grid_wrapper_matches_frequency_core(self):
        strain = StrainState(transverse_ground_ghz=150.0,
                             transverse_excited_ghz=260.0)
        grid_nm = np.linspace(736.0, 738.0, 5001)
        by_wavelength = synthesize_zpl_spectrum(LEVELS, strain, self.SPEC, grid_nm)
        freq = 299792458.0 / (grid_nm * 1e-9) / 1e12
        by_frequency = zpl_spectrum_thz(LEVELS, strain, self.SPEC,
                                        np.sort(freq))
        assert by_wavelength[::-1] == pytest.approx(by_frequency, rel=1e-12)

    def test_amplitude_overrides(self):
        strain = StrainState(transverse_ground_ghz=150.0,
                             transverse_excited_ghz=260.0)
        fs = splittings_from_strain(LEVELS, strain)
        spec = EnsembleSpec(homogeneous_fwhm_mhz=400.0,
                            inhomogeneous_sigma_ghz=2.0, temperature_k=10.0,
                            line_amplitudes={"C": 0.5})
        grid = np.linspace(LEVELS.zpl_thz - 0.8, LEVELS.zpl_thz + 0.8, 160001)
        full = zpl_spectrum_thz(LEVELS, strain,
                                EnsembleSpec(homogeneous_fwhm_mhz=400.0,
                                             inhomogeneous_sigma_ghz=2.0,
                                             temperature_k=10.0), grid)
        halved = zpl_spectrum_thz(LEVELS, strain, spec, grid)
        at_c = np.argmin(np.abs(grid - fs.line_c_thz))
        at_d = np.argmin(np.abs(grid - fs.line_d_thz))
        assert halved[at_c] == pytest.approx(0.5 * full[at_c], rel=1e-3)
        assert halved[at_d] == pytest.approx(full[at_d], rel=1e-3)


class TestLinescan:
    SPEC = EnsembleSpec(homogeneous_fwhm_mhz=500.0, inhomogeneous_sigma_ghz=4.0,
                        temperature_k=4.0)

    def test_constant_field_gives_identical_rows(self):
        strain = StrainState(transverse_ground_ghz=100.0,
                             transverse_excited_ghz=150.0)
        scan = synthesize_linescan(lambda x: (strain,), np.linspace(0, 10, 5),
                                   LEVELS, self.SPEC,
                                   np.linspace(736.5, 737.5, 801))
        assert scan.shape == (5, 801)
        for row in scan[1:]:
            assert row == pytest.approx(scan[0], rel=1e-12)

    def test_zero_strain_degenerate_c_line(self):
        # Both classes unstrained: a single C peak at the unstrained position.
        field = lambda x: (StrainState(orientation_class=1),
                           StrainState(orientation_class=2))
        fs = splittings_from_strain(LEVELS, StrainState())
        window = 0.08  # THz around the C line
        grid_thz = np.linspace(fs.line_c_thz - window, fs.line_c_thz + window, 8001)
        spectrum = zpl_spectrum_thz(LEVELS, field(0.0), self.SPEC, grid_thz)
        interior = np.flatnonzero((spectrum[1:-1] > spectrum[:-2]) &
                                  (spectrum[1:-1] > spectrum[2:])) + 1
        tall = interior[spectrum[interior] > 0.5 * spectrum.max()]
        assert len(tall) == 1

    def test_gradient_produces_branch_crossing(self):
        # Class 1 static, class 2 axially shifted with position: the C lines
        # cross where the linear shift compensates the initial offset.
        static = StrainState(transverse_ground_ghz=200.0,
                             transverse_excited_ghz=300.0, orientation_class=1)
        fs1 = splittings_from_strain(LEVELS, static)
        moving_base = StrainState(transverse_ground_ghz=60.0,
                                  transverse_excited_ghz=90.0,
                                  orientation_class=2)
        fs2 = splittings_from_strain(LEVELS, moving_base)
        slope_ghz_per_um = 8.0
        offset_ghz = (fs1.line_c_thz - fs2.line_c_thz) * 1e3
        crossing_um = offset_ghz / slope_ghz_per_um

        def field(x):
            return (static,
                    StrainState(axial_ghz=slope_ghz_per_um * x,
                                transverse_ground_ghz=60.0,
                                transverse_excited_ghz=90.0,
                                orientation_class=2))

        positions = np.linspace(0.0, 2.0 * crossing_um, 41)
        grid_nm = np.linspace(736.4, 737.6, 4001)
        scan = synthesize_linescan(field, positions, LEVELS, self.SPEC, grid_nm)
        assert scan.shape == (41, 4001)
        # Track the class-2 C line: its frequency passes the static line at
        # the predicted crossing row.
        freq = 299792458.0 / (grid_nm * 1e-9) / 1e12
        c2_freq = np.array([
            fs2.line_c_thz + slope_ghz_per_um * x * 1e-3 for x in positions])
        sign = np.sign(c2_freq - fs1.line_c_thz)
        flips = np.flatnonzero(np.diff(sign) != 0)
        assert len(flips) == 1
        assert positions[flips[0]] == pytest.approx(crossing_um,
                                                    abs=positions[1] - positions[0])
        # and the synthesized intensity at the crossing position peaks at the
        # shared line position (a single merged maximum)
        merged = scan[flips[0] + 1]
        peak_freq = freq[np.argmax(merged)]
        assert peak_freq == pytest.approx(fs1.line_c_thz, abs=2e-3)


class TestStrainFieldCsv:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "strain.csv"
        path.write_text(
            "position_um,class,axial_ghz,transverse_ghz\n"
            "0.0,1,0.0,100.0\n"
            "10.0,1,5.0,300.0\n"
            "0.0,2,1.0,50.0\n"
            "10.0,2,1.0,50.0\n")
        field = load_strain_field_csv(path)
        states = field(5.0)
        assert len(states) == 2
        assert states[0].orientation_class == 1
        assert states[0].axial_ghz == pytest.approx(2.5)
        assert states[0].transverse_ground_ghz == pytest.approx(200.0)
        assert states[1].transverse_ground_ghz == pytest.approx(50.0)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "strain.csv"
        path.write_text("x,cls,a,t\n0,1,0,0\n")
        with pytest.raises(ValidationError, match="header"):
            load_strain_field_csv(path)


class TestCoherenceEstimate:
    def test_monotone_decreasing_in_temperature(self):
        temperatures = np.linspace(0.5, 300.0, 100)
        values = [t2_phonon_limit_s(48.0, t, 5.7e24) for t in temperatures]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_monotone_increasing_in_splitting_beyond_activation(self):
        # For h*Delta/(kT) >= 3 the Delta^3 * n_bar denominator shrinks with
        # Delta, so T2 grows.
        t = 1.0
        floor_ghz = 3.0 * BOLTZMANN * t / PLANCK / 1e9
        deltas = np.linspace(floor_ghz, 40 * floor_ghz, 100)
        values = [t2_phonon_limit_s(d, t, 5.7e24, saturation_s=1e9)
                  for d in deltas]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_activation_scale_of_48ghz(self):
        # h * 48 GHz / k_B is about 2.3 K, the scale below which the
        # occupation freezes out.
        assert PLANCK * 48e9 / BOLTZMANN == pytest.approx(2.30, abs=0.01)

    def test_saturation_cap_at_low_temperature(self):
        assert t2_phonon_limit_s(48.0, 1e-3, 5.7e24, saturation_s=2.5) == 2.5

    def test_bad_inputs_rejected(self):
        with pytest.raises(ValidationError):
            t2_phonon_limit_s(0.0, 4.0, 1.0)
        with pytest.raises(ValidationError):
            t2_phonon_limit_s(48.0, -1.0, 1.0)


class TestCounting:
    def test_density_from_fluence(self):
        assert density_from_fluence(3e11, 0.10) == pytest.approx(3e10)

    def test_zero_area_zero_emitters(self):
        assert emitter_count(3e10, 0.0) == 0.0

    def test_confocal_count_scale(self):
        # 3e10 / cm^2 over the 0.57 um^2 confocal area: a few hundred.
        from diamondcavity.geometry import confocal_area_um2
        count = emitter_count(3e10, confocal_area_um2(737.0, 0.55))
        assert 100 < count < 500

    def test_cavity_to_confocal_count_ratio_is_area_ratio(self):
        from diamondcavity.geometry import (CavityGeometry, confocal_area_um2,
                                            mode_area_um2)
        geometry = CavityGeometry(10.7, 20.3, wavelength_nm=737.0)
        a_cav = mode_area_um2(geometry)
        a_conf = confocal_area_um2(737.0, 0.55)
        ratio = emitter_count(3e10, a_cav) / emitter_count(3e10, a_conf)
        assert ratio == pytest.approx(a_cav / a_conf, rel=1e-12)
        assert ratio == pytest.approx(3.27, abs=0.03)

    def test_yield_bounds(self):
        with pytest.raises(ValidationError):
            density_from_fluence(3e11, 1.5)
