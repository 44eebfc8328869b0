"""Transfer-matrix solver against independent analytic oracles."""

import json

import numpy as np
import pytest

from diamondcavity.errors import StackError, ValidationError
from diamondcavity.stacks import (
    LayerStack,
    OpticalLayer,
    design_quarter_wave_dbr,
    load_stack,
    quarter_wave_pairs,
    save_stack,
    stack_response,
    stack_spectrum,
    write_spectrum_csv,
)

AIR = OpticalLayer(1.0, semi_infinite=True)
SILICA = OpticalLayer(1.45, semi_infinite=True)
DIAMOND_BULK = OpticalLayer(2.417, semi_infinite=True)


def quarter_wave_transmission(n0, n_high, n_low, n_sub, n_pairs):
    """Analytic quarter-wave stack: each layer maps admittance Y -> n^2/Y.

    Independent of the matrix solver; processes layers from the substrate up
    (low-index layer adjacent to the substrate for an (H L)^N stack).
    """
    y = n_sub
    for _ in range(n_pairs):
        y = n_low**2 / y
        y = n_high**2 / y
    r = (n0 - y) / (n0 + y)
    return 1.0 - r**2


def random_stack(rng, lossy):
    n_layers = int(rng.integers(1, 9))
    layers = [OpticalLayer(float(rng.uniform(1.0, 3.4)), semi_infinite=True)]
    for _ in range(n_layers):
        n_im = float(rng.uniform(0.0, 0.3)) if lossy else 0.0
        layers.append(OpticalLayer(
            complex(float(rng.uniform(1.0, 3.4)), n_im),
            float(rng.uniform(5.0, 900.0))))
    layers.append(OpticalLayer(float(rng.uniform(1.0, 3.4)), semi_infinite=True))
    return LayerStack(tuple(layers))


class TestFresnel:
    def test_single_interface_air_diamond(self):
        stack = LayerStack((AIR, DIAMOND_BULK))
        refl, trans, absorbed = stack_response(stack, 737.0)
        expected_r = ((2.417 - 1.0) / (2.417 + 1.0)) ** 2
        assert refl == pytest.approx(expected_r, abs=1e-12)
        assert trans == pytest.approx(1.0 - expected_r, abs=1e-12)
        assert absorbed == 0.0

    def test_half_wave_slab_is_invisible(self):
        # A slab of thickness m * lambda/(2n) leaves the bare-interface R.
        lam = 737.0
        bare = LayerStack((AIR, SILICA))
        r_bare, _, _ = stack_response(bare, lam)
        for m in (1, 2, 5):
            slab = LayerStack(
                (AIR, OpticalLayer(2.417, m * lam / (2 * 2.417)), SILICA))
            r_slab, _, _ = stack_response(slab, lam)
            assert abs(r_slab - r_bare) < 1e-9


class TestQuarterWaveOracle:
    @pytest.mark.parametrize("n_pairs", range(1, 16))
    def test_matches_admittance_formula(self, n_pairs):
        lam = 737.0
        stack = LayerStack(
            (AIR, *quarter_wave_pairs(n_pairs, 2.1, 1.45, lam), SILICA))
        _, trans, _ = stack_response(stack, lam)
        expected = quarter_wave_transmission(1.0, 2.1, 1.45, 1.45, n_pairs)
        assert trans == pytest.approx(expected, abs=1e-10)


class TestEnergyConservation:
    def test_thousand_random_stacks(self, rng):
        for i in range(1000):
            stack = random_stack(rng, lossy=bool(i % 2))
            lam = float(rng.uniform(400.0, 1000.0))
            refl, trans, absorbed = stack_response(stack, lam)
            assert abs(refl + trans + absorbed - 1.0) < 1e-9
            for value in (refl, trans, absorbed):
                assert -1e-12 <= value <= 1.0 + 1e-12
            if i % 2 == 0:  # lossless: R + T alone must close the budget
                assert abs(refl + trans - 1.0) < 1e-9

    def test_reciprocity_of_lossless_transmission(self, rng):
        for _ in range(200):
            stack = random_stack(rng, lossy=False)
            # Identical boundary media required for the reversal identity.
            boundary = stack.layers[0]
            stack = LayerStack((boundary, *stack.interior, boundary))
            lam = float(rng.uniform(400.0, 1000.0))
            _, t_fwd, _ = stack_response(stack, lam)
            _, t_rev, _ = stack_response(stack.reversed(), lam)
            assert abs(t_fwd - t_rev) < 1e-10

    def test_half_wave_insertion_anywhere(self, rng):
        lam = 737.0
        stack = LayerStack(
            (AIR, *quarter_wave_pairs(4, 2.1, 1.45, lam), SILICA))
        r_ref, _, _ = stack_response(stack, lam)
        for position in range(len(stack.interior) + 1):
            n = float(rng.uniform(1.2, 3.0))
            inserted = stack.with_interior_inserted(
                position, OpticalLayer(n, lam / (2 * n)))
            r_new, _, _ = stack_response(inserted, lam)
            assert abs(r_new - r_ref) < 1e-9


class TestDesign:
    def test_trivial_target_needs_no_pairs(self):
        stack = design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1.0)
        assert len(stack.interior) == 0

    def test_minimal_pair_count_for_1000ppm(self):
        stack = design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3)
        n_pairs = len(stack.interior) // 2
        _, t_n, _ = stack_response(stack, 737.0)
        assert t_n <= 1e-3
        smaller = LayerStack(
            (AIR, *quarter_wave_pairs(n_pairs - 1, 2.1, 1.45, 737.0), SILICA))
        _, t_prev, _ = stack_response(smaller, 737.0)
        assert t_prev > 1e-3

    def test_stopband_width(self):
        stack = design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3)
        grid = np.linspace(550.0, 900.0, 3501)
        _, trans, _ = stack_response(stack, grid)
        blocked = grid[trans < 10e-3]
        # contiguous region around the design wavelength
        around = blocked[(blocked > 650.0) & (blocked < 850.0)]
        assert around.max() - around.min() > 100.0

    def test_unreachable_target_reports_best(self):
        with pytest.raises(ValidationError, match="best achieved"):
            design_quarter_wave_dbr(1.05, 1.01, 1.45, 737.0, 1e-9, max_pairs=5)

    def test_bad_index_ordering_rejected(self):
        with pytest.raises(ValidationError):
            design_quarter_wave_dbr(1.45, 2.1, 1.45, 737.0, 1e-3)


class TestValidation:
    def test_too_few_layers(self):
        with pytest.raises(StackError):
            LayerStack((AIR,))

    def test_boundaries_must_be_semi_infinite(self):
        with pytest.raises(StackError):
            LayerStack((AIR, OpticalLayer(2.0, 100.0)))

    def test_interior_semi_infinite_rejected(self):
        with pytest.raises(StackError):
            LayerStack((AIR, OpticalLayer(2.0, semi_infinite=True), SILICA))

    def test_nonpositive_thickness_rejected(self):
        with pytest.raises(StackError):
            OpticalLayer(2.0, 0.0)
        with pytest.raises(StackError):
            OpticalLayer(2.0, -5.0)

    def test_gain_index_rejected(self):
        with pytest.raises(StackError):
            OpticalLayer(2.0 - 0.1j, 100.0)

    def test_lossy_boundary_rejected(self):
        with pytest.raises(StackError):
            LayerStack((AIR, OpticalLayer(2.0 + 0.1j, semi_infinite=True)))

    def test_nonpositive_wavelength_rejected(self):
        with pytest.raises(ValidationError):
            stack_response(LayerStack((AIR, SILICA)), 0.0)


class TestDispersionTable:
    def test_tabulated_index_interpolates(self):
        table = (np.array([700.0, 800.0]), np.array([2.0 + 0j, 2.2 + 0j]))
        layer = OpticalLayer(2.1, 100.0, index_table=table)
        assert layer.index_at(750.0) == pytest.approx(2.1)
        assert layer.index_at(700.0) == pytest.approx(2.0)
        # outside the table: constant fallback
        assert layer.index_at(600.0) == pytest.approx(2.1)


class TestSerialization:
    def test_stack_json_round_trip(self, tmp_path):
        stack = design_quarter_wave_dbr(2.1, 1.45, 1.45, 737.0, 1e-3)
        path = tmp_path / "stack.json"
        save_stack(stack, path)
        loaded = load_stack(path)
        assert len(loaded.layers) == len(stack.layers)
        r0 = stack_response(stack, 700.0)
        r1 = stack_response(loaded, 700.0)
        assert r0 == pytest.approx(r1, abs=1e-15)

    def test_stack_file_schema(self, tmp_path):
        stack = LayerStack((AIR, OpticalLayer(2.0 + 0.01j, 120.0), SILICA))
        path = tmp_path / "stack.json"
        save_stack(stack, path)
        records = json.loads(path.read_text())
        assert records[0]["semi_infinite"] is True
        assert records[1] == {"index_real": 2.0, "index_imag": 0.01,
                              "thickness_nm": 120.0}

    def test_malformed_stack_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError):
            load_stack(path)
        path.write_text('[{"index_real": 2.0}, "nope"]')
        with pytest.raises(ValidationError):
            load_stack(path)

    def test_spectrum_csv(self, tmp_path):
        stack = LayerStack((AIR, SILICA))
        spectrum = stack_spectrum(stack, np.linspace(550.0, 850.0, 4))
        path = tmp_path / "spec.csv"
        write_spectrum_csv(spectrum, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "wavelength_nm,R,T,A"
        assert len(lines) == 5
        first = lines[1].split(",")
        assert float(first[0]) == 550.0
        assert float(first[1]) + float(first[2]) + float(first[3]) == \
            pytest.approx(1.0, abs=1e-9)
