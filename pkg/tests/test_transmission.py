import math

import numpy as np
import pytest

import magpol as mp


def resonant_model(params, g_eff, scale=1.0):
    return mp.TransmissionModel(params=params, omega_m=params.omega_c,
                                g_eff=g_eff, amplitude_scale=scale)


class TestS21:
    def test_lossless_bare_resonator_is_unity_on_resonance(self):
        p = mp.HybridParams(omega_c=3093.0, kappa_i=0.3, kappa_o=0.3,
                            gamma=11.9, g=17.2, n_spins=1.0, kappa_int=0.0)
        model = resonant_model(p, g_eff=0.0)
        assert abs(mp.s21(model, 3093.0)) == pytest.approx(1.0, rel=1e-12)

    def test_reference_dip_on_resonance(self, params):
        model = resonant_model(params, g_eff=17.2)
        expected = 0.6 / (0.6 + 17.2 ** 2 / 11.9)
        assert abs(mp.s21(model, 3093.0)) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.02356591194138227, rel=1e-12)

    def test_reflection_symmetry(self, params):
        model = resonant_model(params, g_eff=17.2)
        for delta in (0.1, 3.7, 16.2, 40.0):
            left = abs(mp.s21(model, 3093.0 - delta))
            right = abs(mp.s21(model, 3093.0 + delta))
            assert left == pytest.approx(right, rel=1e-12)

    def test_bare_resonator_bound(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            kappa_i, kappa_o = rng.uniform(0.05, 2.0, 2)
            kappa_int = rng.uniform(0.0, 0.5)
            p = mp.HybridParams(omega_c=3093.0, kappa_i=kappa_i,
                                kappa_o=kappa_o, kappa_int=kappa_int,
                                gamma=rng.uniform(1.0, 20.0),
                                g=17.2, n_spins=1.0)
            scale = rng.uniform(0.1, 10.0)
            model = mp.TransmissionModel(
                params=p, omega_m=3093.0 + rng.uniform(-50, 50),
                g_eff=rng.uniform(0.0, 30.0), amplitude_scale=scale)
            bound = 2 * math.sqrt(kappa_i * kappa_o) / p.kappa * scale
            omegas = 3093.0 + rng.uniform(-100, 100, 64)
            assert np.all(np.abs(mp.s21(model, omegas)) <= bound * (1 + 1e-12))

    def test_vectorized_matches_scalar(self, params):
        model = resonant_model(params, g_eff=17.2)
        omegas = np.array([3060.0, 3093.0, 3126.0])
        vec = mp.s21(model, omegas)
        for i, w in enumerate(omegas):
            assert vec[i] == mp.s21(model, float(w))


class TestSpectrum:
    def test_two_point_grid(self, params):
        model = resonant_model(params, g_eff=17.2)
        spec = mp.spectrum(model, mp.FrequencyGrid(3060.0, 3126.0, 2))
        assert len(spec.values) == 2

    def test_reference_spectrum_has_two_polariton_maxima(self, params):
        model = resonant_model(params, g_eff=17.2)
        spec = mp.spectrum(model, mp.FrequencyGrid(3060.0, 3126.0, 2001))
        peaks = mp.extract_peaks(spec)
        assert len(peaks) == 2
        assert peaks.positions[0] == pytest.approx(3093.0 - 16.2455, abs=0.6)
        assert peaks.positions[1] == pytest.approx(3093.0 + 16.2455, abs=0.6)

    def test_ep_spectrum_has_single_maximum_at_cavity(self, params):
        model = resonant_model(params, g_eff=5.65)
        spec = mp.spectrum(model, mp.FrequencyGrid(3060.0, 3126.0, 2001))
        peaks = mp.extract_peaks(spec)
        assert len(peaks) == 1
        assert peaks.positions[0] == pytest.approx(3093.0, abs=1e-6)

    def test_exact_grid_symmetry(self, params):
        model = resonant_model(params, g_eff=9.0)
        spec = mp.spectrum(model, mp.FrequencyGrid(3093.0 - 33.0,
                                                   3093.0 + 33.0, 1001))
        assert np.max(np.abs(spec.values - spec.values[::-1])) <= 1e-12

    def test_metadata_records_model(self, params):
        model = resonant_model(params, g_eff=9.0)
        spec = mp.spectrum(model, mp.FrequencyGrid(3060.0, 3126.0, 11))
        assert spec.metadata["g_eff_mhz"] == 9.0
        assert spec.metadata["omega_c_mhz"] == 3093.0


def lorentzian_spectrum(center=3093.0, hwhm=0.6, start=3088.0, stop=3098.0,
                        n=2001, floor=0.0):
    grid = mp.FrequencyGrid(start, stop, n)
    x = grid.omegas()
    values = 1.0 / (1.0 + ((x - center) / hwhm) ** 2) + floor
    return mp.Spectrum(grid=grid, values=values)


class TestExtractPeaks:
    def test_single_lorentzian(self):
        spec = lorentzian_spectrum()
        peaks = mp.extract_peaks(spec)
        assert len(peaks) == 1
        pk = peaks.peaks[0]
        assert pk.position == pytest.approx(3093.0, abs=spec.grid.step / 10)
        assert pk.hwhm == pytest.approx(0.6, rel=0.02)
        assert not pk.hwhm_one_sided
        assert peaks.method == "raw_maxima"

    def test_above_ep_separation_matches_eigenvalues(self, params):
        model = resonant_model(params, g_eff=17.2)
        spec = mp.spectrum(model, mp.FrequencyGrid(3060.0, 3126.0, 2001))
        peaks = mp.extract_peaks(spec)
        split = math.sqrt(4 * 17.2 ** 2 - 11.3 ** 2)
        sep = peaks.positions[1] - peaks.positions[0]
        assert sep == pytest.approx(split, rel=0.03)

    def test_positions_track_eigenvalues_far_above_ep(self, params):
        # relative to the position scale; peak pulling shrinks with splitting
        for g in (22.6, 30.0, 40.0):
            model = resonant_model(params, g_eff=g)
            spec = mp.spectrum(model, mp.FrequencyGrid(2993.0, 3193.0, 4001))
            peaks = mp.extract_peaks(spec)
            w1, w2 = mp.eigenvalues_resonant(model.hamiltonian())
            expected = sorted([w1.real, w2.real])
            assert len(peaks) == 2
            for got, want in zip(peaks.positions, expected):
                assert abs(got - want) <= 0.005 * abs(want)

    def test_flat_spectrum_yields_empty_set(self):
        grid = mp.FrequencyGrid(3060.0, 3126.0, 101)
        spec = mp.Spectrum(grid=grid, values=np.full(101, 0.25))
        peaks = mp.extract_peaks(spec)
        assert len(peaks) == 0

    def test_needs_five_points(self, params):
        grid = mp.FrequencyGrid(3060.0, 3126.0, 4)
        spec = mp.Spectrum(grid=grid, values=np.zeros(4))
        with pytest.raises(mp.DomainError):
            mp.extract_peaks(spec)

    def test_one_sided_width_flagged_when_flank_leaves_grid(self):
        # grid stops barely past the maximum: right flank never reaches
        # half height, so the width must come from the left flank only
        spec = lorentzian_spectrum(center=3097.5, start=3088.0, stop=3098.0)
        peaks = mp.extract_peaks(spec)
        assert len(peaks) == 1
        pk = peaks.peaks[0]
        assert pk.hwhm_one_sided
        assert pk.hwhm == pytest.approx(0.6, rel=0.02)

    def test_tiny_bump_on_shoulder_does_not_crash(self):
        spec = lorentzian_spectrum()
        values = spec.values.copy()
        values[300] += 1e-4  # secondary local maximum on the flank
        bumped = mp.Spectrum(grid=spec.grid, values=values)
        peaks = mp.extract_peaks(bumped)
        main = max(peaks.peaks, key=lambda p: p.height)
        assert main.position == pytest.approx(3093.0, abs=spec.grid.step)


class TestInferLinewidths:
    def test_above_ep_shared_linewidth(self, params):
        peaks = mp.infer_linewidths(resonant_model(params, 17.2))
        assert peaks.method == "eigenvalue_inferred"
        assert len(peaks) == 2
        assert np.allclose(peaks.hwhms, 6.25, atol=1e-12)
        split = math.sqrt(4 * 17.2 ** 2 - 11.3 ** 2)
        assert peaks.positions[1] - peaks.positions[0] == pytest.approx(
            split, rel=1e-12)

    def test_at_ep_single_coalesced_entry(self, params):
        peaks = mp.infer_linewidths(resonant_model(params, 5.65))
        assert len(peaks) == 1
        assert peaks.peaks[0].position == pytest.approx(3093.0, abs=1e-12)
        assert peaks.peaks[0].hwhm == pytest.approx(6.25, abs=1e-12)

    def test_below_ep_two_linewidths_at_same_position(self, params):
        peaks = mp.infer_linewidths(resonant_model(params, 2.0))
        assert len(peaks) == 2
        assert peaks.positions[0] == peaks.positions[1] == 3093.0
        assert sorted(peaks.hwhms) == pytest.approx(
            [0.965825513857439, 11.534174486142561], abs=1e-12)

    def test_requires_resonant_model(self, params):
        model = mp.TransmissionModel(params=params, omega_m=3100.0, g_eff=2.0)
        with pytest.raises(mp.DomainError):
            mp.infer_linewidths(model)


class TestValidation:
    def test_negative_values_rejected(self):
        grid = mp.FrequencyGrid(3060.0, 3126.0, 8)
        with pytest.raises(mp.DomainError):
            mp.Spectrum(grid=grid, values=np.full(8, -1.0))

    def test_wrong_length_rejected(self):
        grid = mp.FrequencyGrid(3060.0, 3126.0, 8)
        with pytest.raises(mp.DomainError):
            mp.Spectrum(grid=grid, values=np.zeros(7))

    def test_model_validation(self, params):
        with pytest.raises(mp.DomainError):
            mp.TransmissionModel(params=params, omega_m=3093.0, g_eff=-1.0)
        with pytest.raises(mp.DomainError):
            mp.TransmissionModel(params=params, omega_m=3093.0, g_eff=1.0,
                                 amplitude_scale=0.0)
