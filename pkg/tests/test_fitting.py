import math

import numpy as np
import pytest

import magpol as mp
from magpol.fitting import _model_values

REF = {"kappa": 0.6, "gamma": 11.9, "g_eff": 17.2, "omega_c": 3093.0,
       "omega_m": 3093.0, "amplitude_scale": 1.0}

BOUNDS = {"kappa": (0.01, 10.0), "gamma": (0.1, 60.0), "g_eff": (0.0, 60.0),
          "omega_c": (3060.0, 3126.0), "omega_m": (3060.0, 3126.0),
          "amplitude_scale": (1e-3, 1e3)}


def synth_spectrum(n=801, **overrides):
    values = dict(REF)
    values.update(overrides)
    omegas = np.linspace(3060.0, 3126.0, n)
    return omegas, _model_values(omegas, values)


def make_problem(omegas, data, free_names, guess_factor=1.0,
                 guesses=None):
    free = {}
    fixed = {}
    for name in REF:
        if name in free_names:
            guess = (guesses or {}).get(name, REF[name] * guess_factor)
            free[name] = (guess, BOUNDS[name])
        else:
            fixed[name] = REF[name]
    return mp.FitProblem(omegas=omegas, values=data, free=free, fixed=fixed)


class TestForwardModel:
    def test_matches_public_s21(self, params):
        # ties the validation-free fit model to the exposed formula
        omegas = np.linspace(3060.0, 3126.0, 301)
        model = mp.TransmissionModel(params=params, omega_m=3093.0,
                                     g_eff=17.2, amplitude_scale=1.3)
        expected = np.abs(mp.s21(model, omegas))
        got = _model_values(omegas, dict(REF, amplitude_scale=1.3))
        assert np.max(np.abs(got - expected)) <= 1e-14


class TestFitTransmission:
    def test_noise_free_round_trip(self):
        omegas, data = synth_spectrum()
        problem = make_problem(omegas, data, ("kappa", "gamma", "g_eff"),
                               guess_factor=1.3)
        result = mp.fit_transmission(problem)
        assert result.converged
        for name in ("kappa", "gamma", "g_eff"):
            assert result.estimates[name] == pytest.approx(REF[name],
                                                           rel=1e-6)
        assert result.rss <= 1e-16

    def test_monte_carlo_with_multiplicative_noise(self):
        rng = np.random.default_rng(0)
        omegas, clean = synth_spectrum(n=601)
        errors = {name: [] for name in ("kappa", "gamma", "g_eff")}
        for _ in range(50):
            noisy = clean * (1.0 + 0.01 * rng.standard_normal(len(clean)))
            noisy = np.abs(noisy)
            problem = make_problem(omegas, noisy,
                                   ("kappa", "gamma", "g_eff"),
                                   guess_factor=1.2)
            result = mp.fit_transmission(problem)
            for name in errors:
                errors[name].append(
                    abs(result.estimates[name] - REF[name]) / REF[name])
        for name, errs in errors.items():
            assert np.median(errs) < 0.05, f"{name}: {np.median(errs)}"

    def test_constant_data_degenerates_gracefully(self):
        omegas = np.linspace(3060.0, 3126.0, 257)
        data = np.full_like(omegas, 0.2)
        problem = make_problem(omegas, data, ("kappa", "gamma", "g_eff"),
                               guess_factor=1.0)
        result = mp.fit_transmission(problem)
        g = result.estimates["g_eff"]
        at_bound = (g <= BOUNDS["g_eff"][0] + 1e-9
                    or g >= BOUNDS["g_eff"][1] - 1e-9)
        assert (not result.converged) or at_bound \
            or result.jacobian_condition > 1e6

    def test_reorder_invariance(self):
        omegas, data = synth_spectrum(n=321)
        rng = np.random.default_rng(1)
        perm = rng.permutation(len(omegas))
        p1 = make_problem(omegas, data, ("kappa", "gamma", "g_eff"),
                          guess_factor=1.25)
        p2 = make_problem(omegas[perm], data[perm],
                          ("kappa", "gamma", "g_eff"), guess_factor=1.25)
        r1 = mp.fit_transmission(p1)
        r2 = mp.fit_transmission(p2)
        assert r1.rss == pytest.approx(r2.rss, abs=1e-12)
        for name in r1.estimates:
            assert r1.estimates[name] == pytest.approx(r2.estimates[name],
                                                       abs=1e-12)

    def test_amplitude_scaling_invariance(self):
        omegas, data = synth_spectrum(n=321)
        factor = 7.3
        base = make_problem(omegas, data,
                            ("kappa", "gamma", "g_eff", "amplitude_scale"),
                            guess_factor=1.2,
                            guesses={"amplitude_scale": 1.0})
        scaled = make_problem(omegas, data * factor,
                              ("kappa", "gamma", "g_eff", "amplitude_scale"),
                              guess_factor=1.2,
                              guesses={"amplitude_scale": factor})
        r_base = mp.fit_transmission(base)
        r_scaled = mp.fit_transmission(scaled)
        for name in ("kappa", "gamma", "g_eff"):
            assert r_base.estimates[name] == pytest.approx(
                r_scaled.estimates[name], abs=1e-8)

    def test_first_order_optimality(self):
        omegas, data = synth_spectrum(n=321)
        problem = make_problem(omegas, data, ("kappa", "gamma", "g_eff"),
                               guess_factor=1.3)
        result = mp.fit_transmission(problem)
        x = dict(REF)
        x.update(result.estimates)

        def rss_at(p):
            r = _model_values(omegas, p) - data
            return float(r @ r)

        base = rss_at(x)
        for name in result.estimates:
            h = 1e-5 * max(abs(x[name]), 1.0)
            for sign in (+1, -1):
                probe = dict(x)
                probe[name] += sign * h
                lo, hi = BOUNDS[name]
                if not lo <= probe[name] <= hi:
                    continue
                assert rss_at(probe) >= base - 1e-6

    def test_validation(self):
        omegas, data = synth_spectrum(n=9)
        with pytest.raises(mp.ConfigError):
            # 9 points cannot support 5 free parameters
            make_problem(omegas, data,
                         ("kappa", "gamma", "g_eff", "omega_c", "omega_m"))
        with pytest.raises(mp.ConfigError):
            mp.FitProblem(omegas=omegas, values=data,
                          free={"kappa": (0.6, (0.01, 10.0))},
                          fixed={})  # does not cover all parameters
        with pytest.raises(mp.ConfigError):
            make_problem(omegas, data, ())
        with pytest.raises(mp.ConfigError):
            mp.FitProblem(
                omegas=omegas, values=data,
                free={"kappa": (0.6, (10.0, 0.01))},
                fixed={k: v for k, v in REF.items() if k != "kappa"})


class TestFitSaturation:
    def test_known_calibration_round_trip(self, params):
        c_true = 1.6018373746e7
        powers = np.linspace(-110.0, -88.0, 23)
        g_effs = [mp.solve_chi(c_true * math.sqrt(mp.dbm_to_watts(p)),
                               mp.RESONANT, params).g_eff for p in powers]
        result = mp.fit_saturation(list(zip(powers, g_effs)), params,
                                   initial_c=3e6)
        assert result.converged
        assert result.estimates["calibration_c"] == pytest.approx(
            c_true, rel=1e-6)
        assert result.rss <= 1e-12

    def test_reference_style_curve(self, params):
        # coupling falling from the bare value through the EP across ~25 dB
        c_true = 1.6018373746e7
        powers = np.linspace(-112.0, -87.0, 26)
        g_effs = np.array([
            mp.solve_chi(c_true * math.sqrt(mp.dbm_to_watts(p)),
                         mp.RESONANT, params).g_eff for p in powers])
        assert g_effs[0] > 17.0 and g_effs[-1] < 5.65
        assert all(b < a for a, b in zip(g_effs, g_effs[1:]))
        result = mp.fit_saturation(list(zip(powers, g_effs)), params,
                                   initial_c=1e7)
        assert result.rss < 1e-10

    def test_too_few_points(self, params):
        with pytest.raises(mp.ConfigError):
            mp.fit_saturation([(-100.0, 17.0), (-95.0, 12.0)], params,
                              initial_c=1e7)

    def test_unidentifiable_flat_data(self, params):
        points = [(-100.0, 10.0), (-95.0, 10.0), (-90.0, 10.0)]
        with pytest.raises(mp.DomainError):
            mp.fit_saturation(points, params, initial_c=1e7)

    def test_out_of_range_data(self, params):
        with pytest.raises(mp.DomainError):
            mp.fit_saturation([(-100.0, 18.5), (-95.0, 12.0), (-90.0, 8.0)],
                              params, initial_c=1e7)
