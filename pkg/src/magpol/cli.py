"""Command-line front end: spectrum synthesis, drive sweeps, EP location, fits.

Subcommands
-----------
spectrum   synthesize a |S21| spectrum CSV for given model parameters
sweep      run a preset or custom drive-power scenario sweep, emit CSVs,
           and print the EP verdict
ep         print the EP coupling, occupation and drive amplitude (and the
           drive power when a calibration constant is supplied)
fit        fit a transmission spectrum or a saturation curve from CSV data

Exit codes: 0 success, 2 configuration or input error, 3 physics-domain
error (for example, no exceptional point exists for the given rates).
Identical configuration and seed produce byte-identical CSV output; every
output file carries a ``.meta`` sidecar sufficient to regenerate it.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError
from .ensembles import (EnsembleScenario, PRESET_NAMES, ScenarioSweep,
                        ep_present, preset_scenario, sweep_point)
from .fitting import FitProblem, fit_saturation, fit_transmission
from .io import (fit_report_text, fmt, load_params, read_saturation_csv,
                 read_transmission_csv, write_residuals_csv, write_sidecar,
                 write_spectrum_csv, write_sweep_csv)
from .model import (FrequencyGrid, HybridParams, SpinSpecies, dbm_to_watts,
                    reference_params, watts_to_dbm)
from .polariton import ep_coupling
from .steadystate import RESONANT, ep_drive_amplitude, ep_occupation
from .transmission import TransmissionModel, extract_peaks, spectrum

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3


def _parse_grid(text: str) -> FrequencyGrid:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--grid expects start:stop:n")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"--grid has a malformed field in {text!r}") from None
    return FrequencyGrid(start=start, stop=stop, n_points=n)


def _parse_drive(text: str, calibration_c: float | None):
    """Drive axis: 'u:start:stop:n' (reduced amplitude) or 'start:stop:n' in dBm."""
    parts = text.split(":")
    if parts and parts[0] == "u":
        if len(parts) != 4:
            raise ConfigError("--drive expects u:start:stop:n")
        try:
            start, stop, n = float(parts[1]), float(parts[2]), int(parts[3])
        except ValueError:
            raise ConfigError(f"--drive has a malformed field in {text!r}") from None
        if start < 0 or stop < start or n < 1:
            raise ConfigError("--drive amplitudes must be ascending and non-negative")
        return np.linspace(start, stop, n)
    if len(parts) != 3:
        raise ConfigError("--drive expects start_dbm:stop_dbm:n or u:start:stop:n")
    if calibration_c is None:
        raise ConfigError("a dBm drive axis needs --calibration-c")
    try:
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"--drive has a malformed field in {text!r}") from None
    powers = np.linspace(start, stop, n)
    return calibration_c * np.sqrt([dbm_to_watts(p) for p in powers])


def _load_or_default_params(args) -> HybridParams:
    if getattr(args, "params", None):
        return load_params(args.params)
    return reference_params()


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config_metadata(args, params: HybridParams) -> dict:
    meta = {
        "command": " ".join(sys.argv[1:]) if sys.argv[1:] else args.command,
        "seed": args.seed,
        "omega_c_mhz": fmt(params.omega_c),
        "kappa_mhz": fmt(params.kappa),
        "gamma_mhz": fmt(params.gamma),
        "g_mhz": fmt(params.g),
        "n_spins": fmt(params.n_spins),
    }
    return meta


def cmd_spectrum(args) -> int:
    params = _load_or_default_params(args)
    grid = _parse_grid(args.grid)
    omega_m = args.omega_m if args.omega_m is not None else params.omega_c
    g_eff = args.g_eff if args.g_eff is not None else params.g
    model = TransmissionModel(params=params, omega_m=omega_m, g_eff=g_eff,
                              amplitude_scale=args.amplitude_scale)
    spec = spectrum(model, grid)
    out = _out_dir(args)
    target = out / "spectrum.csv"
    write_spectrum_csv(target, spec, metadata=_config_metadata(args, params))
    if grid.n_points >= 5:
        peaks = extract_peaks(spec)
        print(f"wrote {target} ({grid.n_points} points, {len(peaks)} peaks)")
        for p in peaks.peaks:
            print(f"peak: position {fmt(p.position)} MHz, "
                  f"height {fmt(p.height)}, hwhm {fmt(p.hwhm)} MHz")
    else:
        print(f"wrote {target} ({grid.n_points} points)")
    return EXIT_OK


def _custom_scenario(args, params: HybridParams) -> EnsembleScenario:
    if args.omega_zero is None:
        raise ConfigError("custom scenario needs --omega-zero")
    omega_c = args.omega_cavity if args.omega_cavity is not None else params.omega_c
    return EnsembleScenario.from_anchor(
        anchor=SpinSpecies.ZERO, anchor_frequency=args.omega_zero,
        a_parallel=params.a_parallel,
        resonant_species=SpinSpecies.from_label(args.resonant),
        driven_species=SpinSpecies.from_label(args.driven),
        cross_relaxation=not args.no_cross_relaxation,
        omega_c=omega_c)


def _default_grid(scenario: EnsembleScenario) -> FrequencyGrid:
    center = scenario.omega_resonant
    return FrequencyGrid(start=center - 33.0, stop=center + 33.0, n_points=2001)


def _sweep_points_parallel(scenario, u_values, params, grid, jobs):
    if jobs <= 1:
        return [sweep_point(scenario, float(u), params, grid) for u in u_values]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(sweep_point, scenario, float(u), params, grid)
                   for u in u_values]
        return [f.result() for f in futures]  # ordered assembly


def cmd_sweep(args) -> int:
    params = _load_or_default_params(args)
    if args.preset == "custom":
        scenario = _custom_scenario(args, params)
    else:
        scenario = preset_scenario(args.preset, params)
    if args.drive:
        u_values = _parse_drive(args.drive, args.calibration_c)
    else:
        # default axis: up to twice the drive that saturates the driven
        # species to chi = 0.45, which always covers the EP crossing
        from .steadystate import drive_for_occupation
        try:
            top = 2.0 * drive_for_occupation(0.45, scenario.drive_detunings(),
                                             params)
        except DomainError:
            top = 1.0
        u_values = np.linspace(0.0, top, 201)
    grid = _parse_grid(args.grid) if args.grid else _default_grid(scenario)
    points = _sweep_points_parallel(scenario, u_values, params, grid, args.jobs)
    sweep = ScenarioSweep(scenario=scenario, params=params, grid=grid,
                          points=points)
    out = _out_dir(args)
    target = out / "sweep.csv"
    write_sweep_csv(target, sweep, calibration_c=args.calibration_c,
                    metadata=_config_metadata(args, params),
                    spectra=not args.no_spectra)
    verdict = ep_present(sweep, epsilon=args.tol if args.tol else 1e-6)
    if verdict.present:
        line = f"EP: present at u={verdict.u:.4g} 2pi*MHz"
        if args.calibration_c:
            dbm = watts_to_dbm((verdict.u / args.calibration_c) ** 2)
            line += f" ({dbm:.4g} dBm)"
        print(line)
    else:
        print("EP: absent")
    print(f"wrote {target} ({len(points)} drive points)")
    return EXIT_OK


def cmd_ep(args) -> int:
    params = _load_or_default_params(args)
    g_ep = ep_coupling(params)  # raises NoExceptionalPointError when gamma <= kappa
    chi_ep = ep_occupation(params)
    u_ep = ep_drive_amplitude(RESONANT, params)
    print(f"g_ep_mhz = {fmt(g_ep)}")
    print(f"chi_ep = {fmt(chi_ep)}")
    print(f"u_ep_mhz = {fmt(u_ep)}")
    if args.calibration_c:
        power = watts_to_dbm((u_ep / args.calibration_c) ** 2)
        print(f"power_dbm = {fmt(power)}")
    return EXIT_OK


def _transmission_fit_problem(args, omegas, values) -> FitProblem:
    span = omegas[-1] - omegas[0]
    center = 0.5 * (omegas[0] + omegas[-1])
    guesses = {"kappa": 1.0, "gamma": 10.0, "g_eff": span / 4.0,
               "omega_c": center, "omega_m": center, "amplitude_scale": 1.0}
    bounds = {"kappa": (1e-4, span), "gamma": (1e-4, span),
              "g_eff": (0.0, span), "omega_c": (omegas[0], omegas[-1]),
              "omega_m": (omegas[0], omegas[-1]),
              "amplitude_scale": (1e-6, 1e6)}
    free_names = [name.strip() for name in args.free.split(",") if name.strip()]
    for item in args.init or []:
        key, _, val = item.partition("=")
        if key not in guesses:
            raise ConfigError(f"--init: unknown parameter {key!r}")
        try:
            guesses[key] = float(val)
        except ValueError:
            raise ConfigError(f"--init: bad number for {key!r}") from None
    free = {}
    fixed = {}
    for name in guesses:
        if name in free_names:
            free[name] = (guesses[name], bounds[name])
        else:
            fixed[name] = guesses[name]
    return FitProblem(omegas=omegas, values=values, free=free, fixed=fixed)


def cmd_fit(args) -> int:
    out = _out_dir(args)
    if args.mode == "transmission":
        omegas, values = read_transmission_csv(args.data)
        problem = _transmission_fit_problem(args, omegas, values)
        result = fit_transmission(problem)
        from .fitting import _assemble, _model_values
        model_vals = _model_values(
            omegas, _assemble(problem, list(result.estimates.values())))
        write_residuals_csv(out / "residuals.csv", omegas, values, model_vals)
    else:
        powers, g_effs = read_saturation_csv(args.data)
        params = _load_or_default_params(args)
        initial_c = args.calibration_c if args.calibration_c else 1e7
        result = fit_saturation(list(zip(powers, g_effs)), params,
                                initial_c=initial_c)
        c = result.estimates["calibration_c"]
        from .steadystate import solve_chi
        model_vals = np.array([
            solve_chi(c * np.sqrt(dbm_to_watts(p)), RESONANT, params).g_eff
            for p in powers])
        write_residuals_csv(out / "residuals.csv", powers, g_effs, model_vals,
                            x_name="power_dbm")
    report = fit_report_text(result, extra={"mode": args.mode,
                                            "data_file": str(args.data),
                                            "seed": args.seed})
    (out / "fit_report.txt").write_text(report, encoding="utf-8")
    write_sidecar(out / "fit_report.txt",
                  {"mode": args.mode, "data_file": str(args.data),
                   "seed": args.seed})
    print(report, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="magpol",
        description="Driven magnon-polariton simulation and analysis toolkit")
    parser.add_argument("--version", action="version",
                        version=f"magpol {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--params", help="parameter file (key = value lines)")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="random seed")
        p.add_argument("--tol", type=float, default=None,
                       help="solver/verdict tolerance override")
        p.add_argument("--calibration-c", type=float, default=None,
                       help="drive calibration c [2pi*MHz per sqrt(W)]")

    p_spec = sub.add_parser("spectrum", help="synthesize a transmission spectrum")
    common(p_spec)
    p_spec.add_argument("--grid", required=True, help="start:stop:n in MHz")
    p_spec.add_argument("--omega-m", type=float, default=None,
                        help="magnon frequency [MHz]; defaults to omega_c")
    p_spec.add_argument("--g-eff", type=float, default=None,
                        help="effective coupling [MHz]; defaults to bare g")
    p_spec.add_argument("--amplitude-scale", type=float, default=1.0)
    p_spec.set_defaults(handler=cmd_spectrum)

    p_sweep = sub.add_parser("sweep", help="drive-power scenario sweep")
    common(p_sweep)
    p_sweep.add_argument("--preset", required=True,
                         choices=PRESET_NAMES + ("custom",))
    p_sweep.add_argument("--drive", default=None,
                         help="start_dbm:stop_dbm:n or u:start:stop:n "
                              "(use --drive=-110:-85:26 for negative dBm)")
    p_sweep.add_argument("--grid", default=None, help="start:stop:n in MHz")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="parallel workers for drive points")
    p_sweep.add_argument("--no-spectra", action="store_true",
                         help="skip per-point spectrum files")
    p_sweep.add_argument("--omega-zero", type=float, default=None,
                         help="custom scenario: zero-species frequency [MHz]")
    p_sweep.add_argument("--omega-cavity", type=float, default=None,
                         help="custom scenario: resonator frequency [MHz]")
    p_sweep.add_argument("--resonant", default="zero",
                         choices=("minus", "zero", "plus"))
    p_sweep.add_argument("--driven", default="zero",
                         choices=("minus", "zero", "plus"))
    p_sweep.add_argument("--no-cross-relaxation", action="store_true")
    p_sweep.set_defaults(handler=cmd_sweep)

    p_ep = sub.add_parser("ep", help="locate the exceptional point")
    common(p_ep)
    p_ep.set_defaults(handler=cmd_ep)

    p_fit = sub.add_parser("fit", help="fit spectrum or saturation data")
    common(p_fit)
    p_fit.add_argument("--mode", required=True,
                       choices=("transmission", "saturation"))
    p_fit.add_argument("--data", required=True, help="input CSV file")
    p_fit.add_argument("--free", default="kappa,gamma,g_eff",
                       help="comma-separated free parameters (transmission mode)")
    p_fit.add_argument("--init", action="append", default=None,
                       metavar="NAME=VALUE",
                       help="initial guess override (repeatable)")
    p_fit.set_defaults(handler=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
