"""File formats: parameter files, CSV emission/parsing, metadata sidecars.

Parameter files are flat UTF-8 ``key = value`` text with ``#`` comments;
keys match the :class:`~magpol.model.HybridParams` field names and all
frequencies are given in MHz (the 2pi*MHz convention is declarative, the
loader multiplies nothing).

All CSV output is UTF-8, comma-separated, with numbers printed to 12
significant digits.  Every written file gets a ``<name>.meta`` sidecar
listing the generating parameters and the toolkit version, sufficient to
regenerate the file.
"""

from __future__ import annotations

import csv
import io as _stdio
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError
from .model import HybridParams
from .transmission import Spectrum

PARAM_KEYS_REQUIRED = ("omega_c", "kappa_i", "kappa_o", "gamma", "g", "n_spins")
PARAM_KEYS_OPTIONAL = ("kappa_int", "a_parallel", "gamma_e")


def fmt(value) -> str:
    """Render a number with 12 significant digits."""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.11e}"


def load_params(path) -> HybridParams:
    """Read a HybridParams from a flat key = value parameter file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"parameter file not found: {path}")
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, text = line.partition("=")
        key = key.strip()
        if key not in PARAM_KEYS_REQUIRED + PARAM_KEYS_OPTIONAL:
            raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate parameter {key!r}")
        try:
            values[key] = float(text.strip())
        except ValueError:
            raise ConfigError(
                f"{path}:{lineno}: invalid number {text.strip()!r}") from None
    missing = [k for k in PARAM_KEYS_REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"{path}: missing parameters {missing}")
    return HybridParams(**values)


def dump_params(params: HybridParams) -> str:
    """Parameter-file text for a HybridParams (round-trips with load_params)."""
    lines = ["# hybrid-system parameters (frequencies/rates in MHz, 2pi*MHz convention)"]
    for key in PARAM_KEYS_REQUIRED + PARAM_KEYS_OPTIONAL:
        lines.append(f"{key} = {fmt(getattr(params, key))}")
    return "\n".join(lines) + "\n"


def write_sidecar(path, metadata: dict) -> Path:
    """Write ``<path>.meta`` describing how the file at ``path`` was produced."""
    target = Path(str(path) + ".meta")
    lines = [f"toolkit_version = {__version__}"]
    for key, value in metadata.items():
        if isinstance(value, float):
            value = fmt(value)
        lines.append(f"{key} = {value}")
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target


def spectrum_csv_text(spec: Spectrum) -> str:
    """CSV body for one spectrum: header omega_mhz,s21_abs."""
    buf = _stdio.StringIO()
    buf.write("omega_mhz,s21_abs\n")
    for omega, value in zip(spec.omegas, spec.values):
        buf.write(f"{fmt(omega)},{fmt(value)}\n")
    return buf.getvalue()


def write_spectrum_csv(path, spec: Spectrum, metadata: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(spectrum_csv_text(spec), encoding="utf-8")
    meta = dict(spec.metadata)
    meta.update({"grid_start_mhz": fmt(spec.grid.start),
                 "grid_stop_mhz": fmt(spec.grid.stop),
                 "grid_points": spec.grid.n_points})
    if metadata:
        meta.update(metadata)
    write_sidecar(path, meta)
    return path


SWEEP_HEADER = ("drive_u_mhz,power_dbm,chi,g_eff_mhz,omega_c_tilde_mhz,"
                "re_w1,re_w2,im_w1,im_w2")


def sweep_csv_text(sweep, calibration_c: float | None = None) -> str:
    """CSV body for a scenario sweep (one row per drive point).

    The power_dbm column is filled only when a calibration constant is
    available; otherwise it is left empty (the absolute power axis is not
    recoverable from reduced amplitudes alone).
    """
    from .model import watts_to_dbm

    buf = _stdio.StringIO()
    buf.write(SWEEP_HEADER + "\n")
    for point in sweep.points:
        if calibration_c and point.u > 0:
            dbm = fmt(watts_to_dbm((point.u / calibration_c) ** 2))
        else:
            dbm = ""
        chi = point.occupations[sweep.scenario.driven_species]
        row = [fmt(point.u), dbm, fmt(chi), fmt(point.g_eff),
               fmt(point.shifted.omega_c_tilde),
               fmt(point.omega1.real), fmt(point.omega2.real),
               fmt(point.omega1.imag), fmt(point.omega2.imag)]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def write_sweep_csv(path, sweep, calibration_c: float | None = None,
                    metadata: dict | None = None,
                    spectra: bool = True) -> list[Path]:
    """Write the sweep CSV plus per-point spectrum files indexed by row.

    Returns all written data files (sidecars not listed).  Spectrum files
    are named ``<stem>_spectrum_NNNN.csv`` next to the sweep CSV.
    """
    path = Path(path)
    path.write_text(sweep_csv_text(sweep, calibration_c), encoding="utf-8")
    scenario = sweep.scenario
    meta = {
        "omega_c_mhz": fmt(scenario.omega_c),
        "resonant_species": scenario.resonant_species.label,
        "driven_species": scenario.driven_species.label,
        "cross_relaxation": "on" if scenario.cross_relaxation else "off",
        "branch_convention": "principal",
        "n_points": len(sweep.points),
    }
    for species, freq in sorted(scenario.frequencies.items()):
        meta[f"omega_{species.label}_mhz"] = fmt(freq)
    if metadata:
        meta.update(metadata)
    write_sidecar(path, meta)
    written = [path]
    if spectra:
        for i, point in enumerate(sweep.points):
            sub = path.with_name(f"{path.stem}_spectrum_{i:04d}.csv")
            write_spectrum_csv(sub, point.spectrum,
                               metadata={"sweep_file": path.name, "row": i,
                                         "drive_u_mhz": fmt(point.u)})
            written.append(sub)
    return written


def read_transmission_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse an ``omega_mhz,s21_abs`` CSV into (omegas, values)."""
    return _read_two_columns(path, ("omega_mhz", "s21_abs"))


def read_saturation_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Parse a ``power_dbm,g_eff_mhz`` CSV into (powers, g_effs)."""
    return _read_two_columns(path, ("power_dbm", "g_eff_mhz"))


def _read_two_columns(path, expected_header):
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"data file not found: {path}")
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(expected_header):
            raise ConfigError(f"{path}: expected header "
                              f"{','.join(expected_header)}, got {','.join(header)}")
        xs, ys = [], []
        for rowno, row in enumerate(reader, 2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ConfigError(f"{path}: row {rowno}: expected 2 columns, "
                                  f"got {len(row)}")
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except ValueError:
                bad = 1 if _is_bad_float(row[0]) else 2
                raise ConfigError(
                    f"{path}: row {rowno}, column {bad}: not a number") from None
    if not xs:
        raise ConfigError(f"{path}: no data rows")
    return np.asarray(xs), np.asarray(ys)


def _is_bad_float(text):
    try:
        float(text)
    except ValueError:
        return True
    return False


def fit_report_text(result, extra: dict | None = None) -> str:
    """Key-value report for a FitResult."""
    lines = []
    for name, value in result.estimates.items():
        lines.append(f"{name} = {fmt(value)}")
    lines.append(f"rss = {fmt(result.rss)}")
    lines.append(f"n_iterations = {result.n_iterations}")
    lines.append(f"converged = {str(result.converged).lower()}")
    lines.append(f"jacobian_condition = {fmt(result.jacobian_condition)}")
    if extra:
        for key, value in extra.items():
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def write_residuals_csv(path, xs, data, model_values,
                        x_name: str = "omega_mhz") -> Path:
    """Residuals CSV: input axis, data, model, and data - model columns."""
    path = Path(path)
    buf = _stdio.StringIO()
    buf.write(f"{x_name},data,model,residual\n")
    for x, d, m in zip(xs, data, model_values):
        buf.write(f"{fmt(x)},{fmt(d)},{fmt(m)},{fmt(d - m)}\n")
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path
