"""magpol: driven magnon-polariton systems, exceptional points, and spectra.

A numpy/scipy toolkit for a hybrid quantum system of spin subensembles
coupled to a microwave resonator: non-Hermitian two-mode eigensystems and
exceptional-point (EP) classification, drive-dependent steady-state
magnon occupation and coupling saturation, input-output transmission
spectra with peak extraction, three-subensemble cross-relaxation
scenarios, and least-squares spectrum fitting.

All frequencies and rates are stored in angular units of 2pi*MHz (the
number is f = omega/2pi in MHz), magnetic fields in mT, powers in dBm or
W, times in microseconds.
"""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, NoExceptionalPointError
from .model import (DriveSpec, FrequencyGrid, HybridParams, SpinSpecies,
                    calibration_k_theoretical, dbm_to_watts, drive_amplitude,
                    reference_params, watts_to_dbm, zeeman_frequencies)
from .polariton import (DensityMatrix2, PolaritonEigensystem, RegimeClass,
                        TwoModeHamiltonian, classify_regime,
                        counter_rotating_bound, eigenvalues,
                        eigenvalues_resonant, eigenvectors_resonant,
                        ep_coupling, evolve_density, polariton_eigensystem,
                        propagator)
from .steadystate import (RESONANT, DetuningPair, OccupationSolution,
                          SaturationCurve, chi_residual,
                          chi_residual_resonant, drive_for_occupation,
                          ep_drive_amplitude, ep_occupation, g_eff_from_chi,
                          saturation_sweep, solve_chi)
from .transmission import (Peak, PeakSet, Spectrum, TransmissionModel,
                           extract_peaks, infer_linewidths, s21, spectrum)
from .ensembles import (EnsembleScenario, EpVerdict, OccupationTriple,
                        PRESET_NAMES, ScenarioSweep, ShiftedCavity,
                        SweepPoint, dispersive_shift, ep_present,
                        occupations, preset_scenario, scenario_sweep,
                        sweep_point)
from .fitting import (FitOptions, FitProblem, FitResult, fit_saturation,
                      fit_transmission)

__all__ = [
    "ConfigError", "DomainError", "NoExceptionalPointError",
    "DriveSpec", "FrequencyGrid", "HybridParams", "SpinSpecies",
    "calibration_k_theoretical", "dbm_to_watts", "drive_amplitude",
    "reference_params", "watts_to_dbm", "zeeman_frequencies",
    "DensityMatrix2", "PolaritonEigensystem", "RegimeClass",
    "TwoModeHamiltonian", "classify_regime", "counter_rotating_bound",
    "eigenvalues", "eigenvalues_resonant", "eigenvectors_resonant",
    "ep_coupling", "evolve_density", "polariton_eigensystem", "propagator",
    "RESONANT", "DetuningPair", "OccupationSolution", "SaturationCurve",
    "chi_residual", "chi_residual_resonant", "drive_for_occupation",
    "ep_drive_amplitude", "ep_occupation", "g_eff_from_chi",
    "saturation_sweep", "solve_chi",
    "Peak", "PeakSet", "Spectrum", "TransmissionModel", "extract_peaks",
    "infer_linewidths", "s21", "spectrum",
    "EnsembleScenario", "EpVerdict", "OccupationTriple", "PRESET_NAMES",
    "ScenarioSweep", "ShiftedCavity", "SweepPoint", "dispersive_shift",
    "ep_present", "occupations", "preset_scenario", "scenario_sweep",
    "sweep_point",
    "FitOptions", "FitProblem", "FitResult", "fit_saturation",
    "fit_transmission",
]
