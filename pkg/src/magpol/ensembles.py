"""Three-subensemble scenarios: dispersive shifts, cross relaxation, sweeps.

One subensemble is tuned (nearly) resonant with the resonator and carries
the polariton physics; the other two sit far detuned in the dispersive
regime, where each merely shifts the resonator frequency by
g_eff_s^2/(omega_c - omega_s).  Driving any subensemble saturates its
occupation; with cross relaxation active the occupations of all three
equalize in the steady state, so the two dispersive shifts track each
other.  When the dispersive detunings are opposite (resonant middle
subensemble) the shifts cancel identically and the resonant condition for
the EP survives every drive power.  When the resonant subensemble is an
outer one, the detunings no longer cancel, the shifted resonator walks
away from the spin frequency as the drive grows, and the EP disappears.

``scenario_sweep`` runs the full pipeline per drive point: steady-state
occupations -> dispersive shift -> transmission spectrum and two-mode
eigenvalues with the shifted resonator frequency.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .model import FrequencyGrid, HybridParams, SpinSpecies
from .polariton import TwoModeHamiltonian, eigenvalues
from .steadystate import (DetuningPair, OccupationSolution, g_eff_from_chi,
                          solve_chi)
from .transmission import Spectrum, TransmissionModel, spectrum

#: Ladder-consistency tolerance for scenario frequencies [2pi*MHz].
LADDER_TOL = 1e-9


@dataclass(frozen=True)
class EnsembleScenario:
    """Which subensemble is resonant, which is driven, and the field geometry.

    ``frequencies`` must form the hyperfine ladder omega_plus - omega_zero
    = omega_zero - omega_minus = a_parallel.  ``omega_c`` is the bare
    resonator frequency of this scenario (it shifts slightly with the
    static field between scenarios).
    """

    frequencies: dict[SpinSpecies, float]
    resonant_species: SpinSpecies
    driven_species: SpinSpecies
    cross_relaxation: bool
    omega_c: float

    def __post_init__(self):
        freqs = dict(self.frequencies)
        if set(freqs) != set(SpinSpecies):
            raise ConfigError("scenario needs frequencies for all three species")
        object.__setattr__(self, "frequencies", freqs)
        upper = freqs[SpinSpecies.PLUS] - freqs[SpinSpecies.ZERO]
        lower = freqs[SpinSpecies.ZERO] - freqs[SpinSpecies.MINUS]
        if abs(upper - lower) > LADDER_TOL:
            raise ConfigError(
                f"subensemble frequencies must be evenly spaced; got steps "
                f"{upper:.6g} and {lower:.6g}")
        if self.omega_c <= 0:
            raise DomainError("omega_c must be strictly positive")

    @classmethod
    def from_anchor(cls, anchor: SpinSpecies, anchor_frequency: float,
                    a_parallel: float, resonant_species: SpinSpecies,
                    driven_species: SpinSpecies, cross_relaxation: bool,
                    omega_c: float) -> "EnsembleScenario":
        """Build the ladder from one species' frequency and the hyperfine step."""
        base = anchor_frequency - int(anchor) * a_parallel
        freqs = {s: base + int(s) * a_parallel for s in SpinSpecies}
        return cls(frequencies=freqs, resonant_species=resonant_species,
                   driven_species=driven_species,
                   cross_relaxation=cross_relaxation, omega_c=omega_c)

    @property
    def omega_resonant(self) -> float:
        return self.frequencies[self.resonant_species]

    @property
    def omega_driven(self) -> float:
        return self.frequencies[self.driven_species]

    def drive_detunings(self) -> DetuningPair:
        """Drive resonant with the driven species: Delta_s = 0, Delta_c = omega_c - omega_d."""
        return DetuningPair(delta_c=self.omega_c - self.omega_driven,
                            delta_s=0.0)


@dataclass(frozen=True)
class OccupationTriple:
    """Reduced occupation per subensemble.

    The closed upper end chi = 1/2 (full saturation, decoupled ensemble)
    is representable here even though the steady-state solver only ever
    approaches it.
    """

    chi: dict[SpinSpecies, float]

    def __post_init__(self):
        if set(self.chi) != set(SpinSpecies):
            raise ConfigError("occupations needed for all three species")
        for s, c in self.chi.items():
            if not 0.0 <= c <= 0.5:
                raise DomainError(f"chi[{s.label}] must lie in [0, 0.5]")

    def __getitem__(self, species: SpinSpecies) -> float:
        return self.chi[species]


@dataclass(frozen=True)
class ShiftedCavity:
    """Dispersively shifted resonator frequency and the per-species terms."""

    omega_c_tilde: float
    contributions: dict[SpinSpecies, float]


def _spread_occupation(scenario: EnsembleScenario,
                       driven: OccupationSolution) -> OccupationTriple:
    if scenario.cross_relaxation:
        chi = {s: driven.chi for s in SpinSpecies}
    else:
        chi = {s: driven.chi if s is scenario.driven_species else 0.0
               for s in SpinSpecies}
    return OccupationTriple(chi=chi)


def occupations(scenario: EnsembleScenario, u: float,
                params: HybridParams) -> OccupationTriple:
    """Steady-state occupations of the three subensembles at drive amplitude u.

    The driven species is solved self-consistently with the drive on its
    own resonance.  With cross relaxation on, all three species settle at
    the driven species' occupation; off, the others stay unexcited.
    """
    if u < 0:
        raise DomainError("drive amplitude must be non-negative")
    driven = solve_chi(u, scenario.drive_detunings(), params)
    return _spread_occupation(scenario, driven)


def dispersive_shift(scenario: EnsembleScenario, occs: OccupationTriple,
                     g: float) -> ShiftedCavity:
    """Resonator frequency shift from the two non-resonant subensembles.

    Each dispersive species s contributes g_eff_s^2/(omega_c - omega_s)
    with g_eff_s = g*sqrt(1 - 2 chi_s); the resonant species contributes
    no self-term.  Warns when a contribution is outside the dispersive
    regime |omega_c - omega_s| > g_eff_s.
    """
    contributions = {}
    total = 0.0
    for s in SpinSpecies:
        if s is scenario.resonant_species:
            continue
        delta = scenario.omega_c - scenario.frequencies[s]
        if delta == 0.0:
            raise DomainError(
                f"species {s.label} is degenerate with the resonator; "
                "dispersive shift undefined")
        g_eff_s = g_eff_from_chi(occs[s], g)
        if abs(delta) <= g_eff_s:
            warnings.warn(
                f"species {s.label}: |detuning| {abs(delta):.3g} <= g_eff "
                f"{g_eff_s:.3g}; dispersive approximation is unreliable",
                stacklevel=2)
        term = g_eff_s ** 2 / delta
        contributions[s] = term
        total += term
    return ShiftedCavity(omega_c_tilde=scenario.omega_c + total,
                         contributions=contributions)


@dataclass(frozen=True)
class SweepPoint:
    """One drive point of a scenario sweep."""

    u: float
    occupations: OccupationTriple
    shifted: ShiftedCavity
    g_eff: float
    omega1: complex
    omega2: complex
    spectrum: Spectrum
    driven_solution: OccupationSolution


@dataclass(frozen=True)
class ScenarioSweep:
    """Sweep results plus the configuration that generated them."""

    scenario: EnsembleScenario
    params: HybridParams
    grid: FrequencyGrid
    points: list[SweepPoint]

    @property
    def u_values(self) -> np.ndarray:
        return np.array([p.u for p in self.points])

    @property
    def g_eff_values(self) -> np.ndarray:
        return np.array([p.g_eff for p in self.points])


def sweep_point(scenario: EnsembleScenario, u: float, params: HybridParams,
                grid: FrequencyGrid) -> SweepPoint:
    """Evaluate occupations, shift, eigenvalues and spectrum at one drive."""
    driven = solve_chi(u, scenario.drive_detunings(), params)
    occs = _spread_occupation(scenario, driven)
    shifted = dispersive_shift(scenario, occs, params.g)
    g_eff = g_eff_from_chi(occs[scenario.resonant_species], params.g)
    h = TwoModeHamiltonian(omega_a=shifted.omega_c_tilde, kappa_a=params.kappa,
                           omega_b=scenario.omega_resonant,
                           kappa_b=params.gamma, g_eff=g_eff)
    w1, w2 = eigenvalues(h)
    model = TransmissionModel(
        params=params.replace(omega_c=shifted.omega_c_tilde),
        omega_m=scenario.omega_resonant, g_eff=g_eff)
    spec = spectrum(model, grid)
    return SweepPoint(u=u, occupations=occs, shifted=shifted, g_eff=g_eff,
                      omega1=w1, omega2=w2, spectrum=spec,
                      driven_solution=driven)


def scenario_sweep(scenario: EnsembleScenario, u_values, params: HybridParams,
                   grid: FrequencyGrid) -> ScenarioSweep:
    """Run the occupation -> shift -> spectrum pipeline over a drive axis."""
    u_values = np.asarray(u_values, dtype=float)
    if np.any(np.diff(u_values) < 0):
        raise ConfigError("drive axis must be sorted ascending")
    points = [sweep_point(scenario, float(u), params, grid) for u in u_values]
    return ScenarioSweep(scenario=scenario, params=params, grid=grid,
                         points=points)


@dataclass(frozen=True)
class EpVerdict:
    """Whether a sweep passes through the EP, and where."""

    present: bool
    u: float | None = None
    index: int | None = None

    def __bool__(self):
        return self.present


def ep_present(sweep: ScenarioSweep, epsilon: float = 1e-6) -> EpVerdict:
    """Decide whether the sweep crosses the exceptional point.

    The EP requires, at the same drive point, the resonant condition
    |omega_c_tilde - omega_resonant| <= epsilon and the coalescence
    condition 2 g_eff = gamma - kappa.  Since g_eff varies continuously
    the coalescence is located by the sign change of 2 g_eff - (gamma -
    kappa) between consecutive drive points, with the crossing amplitude
    and the shifted resonator frequency interpolated linearly; returns
    the first qualifying crossing.
    """
    params = sweep.params
    target = params.gamma - params.kappa
    us = sweep.u_values
    gaps = 2.0 * sweep.g_eff_values - target
    omega_res = sweep.scenario.omega_resonant
    mismatch = np.array([p.shifted.omega_c_tilde - omega_res
                         for p in sweep.points])
    for i in range(len(us)):
        if abs(gaps[i]) <= epsilon and abs(mismatch[i]) <= epsilon:
            return EpVerdict(True, u=float(us[i]), index=i)
        if i + 1 < len(us) and gaps[i] * gaps[i + 1] < 0:
            frac = gaps[i] / (gaps[i] - gaps[i + 1])
            m_cross = mismatch[i] + frac * (mismatch[i + 1] - mismatch[i])
            if abs(m_cross) <= epsilon:
                u_cross = us[i] + frac * (us[i + 1] - us[i])
                return EpVerdict(True, u=float(u_cross), index=i)
    return EpVerdict(False)


# Preset measurement geometries.  Frequencies in 2pi*MHz; each entry fixes
# the anchor species and its frequency, the scenario resonator frequency,
# and which species is resonant/driven.  All presets assume active cross
# relaxation.
_PRESETS = {
    # middle subensemble resonant; drive it directly
    "fig2b": ("zero", 3093.0, 3093.0, "zero", "zero"),
    # middle subensemble resonant; drive an outer one
    "fig4a": ("zero", 3093.0, 3093.0, "zero", "plus"),
    "fig4b": ("zero", 3093.0, 3093.0, "zero", "minus"),
    # outer subensemble nearly resonant; drive it directly
    "fig4c": ("plus", 3106.0, 3095.0, "plus", "plus"),
    "fig4d": ("minus", 3080.0, 3090.0, "minus", "minus"),
    # outer subensemble nearly resonant; drive a different one
    "fig9a": ("plus", 3106.0, 3095.0, "plus", "zero"),
    "fig9b": ("plus", 3106.0, 3095.0, "plus", "minus"),
    "fig9c": ("minus", 3080.0, 3090.0, "minus", "zero"),
    "fig9d": ("minus", 3080.0, 3090.0, "minus", "plus"),
}

PRESET_NAMES = tuple(_PRESETS)


def preset_scenario(name: str, params: HybridParams) -> EnsembleScenario:
    """Named measurement geometry; the hyperfine step comes from ``params``."""
    try:
        anchor, anchor_freq, omega_c, resonant, driven = _PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from "
                          f"{', '.join(PRESET_NAMES)}") from None
    return EnsembleScenario.from_anchor(
        anchor=SpinSpecies.from_label(anchor),
        anchor_frequency=anchor_freq,
        a_parallel=params.a_parallel,
        resonant_species=SpinSpecies.from_label(resonant),
        driven_species=SpinSpecies.from_label(driven),
        cross_relaxation=True,
        omega_c=omega_c)
