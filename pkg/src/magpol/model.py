"""Shared physical parameter model and unit conventions.

Unit convention
---------------
Every frequency and decay rate in the toolkit is stored in angular units of
2*pi*MHz, i.e. the stored number is omega/2pi expressed in MHz.  Quoted
lab values like "kappa/2pi = 0.6 MHz" therefore enter the data model
verbatim as ``0.6``.  Magnetic fields are in mT, powers in dBm or W, and
times in microseconds.  Only :func:`calibration_k_theoretical` crosses into
SI angular units (rad/s), because the drive-calibration constant k relates
an angular Rabi frequency to the square root of a power in watts.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

HBAR_SI = 1.054571817e-34  # J*s
TWO_PI = 2.0 * math.pi

# Conversion factor from the internal 2*pi*MHz convention to SI angular
# frequency (rad/s): omega_SI = ANGULAR_MHZ_TO_SI * stored_value.
ANGULAR_MHZ_TO_SI = TWO_PI * 1e6


class SpinSpecies(enum.IntEnum):
    """The three hyperfine-split spin subensembles, ordered minus < zero < plus.

    The integer value is the nuclear-spin projection s, so the transition
    frequency of species ``s`` at field B is ``gamma_e*B + s*a_parallel``.
    """

    MINUS = -1
    ZERO = 0
    PLUS = 1

    @property
    def label(self) -> str:
        return {-1: "minus", 0: "zero", 1: "plus"}[int(self)]

    @classmethod
    def from_label(cls, label: str) -> "SpinSpecies":
        try:
            return {"minus": cls.MINUS, "zero": cls.ZERO, "plus": cls.PLUS}[label]
        except KeyError:
            raise ConfigError(f"unknown spin species label {label!r}") from None


@dataclass(frozen=True)
class HybridParams:
    """Full physical parameter set of the resonator + spin-ensemble system.

    Parameters
    ----------
    omega_c:
        Bare resonator frequency [2pi*MHz].
    kappa_i, kappa_o, kappa_int:
        Input-port, output-port and intrinsic resonator decay rates
        [2pi*MHz]; the total decay rate is ``kappa = kappa_i + kappa_o +
        kappa_int`` (HWHM convention).
    gamma:
        Magnon damping rate [2pi*MHz] (HWHM).
    g:
        Collective bare magnon-photon coupling [2pi*MHz].
    n_spins:
        Number of spins N per subensemble.  Only the reduced drive
        amplitude u = Omega_d/sqrt(N) enters the physics, so N is needed
        solely by wrappers that convert absolute drive amplitudes.
    a_parallel:
        Hyperfine splitting between adjacent subensembles [2pi*MHz].
    gamma_e:
        Gyromagnetic ratio [2pi*MHz per mT].
    """

    omega_c: float
    kappa_i: float
    kappa_o: float
    gamma: float
    g: float
    n_spins: float
    kappa_int: float = 0.0
    a_parallel: float = 94.0
    gamma_e: float = 28.0

    def __post_init__(self):
        if not (self.omega_c > 0 and self.gamma > 0):
            raise DomainError("omega_c and gamma must be strictly positive")
        if not (self.kappa_i > 0 and self.kappa_o > 0):
            raise DomainError("kappa_i and kappa_o must be strictly positive")
        if self.kappa_int < 0:
            raise DomainError("kappa_int must be non-negative")
        if self.g < 0:
            raise DomainError("bare coupling g must be non-negative")
        if self.n_spins < 1:
            raise DomainError("n_spins must be >= 1")
        if not (self.a_parallel >= 0 and self.gamma_e > 0):
            raise DomainError("a_parallel must be >= 0 and gamma_e > 0")

    @property
    def kappa(self) -> float:
        """Total resonator decay rate kappa_i + kappa_o + kappa_int [2pi*MHz]."""
        return self.kappa_i + self.kappa_o + self.kappa_int

    @classmethod
    def with_total_kappa(cls, omega_c: float, kappa: float, gamma: float,
                         g: float, n_spins: float, kappa_int: float = 0.0,
                         **kwargs) -> "HybridParams":
        """Build from a total resonator linewidth, splitting the port rates evenly.

        The input/output ports of the coplanar resonator are nearly
        identical and dominate the intrinsic loss, so the default split is
        kappa_i = kappa_o = (kappa - kappa_int)/2.
        """
        half = (kappa - kappa_int) / 2.0
        return cls(omega_c=omega_c, kappa_i=half, kappa_o=half, gamma=gamma,
                   g=g, n_spins=n_spins, kappa_int=kappa_int, **kwargs)

    def replace(self, **changes) -> "HybridParams":
        return dataclasses.replace(self, **changes)


def reference_params(omega_c: float = 3093.0, n_spins: float = 1.0) -> HybridParams:
    """Measured parameter set of the reference sample.

    kappa/2pi = 0.6 MHz, gamma/2pi = 11.9 MHz, g/2pi = 17.2 MHz, with the
    resonator at 3.093 GHz unless overridden.  ``n_spins`` defaults to 1 so
    that the reduced drive amplitude u and the collective Rabi frequency
    coincide; supply the real ensemble size when converting absolute
    drive powers.
    """
    return HybridParams.with_total_kappa(omega_c=omega_c, kappa=0.6,
                                         gamma=11.9, g=17.2, n_spins=n_spins)


@dataclass(frozen=True)
class DriveSpec:
    """Drive tone description: frequency plus either a power or an amplitude.

    Exactly one of ``power_dbm`` and ``amplitude_u`` must be given.  When a
    power is given, ``calibration_c`` (units 2pi*MHz per sqrt(W)) maps
    sqrt(power in W) to the reduced amplitude u = Omega_d/sqrt(N).
    """

    omega_d: float
    power_dbm: float | None = None
    amplitude_u: float | None = None
    calibration_c: float | None = None

    def __post_init__(self):
        if (self.power_dbm is None) == (self.amplitude_u is None):
            raise ConfigError("exactly one of power_dbm and amplitude_u must be set")
        if self.amplitude_u is not None and self.amplitude_u < 0:
            raise DomainError("amplitude_u must be non-negative")


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform probe-frequency grid [2pi*MHz]."""

    start: float
    stop: float
    n_points: int

    def __post_init__(self):
        if not self.start < self.stop:
            raise ConfigError("grid start must be below stop")
        if self.n_points < 2:
            raise ConfigError("grid needs at least 2 points")

    def omegas(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n_points)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.n_points - 1)


def zeeman_frequencies(b_field: float, params: HybridParams) -> dict[SpinSpecies, float]:
    """Transition frequencies of the three subensembles at static field B [mT].

    omega_0 = gamma_e*B and omega_(+/-) = gamma_e*B +/- a_parallel, so the
    plus/minus splitting is exactly 2*a_parallel independent of field.
    """
    if not b_field > 0:
        raise DomainError("magnetic field must be strictly positive")
    base = params.gamma_e * b_field
    return {s: base + int(s) * params.a_parallel for s in SpinSpecies}


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power in dBm to watts: 10^(p/10) mW."""
    if not math.isfinite(p_dbm):
        raise DomainError("power in dBm must be finite")
    return 10.0 ** (p_dbm / 10.0) * 1e-3


def watts_to_dbm(p_watts: float) -> float:
    """Inverse of :func:`dbm_to_watts`; requires a strictly positive power."""
    if not p_watts > 0:
        raise DomainError("power must be strictly positive to express in dBm")
    return 10.0 * math.log10(p_watts / 1e-3)


def calibration_k_theoretical(params: HybridParams) -> float:
    """Ideal drive-power calibration k = sqrt(kappa / (2*hbar*omega_c)).

    Returns k in SI units [rad/s per sqrt(W)], so that the collective Rabi
    frequency of a drive of power P watts is Omega_d = k*sqrt(P) rad/s.
    Internally converts kappa and omega_c from the 2pi*MHz convention to
    SI angular frequencies.
    """
    kappa_si = params.kappa * ANGULAR_MHZ_TO_SI
    omega_c_si = params.omega_c * ANGULAR_MHZ_TO_SI
    return math.sqrt(kappa_si / (2.0 * HBAR_SI * omega_c_si))


def drive_amplitude(spec: DriveSpec) -> float:
    """Reduced drive amplitude u = Omega_d/sqrt(N) [2pi*MHz] for a drive spec.

    If the spec carries an explicit amplitude it is returned as-is;
    otherwise the power is converted through the calibration constant,
    u = calibration_c * sqrt(P[W]).
    """
    if spec.amplitude_u is not None:
        return spec.amplitude_u
    if spec.calibration_c is None:
        raise ConfigError("drive power given without a calibration constant")
    return spec.calibration_c * math.sqrt(dbm_to_watts(spec.power_dbm))
