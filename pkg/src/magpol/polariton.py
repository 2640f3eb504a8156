"""Two-mode non-Hermitian eigensystem and exceptional-point analysis.

The hybrid photon-magnon system is modelled by the 2x2 non-Hermitian
matrix

    H = [[omega_a - i*kappa_a,  g_eff             ],
         [g_eff,                omega_b - i*kappa_b]]

over the single-excitation basis {|photon>, |magnon>}.  Its eigenvalues

    w_{1,2} = (z_a + z_b)/2 +/- sqrt((z_a - z_b)^2 + 4 g_eff^2)/2,

with z_a = omega_a - i*kappa_a and z_b = omega_b - i*kappa_b, coalesce at
the exceptional point (EP).  On resonance (omega_a = omega_b) the EP sits
at 2*g_eff = kappa_b - kappa_a, where the eigenvectors also merge into
(i, 1)^T.

Branch convention: the square root is the principal branch, so w_1 (the
"+" root) carries the larger real part whenever the discriminant has a
positive real part, and otherwise the larger imaginary part.  The paper
trail for sweeps records this convention in output metadata; exactly at
the EP the labels are degenerate.

Times are in microseconds.  Because frequencies are stored as omega/2pi
in MHz, evolution phases are exp(-i * 2pi * f * t).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NoExceptionalPointError
from .model import TWO_PI, HybridParams

# Frequencies [2pi*MHz] times microseconds give phase in cycles; one cycle
# is 2pi radians.
PHASE_PER_CYCLE = TWO_PI


@dataclass(frozen=True)
class TwoModeHamiltonian:
    """Parameters of the effective two-mode non-Hermitian matrix [2pi*MHz]."""

    omega_a: float
    kappa_a: float
    omega_b: float
    kappa_b: float
    g_eff: float

    def __post_init__(self):
        if self.g_eff < 0:
            raise DomainError("g_eff must be non-negative")
        if self.kappa_a < 0 or self.kappa_b < 0:
            raise DomainError("decay rates must be non-negative")

    @classmethod
    def from_params(cls, params: HybridParams, omega_m: float, g_eff: float,
                    omega_c: float | None = None) -> "TwoModeHamiltonian":
        """Mode a is the resonator (rate kappa), mode b the magnon (rate gamma)."""
        return cls(omega_a=params.omega_c if omega_c is None else omega_c,
                   kappa_a=params.kappa, omega_b=omega_m,
                   kappa_b=params.gamma, g_eff=g_eff)

    @property
    def is_resonant(self) -> bool:
        return self.omega_a == self.omega_b

    def matrix(self) -> np.ndarray:
        return np.array([[self.omega_a - 1j * self.kappa_a, self.g_eff],
                         [self.g_eff, self.omega_b - 1j * self.kappa_b]],
                        dtype=complex)

    def trace(self) -> complex:
        return (self.omega_a + self.omega_b) - 1j * (self.kappa_a + self.kappa_b)

    def determinant(self) -> complex:
        z_a = self.omega_a - 1j * self.kappa_a
        z_b = self.omega_b - 1j * self.kappa_b
        return z_a * z_b - self.g_eff ** 2

    def discriminant(self) -> complex:
        """(z_a - z_b)^2 + 4 g_eff^2; zero exactly at the EP."""
        dz = (self.omega_a - self.omega_b) - 1j * (self.kappa_a - self.kappa_b)
        return dz * dz + 4.0 * self.g_eff ** 2

    def norm(self) -> float:
        """Frobenius norm of the matrix, used for degeneracy thresholds."""
        z_a = abs(self.omega_a - 1j * self.kappa_a)
        z_b = abs(self.omega_b - 1j * self.kappa_b)
        return math.sqrt(z_a ** 2 + z_b ** 2 + 2.0 * self.g_eff ** 2)


class RegimeClass(enum.Enum):
    """Position relative to the resonant exceptional point."""

    BELOW_EP = "below_ep"
    AT_EP = "at_ep"
    ABOVE_EP = "above_ep"


@dataclass(frozen=True)
class PolaritonEigensystem:
    """Eigenvalues plus eigenvector descriptors in the (A e^{i phi}, 1)^T gauge."""

    omega1: complex
    omega2: complex
    amp1: float
    amp2: float
    phase1: float
    phase2: float
    regime: RegimeClass


def _principal_sqrt(z: complex) -> complex:
    # Guard against imag = -0.0 selecting the lower branch for negative
    # real arguments: a negative-real discriminant must give +i*sqrt(|z|).
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return cmath.sqrt(z)


def eigenvalues(h: TwoModeHamiltonian) -> tuple[complex, complex]:
    """The two complex polariton eigenvalues, "+" branch first.

    Valid at arbitrary detuning between the two modes; reduces to
    :func:`eigenvalues_resonant` when omega_a = omega_b.
    """
    if h.g_eff == 0.0:
        # decoupled modes, returned exactly; order by the branch convention
        # (principal sqrt of dz^2 equals dz iff dz lies in the right
        # half-plane or on the positive imaginary axis)
        z_a = h.omega_a - 1j * h.kappa_a
        z_b = h.omega_b - 1j * h.kappa_b
        dz = z_a - z_b
        if dz.real > 0 or (dz.real == 0 and dz.imag >= 0):
            return z_a, z_b
        return z_b, z_a
    half_trace = h.trace() / 2.0
    root = _principal_sqrt(h.discriminant()) / 2.0
    return half_trace + root, half_trace - root


def eigenvalues_resonant(h: TwoModeHamiltonian) -> tuple[complex, complex]:
    """Resonant-case eigenvalues omega0 - i(kappa+gamma)/2 +/- sqrt(4g^2 - dk^2)/2.

    Requires omega_a = omega_b.  Above the EP the two modes split in
    frequency and share the linewidth (kappa_a + kappa_b)/2; below it they
    sit at the same frequency with distinct linewidths.
    """
    if not h.is_resonant:
        raise DomainError("eigenvalues_resonant requires omega_a == omega_b")
    dk = h.kappa_b - h.kappa_a
    common = h.omega_a - 0.5j * (h.kappa_a + h.kappa_b)
    root = _principal_sqrt(complex(4.0 * h.g_eff ** 2 - dk * dk)) / 2.0
    return common + root, common - root


def ep_coupling(params: HybridParams) -> float:
    """Effective coupling at the resonant exceptional point, (gamma - kappa)/2."""
    if params.gamma <= params.kappa:
        raise NoExceptionalPointError(
            "no exceptional point: gamma must exceed kappa")
    return (params.gamma - params.kappa) / 2.0


def classify_regime(h: TwoModeHamiltonian, epsilon: float | None = None) -> RegimeClass:
    """Classify a resonant Hamiltonian relative to its EP.

    ``epsilon`` is the half-width of the AT_EP band in coupling units;
    it defaults to 1e-9*(kappa_b - kappa_a).
    """
    if not h.is_resonant:
        raise DomainError("classify_regime requires omega_a == omega_b")
    dk = h.kappa_b - h.kappa_a
    if epsilon is None:
        epsilon = 1e-9 * dk
    gap = 2.0 * h.g_eff - dk
    if abs(gap) <= epsilon:
        return RegimeClass.AT_EP
    if gap < 0:
        return RegimeClass.BELOW_EP
    return RegimeClass.ABOVE_EP


def eigenvectors_resonant(h: TwoModeHamiltonian) -> tuple[tuple[float, float],
                                                          tuple[float, float]]:
    """Relative amplitudes and phases ((A1, phi1), (A2, phi2)) of the eigenvectors.

    Eigenvectors are reported unnormalized in the (A e^{i phi}, 1)^T gauge.
    Below the EP both phases are pi/2 and the amplitudes multiply to one,
    A1*A2 = 1; above it both amplitudes are one and the phases are
    arccos(+/- sqrt(4g^2 - dk^2)/(2g)); at the EP both eigenvectors equal
    (i, 1)^T.  The index pairing follows the eigenvalue branch convention:
    (A1, phi1) belongs to the "+" eigenvalue.
    """
    if not h.is_resonant:
        raise DomainError("eigenvectors_resonant requires omega_a == omega_b")
    dk = h.kappa_b - h.kappa_a
    if dk <= 0:
        raise DomainError("eigenvectors_resonant requires kappa_b > kappa_a")
    g = h.g_eff
    if g == 0:
        raise DomainError("eigenvector gauge undefined for g_eff = 0")
    if 2.0 * g <= dk:
        # below or at the EP: purely imaginary upper component
        s = math.sqrt(max(dk * dk - 4.0 * g * g, 0.0))
        a1 = (dk + s) / (2.0 * g)
        a2 = (dk - s) / (2.0 * g)
        return (a1, math.pi / 2.0), (a2, math.pi / 2.0)
    s = math.sqrt(4.0 * g * g - dk * dk)
    phi1 = math.acos(s / (2.0 * g))
    phi2 = math.acos(-s / (2.0 * g))
    return (1.0, phi1), (1.0, phi2)


def polariton_eigensystem(h: TwoModeHamiltonian,
                          epsilon: float | None = None) -> PolaritonEigensystem:
    """Bundle resonant eigenvalues, eigenvector descriptors and EP regime."""
    w1, w2 = eigenvalues_resonant(h)
    (a1, p1), (a2, p2) = eigenvectors_resonant(h)
    return PolaritonEigensystem(omega1=w1, omega2=w2, amp1=a1, amp2=a2,
                                phase1=p1, phase2=p2,
                                regime=classify_regime(h, epsilon))


def propagator(h: TwoModeHamiltonian, t: float,
               series_cutoff: float = 1e-4) -> np.ndarray:
    """Non-unitary evolution operator exp(-i*H*t) for t in microseconds.

    Evaluated through the closed two-mode form

        exp(-iHt) = e^{-i*lam*tau} [cosh(mu) I + sinhc(mu) * (-i*tau) (H - lam*I)]

    with lam = trace/2, tau = 2pi*t and mu = -i*tau*sqrt(D)/2 where D is
    the discriminant.  Away from degeneracy this equals the
    eigendecomposition result (Sylvester's formula for a 2x2); as
    |D| -> 0 it passes smoothly into the coalesced (Jordan) form
    e^{-i*lam*tau} (I - i*tau*(H - lam*I)), which it matches exactly at the
    EP.  For |mu| <= ``series_cutoff`` the cosh/sinhc factors are evaluated
    by series, keeping the degenerate limit free of 0/0 and cancellation.
    """
    if t < 0:
        raise DomainError("propagation time must be non-negative")
    tau = PHASE_PER_CYCLE * t
    lam = h.trace() / 2.0
    nilpotent = h.matrix() - lam * np.eye(2)
    mu = -0.5j * tau * _principal_sqrt(h.discriminant())
    if abs(mu) <= series_cutoff:
        mu2 = mu * mu
        cosh_mu = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0
        sinhc_mu = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0
    else:
        cosh_mu = cmath.cosh(mu)
        sinhc_mu = cmath.sinh(mu) / mu
    return cmath.exp(-1j * lam * tau) * (
        cosh_mu * np.eye(2) + sinhc_mu * (-1j * tau) * nilpotent)


@dataclass(frozen=True)
class DensityMatrix2:
    """2x2 density matrix over {|photon>, |magnon>}; Hermitian, PSD, trace in (0, 1]."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError("density matrix must be 2x2")
        object.__setattr__(self, "matrix", m)
        if np.max(np.abs(m - m.conj().T)) > 1e-12 * max(np.max(np.abs(m)), 1.0):
            raise DomainError("density matrix must be Hermitian")
        tr = m.trace().real
        if not (0.0 < tr <= 1.0 + 1e-12):
            raise DomainError("density matrix trace must lie in (0, 1]")
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if eigs.min() < -1e-12:
            raise DomainError("density matrix must be positive semidefinite")

    @classmethod
    def from_state_vector(cls, v) -> "DensityMatrix2":
        """Rank-1 density matrix |v><v| from a (not necessarily normalized) vector."""
        v = np.asarray(v, dtype=complex).reshape(2)
        norm2 = float(np.vdot(v, v).real)
        if norm2 == 0.0:
            raise DomainError("state vector must be nonzero")
        if norm2 > 1.0:
            v = v / math.sqrt(norm2)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def photon(cls) -> "DensityMatrix2":
        return cls.from_state_vector([1.0, 0.0])

    @classmethod
    def magnon(cls) -> "DensityMatrix2":
        return cls.from_state_vector([0.0, 1.0])

    @property
    def trace(self) -> float:
        return float(self.matrix.trace().real)

    def purity_defect(self) -> float:
        """Frobenius norm of rho^2 - rho; zero only for a pure, trace-one state."""
        m = self.matrix
        return float(np.linalg.norm(m @ m - m))


def evolve_density(h: TwoModeHamiltonian, rho0: DensityMatrix2,
                   t: float) -> DensityMatrix2:
    """Propagate rho(t) = P rho(0) P^dagger with P = exp(-i*H*t).

    The evolution preserves Hermiticity and positive semidefiniteness; the
    trace decays monotonically whenever both decay rates are positive, so
    a pure initial state turns into a (sub-normalized) mixed state in the
    sense that rho(t)^2 = Tr[rho(t)] * rho(t) != rho(t) once the trace has
    dropped below one.
    """
    p = propagator(h, t)
    out = p @ rho0.matrix @ p.conj().T
    out = (out + out.conj().T) / 2.0  # scrub rounding-level asymmetry
    return DensityMatrix2(out)


def counter_rotating_bound(chi: float) -> float:
    """Magnitude bound of the summed counter-rotating coefficients.

    For reduced occupation chi = <b^dag b>/N the neglected counter-rotating
    terms have total weight 1 - sqrt(1 - chi), which stays strictly below
    one for chi in [0, 1); this justifies the rotating-wave approximation
    even at strong driving.
    """
    if not 0.0 <= chi < 1.0:
        raise DomainError("chi must lie in [0, 1)")
    return 1.0 - math.sqrt(1.0 - chi)
