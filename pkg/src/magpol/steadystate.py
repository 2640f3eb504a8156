"""Self-consistent steady-state magnon occupation under a drive tone.

A drive of reduced amplitude u = Omega_d/sqrt(N) [2pi*MHz] pumps one spin
subensemble.  In the frame rotating at the drive frequency, the mean-field
steady state of the coupled Langevin equations fixes the reduced magnon
occupation chi = <b^dag b>/N through

    [(Delta_s - eta*Delta_c)^2 + (gamma + eta*kappa)^2] * chi
        - xi * eta * u^2 = 0,

with xi = (1 - 2 chi)/(1 - chi) and eta = g^2 (1 - 2 chi)/(Delta_c^2 +
kappa^2), where Delta_c = omega_c - omega_d and Delta_s = omega_s -
omega_d.  The solver works with this equation multiplied by (1 - chi),

    G(chi) = [(Delta_s - eta*Delta_c)^2 + (gamma + eta*kappa)^2]
             * chi * (1 - chi)
             - g^2 (1 - 2 chi)^2 u^2 / (Delta_c^2 + kappa^2),

which clears the xi pole, keeps G finite on the closed interval
[0, 1/2], and has guaranteed opposite signs at the endpoints for u > 0:
G(0) = -g^2 u^2/(Delta_c^2 + kappa^2) < 0 and G(1/2) = (Delta_s^2 +
gamma^2)/4 > 0.  Bisection of the first sign change therefore always
converges to the physical branch continuous from chi(u=0) = 0.

The occupation feeds back on the coupling as g_eff = g*sqrt(1 - 2 chi),
which is what a drive sweep actually tunes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, NoExceptionalPointError
from .model import HybridParams
from .polariton import ep_coupling

#: Number of scan points used to detect multiple sign changes of G.
SCAN_POINTS = 1024

#: Default bisection bracket width on chi.
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class DetuningPair:
    """Detunings of resonator (delta_c) and driven spin mode (delta_s) from the drive."""

    delta_c: float
    delta_s: float

    def __post_init__(self):
        if not (math.isfinite(self.delta_c) and math.isfinite(self.delta_s)):
            raise DomainError("detunings must be finite")


RESONANT = DetuningPair(0.0, 0.0)


@dataclass(frozen=True)
class OccupationSolution:
    """Root of the steady-state equation and quantities derived from it."""

    chi: float
    g_eff: float
    residual: float
    xi: float
    eta: float
    multiple_roots: bool = False


def chi_residual(chi: float, u: float, det: DetuningPair,
                 params: HybridParams) -> float:
    """Steady-state residual G(chi); a sign change brackets the physical root.

    This is the steady-state occupation equation multiplied by (1 - chi)
    to clear the xi denominator, so it is finite on all of [0, 1/2].
    """
    if not 0.0 <= chi <= 0.5:
        raise DomainError("chi must lie in [0, 0.5]")
    return _residual_raw(chi, u, det.delta_c, det.delta_s,
                         params.kappa, params.gamma, params.g)


def _residual_raw(chi, u, delta_c, delta_s, kappa, gamma, g):
    # Works elementwise for numpy arrays of chi.
    s_sq = delta_c * delta_c + kappa * kappa
    w = 1.0 - 2.0 * chi
    eta = g * g * w / s_sq
    bracket = (delta_s - eta * delta_c) ** 2 + (gamma + eta * kappa) ** 2
    return bracket * chi * (1.0 - chi) - g * g * w * w * u * u / s_sq


def chi_residual_resonant(chi: float, u: float, params: HybridParams) -> float:
    """Residual of the resonant-drive relation (gamma + eta*kappa)^2 chi - xi eta u^2.

    Here eta = g^2 (1 - 2 chi)/kappa^2 = g_eff^2/kappa^2.  Kept as an
    independent form of the resonant special case: multiplying it by
    (1 - chi) reproduces :func:`chi_residual` at zero detuning.
    """
    if not 0.0 <= chi <= 0.5:
        raise DomainError("chi must lie in [0, 0.5]")
    eta = params.g ** 2 * (1.0 - 2.0 * chi) / params.kappa ** 2
    if chi == 0.5:
        # xi -> 0/(1/2); the xi*eta*u^2 term vanishes with eta anyway
        return (params.gamma + eta * params.kappa) ** 2 * chi
    xi = (1.0 - 2.0 * chi) / (1.0 - chi)
    return (params.gamma + eta * params.kappa) ** 2 * chi - xi * eta * u * u


def _solution_from_chi(chi, u, det, params, residual, multiple_roots):
    w = 1.0 - 2.0 * chi
    s_sq = det.delta_c ** 2 + params.kappa ** 2
    return OccupationSolution(
        chi=chi,
        g_eff=params.g * math.sqrt(max(w, 0.0)),
        residual=abs(residual),
        xi=w / (1.0 - chi),
        eta=params.g ** 2 * w / s_sq,
        multiple_roots=multiple_roots,
    )


def solve_chi(u: float, det: DetuningPair, params: HybridParams,
              tol: float = DEFAULT_TOL) -> OccupationSolution:
    """Solve G(chi) = 0 on [0, 1/2] by bisection of the first sign change.

    chi(0) = 0 is returned exactly for an undriven system.  A coarse
    SCAN_POINTS grid locates sign changes first; if more than one exists
    (possible multistability at strong detuned driving), the smallest root
    is returned, keeping the branch continuous from the undriven state,
    and ``multiple_roots`` is flagged.
    """
    if u < 0:
        raise DomainError("drive amplitude must be non-negative")
    if u == 0.0:
        return _solution_from_chi(0.0, 0.0, det, params, 0.0, False)

    kappa, gamma, g = params.kappa, params.gamma, params.g
    dc, ds = det.delta_c, det.delta_s
    if g == 0.0:
        # no coupling: the magnon mode is driven directly but G has no
        # u-dependence left; occupation stays at the undriven fixed point
        return _solution_from_chi(0.0, u, det, params, 0.0, False)

    grid = np.linspace(0.0, 0.5, SCAN_POINTS)
    values = _residual_raw(grid, u, dc, ds, kappa, gamma, g)
    signs = np.sign(values)
    flips = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    exact = np.nonzero(values == 0.0)[0]
    n_roots = len(flips) + len(exact)
    multiple = n_roots > 1

    if len(exact) and (not len(flips) or exact[0] <= flips[0]):
        chi = float(grid[exact[0]])
        return _solution_from_chi(chi, u, det, params, 0.0, multiple)

    if len(flips):
        lo, hi = float(grid[flips[0]]), float(grid[flips[0] + 1])
    else:
        lo, hi = 0.0, 0.5  # guaranteed bracket by the endpoint signs
    f_lo = _residual_raw(lo, u, dc, ds, kappa, gamma, g)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = _residual_raw(mid, u, dc, ds, kappa, gamma, g)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if (f_lo < 0) == (f_mid < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    chi = 0.5 * (lo + hi)
    res = _residual_raw(chi, u, dc, ds, kappa, gamma, g)
    return _solution_from_chi(chi, u, det, params, res, multiple)


def g_eff_from_chi(chi: float, g: float) -> float:
    """Effective coupling g*sqrt(1 - 2 chi); vanishes at full saturation chi = 1/2."""
    if not 0.0 <= chi <= 0.5:
        raise DomainError("chi must lie in [0, 0.5]")
    return g * math.sqrt(1.0 - 2.0 * chi)


def drive_for_occupation(chi: float, det: DetuningPair,
                         params: HybridParams) -> float:
    """Invert the steady-state relation: the u that sustains a given chi.

    Closed-form rearrangement of G(chi) = 0 for u^2; the complement of
    :func:`solve_chi` and the workhorse of EP localization.
    """
    if not 0.0 <= chi < 0.5:
        raise DomainError("chi must lie in [0, 0.5)")
    if chi == 0.0:
        return 0.0
    if params.g == 0.0:
        raise DomainError("no drive can populate an uncoupled ensemble (g = 0)")
    s_sq = det.delta_c ** 2 + params.kappa ** 2
    w = 1.0 - 2.0 * chi
    eta = params.g ** 2 * w / s_sq
    bracket = (det.delta_s - eta * det.delta_c) ** 2 \
        + (params.gamma + eta * params.kappa) ** 2
    u_sq = bracket * chi * (1.0 - chi) * s_sq / (params.g ** 2 * w * w)
    return math.sqrt(u_sq)


def ep_occupation(params: HybridParams) -> float:
    """Reduced occupation at which g_eff reaches the EP coupling (gamma - kappa)/2."""
    g_ep = ep_coupling(params)
    if params.g < g_ep:
        raise NoExceptionalPointError(
            "bare coupling too weak: the EP coupling exceeds g")
    return 0.5 * (1.0 - (g_ep / params.g) ** 2)


def ep_drive_amplitude(det: DetuningPair, params: HybridParams) -> float:
    """Reduced drive amplitude at which the driven ensemble reaches the EP.

    Computes chi_EP = (1 - ((gamma - kappa)/(2 g))^2)/2 and inverts the
    steady-state relation for u.  At g = (gamma - kappa)/2 exactly the EP
    sits at zero drive.
    """
    return drive_for_occupation(ep_occupation(params), det, params)


@dataclass(frozen=True)
class SaturationCurve:
    """Occupation solutions along an increasing drive axis.

    ``drives`` holds the x-axis values; ``unit`` records whether they are
    reduced amplitudes ("u", 2pi*MHz) or powers ("dbm").
    """

    drives: np.ndarray
    solutions: list[OccupationSolution]
    unit: str = "u"

    @property
    def chi(self) -> np.ndarray:
        return np.array([s.chi for s in self.solutions])

    @property
    def g_eff(self) -> np.ndarray:
        return np.array([s.g_eff for s in self.solutions])


def saturation_sweep(u_values, det: DetuningPair, params: HybridParams,
                     tol: float = DEFAULT_TOL) -> SaturationCurve:
    """Solve the occupation point-by-point along an ascending drive axis."""
    u_values = np.asarray(u_values, dtype=float)
    if np.any(np.diff(u_values) < 0):
        raise ConfigError("drive axis must be sorted ascending")
    sols = [solve_chi(float(u), det, params, tol=tol) for u in u_values]
    return SaturationCurve(drives=u_values, solutions=sols, unit="u")
