import numpy as np
import pytest

import magpol as mp


@pytest.fixture
def params():
    """Reference sample rates: kappa 0.6, gamma 11.9, g 17.2, cavity at 3093."""
    return mp.reference_params()


def expm_series(m: np.ndarray, order: int = 20) -> np.ndarray:
    """Scaled-and-squared truncated power series for exp(m); test oracle only."""
    m = np.asarray(m, dtype=complex)
    norm = float(np.abs(m).sum(axis=1).max())
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    a = m / (2 ** s)
    term = np.eye(m.shape[0], dtype=complex)
    out = np.eye(m.shape[0], dtype=complex)
    for n in range(1, order + 1):
        term = term @ a / n
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def propagator_oracle(h: mp.TwoModeHamiltonian, t: float) -> np.ndarray:
    """exp(-i*2pi*t*H) through the series oracle."""
    return expm_series(-1j * 2.0 * np.pi * t * h.matrix())
