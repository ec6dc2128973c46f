"""Free evolution under H proportional to S_z and the conservation checks it supports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analysis
from . import fock_core as fc
from .errors import BasisError


@dataclass(frozen=True)
class EvolutionSpec:
    """Accumulated Larmor angle ``tau = omega t`` for H = omega S_z."""

    rotation_angle: float

    def __post_init__(self):
        if not np.isfinite(self.rotation_angle):
            raise ValueError("rotation_angle must be finite")

    def apply(self, state):
        return evolve_sz(state, self.rotation_angle)


def evolve_sz(state: fc.SectorState, tau: float) -> fc.SectorState:
    """Apply exp(-i tau S_z): amplitude k picks up exp(-i m tau), m = k - n/2.

    A phase state at phi is carried to the phase state at phi - tau.
    """
    if not state.basis.is_canonical:
        raise BasisError("evolve_sz needs the canonical basis")
    n = state.total_n
    m = np.arange(n + 1) - n / 2.0
    return fc.SectorState(n, state.amplitudes * np.exp(-1j * m * tau))


def sz_distribution(state: fc.SectorState) -> np.ndarray:
    """Outcome probabilities of sigma_z; entry k belongs to eigenvalue 2k - n."""
    return np.abs(state.amplitudes) ** 2


def sz_moment(state: fc.SectorState, order: int) -> float:
    n = state.total_n
    values = (2 * np.arange(n + 1) - n).astype(float)
    return float(np.dot(values**order, sz_distribution(state)))


def random_state(n: int, rng: np.random.Generator) -> fc.SectorState:
    amps = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return fc.SectorState.from_amplitudes(amps)


def conserved_probability_check(n: int, tau: float, samples: int = 20, seed: int = 0) -> float:
    """Worst violation of sigma_z conservation under evolve_sz.

    Two deviations are combined: how far sum_j |<j|U|k>|^2 strays from
    delta_jk over every sigma_z eigenstate k, and how much the sigma_z
    distribution of ``samples`` random states moves under the evolution.
    """
    if not 1 <= n <= 200:
        raise ValueError("n must lie in 1..200")
    worst = 0.0
    for k in range(n + 1):
        evolved = evolve_sz(fc.fock_state(n, k), tau)
        delta = np.zeros(n + 1)
        delta[k] = 1.0
        worst = max(worst, float(np.max(np.abs(sz_distribution(evolved) - delta))))
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        state = random_state(n, rng)
        before = sz_distribution(state)
        after = sz_distribution(evolve_sz(state, tau))
        worst = max(worst, float(np.max(np.abs(after - before))))
    return worst


def noncommuting_shift(state: fc.SectorState, tau: float, chi: float = 0.0) -> float:
    """Total variation between sigma-type count laws at ``chi`` before and after evolution.

    The transverse spin does not commute with S_z, so this is generally
    nonzero; it is the counterpart of ``conserved_probability_check``.
    """
    before = analysis.bob_count_distribution(state, chi).probabilities
    after = analysis.bob_count_distribution(evolve_sz(state, tau), chi).probabilities
    return analysis.total_variation(before, after)
