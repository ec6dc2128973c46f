"""Coherence diagnostics: phase estimation, phase-manifold fidelity, mode
rotation, collective count statistics and ensemble uniformity."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, logm

from . import fock_core as fc
from .errors import BasisError, PhaseUndefinedError

TWO_PI = 2.0 * np.pi
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0
PHASE_DEFINED_MIN = 1e-6
# 0.999 quantile of the chi-square law with 15 degrees of freedom
# (Abramowitz & Stegun, Table 26.8; scipy.stats.chi2.ppf(0.999, 15) = 37.697).
CHI2_999_15DOF = 37.7


@dataclass(frozen=True)
class CountDistribution:
    """Probability of finding m of the n particles in the + channel at ``angle``."""

    angle: float
    probabilities: np.ndarray

    @property
    def total_n(self) -> int:
        return len(self.probabilities) - 1

    @property
    def spin_values(self) -> np.ndarray:
        """Collective spin of outcome m along the analyzer, units of hbar / 2."""
        m = np.arange(self.total_n + 1)
        return 2 * m - self.total_n

    def mean(self) -> float:
        return float(np.dot(np.arange(self.total_n + 1), self.probabilities))

    def mass_at_least(self, m_min: float) -> float:
        m = np.arange(self.total_n + 1)
        return float(self.probabilities[m >= m_min].sum())


@dataclass(frozen=True)
class PhaseStats:
    phases: np.ndarray
    bin_counts: np.ndarray
    chi_square: float
    bins: int

    def as_dict(self):
        return {
            "bins": self.bins,
            "samples": int(len(self.phases)),
            "bin_counts": [int(c) for c in self.bin_counts],
            "chi_square": float(self.chi_square),
            "chi_square_limit": CHI2_999_15DOF if self.bins == 16 else None,
        }


def wrap_phase(phi):
    """Reduce to [0, 2 pi)."""
    out = np.mod(phi, TWO_PI)
    # np.mod can round up to exactly 2 pi for tiny negative inputs
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def estimate_phase(state: fc.SectorState) -> float:
    """Transverse direction of the collective spin, in [0, 2 pi).

    With the phase-state convention of ``fock_core`` the spin of
    ``phase_state(n, phi)`` points at ``(cos phi, -sin phi)``, so the estimate
    is ``atan2(-<sigma_y>, <sigma_x>)``.
    """
    spin = fc.expect_spin(state)
    if spin.transverse_magnitude <= PHASE_DEFINED_MIN:
        raise PhaseUndefinedError(
            f"transverse spin {spin.transverse_magnitude:.3g} is too small for a phase"
        )
    return wrap_phase(np.arctan2(-spin.sy, spin.sx))


def _phase_overlaps(state: fc.SectorState, phis) -> np.ndarray:
    n = state.total_n
    weighted = fc.binomial_amplitudes(n) * state.amplitudes
    powers = n - np.arange(n + 1)
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    return np.abs(np.exp(1j * np.outer(phis, powers)) @ weighted) ** 2


def _golden_max(f, lo, hi, tol):
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc_, fd = f(c), f(d)
    while hi - lo > tol:
        if fc_ >= fd:
            hi, d, fd = d, c, fc_
            c = hi - GOLDEN * (hi - lo)
            fc_ = f(c)
        else:
            lo, c, fc_ = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def phase_manifold_fidelity(state: fc.SectorState, tol: float = 1e-10):
    """Best overlap with a phase state of the same particle number.

    Returns ``(best_phi, fidelity)``.  The search is seeded by
    ``estimate_phase`` when the phase is defined and by a 256-point scan
    otherwise, then refined by golden-section search on a +-0.5 rad bracket.
    """
    if state.total_n < 1:
        raise ValueError("phase manifold needs total_n >= 1")
    if not state.basis.is_canonical:
        raise BasisError("phase manifold fidelity needs the canonical basis")
    grid = np.linspace(0.0, TWO_PI, 256, endpoint=False)
    scan = _phase_overlaps(state, grid)
    try:
        seed = estimate_phase(state)
    except PhaseUndefinedError:
        seed = float(grid[int(np.argmax(scan))])
    else:
        # keep the scan as a guard against a misleading spin direction
        if _phase_overlaps(state, seed)[0] < scan.max():
            seed = float(grid[int(np.argmax(scan))])

    def f(phi):
        return float(_phase_overlaps(state, phi)[0])

    best, value = _golden_max(f, seed - 0.5, seed + 0.5, tol)
    return wrap_phase(best), min(value, 1.0)


# Mode rotation to b+- = (a_up +- exp(i chi) a_dn) / sqrt(2).

_RESCALE = 1e150


@lru_cache(maxsize=16)
def _rotation_kernel(n: int) -> np.ndarray:
    """Real orthogonal matrix R with ``R[m, k] = <m, n-m|_b |k, n-k>_a`` at chi = 0.

    Row m is the eigenvector of sigma_x with eigenvalue 2m - n expanded in the
    canonical basis.  Each row obeys the three-term recurrence of the
    tridiagonal sigma_x matrix; it is run forward from k = 0 and backward from
    k = n (the dominant direction on either side) and the two halves meet at
    k = n // 2.  Both endpoints are known in closed form,
    ``R[m, 0] = (-1)^(n-m) sqrt(C(n, m) / 2^n)`` and ``R[m, n] = sqrt(C(n, m) / 2^n)``,
    and a per-row log scale keeps them representable for large n.
    """
    out = np.zeros((n + 1, n + 1))
    m = np.arange(n + 1)
    lam = (2 * m - n).astype(float)
    log_end = 0.5 * (fc.log_binomial(n, m) - n * np.log(2.0))
    if n == 0:
        out[0, 0] = 1.0
        return out
    half = n // 2
    k_all = np.arange(n + 1)
    up_coupling = np.sqrt((k_all[:-1] + 1.0) * (n - k_all[:-1]))  # between k and k + 1

    def run(start_sign, ks, step):
        log_scale = log_end.copy()
        prev = np.zeros(n + 1)
        cur = start_sign.astype(float)
        out[:, ks[0]] = cur * np.exp(log_scale)
        for k in ks[1:]:
            here = k - step  # index whose row equation produces column k
            if step > 0:
                back = up_coupling[here - 1] if here >= 1 else 0.0
                nxt = (lam * cur - back * prev) / up_coupling[here]
            else:
                fwd = up_coupling[here] if here <= n - 1 else 0.0
                nxt = (lam * cur - fwd * prev) / up_coupling[here - 1]
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE
            if big.any():
                scale = np.where(big, np.abs(cur), 1.0)
                cur = cur / scale
                prev = prev / scale
                log_scale = log_scale + np.log(scale)
            out[:, k] = cur * np.exp(log_scale)

    run(np.where((n - m) % 2 == 0, 1.0, -1.0), list(range(0, half + 1)), +1)
    if half + 1 <= n:
        run(np.ones(n + 1), list(range(n, half, -1)), -1)
    out.setflags(write=False)
    return out


def rotation_matrix(n: int, chi: float) -> np.ndarray:
    """Unitary taking canonical amplitudes of sector n to b+- amplitudes."""
    k = np.arange(n + 1)
    return _rotation_kernel(n) * np.exp(1j * chi * (n - k))[None, :]


def rotate_modes(state: fc.SectorState, chi: float) -> fc.SectorState:
    """Re-express a canonical state in the occupations of (b+, b-) at ``chi``.

    Index m of the result is the number of particles in b+.
    """
    if not state.basis.is_canonical:
        raise BasisError("rotate_modes expects a canonical state")
    n = state.total_n
    k = np.arange(n + 1)
    amps = _rotation_kernel(n) @ (state.amplitudes * np.exp(1j * chi * (n - k)))
    return fc.SectorState(n, amps, fc.Basis(float(chi)))


def unrotate_modes(state: fc.SectorState) -> fc.SectorState:
    """Inverse of ``rotate_modes``: back to the canonical up/down basis."""
    if state.basis.is_canonical:
        raise BasisError("state is already canonical")
    n = state.total_n
    k = np.arange(n + 1)
    amps = (_rotation_kernel(n).T @ state.amplitudes) * np.exp(-1j * state.basis.chi * (n - k))
    return fc.SectorState(n, amps)


# Hard-coded Pauli matrices in the single-particle (down, up) = (k=0, k=1)
# ordering.  Kept independent of fock_core so the oracle below does not
# inherit its sign conventions.
_PAULI_KORDER = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, 1j], [-1j, 0]], dtype=complex),
    "z": np.array([[-1, 0], [0, 1]], dtype=complex),
}


def rotation_oracle(n: int, chi: float) -> np.ndarray:
    """Dense reference for ``rotation_matrix`` by matrix exponentiation.

    The single-particle mode change is written as exp(h), h is split into
    identity and Pauli parts, and the same combination of number and sigma
    operators is exponentiated on sector n.  Intended for n <= 30.
    """
    single = np.array(
        [
            [-np.exp(1j * chi), 1.0],
            [np.exp(1j * chi), 1.0],
        ]
    ) / np.sqrt(2.0)
    gen = logm(single)
    c0 = np.trace(gen) / 2.0
    generator = c0 * fc.dense_number(n).astype(complex)
    for axis, pauli in _PAULI_KORDER.items():
        coeff = np.trace(pauli @ gen) / 2.0
        generator = generator + coeff * fc.dense_sigma(n, axis)
    return expm(generator)


def bob_count_distribution(state: fc.SectorState, chi: float) -> CountDistribution:
    """Outcome law of counting particles in the b+ channel at analyzer ``chi``."""
    rotated = rotate_modes(state, chi)
    probs = np.abs(rotated.amplitudes) ** 2
    return CountDistribution(float(chi), probs)


def total_variation(p, q) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def uniformity_test(phases, bins: int = 16) -> PhaseStats:
    """Chi-square statistic of equal-width binning over [0, 2 pi)."""
    phases = wrap_phase(np.asarray(phases, dtype=float))
    phases = np.atleast_1d(phases)
    if bins < 1:
        raise ValueError("bins must be positive")
    if len(phases) < 10 * bins:
        raise ValueError(f"need at least {10 * bins} phases for {bins} bins, got {len(phases)}")
    idx = np.minimum((phases / TWO_PI * bins).astype(int), bins - 1)
    counts = np.bincount(idx, minlength=bins)
    expected = len(phases) / bins
    chi_square = float(((counts - expected) ** 2 / expected).sum())
    return PhaseStats(phases, counts, chi_square, bins)
