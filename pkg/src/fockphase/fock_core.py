"""Fixed-particle-number states of two bosonic modes and their operators.

A sector of total particle number ``n`` is spanned by the Fock kets
``|k, n - k>`` where ``k`` is the occupation of the up mode.  Amplitudes are
always stored in ascending ``k`` order; index ``k`` of every array in this
package means "k particles in the up mode".  In spin language the same ket is
the Dicke state with ``j = n / 2`` and ``m = k - n / 2``.

Spin operators follow the Schwinger mapping

    sigma_x = a_up^+ a_dn + a_dn^+ a_up
    sigma_y = -i (a_up^+ a_dn - a_dn^+ a_up)
    sigma_z = a_up^+ a_up - a_dn^+ a_dn

and are reported in units of hbar / 2.

A detection channel at analyzer angle ``theta`` is

    c_{theta, +-} = (a_up +- exp(i theta) a_dn) / sqrt(2)

and the phase state of ``n`` particles at angle ``phi`` is
``(c_phi^+)^n |vac> / sqrt(n!)`` with ``c_phi^+ = (a_up^+ + exp(-i phi) a_dn^+) / sqrt(2)``,
whose amplitude at ``k`` is ``sqrt(C(n, k) / 2^n) * exp(-i phi (n - k))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import BasisError, SectorMismatchError, VacuumError

UP = "up"
DOWN = "down"
MODES = (UP, DOWN)

STATE_TOL = 1e-10
DENSE_TOL = 1e-12


@dataclass(frozen=True)
class Basis:
    """Mode basis of a state: canonical up/down, or b+- rotated by ``chi``."""

    chi: Optional[float] = None

    @property
    def is_canonical(self) -> bool:
        return self.chi is None

    def __str__(self):
        return "canonical" if self.chi is None else f"rotated({self.chi!r})"


CANONICAL = Basis()


@dataclass(frozen=True)
class SectorState:
    """Amplitude vector over ``|k, total_n - k>``, k ascending.

    States returned by constructors and by collapse-type operations are
    normalized.  Raw operator images (``apply_annihilation``,
    ``apply_channel``) are returned unnormalized together with their squared
    norm.
    """

    total_n: int
    amplitudes: np.ndarray = field(repr=False)
    basis: Basis = CANONICAL

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if self.total_n < 0:
            raise ValueError("total_n must be nonnegative")
        if amps.shape != (self.total_n + 1,):
            raise ValueError(
                f"expected {self.total_n + 1} amplitudes, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, basis=CANONICAL, normalize=True):
        amps = np.asarray(amplitudes, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise ValueError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(len(amps) - 1, amps, basis)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_normalized(self, tol=STATE_TOL) -> bool:
        return abs(self.norm_squared - 1.0) <= tol

    def normalized(self) -> "SectorState":
        return SectorState.from_amplitudes(self.amplitudes, self.basis)

    def is_fock(self, tol=0.0) -> bool:
        """True when exactly one amplitude is nonzero (above ``tol``)."""
        return int(np.count_nonzero(np.abs(self.amplitudes) > tol)) == 1


@dataclass(frozen=True)
class SpinExpectation:
    sx: float
    sy: float
    sz: float

    @property
    def transverse_magnitude(self) -> float:
        return float(np.hypot(self.sx, self.sy))

    def as_dict(self):
        return {
            "sx": self.sx,
            "sy": self.sy,
            "sz": self.sz,
            "transverse_magnitude": self.transverse_magnitude,
        }


def _require_canonical(state):
    if not state.basis.is_canonical:
        raise BasisError(f"operation needs the canonical basis, got {state.basis}")


def _require_particles(state):
    if state.total_n < 1:
        raise VacuumError("operator applied to the vacuum sector")


def new_double_fock(n_up: int, n_down: int) -> SectorState:
    """The product state ``|n_up>|n_down>``."""
    if n_up < 0 or n_down < 0:
        raise ValueError("occupations must be nonnegative")
    if n_up + n_down < 1:
        raise ValueError("a double Fock state needs at least one particle")
    amps = np.zeros(n_up + n_down + 1, dtype=complex)
    amps[n_up] = 1.0
    return SectorState(n_up + n_down, amps)


def fock_state(n: int, k: int) -> SectorState:
    """Basis ket ``|k, n - k>``; unlike ``new_double_fock`` it allows n = 0."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    amps = np.zeros(n + 1, dtype=complex)
    amps[k] = 1.0
    return SectorState(n, amps)


def log_binomial(n, k):
    k = np.asarray(k)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def binomial_amplitudes(n: int) -> np.ndarray:
    """``sqrt(C(n, k) / 2^n)`` for k = 0..n, evaluated in log space.

    The result is renormalized: log-gamma rounding alone leaves a norm error
    near 1e-10 by n = 1e5.
    """
    k = np.arange(n + 1)
    amps = np.exp(0.5 * (log_binomial(n, k) - n * np.log(2.0)))
    return amps / np.linalg.norm(amps)


def phase_state(n: int, phi: float) -> SectorState:
    if n < 1:
        raise ValueError("phase state needs n >= 1")
    k = np.arange(n + 1)
    amps = binomial_amplitudes(n) * np.exp(-1j * phi * (n - k))
    return SectorState(n, amps)


def _annihilate(amps: np.ndarray, mode: str) -> np.ndarray:
    n = len(amps) - 1
    if mode == UP:
        return np.sqrt(np.arange(1, n + 1)) * amps[1:]
    if mode == DOWN:
        return np.sqrt(n - np.arange(n)) * amps[:-1]
    raise ValueError(f"unknown mode {mode!r}")


def _create(amps: np.ndarray, mode: str) -> np.ndarray:
    n = len(amps)  # target sector
    out = np.zeros(n + 1, dtype=complex)
    if mode == UP:
        out[1:] = np.sqrt(np.arange(1, n + 1)) * amps
    elif mode == DOWN:
        out[:-1] = np.sqrt(n - np.arange(n)) * amps
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return out


def apply_annihilation(state: SectorState, mode: str):
    """Image of ``a_up`` or ``a_dn``: ``(unnormalized state, squared norm)``."""
    _require_particles(state)
    _require_canonical(state)
    out = _annihilate(state.amplitudes, mode)
    return SectorState(state.total_n - 1, out), float(np.vdot(out, out).real)


def apply_creation(state: SectorState, mode: str) -> SectorState:
    """Image of ``a_up^+`` or ``a_dn^+``, unnormalized."""
    _require_canonical(state)
    return SectorState(state.total_n + 1, _create(state.amplitudes, mode))


def channel_sign(sign) -> int:
    if sign in (1, "+"):
        return 1
    if sign in (-1, "-"):
        return -1
    raise ValueError(f"channel sign must be +1/-1 or '+'/'-', got {sign!r}")


def apply_channel(state: SectorState, angle: float, sign):
    """Image of ``c_{angle, sign}``: ``(unnormalized state, squared norm)``."""
    _require_particles(state)
    _require_canonical(state)
    s = channel_sign(sign)
    amps = state.amplitudes
    out = (_annihilate(amps, UP) + s * np.exp(1j * angle) * _annihilate(amps, DOWN))
    out = out / np.sqrt(2.0)
    return SectorState(state.total_n - 1, out), float(np.vdot(out, out).real)


def apply_channel_dagger(state: SectorState, angle: float, sign) -> SectorState:
    """Image of ``c_{angle, sign}^+``, unnormalized."""
    _require_canonical(state)
    s = channel_sign(sign)
    amps = state.amplitudes
    out = _create(amps, UP) + s * np.exp(-1j * angle) * _create(amps, DOWN)
    return SectorState(state.total_n + 1, out / np.sqrt(2.0))


def _raise_up(amps: np.ndarray) -> np.ndarray:
    """``a_up^+ a_dn`` within the sector: moves weight from k to k + 1."""
    n = len(amps) - 1
    k = np.arange(n)
    out = np.zeros_like(amps)
    out[1:] = np.sqrt((k + 1) * (n - k)) * amps[:-1]
    return out


def _lower_up(amps: np.ndarray) -> np.ndarray:
    """``a_dn^+ a_up`` within the sector: moves weight from k to k - 1."""
    n = len(amps) - 1
    k = np.arange(1, n + 1)
    out = np.zeros_like(amps)
    out[:-1] = np.sqrt(k * (n - k + 1)) * amps[1:]
    return out


def apply_sigma(state: SectorState, axis: str) -> np.ndarray:
    """Action of sigma_x, sigma_y or sigma_z on the amplitude vector."""
    _require_canonical(state)
    amps = state.amplitudes
    if axis == "x":
        return _raise_up(amps) + _lower_up(amps)
    if axis == "y":
        return -1j * (_raise_up(amps) - _lower_up(amps))
    if axis == "z":
        return (2 * np.arange(state.total_n + 1) - state.total_n) * amps
    raise ValueError(f"unknown axis {axis!r}")


def expect_spin(state: SectorState) -> SpinExpectation:
    amps = state.amplitudes
    values = [float(np.vdot(amps, apply_sigma(state, ax)).real) for ax in "xyz"]
    return SpinExpectation(*values)


def inner(a: SectorState, b: SectorState) -> complex:
    """``<a|b>``."""
    if a.total_n != b.total_n or a.basis != b.basis:
        raise SectorMismatchError(
            f"sector ({a.total_n}, {a.basis}) vs ({b.total_n}, {b.basis})"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: SectorState, b: SectorState) -> float:
    return abs(inner(a, b)) ** 2


# Dense matrices.  These are the brute-force oracle for the vector actions
# above and are only meant for small sectors.


def dense_annihilation(n: int, mode: str) -> np.ndarray:
    """Matrix of a_up or a_dn from sector n to sector n - 1, shape (n, n + 1)."""
    if n < 1:
        raise VacuumError("no annihilation matrix out of the vacuum sector")
    mat = np.zeros((n, n + 1))
    for k in range(n + 1):
        if mode == UP and k >= 1:
            mat[k - 1, k] = np.sqrt(k)
        elif mode == DOWN and k <= n - 1:
            mat[k, k] = np.sqrt(n - k)
        elif mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
    return mat


def dense_creation(n: int, mode: str) -> np.ndarray:
    """Matrix of a_up^+ or a_dn^+ from sector n - 1 to sector n."""
    return dense_annihilation(n, mode).T


def dense_bilinear(n: int, left: str, right: str) -> np.ndarray:
    """``a_left^+ a_right`` on sector n; the zero matrix for n = 0."""
    if n == 0:
        return np.zeros((1, 1))
    return dense_creation(n, left) @ dense_annihilation(n, right)


def dense_number(n: int) -> np.ndarray:
    return dense_bilinear(n, UP, UP) + dense_bilinear(n, DOWN, DOWN)


def dense_sigma(n: int, axis: str) -> np.ndarray:
    ud = dense_bilinear(n, UP, DOWN)
    du = dense_bilinear(n, DOWN, UP)
    if axis == "x":
        return (ud + du).astype(complex)
    if axis == "y":
        return -1j * (ud - du)
    if axis == "z":
        return (dense_bilinear(n, UP, UP) - dense_bilinear(n, DOWN, DOWN)).astype(complex)
    raise ValueError(f"unknown axis {axis!r}")


def dense_channel(n: int, angle: float, sign) -> np.ndarray:
    s = channel_sign(sign)
    return (
        dense_annihilation(n, UP) + s * np.exp(1j * angle) * dense_annihilation(n, DOWN)
    ) / np.sqrt(2.0)


def verify_smur_identity(n_max: int, corollary: bool = False) -> float:
    """Max entrywise deviation of ``(n +- sigma_x) / 2`` from ``c+-^+ c+-``.

    Checked on every sector 1..n_max with dense matrices.  With
    ``corollary=True`` the deviation of ``c+^+ c+ + c-^+ c-`` from the number
    operator is returned instead.
    """
    if not 1 <= n_max <= 50:
        raise ValueError("n_max must lie in 1..50")
    worst = 0.0
    for n in range(1, n_max + 1):
        number = dense_number(n)
        sx = dense_sigma(n, "x")
        products = {}
        up, down = dense_annihilation(n, UP), dense_annihilation(n, DOWN)
        for s in (1, -1):
            # sqrt(2) c_s, squared and halved afterwards so n = 1 stays exact
            scaled = up + s * down
            products[s] = 0.5 * (scaled.T @ scaled)
            if not corollary:
                lhs = 0.5 * (number + s * sx)
                worst = max(worst, float(np.max(np.abs(lhs - products[s]))))
        if corollary:
            worst = max(worst, float(np.max(np.abs(products[1] + products[-1] - number))))
    return worst
