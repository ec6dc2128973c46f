"""Sequential single-particle detection on a double Fock state.

Randomness
----------
Every trajectory draws from its own ``numpy.random.Generator(PCG64(seed))``.
With ``analyzer = "fixed"`` each detection consumes one ``random()`` double
for the outcome.  With ``analyzer = "uniform"`` a detection first draws its
analyzer angle as ``2 pi * random()`` and then its outcome double, modelling
detections at random positions of the interference pattern.  An
indistinguishable detection reports ``+`` when the draw falls in
``[0, p_plus)``; a which-path detection reports ``+`` when the draw is below
1/2.  Ensemble member ``i`` uses ``seed = mix_seed(master_seed, i)``, the
SplitMix64 output function applied to ``master_seed + (i + 1) * 0x9E3779B97F4A7C15``
(mod 2^64).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import analysis
from . import fock_core as fc
from .errors import ConfigError, EmptyModeError, ImpossibleBranchError, PhaseUndefinedError

INDISTINGUISHABLE = "indistinguishable"
WHICH_PATH_UP = "which_path(up)"
WHICH_PATH_DOWN = "which_path(down)"
SCHEDULE_MODES = (INDISTINGUISHABLE, WHICH_PATH_UP, WHICH_PATH_DOWN)
ANALYZER_FIXED = "fixed"
ANALYZER_UNIFORM = "uniform"
ANALYZER_MODES = (ANALYZER_FIXED, ANALYZER_UNIFORM)
_SOURCE = {WHICH_PATH_UP: fc.UP, WHICH_PATH_DOWN: fc.DOWN}

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
COMPLETENESS_TOL = 1e-9


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Per-trajectory seed; depends only on (master_seed, index)."""
    return splitmix64(master_seed + (index + 1) * GOLDEN_GAMMA)


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= seed <= MASK64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class DetectionRecord:
    step: int
    angle: float
    outcome: int
    probability: float
    mode: str = INDISTINGUISHABLE

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class ExperimentConfig:
    n_up: int
    n_down: int
    detections: int
    angle: float = 0.0
    schedule: Optional[Tuple[str, ...]] = None
    master_seed: Optional[int] = None
    trajectories: int = 1
    analyzer: str = ANALYZER_FIXED

    def __post_init__(self):
        if self.schedule is None:
            object.__setattr__(self, "schedule", (INDISTINGUISHABLE,) * max(self.detections, 0))
        else:
            object.__setattr__(self, "schedule", tuple(self.schedule))
        self.validate()

    @property
    def total(self) -> int:
        return self.n_up + self.n_down

    def validate(self):
        for key in ("n_up", "n_down", "detections", "trajectories"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(key, f"must be an integer, got {value!r}")
        if self.n_up < 0:
            raise ConfigError("n_up", "must be nonnegative")
        if self.n_down < 0:
            raise ConfigError("n_down", "must be nonnegative")
        if self.total < 1:
            raise ConfigError("n_up", "n_up + n_down must be at least 1")
        if self.detections < 0:
            raise ConfigError("detections", "must be nonnegative")
        if self.detections >= self.total:
            raise ConfigError(
                "detections", f"{self.detections} must be smaller than n_up + n_down = {self.total}"
            )
        if not math.isfinite(self.angle):
            raise ConfigError("angle", "must be a finite number")
        if len(self.schedule) != self.detections:
            raise ConfigError(
                "schedule", f"has {len(self.schedule)} entries, expected {self.detections}"
            )
        for entry in self.schedule:
            if entry not in SCHEDULE_MODES:
                raise ConfigError("schedule", f"unknown entry {entry!r}")
        if self.schedule.count(WHICH_PATH_UP) > self.n_up:
            raise ConfigError("schedule", "more which_path(up) steps than up particles")
        if self.schedule.count(WHICH_PATH_DOWN) > self.n_down:
            raise ConfigError("schedule", "more which_path(down) steps than down particles")
        if self.master_seed is not None and not 0 <= self.master_seed <= MASK64:
            raise ConfigError("master_seed", "must be an unsigned 64-bit integer")
        if self.trajectories < 1:
            raise ConfigError("trajectories", "must be at least 1")
        if self.analyzer not in ANALYZER_MODES:
            raise ConfigError("analyzer", f"must be one of {', '.join(ANALYZER_MODES)}")

    def as_dict(self):
        return {
            "n_up": self.n_up,
            "n_down": self.n_down,
            "detections": self.detections,
            "angle": self.angle,
            "schedule": list(self.schedule),
            "master_seed": self.master_seed,
            "trajectories": self.trajectories,
            "analyzer": self.analyzer,
        }


@dataclass(frozen=True)
class Summary:
    estimated_phase: float  # nan when the final state has no transverse spin
    phase_fidelity: float
    best_phase: float
    spin: fc.SpinExpectation

    @classmethod
    def of(cls, state: fc.SectorState) -> "Summary":
        try:
            phase = analysis.estimate_phase(state)
        except PhaseUndefinedError:
            phase = math.nan
        best, fid = analysis.phase_manifold_fidelity(state)
        return cls(phase, fid, best, fc.expect_spin(state))

    def as_dict(self):
        return {
            "estimated_phase": None if math.isnan(self.estimated_phase) else self.estimated_phase,
            "phase_fidelity": self.phase_fidelity,
            "best_phase": self.best_phase,
            **self.spin.as_dict(),
        }


@dataclass(frozen=True)
class Trajectory:
    config: ExperimentConfig
    seed: int
    records: Tuple[DetectionRecord, ...]
    final_state: fc.SectorState = field(repr=False)
    summary: Summary


def _channel_pair(state, angle):
    """Both channel images and the + probability ``w+ / (w+ + w-)``.

    The denominator equals n up to rounding; dividing by the computed sum
    keeps p+ + p- = 1 and makes symmetric inputs give exactly 1/2.
    """
    plus, w_plus = fc.apply_channel(state, angle, +1)
    minus, w_minus = fc.apply_channel(state, angle, -1)
    total = w_plus + w_minus
    if abs(total - state.total_n) > COMPLETENESS_TOL * state.total_n:
        raise RuntimeError("channel weights do not add up to the particle number")
    return (plus, w_plus), (minus, w_minus), w_plus / total


def detection_probabilities(state: fc.SectorState, angle: float) -> Tuple[float, float]:
    """``(p_plus, p_minus)`` for detecting one particle at analyzer ``angle``."""
    _, _, p_plus = _channel_pair(state, angle)
    return p_plus, 1.0 - p_plus


def _normalized(image, weight):
    return fc.SectorState(image.total_n, image.amplitudes / math.sqrt(weight))


def collapse(state: fc.SectorState, angle: float, outcome) -> Tuple[fc.SectorState, float]:
    """Normalized post-detection state for ``outcome`` and that outcome's probability."""
    plus, minus, p_plus = _channel_pair(state, angle)
    if fc.channel_sign(outcome) == 1:
        (image, weight), prob = plus, p_plus
    else:
        (image, weight), prob = minus, 1.0 - p_plus
    if weight <= 0.0:
        raise ImpossibleBranchError(f"outcome {outcome!r} has zero probability")
    return _normalized(image, weight), prob


def which_path_detect(state: fc.SectorState, source: str, rng_draw: float):
    """Detect a particle from a known condensate.

    The outcome sign is + for ``rng_draw < 1/2``; the post-state is the
    normalized image of the source annihilation operator, whatever the sign.
    """
    if not 0.0 <= rng_draw < 1.0:
        raise ValueError("rng_draw must lie in [0, 1)")
    image, weight = fc.apply_annihilation(state, source)
    if weight <= 0.0:
        raise EmptyModeError(f"the {source} mode is empty")
    return _normalized(image, weight), (1 if rng_draw < 0.5 else -1)


def forced_sequence(state: fc.SectorState, angle: float, outcomes: Sequence):
    """Replay a fixed outcome string; returns the final state and each step's probability."""
    probabilities = []
    for outcome in outcomes:
        state, p = collapse(state, angle, fc.channel_sign(outcome))
        probabilities.append(p)
    return state, probabilities


def cascade(n: int, k_max: int, angle: float = 0.0) -> List[float]:
    """Probability of + after k = 0..k_max consecutive + results from ``|n/2, n - n/2>``."""
    state = fc.new_double_fock(n // 2, n - n // 2)
    probs = []
    for _ in range(k_max + 1):
        p_plus, _ = detection_probabilities(state, angle)
        probs.append(p_plus)
        if len(probs) <= k_max:
            state, _ = collapse(state, angle, +1)
    return probs


def run_trajectory(config: ExperimentConfig, seed: int) -> Trajectory:
    rng = make_rng(seed)
    state = fc.new_double_fock(config.n_up, config.n_down)
    records = []
    uniform = config.analyzer == ANALYZER_UNIFORM
    for step, mode in enumerate(config.schedule, start=1):
        angle = 2.0 * math.pi * rng.random() if uniform else config.angle
        draw = rng.random()
        if mode == INDISTINGUISHABLE:
            plus, minus, p_plus = _channel_pair(state, angle)
            if draw < p_plus:
                outcome, (image, weight), prob = 1, plus, p_plus
            else:
                outcome, (image, weight), prob = -1, minus, 1.0 - p_plus
            state = _normalized(image, weight)
        else:
            state, outcome = which_path_detect(state, _SOURCE[mode], draw)
            prob = 0.5
        records.append(DetectionRecord(step, angle, outcome, prob, mode))
    return Trajectory(config, seed, tuple(records), state, Summary.of(state))


def _run_indexed(args):
    config, index = args
    return run_trajectory(config, mix_seed(config.master_seed, index))


def run_ensemble(config: ExperimentConfig, workers: Optional[int] = None) -> List[Trajectory]:
    """All ``config.trajectories`` members, ordered by index.

    ``workers > 1`` spreads members over processes; results are identical to
    the serial run because each member depends only on its own seed.
    """
    if config.master_seed is None:
        raise ConfigError("master_seed", "an ensemble needs a master seed")
    jobs = [(config, i) for i in range(config.trajectories)]
    if workers is None or workers <= 1:
        return [_run_indexed(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_indexed, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
