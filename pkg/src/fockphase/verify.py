"""Self-check suite behind ``fockphase verify``.

Each check returns ``(ok, detail)``.  Operator actions are compared against
dense matrices built entry by entry, which keeps the reference independent of
the vectorised code paths.
"""

from __future__ import annotations

import math
from typing import Callable, List, NamedTuple

import numpy as np

from . import analysis as an
from . import dynamics as dyn
from . import fock_core as fc
from . import measurement as ms


class Check(NamedTuple):
    name: str
    run: Callable[[str], tuple]


def _random_states(n, count, rng):
    return [dyn.random_state(n, rng) for _ in range(count)]


def dense_forced_probabilities(n_up, n_down, angle, outcomes):
    """Branch probabilities of a forced outcome string, by dense matrices."""
    n = n_up + n_down
    vec = np.zeros(n + 1, dtype=complex)
    vec[n_up] = 1.0
    probs = []
    for outcome in outcomes:
        mat = fc.dense_channel(len(vec) - 1, angle, outcome)
        image = mat @ vec
        weight = float(np.vdot(image, image).real)
        probs.append(weight / (len(vec) - 1))
        vec = image / math.sqrt(weight)
    return probs


def check_smur(level):
    n_max = 12 if level == "quick" else 20
    dev = max(fc.verify_smur_identity(n_max), fc.verify_smur_identity(n_max, corollary=True))
    return dev <= 1e-12, f"max deviation {dev:.2e} on sectors <= {n_max}"


def check_dense_actions(level):
    n_max = 12 if level == "quick" else 30
    rng = np.random.default_rng(1)
    worst = 0.0
    for n in range(1, n_max + 1):
        for state in _random_states(n, 3, rng):
            v = state.amplitudes
            for mode in fc.MODES:
                image, _ = fc.apply_annihilation(state, mode)
                worst = max(worst, np.abs(image.amplitudes - fc.dense_annihilation(n, mode) @ v).max())
            for theta in (0.0, 0.9, np.pi / 2):
                for s in (1, -1):
                    image, _ = fc.apply_channel(state, theta, s)
                    ref = fc.dense_channel(n, theta, s) @ v
                    worst = max(worst, np.abs(image.amplitudes - ref).max())
            for axis in "xyz":
                ref = fc.dense_sigma(n, axis) @ v
                worst = max(worst, np.abs(fc.apply_sigma(state, axis) - ref).max())
    return worst <= 1e-12, f"max deviation {worst:.2e} on sectors <= {n_max}"


def check_phase_roundtrip(level):
    ns = range(1, 61) if level == "quick" else range(1, 501)
    worst = 0.0
    for n in ns:
        for phi in (0.3, 1.7, 3.9, 5.5):
            est = an.estimate_phase(fc.phase_state(n, phi))
            worst = max(worst, abs(math.remainder(est - phi, 2 * math.pi)))
    return worst <= 1e-9, f"max phase error {worst:.2e}"


def check_eigenrelation(level):
    n_max = 100 if level == "quick" else 500
    worst = 0.0
    for n in range(1, n_max + 1, 1 if level == "full" else 3):
        for phi in np.linspace(0, 2 * np.pi, 8, endpoint=False):
            state = fc.phase_state(n, phi)
            image, _ = fc.apply_channel(state, phi, +1)
            back = fc.apply_channel_dagger(image, phi, +1)
            rel = np.linalg.norm(back.amplitudes - n * state.amplitudes) / n
            worst = max(worst, rel)
    return worst <= 1e-10, f"max relative residual {worst:.2e}"


def check_completeness(level):
    rng = np.random.default_rng(2)
    worst = 0.0
    for n in (1, 2, 5, 17, 64) + ((200,) if level == "full" else ()):
        for state in _random_states(n, 5, rng):
            for theta in rng.uniform(0, 2 * np.pi, 4):
                p, q = ms.detection_probabilities(state, theta)
                worst = max(worst, abs(p + q - 1.0))
    return worst <= 1e-9, f"max |p+ + p- - 1| {worst:.2e}"


def check_conservation(level):
    ns = (1, 2, 12) if level == "quick" else (1, 2, 12, 50, 200)
    dev = max(dyn.conserved_probability_check(n, tau) for n in ns for tau in (0.4, 1.7))
    shift = dyn.noncommuting_shift(fc.phase_state(4, 0.0), np.pi / 2)
    ok = dev <= 1e-12 and shift >= 0.5
    return ok, f"sigma_z deviation {dev:.2e}; sigma_x shift {shift:.4f}"


def check_phase_covariance(level):
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in (3, 10, 40):
        for state in _random_states(n, 4, rng):
            if fc.expect_spin(state).transverse_magnitude < 1:
                continue
            for tau in (0.2, 2.5, -1.1):
                shifted = an.estimate_phase(dyn.evolve_sz(state, tau))
                worst = max(worst, abs(math.remainder(shifted - an.estimate_phase(state) + tau, 2 * math.pi)))
    return worst <= 1e-8, f"max covariance error {worst:.2e}"


def check_rotation_oracle(level):
    n_max = 12 if level == "quick" else 30
    rng = np.random.default_rng(4)
    worst = 0.0
    for n in range(1, n_max + 1):
        for chi in rng.uniform(0, 2 * np.pi, 4 if level == "quick" else 16):
            worst = max(worst, np.abs(an.rotation_matrix(n, chi) - an.rotation_oracle(n, chi)).max())
    detail = f"recurrence vs expm {worst:.2e}"
    ok = worst <= 1e-9
    if level == "full":
        loss = 0.0
        for n in (50, 120, 200):
            state = dyn.random_state(n, rng)
            back = an.unrotate_modes(an.rotate_modes(state, rng.uniform(0, 2 * np.pi)))
            loss = max(loss, 1 - fc.fidelity(state, back))
        ok = ok and loss <= 1e-9
        detail += f"; round-trip infidelity {loss:.2e}"
    return ok, detail


def check_cascade(level):
    worst = 0.0
    for n in range(2, 13, 2):
        k_max = min(n - 1, 6)
        sim = ms.cascade(n, k_max - 1)
        ref = dense_forced_probabilities(n // 2, n // 2, 0.0, "+" * k_max)
        worst = max(worst, max(abs(a - b) for a, b in zip(sim, ref)))
    return worst <= 1e-12, f"max deviation from dense branch oracle {worst:.2e}"


def check_which_path(level):
    draws = 10_000
    rng = ms.make_rng(99)
    state = fc.new_double_fock(draws, draws)
    plus = 0
    for i in range(draws):
        state, outcome = ms.which_path_detect(state, fc.UP if i % 2 else fc.DOWN, rng.random())
        plus += outcome == 1
    freq = plus / draws
    ok = abs(freq - 0.5) <= 3 * 0.5 / math.sqrt(draws) and state.is_fock()
    mag = fc.expect_spin(state).transverse_magnitude
    return ok and mag <= 1e-9, f"+ frequency {freq:.4f}; final transverse {mag:.1e}"


def check_uniformity(level):
    config = ms.ExperimentConfig(500, 500, 50, master_seed=2024, trajectories=2000, analyzer="uniform")
    phases = [t.summary.estimated_phase for t in ms.run_ensemble(config)]
    stats = an.uniformity_test(phases, 16)
    return stats.chi_square < an.CHI2_999_15DOF, f"chi-square {stats.chi_square:.2f} (limit {an.CHI2_999_15DOF})"


QUICK = [
    Check("smur_identity", check_smur),
    Check("dense_operator_actions", check_dense_actions),
    Check("phase_roundtrip", check_phase_roundtrip),
    Check("phase_eigenrelation", check_eigenrelation),
    Check("channel_completeness", check_completeness),
    Check("sz_conservation", check_conservation),
    Check("phase_covariance", check_phase_covariance),
    Check("rotation_oracle", check_rotation_oracle),
    Check("cascade_dense_oracle", check_cascade),
]
FULL_ONLY = [
    Check("which_path_null", check_which_path),
    Check("phase_uniformity", check_uniformity),
]


def run_checks(level: str = "quick", echo=print) -> List[str]:
    """Run the suite and return the names of failed checks."""
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    checks = QUICK + (FULL_ONLY if level == "full" else [])
    failed = []
    for check in checks:
        try:
            ok, detail = check.run(level)
        except Exception as exc:  # a crashing check is a failed invariant
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        echo(f"{'PASS' if ok else 'FAIL'} {check.name}: {detail}")
        if not ok:
            failed.append(check.name)
    return failed
