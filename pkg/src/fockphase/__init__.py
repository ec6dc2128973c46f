"""Exact simulation of sequential single-atom detections on a double Fock
state of two condensates, and the emergence of a relative phase."""

__version__ = "0.1.0"

from .fock_core import (  # noqa: E402
    CANONICAL,
    Basis,
    SectorState,
    SpinExpectation,
    apply_annihilation,
    apply_channel,
    expect_spin,
    fidelity,
    new_double_fock,
    phase_state,
    verify_smur_identity,
)
from .dynamics import conserved_probability_check, evolve_sz  # noqa: E402
from .measurement import (  # noqa: E402
    DetectionRecord,
    ExperimentConfig,
    Trajectory,
    collapse,
    detection_probabilities,
    forced_sequence,
    run_ensemble,
    run_trajectory,
    which_path_detect,
)
from .analysis import (  # noqa: E402
    CountDistribution,
    PhaseStats,
    bob_count_distribution,
    estimate_phase,
    phase_manifold_fidelity,
    rotate_modes,
    uniformity_test,
)
