"""Quantum-state engineering of a driven two-level atom along a time-dependent
decoherence-free subspace created by a squeezed-vacuum reservoir."""
from .qcore import (BlochVector, DensityMatrix, PureState, bloch, fidelity, purity)
from .reservoir import SqueezeSchedule, lindblad_operator, sample
from .synthesis import ControlLaw, dfs_frame, synthesize_exact, theorem_report
from .evolve import IntegratorConfig, Trajectory, integrate, initial_state

__version__ = "0.1.0"
