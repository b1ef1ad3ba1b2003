"""Desk-scale simulator and verification lab for the focusing stochastic NLS
equation with multiplicative (Stratonovich) or additive noise."""

from .grid import FieldState, GridSpec
from .ground_state import GroundState, solve_ground_state
from .noise_model import CovarianceSpec, NoiseConstants, noise_constants
from .dynamics import SimConfig, TrajectoryRecord, run_trajectory
from .observables import ObservableSample, classify_dichotomy, observe
from .theory import TheoryReport
from .ensemble import EnsembleConfig, EnsembleSummary, run_ensemble

__version__ = "0.1.0"
