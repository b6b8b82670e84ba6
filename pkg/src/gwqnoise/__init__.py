"""Quantum noise budgets for interferometric gravitational-wave detectors.

Two-mode light is described through the Schwinger su(2) realization; the
interferometer is a rotation of the angular-momentum vector, and the noise
budget combines photon-counting and radiation-pressure terms.
"""

from .detector import DetectorConfig, initial_ligo
from .interferometer import Observable, phase_uncertainty
from .noise import NoiseBudget, family_optimum, loss_threshold_check, sql
from .su2 import MomentSet, TwoModeState, moments_of

__all__ = [
    "DetectorConfig",
    "MomentSet",
    "NoiseBudget",
    "Observable",
    "TwoModeState",
    "family_optimum",
    "initial_ligo",
    "loss_threshold_check",
    "moments_of",
    "phase_uncertainty",
    "sql",
]
