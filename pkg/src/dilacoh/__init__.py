"""Position coherence of a two-level emitter in a superposition of heights.

Closed-form visibilities, numerical cross-checks, a mirror-feedback model
and a sweep CLI.  Dimensionless units throughout: rates in kappa, times in
1/kappa.
"""
from .config import ConvergenceError, Direction, DomainError, GuardError, PhysicsConfig
from .model import (
    VisibilityCurve,
    dominance_margin,
    photon_overlap,
    visibility_asymptotic,
    visibility_center,
    visibility_frame,
    visibility_time,
)

__all__ = [
    "ConvergenceError", "Direction", "DomainError", "GuardError", "PhysicsConfig",
    "VisibilityCurve", "dominance_margin", "photon_overlap", "visibility_asymptotic",
    "visibility_center", "visibility_frame", "visibility_time",
]
__version__ = "0.1.0"
