"""Particle-method simulator and verification suite for thermally driven
granular gases with velocity-dependent restitution."""

__version__ = "0.1.0"

from .dissipation import DissipationSpec, theta_limit
from .dsmc import EngineConfig, Ensemble, InitialCondition, run_to_steady
from .restitution import (RestitutionModel, constant, elastic, eval_e,
                          power_law, rescale, viscoelastic)

__all__ = [
    "DissipationSpec",
    "EngineConfig",
    "Ensemble",
    "InitialCondition",
    "RestitutionModel",
    "constant",
    "elastic",
    "eval_e",
    "power_law",
    "rescale",
    "run_to_steady",
    "theta_limit",
    "viscoelastic",
    "__version__",
]
