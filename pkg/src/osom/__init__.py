"""Online model selection between a multi-armed bandit and a linear contextual bandit."""

from .core import (
    AlgoConfig,
    ContextDistSpec,
    ContextKind,
    ContextSlate,
    InstanceSpec,
    ModelKind,
    PolicyKind,
    RadiusMode,
    RoundLog,
    validate_instance,
)
from .harness import ExperimentSpec, run_experiment, run_single

__all__ = [
    "AlgoConfig",
    "ContextDistSpec",
    "ContextKind",
    "ContextSlate",
    "ExperimentSpec",
    "InstanceSpec",
    "ModelKind",
    "PolicyKind",
    "RadiusMode",
    "RoundLog",
    "run_experiment",
    "run_single",
    "validate_instance",
]
