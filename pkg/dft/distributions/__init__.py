from .base import ConditionalLaw, Distribution
from .families import (
    Exponential,
    FreshActivation,
    JointDensityActivation,
    MemorylessActivation,
    Weibull,
    default_activation,
    dormant_variant,
    exponential,
    fresh_activation,
    joint_density_activation,
    make_distribution,
    memoryless_activation,
    weibull,
)

__all__ = [
    "ConditionalLaw",
    "Distribution",
    "Exponential",
    "FreshActivation",
    "JointDensityActivation",
    "MemorylessActivation",
    "Weibull",
    "default_activation",
    "dormant_variant",
    "exponential",
    "fresh_activation",
    "joint_density_activation",
    "make_distribution",
    "memoryless_activation",
    "weibull",
]
