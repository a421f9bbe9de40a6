from .rng import make_generator
from .simulator import McConfig, McEstimate, ModelSampler, simulate, simulate_curve

__all__ = ["McConfig", "McEstimate", "ModelSampler", "make_generator", "simulate", "simulate_curve"]
