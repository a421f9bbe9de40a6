from .cas import CAS_RATES, CAS_TIMES, cas_model, cas_model_text, cas_reduced_form
from .model import DftModel, SpareMeta
from .parser import parse_expression, parse_model
from .printer import print_expression, print_model

__all__ = [
    "CAS_RATES",
    "CAS_TIMES",
    "DftModel",
    "SpareMeta",
    "cas_model",
    "cas_model_text",
    "cas_reduced_form",
    "parse_expression",
    "parse_model",
    "print_expression",
    "print_model",
]
