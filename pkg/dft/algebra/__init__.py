from .evaluate import evaluate, evaluate_many
from .expr import (
    ALWAYS,
    NEVER,
    Always,
    And,
    Basic,
    Before,
    Csp,
    FailureExpr,
    Fdep,
    Hsp,
    InclBefore,
    NameOrder,
    Never,
    Or,
    Pand,
    SharedSpare,
    Simult,
    Wsp,
    basics_in_order,
    basics_of,
    format_expr,
)
from .time import ALWAYS_TIME, NEVER_TIME, ext_time

__all__ = [
    "ALWAYS",
    "ALWAYS_TIME",
    "NEVER",
    "NEVER_TIME",
    "Always",
    "And",
    "Basic",
    "Before",
    "Csp",
    "FailureExpr",
    "Fdep",
    "Hsp",
    "InclBefore",
    "NameOrder",
    "Never",
    "Or",
    "Pand",
    "SharedSpare",
    "Simult",
    "Wsp",
    "basics_in_order",
    "basics_of",
    "evaluate",
    "evaluate_many",
    "ext_time",
    "format_expr",
]
