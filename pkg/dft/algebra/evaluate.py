from __future__ import annotations

from typing import Mapping

import numpy as np

from ..errors import UnknownBasic
from .expr import (
    Always,
    And,
    Basic,
    Before,
    Csp,
    FailureExpr,
    Fdep,
    Hsp,
    InclBefore,
    Never,
    Or,
    Pand,
    SharedSpare,
    Simult,
    Wsp,
)
from .time import Assignment, ext_time

_INF = np.inf


def evaluate(expr: FailureExpr, assignment: Assignment) -> float:
    """Time of occurrence of ``expr`` under one assignment of basic failure times."""
    columns = {}
    for name, value in assignment.items():
        columns[name] = np.float64(ext_time(value))
    return float(_eval(expr, columns))


def evaluate_many(expr: FailureExpr, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    return np.asarray(_eval(expr, columns), dtype=np.float64)


def _before(x, y):
    return np.where(x < y, x, _INF)


def _incl_before(x, y):
    return np.where(x <= y, x, _INF)


def _eval(expr: FailureExpr, a: Mapping[str, np.ndarray]):
    if isinstance(expr, Basic):
        try:
            return a[expr.name]
        except KeyError:
            raise UnknownBasic(expr.name) from None
    if isinstance(expr, Always):
        return np.float64(0.0)
    if isinstance(expr, Never):
        return np.float64(_INF)
    if isinstance(expr, And):
        result = _eval(expr.operands[0], a)
        for operand in expr.operands[1:]:
            result = np.maximum(result, _eval(operand, a))
        return result
    if isinstance(expr, Or):
        result = _eval(expr.operands[0], a)
        for operand in expr.operands[1:]:
            result = np.minimum(result, _eval(operand, a))
        return result
    if isinstance(expr, Pand):
        x = _eval(expr.left, a)
        y = _eval(expr.right, a)
        return np.where(x <= y, y, _INF)
    if isinstance(expr, Fdep):
        return np.minimum(_eval(expr.dep, a), _eval(expr.trigger, a))
    if isinstance(expr, Before):
        return _before(_eval(expr.left, a), _eval(expr.right, a))
    if isinstance(expr, InclBefore):
        return _incl_before(_eval(expr.left, a), _eval(expr.right, a))
    if isinstance(expr, Simult):
        x = _eval(expr.left, a)
        y = _eval(expr.right, a)
        return np.where(x == y, x, _INF)
    if isinstance(expr, Hsp):
        return np.maximum(_eval(expr.main, a), _eval(expr.spare, a))
    if isinstance(expr, Csp):
        y = _eval(expr.main, a)
        x = _eval(expr.spare, a)
        return np.where(y < x, x, _INF)
    if isinstance(expr, Wsp):
        y = _eval(expr.main, a)
        xa = _eval(expr.active, a)
        xd = _eval(expr.dormant, a)
        dormant_first = np.maximum(y, _before(xd, y))
        active_after = np.maximum(xa, _before(y, xa))
        tie_active = np.where(y == xa, y, _INF)
        tie_dormant = np.where(y == xd, y, _INF)
        return np.minimum(
            np.minimum(dormant_first, active_after), np.minimum(tie_active, tie_dormant)
        )
    if isinstance(expr, SharedSpare):
        x = _eval(expr.main, a)
        y = _eval(expr.other_main, a)
        za = _eval(expr.active, a)
        zd = _eval(expr.dormant, a)
        dormant_first = np.maximum(x, _before(zd, x))
        active_after = np.maximum(za, _before(x, za))
        taken = np.maximum(x, _before(y, x))
        return np.minimum(np.minimum(dormant_first, active_after), taken)
    raise TypeError(f"Unsupported expression node: {type(expr).__name__}")
