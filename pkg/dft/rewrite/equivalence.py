"""Equivalence checking by sampling failure-time assignments."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from ..algebra.evaluate import evaluate, evaluate_many
from ..algebra.expr import FailureExpr, basics_in_order
from ..simulation.rng import EQUIVALENCE_STREAM, make_generator
from .rules import PatternRule

logger = logging.getLogger("dft.rewrite")

MAX_TIE_VALUE = 3


@dataclass
class EquivalenceVerdict:
    equivalent: bool
    trials: int
    counterexample: Optional[Dict[str, float]] = None
    left: Optional[float] = None
    right: Optional[float] = None

    def __bool__(self) -> bool:
        return self.equivalent


def _names(e1: FailureExpr, e2: FailureExpr) -> List[str]:
    names = basics_in_order(e1)
    seen = set(names)
    for name in basics_in_order(e2):
        if name not in seen:
            seen.add(name)
            names.append(name)
    return names


def sample_assignments(
    names: List[str], trials: int, seed: int, distinct: bool = False
) -> Dict[str, np.ndarray]:
    """Columns of failure times, one per name.

    Mixed sampling draws, per cell: continuous values (half of the cells),
    small integers that force ties, zeros and infinities. With ``distinct``
    every cell is a continuous positive draw.
    """
    rng = make_generator(seed, EQUIVALENCE_STREAM)
    columns: Dict[str, np.ndarray] = {}
    for name in names:
        draws = rng.exponential(1.0, size=trials)
        if distinct:
            columns[name] = draws
            continue
        kind = rng.integers(0, 10, size=trials)
        ties = rng.integers(0, MAX_TIE_VALUE + 1, size=trials).astype(float)
        column = np.where(kind < 5, draws, ties)
        column = np.where(kind == 8, 0.0, column)
        column = np.where(kind == 9, np.inf, column)
        columns[name] = column
    return columns


def check_equiv(
    e1: FailureExpr,
    e2: FailureExpr,
    trials: int,
    seed: int,
    distinct: bool = False,
) -> EquivalenceVerdict:
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    names = _names(e1, e2)
    columns = sample_assignments(names, trials, seed, distinct)
    left = np.broadcast_to(evaluate_many(e1, columns), (trials,))
    right = np.broadcast_to(evaluate_many(e2, columns), (trials,))
    mismatch = np.flatnonzero(left != right)
    if mismatch.size == 0:
        return EquivalenceVerdict(True, trials)
    index = int(mismatch[0])
    assignment = {name: float(columns[name][index]) for name in names}
    verdict = EquivalenceVerdict(
        False, trials, assignment, evaluate(e1, assignment), evaluate(e2, assignment)
    )
    logger.info("Counterexample %s: %s vs %s", assignment, verdict.left, verdict.right)
    return verdict


def check_rule(rule: PatternRule, trials: int = 1000, seed: int = 0) -> EquivalenceVerdict:
    return check_equiv(rule.lhs, rule.rhs, trials, seed, distinct=rule.requires_distinct)
