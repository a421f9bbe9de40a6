"""Innermost fixed-point rewriting with a step cap."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Tuple

from ..algebra.expr import FailureExpr, NameOrder
from ..errors import StepCapExceeded
from .rules import RewriteContext, RewriteRule, default_rule_list

logger = logging.getLogger("dft.rewrite")

DEFAULT_STEP_CAP = 10_000


@dataclass(frozen=True)
class RuleSet:
    rules: Tuple[RewriteRule, ...]
    step_cap: int = DEFAULT_STEP_CAP
    assume_distinct: bool = True
    strategy: str = "innermost"

    def __post_init__(self) -> None:
        if self.step_cap < 1:
            raise ValueError(f"step cap must be positive, got {self.step_cap}")
        if self.strategy != "innermost":
            raise ValueError(f"Unsupported rewrite strategy: {self.strategy}")

    def extend(self, rules: Iterable[RewriteRule]) -> "RuleSet":
        return replace(self, rules=self.rules + tuple(rules))

    def with_step_cap(self, step_cap: int) -> "RuleSet":
        return replace(self, step_cap=step_cap)

    def without_distinct(self) -> "RuleSet":
        return replace(self, assume_distinct=False)

    def names(self) -> List[str]:
        return [rule.name for rule in self.rules]

    def rule(self, name: str) -> RewriteRule:
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(f"Unknown rule: {name}")


def default_rules(step_cap: int = DEFAULT_STEP_CAP) -> RuleSet:
    return RuleSet(tuple(default_rule_list()), step_cap=step_cap)


@dataclass
class SimplifyResult:
    expr: FailureExpr
    steps: int
    capped: bool
    trace: List[str] = field(default_factory=list)


class _Rewriter:
    def __init__(self, rules: RuleSet, order: NameOrder) -> None:
        self.rules = rules
        self.ctx = RewriteContext(order=order, assume_distinct=rules.assume_distinct)
        self.memo: Dict[FailureExpr, FailureExpr] = {}
        self.steps = 0
        self.capped = False
        self.trace: List[str] = []

    def normalize(self, expr: FailureExpr) -> FailureExpr:
        cached = self.memo.get(expr)
        if cached is not None:
            return cached
        node = self._children(expr)
        while not self.capped:
            rewritten = self._rewrite_once(node)
            if rewritten is None:
                break
            node = self._children(rewritten)
        self.memo[expr] = node
        if not self.capped:
            self.memo[node] = node
        return node

    def _children(self, expr: FailureExpr) -> FailureExpr:
        children = expr.children()
        if not children or self.capped:
            return expr
        normalized = [self.normalize(child) for child in children]
        if all(new is old for new, old in zip(normalized, children)):
            return expr
        return expr.rebuild(normalized)

    def _rewrite_once(self, node: FailureExpr) -> Optional[FailureExpr]:
        for rule in self.rules.rules:
            result = rule.apply(node, self.ctx)
            if result is None or result == node:
                continue
            self.steps += 1
            self.trace.append(rule.name)
            logger.debug("rule=%s %s => %s", rule.name, node, result)
            if self.steps >= self.rules.step_cap:
                self.capped = True
            return result
        return None


def simplify(
    expr: FailureExpr,
    rules: Optional[RuleSet] = None,
    order: Optional[NameOrder] = None,
) -> SimplifyResult:
    """Rewrite ``expr`` to a fixed point of ``rules`` (innermost first).

    Stops early when the step cap is reached; the result is then flagged
    ``capped`` and is still equivalent to ``expr``.
    """
    rules = rules or default_rules()
    rewriter = _Rewriter(rules, order or NameOrder())
    result = rewriter.normalize(expr)
    if rewriter.capped:
        logger.warning("Rewrite step cap %d reached", rules.step_cap)
    else:
        logger.debug("Simplified in %d steps", rewriter.steps)
    return SimplifyResult(result, rewriter.steps, rewriter.capped, rewriter.trace)


def simplify_strict(
    expr: FailureExpr,
    rules: Optional[RuleSet] = None,
    order: Optional[NameOrder] = None,
) -> FailureExpr:
    result = simplify(expr, rules, order)
    if result.capped:
        raise StepCapExceeded(result.expr, result.steps)
    return result.expr
