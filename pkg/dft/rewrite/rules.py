from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Type

from ..algebra.expr import (
    NEVER,
    Always,
    And,
    Basic,
    Before,
    FailureExpr,
    InclBefore,
    NameOrder,
    Never,
    Or,
    Simult,
    _Nary,
    basics_of,
    size,
    substitute,
)
from ..errors import ModelSyntaxError
from ..model.parser import parse_expression

Bindings = Dict[str, FailureExpr]


@dataclass(frozen=True)
class RewriteContext:
    order: NameOrder = field(default_factory=NameOrder)
    assume_distinct: bool = True


class RewriteRule:
    """A sound identity ``lhs = rhs`` applied left to right at one node."""

    name: str
    requires_distinct: bool = False

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        raise NotImplementedError


# matching


def _match(pattern: FailureExpr, subject: FailureExpr, bindings: Bindings) -> Iterator[Bindings]:
    if isinstance(pattern, Basic):
        bound = bindings.get(pattern.name)
        if bound is None:
            yield {**bindings, pattern.name: subject}
        elif bound == subject:
            yield bindings
        return
    if isinstance(pattern, (Always, Never)):
        if pattern == subject:
            yield bindings
        return
    if type(pattern) is not type(subject):
        return
    if isinstance(pattern, _Nary):
        candidates = _match_operands(
            type(pattern), pattern.operands, subject.operands, bindings, collect=True
        )
        for matched, rest in candidates:
            if not rest:
                yield matched
        return
    yield from _match_children(pattern.children(), subject.children(), bindings)
    if isinstance(pattern, Simult):
        yield from _match_children(pattern.children(), subject.children()[::-1], bindings)


def _match_children(
    patterns: Sequence[FailureExpr], subjects: Sequence[FailureExpr], bindings: Bindings
) -> Iterator[Bindings]:
    if not patterns:
        yield bindings
        return
    for matched in _match(patterns[0], subjects[0], bindings):
        yield from _match_children(patterns[1:], subjects[1:], matched)


def _match_operands(
    node_type: Type[_Nary],
    patterns: Sequence[FailureExpr],
    subjects: Sequence[FailureExpr],
    bindings: Bindings,
    collect: bool,
) -> Iterator[Tuple[Bindings, List[FailureExpr]]]:
    # with collect the last metavariable takes every leftover operand
    if len(subjects) < len(patterns):
        return
    ordered = sorted(patterns, key=lambda item: isinstance(item, Basic))
    collector = collect and len(subjects) > len(patterns)
    if collector and not isinstance(ordered[-1], Basic):
        return
    yield from _assign(node_type, ordered, list(subjects), bindings, collector)


def _assign(
    node_type: Type[_Nary],
    patterns: List[FailureExpr],
    remaining: List[FailureExpr],
    bindings: Bindings,
    collector: bool,
) -> Iterator[Tuple[Bindings, List[FailureExpr]]]:
    if not patterns:
        yield bindings, remaining
        return
    head = patterns[0]
    if collector and len(patterns) == 1:
        value = remaining[0] if len(remaining) == 1 else node_type(tuple(remaining))
        for matched in _match(head, value, bindings):
            yield matched, []
        return
    for index, subject in enumerate(remaining):
        for matched in _match(head, subject, bindings):
            yield from _assign(
                node_type, patterns[1:], remaining[:index] + remaining[index + 1:], matched, collector
            )


def metavariables(pattern: FailureExpr) -> frozenset:
    return basics_of(pattern)


@dataclass(frozen=True)
class PatternRule(RewriteRule):
    """Rule given as data: every name in ``lhs`` and ``rhs`` is a metavariable.

    ``distinct`` lists metavariables that must be bound to pairwise distinct
    basic events (the side condition for ties of probability zero).
    """

    name: str
    lhs: FailureExpr
    rhs: FailureExpr
    distinct: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        unbound = metavariables(self.rhs) - metavariables(self.lhs)
        if unbound:
            raise ValueError(f"rule {self.name}: right side uses unbound {', '.join(sorted(unbound))}")
        unknown = set(self.distinct) - metavariables(self.lhs)
        if unknown:
            raise ValueError(f"rule {self.name}: side condition names unknown {', '.join(sorted(unknown))}")

    @property
    def requires_distinct(self) -> bool:  # type: ignore[override]
        return bool(self.distinct)

    def _side_condition(self, bindings: Bindings) -> bool:
        names = []
        for var in self.distinct:
            bound = bindings[var]
            if not isinstance(bound, Basic):
                return False
            names.append(bound.name)
        return len(set(names)) == len(names)

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if self.distinct and not ctx.assume_distinct:
            return None
        if isinstance(self.lhs, _Nary) and type(self.lhs) is type(expr):
            candidates = _match_operands(
                type(self.lhs), self.lhs.operands, expr.operands, {}, collect=False
            )
            for bindings, rest in candidates:
                if self._side_condition(bindings):
                    replaced = substitute(self.rhs, bindings)
                    if not rest:
                        return replaced
                    return type(expr)((replaced, *rest))
            return None
        for bindings in _match(self.lhs, expr, {}):
            if self._side_condition(bindings):
                return substitute(self.rhs, bindings)
        return None

    def to_line(self) -> str:
        line = f"{self.name}: {self.lhs} => {self.rhs}"
        if self.distinct:
            line += f" where distinct-basics({', '.join(self.distinct)})"
        return line


# structural rules


@dataclass(frozen=True)
class Unwrap(RewriteRule):
    name: str
    node_type: Type[_Nary]

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if type(expr) is self.node_type and len(expr.operands) == 1:
            return expr.operands[0]
        return None


@dataclass(frozen=True)
class Flatten(RewriteRule):
    name: str
    node_type: Type[_Nary]

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if type(expr) is not self.node_type:
            return None
        if not any(type(item) is self.node_type for item in expr.operands):
            return None
        flat: List[FailureExpr] = []
        for item in expr.operands:
            if type(item) is self.node_type:
                flat.extend(item.operands)
            else:
                flat.append(item)
        return self.node_type(tuple(flat))


@dataclass(frozen=True)
class Dedupe(RewriteRule):
    name: str
    node_type: Type[_Nary]

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if type(expr) is not self.node_type:
            return None
        unique = tuple(dict.fromkeys(expr.operands))
        if len(unique) == len(expr.operands):
            return None
        return self.node_type(unique)


@dataclass(frozen=True)
class SortOperands(RewriteRule):
    name: str
    node_type: Type[_Nary]

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if type(expr) is not self.node_type:
            return None
        ordered = ctx.order.sort(expr.operands)
        if ordered == expr.operands:
            return None
        return self.node_type(ordered)


@dataclass(frozen=True)
class SortSimult(RewriteRule):
    name: str = "simult-comm"

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if not isinstance(expr, Simult):
            return None
        if ctx.order.expr_key(expr.right) < ctx.order.expr_key(expr.left):
            return Simult(expr.right, expr.left)
        return None


def _conjuncts(expr: FailureExpr) -> Tuple[FailureExpr, ...]:
    return expr.operands if isinstance(expr, And) else (expr,)


def _implied(expr: FailureExpr) -> set:
    items = set(_conjuncts(expr))
    for item in list(items):
        if isinstance(item, (Before, InclBefore)):
            items.add(item.left)
    return items


@dataclass(frozen=True)
class AbsorbOr(RewriteRule):
    name: str = "or-absorb"

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if not isinstance(expr, Or) or len(expr.operands) < 2:
            return None
        operands = expr.operands
        conj = [set(_conjuncts(item)) for item in operands]
        implied = [_implied(item) for item in operands]
        dropped = set()
        for i in range(len(operands)):
            if i in dropped:
                continue
            for j in range(len(operands)):
                if j == i or j in dropped:
                    continue
                if conj[i] <= implied[j]:
                    dropped.add(j)
        if not dropped:
            return None
        return Or(tuple(item for k, item in enumerate(operands) if k not in dropped))


@dataclass(frozen=True)
class AndBeforeAbsorb(RewriteRule):
    name: str = "and-before-absorb"

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if not isinstance(expr, And) or len(expr.operands) < 2:
            return None
        lefts = {item.left for item in expr.operands if isinstance(item, (Before, InclBefore))}
        kept = tuple(item for item in expr.operands if item not in lefts)
        if len(kept) == len(expr.operands):
            return None
        return And(kept)


@dataclass(frozen=True)
class BeforeContra(RewriteRule):
    name: str = "before-contra"

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if not isinstance(expr, And):
            return None
        befores = {(item.left, item.right) for item in expr.operands if isinstance(item, Before)}
        for left, right in befores:
            if (right, left) in befores:
                return NEVER
        return None


@dataclass(frozen=True)
class DistributeAndOr(RewriteRule):
    """X . (Y + Z) = X.Y + X.Z, applied to every disjunctive operand at once.

    Skipped when the expansion would exceed ``max_products`` products or
    ``max_nodes`` nodes; the node is then left for the union split.
    """

    name: str = "and-or-dist"
    max_products: int = 64
    max_nodes: int = 512

    def apply(self, expr: FailureExpr, ctx: RewriteContext) -> Optional[FailureExpr]:
        if not isinstance(expr, And):
            return None
        disjunctive = [item for item in expr.operands if isinstance(item, Or)]
        if not disjunctive:
            return None
        widths = [len(item.operands) for item in disjunctive]
        products = math.prod(widths)
        if products > self.max_products or products * size(expr) > self.max_nodes:
            return None
        rest = tuple(item for item in expr.operands if not isinstance(item, Or))
        return Or(tuple(And(rest + choice) for choice in itertools.product(*(d.operands for d in disjunctive))))


# rule files

_RULE_LINE = re.compile(
    r"^(?P<name>[A-Za-z0-9_.-]+)\s*:\s*(?P<lhs>.+?)\s*=>\s*(?P<rhs>.+?)"
    r"(?:\s+where\s+distinct-basics\((?P<names>[^)]*)\))?\s*;?\s*$"
)


def load_rules(text: str) -> List[PatternRule]:
    """Read ``name: LHS => RHS [where distinct-basics(X, Y)]`` lines."""
    rules: List[PatternRule] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        match = _RULE_LINE.match(line)
        if not match:
            raise ModelSyntaxError(lineno, 1, "name: LHS => RHS [where distinct-basics(X, Y)]", line)
        sides = []
        for side in ("lhs", "rhs"):
            try:
                sides.append(parse_expression(match.group(side)))
            except ModelSyntaxError as exc:
                col = match.start(side) + exc.col
                raise ModelSyntaxError(lineno, col, exc.expected, exc.found) from exc
        names = tuple(
            item.strip() for item in (match.group("names") or "").split(",") if item.strip()
        )
        try:
            rules.append(PatternRule(match.group("name"), sides[0], sides[1], names))
        except ValueError as exc:
            raise ModelSyntaxError(lineno, 1, "metavariables bound on the left side", str(exc)) from exc
    return rules


DEFAULT_RULES_TEXT = """\
// identity elements
and-never: and(X, never) => never
and-always: and(X, always) => X
or-always: or(X, always) => always
or-never: or(X, never) => X
before-never-right: before(X, never) => X
before-never-left: before(never, X) => never
before-always-right: before(X, always) => never
ibefore-never-right: ibefore(X, never) => X
ibefore-never-left: ibefore(never, X) => never
ibefore-always-left: ibefore(always, X) => always
simult-never-arg: simult(X, never) => never
simult-idem: simult(X, X) => X
before-self: before(X, X) => never
ibefore-self: ibefore(X, X) => X

// gates in operator form
fdep-or: fdep(X, T) => or(X, T)
hsp-and: hsp(Y, X) => and(Y, X)
pand-ibefore: pand(X, Y) => and(Y, ibefore(X, Y))
csp-expand: csp(Y, X) => and(X, before(Y, X))
wsp-expand: wsp(Y, XA, XD) => or(and(Y, before(XD, Y)), and(XA, before(Y, XA)), simult(Y, XA), simult(Y, XD))
sharedspare-expand: sharedspare(X, Y, ZA, ZD) => or(and(X, before(ZD, X)), and(ZA, before(X, ZA)), and(X, before(Y, X)))

// temporal operators over and/or
incl-before-absorb: or(ibefore(X, Y), simult(X, Y)) => ibefore(X, Y)
before-or-right: before(X, or(Y, Z)) => and(before(X, Y), before(X, Z))
before-and-right: before(X, and(Y, Z)) => or(before(X, Y), before(X, Z))
before-or-left: before(or(X, Y), Z) => or(before(X, Z), before(Y, Z))
before-and-left: before(and(X, Y), Z) => and(before(X, Z), before(Y, Z))
ibefore-or-right: ibefore(X, or(Y, Z)) => and(ibefore(X, Y), ibefore(X, Z))
ibefore-and-right: ibefore(X, and(Y, Z)) => or(ibefore(X, Y), ibefore(X, Z))
ibefore-or-left: ibefore(or(X, Y), Z) => or(ibefore(X, Z), ibefore(Y, Z))
ibefore-and-left: ibefore(and(X, Y), Z) => and(ibefore(X, Z), ibefore(Y, Z))

// distinct continuous basics never tie
simult-never: simult(X, Y) => never where distinct-basics(X, Y)
ibefore-distinct: ibefore(X, Y) => before(X, Y) where distinct-basics(X, Y)
spare-pair-merge: or(and(X, before(Z, X)), and(Z, before(X, Z))) => and(X, Z) where distinct-basics(X, Z)
"""


def structural_rules() -> List[RewriteRule]:
    return [
        Unwrap("and-single", And),
        Unwrap("or-single", Or),
        Flatten("and-assoc", And),
        Flatten("or-assoc", Or),
        Dedupe("and-idem", And),
        Dedupe("or-idem", Or),
        SortOperands("and-comm", And),
        SortOperands("or-comm", Or),
        SortSimult(),
    ]


def lattice_rules() -> List[RewriteRule]:
    return [AndBeforeAbsorb(), BeforeContra(), AbsorbOr()]


def default_rule_list() -> List[RewriteRule]:
    return [*structural_rules(), *load_rules(DEFAULT_RULES_TEXT), *lattice_rules(), DistributeAndOr()]


def rules_by_name(rules: Iterable[RewriteRule]) -> Dict[str, RewriteRule]:
    return {rule.name: rule for rule in rules}
