"""Failure-time expression AST.

Each node denotes the time of occurrence of an event as a function of the
failure times of the basic events it mentions. Nodes are frozen dataclasses,
so expressions are hashable values that can be shared between threads.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple, Union


class FailureExpr:
    def children(self) -> Tuple["FailureExpr", ...]:
        return ()

    def rebuild(self, children: Sequence["FailureExpr"]) -> "FailureExpr":
        return self

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True)
class Always(FailureExpr):
    pass


@dataclass(frozen=True)
class Never(FailureExpr):
    pass


ALWAYS = Always()
NEVER = Never()


@dataclass(frozen=True)
class Basic(FailureExpr):
    name: str


@dataclass(frozen=True)
class _Nary(FailureExpr):
    operands: Tuple[FailureExpr, ...]

    def __post_init__(self) -> None:
        if not self.operands:
            raise ValueError(f"{type(self).__name__} needs at least one operand")

    def children(self) -> Tuple[FailureExpr, ...]:
        return self.operands

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        return type(self)(tuple(children))

    @classmethod
    def of(cls, *operands: Union[FailureExpr, str]) -> FailureExpr:
        items = tuple(_coerce(item) for item in operands)
        return cls(items)


@dataclass(frozen=True)
class And(_Nary):
    pass


@dataclass(frozen=True)
class Or(_Nary):
    pass


@dataclass(frozen=True)
class _Binary(FailureExpr):
    left: FailureExpr
    right: FailureExpr

    def children(self) -> Tuple[FailureExpr, ...]:
        return (self.left, self.right)

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        left, right = children
        return type(self)(left, right)

    @classmethod
    def of(cls, left: Union[FailureExpr, str], right: Union[FailureExpr, str]) -> FailureExpr:
        return cls(_coerce(left), _coerce(right))


@dataclass(frozen=True)
class Pand(_Binary):
    pass


@dataclass(frozen=True)
class Before(_Binary):
    pass


@dataclass(frozen=True)
class Simult(_Binary):
    pass


@dataclass(frozen=True)
class InclBefore(_Binary):
    pass


@dataclass(frozen=True)
class Fdep(FailureExpr):
    dep: FailureExpr
    trigger: FailureExpr

    def children(self) -> Tuple[FailureExpr, ...]:
        return (self.dep, self.trigger)

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        return Fdep(children[0], children[1])


@dataclass(frozen=True)
class Hsp(FailureExpr):
    main: FailureExpr
    spare: FailureExpr

    def children(self) -> Tuple[FailureExpr, ...]:
        return (self.main, self.spare)

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        return Hsp(children[0], children[1])


@dataclass(frozen=True)
class Csp(FailureExpr):
    main: FailureExpr
    spare: FailureExpr

    def children(self) -> Tuple[FailureExpr, ...]:
        return (self.main, self.spare)

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        return Csp(children[0], children[1])


@dataclass(frozen=True)
class Wsp(FailureExpr):
    main: FailureExpr
    active: FailureExpr
    dormant: FailureExpr

    def __post_init__(self) -> None:
        if isinstance(self.active, Basic) and self.active == self.dormant:
            raise ValueError(
                f"WSP spare states must be distinct basic events, got '{self.active.name}' twice"
            )

    def children(self) -> Tuple[FailureExpr, ...]:
        return (self.main, self.active, self.dormant)

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        return Wsp(children[0], children[1], children[2])


@dataclass(frozen=True)
class SharedSpare(FailureExpr):
    main: FailureExpr
    other_main: FailureExpr
    active: FailureExpr
    dormant: FailureExpr

    def children(self) -> Tuple[FailureExpr, ...]:
        return (self.main, self.other_main, self.active, self.dormant)

    def rebuild(self, children: Sequence[FailureExpr]) -> FailureExpr:
        return SharedSpare(children[0], children[1], children[2], children[3])


GATE_NAMES: Dict[type, str] = {
    And: "and",
    Or: "or",
    Pand: "pand",
    Fdep: "fdep",
    Before: "before",
    InclBefore: "ibefore",
    Simult: "simult",
    Hsp: "hsp",
    Csp: "csp",
    Wsp: "wsp",
    SharedSpare: "sharedspare",
}

# Position of each node kind in the canonical operand order.
KIND_RANK: Dict[type, int] = {
    Always: 0,
    Never: 1,
    Basic: 2,
    And: 3,
    Or: 4,
    Before: 5,
    InclBefore: 6,
    Simult: 7,
    Pand: 8,
    Fdep: 9,
    Hsp: 10,
    Csp: 11,
    Wsp: 12,
    SharedSpare: 13,
}


def _coerce(item: Union[FailureExpr, str]) -> FailureExpr:
    if isinstance(item, FailureExpr):
        return item
    return Basic(item)


def format_expr(expr: FailureExpr) -> str:
    if isinstance(expr, Basic):
        return expr.name
    if isinstance(expr, Always):
        return "always"
    if isinstance(expr, Never):
        return "never"
    name = GATE_NAMES[type(expr)]
    return f"{name}({', '.join(format_expr(child) for child in expr.children())})"


def walk(expr: FailureExpr) -> Iterator[FailureExpr]:
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def basics_of(expr: FailureExpr) -> FrozenSet[str]:
    return frozenset(node.name for node in walk(expr) if isinstance(node, Basic))


def basics_in_order(expr: FailureExpr) -> List[str]:
    seen: Dict[str, None] = {}
    for node in walk(expr):
        if isinstance(node, Basic) and node.name not in seen:
            seen[node.name] = None
    return list(seen)


def substitute(expr: FailureExpr, mapping: Dict[str, FailureExpr]) -> FailureExpr:
    if isinstance(expr, Basic):
        return mapping.get(expr.name, expr)
    children = expr.children()
    if not children:
        return expr
    return expr.rebuild([substitute(child, mapping) for child in children])


def size(expr: FailureExpr) -> int:
    return sum(1 for _ in walk(expr))


class NameOrder:
    """Canonical name order: listed names by position, others alphabetically after."""

    def __init__(self, names: Optional[Sequence[str]] = None) -> None:
        self.names = tuple(names or ())
        self._rank = {name: index for index, name in enumerate(self.names)}

    def key(self, name: str) -> Tuple[int, str]:
        return (self._rank.get(name, len(self._rank)), name)

    def expr_key(self, expr: FailureExpr) -> tuple:
        if isinstance(expr, Basic):
            return (KIND_RANK[Basic], self.key(expr.name))
        return (KIND_RANK[type(expr)], tuple(self.expr_key(child) for child in expr.children()))

    def sort(self, exprs: Sequence[FailureExpr]) -> Tuple[FailureExpr, ...]:
        return tuple(sorted(exprs, key=self.expr_key))
