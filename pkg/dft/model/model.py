from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

from ..algebra.expr import Basic, FailureExpr, NameOrder, basics_in_order, substitute
from ..distributions import ConditionalLaw, Distribution
from ..errors import MissingDistribution, Undefined

SPARE_KINDS = ("cold", "warm", "shared")


@dataclass(frozen=True)
class SpareMeta:
    """How a spare is activated and which basic events stand for its states.

    ``active`` and ``dormant`` name the basic events of the two states. A cold
    spare has no dormant state; a hot shared spare uses one name for both.
    """

    name: str
    kind: str
    mains: Tuple[FailureExpr, ...]
    active: str
    dormant: Optional[str]
    dormancy: float
    law_tag: str
    conditional: Optional[ConditionalLaw]
    active_law: Distribution

    @property
    def hot(self) -> bool:
        return self.active == self.dormant

    @property
    def states(self) -> Tuple[str, ...]:
        if self.dormant is None or self.hot:
            return (self.active,)
        return (self.active, self.dormant)


@dataclass
class DftModel:
    top_name: str
    definitions: Dict[str, FailureExpr]
    basic_laws: Dict[str, Distribution]
    spare_meta: Dict[str, SpareMeta] = field(default_factory=dict)
    declaration_order: List[str] = field(default_factory=list)
    source_map: Dict[str, str] = field(default_factory=dict, compare=False)
    _resolved: Dict[str, FailureExpr] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    @classmethod
    def from_expression(
        cls,
        top: FailureExpr,
        laws: Mapping[str, Distribution],
        spares: Iterable[SpareMeta] = (),
        top_name: str = "TOP",
    ) -> "DftModel":
        return cls(
            top_name=top_name,
            definitions={top_name: top},
            basic_laws=dict(laws),
            spare_meta={meta.name: meta for meta in spares},
            declaration_order=list(laws),
        )

    def resolve(self, name: str) -> FailureExpr:
        cached = self._resolved.get(name)
        if cached is not None:
            return cached
        if name in self.definitions:
            expr = self.definitions[name]
            mapping = {
                ref: self.resolve(ref)
                for ref in _names_in(expr)
                if ref in self.definitions and ref != name
            }
            resolved = substitute(expr, mapping) if mapping else expr
        elif name in self.basic_laws:
            resolved = Basic(name)
        else:
            raise Undefined(name)
        self._resolved[name] = resolved
        return resolved

    def resolve_expr(self, expr: FailureExpr) -> FailureExpr:
        mapping = {ref: self.resolve(ref) for ref in _names_in(expr) if ref in self.definitions}
        return substitute(expr, mapping) if mapping else expr

    def top_expr(self) -> FailureExpr:
        return self.resolve(self.top_name)

    def name_order(self) -> NameOrder:
        return NameOrder(self.declaration_order or list(self.basic_laws))

    def law(self, name: str) -> Distribution:
        try:
            return self.basic_laws[name]
        except KeyError:
            raise MissingDistribution(name) from None

    def state_owners(self) -> Dict[str, SpareMeta]:
        owners: Dict[str, SpareMeta] = {}
        for meta in self.spare_meta.values():
            for state in meta.states:
                owners[state] = meta
        return owners

    def digest(self) -> str:
        from .printer import print_model

        return hashlib.sha256(print_model(self).encode("utf-8")).hexdigest()


def _names_in(expr: FailureExpr) -> List[str]:
    return basics_in_order(expr)
