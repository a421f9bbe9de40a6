"""Evaluable atoms and the matcher from conjunctions to atoms.

A conjunction of basic events and ``before`` literals is split into groups
of events that share no randomness. Each group must match one atom; the
conjunction's probability is the product of its atoms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..algebra.expr import ALWAYS, NEVER, And, Basic, Before, FailureExpr, InclBefore
from ..distributions import ConditionalLaw, Distribution
from ..errors import UnmatchedPattern
from ..model.model import DftModel, SpareMeta
from .gates import after_prob, before_prob, cdf_prob, csp_prob, wsp_prob
from .quadrature import Estimate, QuadratureConfig


class Atom:
    quadrature: bool = True

    def events(self) -> Tuple[str, ...]:
        raise NotImplementedError

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        raise NotImplementedError


@dataclass(frozen=True)
class CdfAtom(Atom):
    event: str
    law: Distribution = field(compare=False, repr=False)

    quadrature = False

    def events(self) -> Tuple[str, ...]:
        return (self.event,)

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        return cdf_prob(self.law, t)


@dataclass(frozen=True)
class ProductAtom(Atom):
    names: Tuple[str, ...]
    laws: Tuple[Distribution, ...] = field(compare=False, repr=False)

    quadrature = False

    def events(self) -> Tuple[str, ...]:
        return self.names

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        value = 1.0
        for law in self.laws:
            value *= cdf_prob(law, t).value
        return Estimate(value, 0.0)


@dataclass(frozen=True)
class AfterAtom(Atom):
    """Y . (X < Y): both failed, X first."""

    x: str
    y: str
    x_law: Distribution = field(compare=False, repr=False)
    y_law: Distribution = field(compare=False, repr=False)

    def events(self) -> Tuple[str, ...]:
        return (self.x, self.y)

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        return after_prob(self.x_law, self.y_law, t, cfg)


@dataclass(frozen=True)
class BeforeAtom(Atom):
    x: str
    y: str
    x_law: Distribution = field(compare=False, repr=False)
    y_law: Distribution = field(compare=False, repr=False)

    def events(self) -> Tuple[str, ...]:
        return (self.x, self.y)

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        return before_prob(self.x_law, self.y_law, t, cfg)


@dataclass(frozen=True)
class CspAtom(Atom):
    main: str
    spare: str
    dormant: Optional[str] = None
    main_law: Optional[Distribution] = field(default=None, compare=False, repr=False)
    conditional: Optional[ConditionalLaw] = field(default=None, compare=False, repr=False)
    dormant_law: Optional[Distribution] = field(default=None, compare=False, repr=False)

    def events(self) -> Tuple[str, ...]:
        names = (self.main, self.spare)
        return names + (self.dormant,) if self.dormant else names

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        return csp_prob(self.main_law, self.conditional, t, cfg, dormant=self.dormant_law)


@dataclass(frozen=True)
class WspAtom(Atom):
    main: str
    active: str
    dormant: str
    main_law: Optional[Distribution] = field(default=None, compare=False, repr=False)
    conditional: Optional[ConditionalLaw] = field(default=None, compare=False, repr=False)
    dormant_law: Optional[Distribution] = field(default=None, compare=False, repr=False)

    def events(self) -> Tuple[str, ...]:
        return (self.main, self.active, self.dormant)

    def compute(self, t: float, cfg: QuadratureConfig) -> Estimate:
        return wsp_prob(self.main_law, self.conditional, self.dormant_law, t, cfg)


def wsp_atom(model: DftModel, meta: SpareMeta) -> WspAtom:
    main = _main_name(meta, model)
    return WspAtom(
        main,
        meta.active,
        meta.dormant,
        model.law(main),
        meta.conditional,
        model.law(meta.dormant),
    )


# matching

Factors = Tuple[Atom, ...]


def _literal(factor: FailureExpr, whole: FailureExpr) -> Tuple[Optional[str], Optional[Tuple[str, str]]]:
    if isinstance(factor, Basic):
        return factor.name, None
    if isinstance(factor, (Before, InclBefore)):
        if isinstance(factor.left, Basic) and isinstance(factor.right, Basic):
            return None, (factor.left.name, factor.right.name)
    raise UnmatchedPattern(whole, f"factor {factor} is not a basic event or a before of basic events")


def _main_name(meta: SpareMeta, model: DftModel) -> str:
    if len(meta.mains) != 1:
        raise UnmatchedPattern(meta.name, "spare shared between mains with a dormant state")
    main = model.resolve_expr(meta.mains[0])
    if not isinstance(main, Basic):
        raise UnmatchedPattern(main, f"main of spare {meta.name} is not a basic event")
    return main.name


class _Groups:
    def __init__(self) -> None:
        self.parent: Dict[str, str] = {}

    def find(self, name: str) -> str:
        self.parent.setdefault(name, name)
        while self.parent[name] != name:
            self.parent[name] = self.parent[self.parent[name]]
            name = self.parent[name]
        return name

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def match_conjunction(expr: FailureExpr, model: DftModel) -> Optional[Factors]:
    """Atoms whose product is Pr(expr by t), or None when ``expr`` is impossible."""
    if expr == NEVER:
        return None
    if expr == ALWAYS:
        return ()
    factors = [item for item in (expr.operands if isinstance(expr, And) else (expr,)) if item != ALWAYS]
    if NEVER in factors:
        return None
    owners = {
        state: meta for state, meta in model.state_owners().items() if not meta.hot
    }
    groups = _Groups()
    literals = []
    for factor in factors:
        name, pair = _literal(factor, expr)
        literals.append((name, pair))
        names = (name,) if name else pair
        for item in names:
            groups.find(item)
        if pair:
            groups.union(*pair)
    for item in list(groups.parent):
        meta = owners.get(item)
        if meta is None:
            continue
        if meta.kind == "shared":
            raise UnmatchedPattern(expr, f"spare {meta.name} is shared with a dormant state")
        groups.union(item, _main_name(meta, model))

    grouped: Dict[str, List[Tuple[Optional[str], Optional[Tuple[str, str]]]]] = {}
    for literal in literals:
        name, pair = literal
        grouped.setdefault(groups.find(name or pair[0]), []).append(literal)

    cdfs: List[CdfAtom] = []
    atoms: List[Atom] = []
    for members in grouped.values():
        atom = _match_group(members, expr, model, owners)
        if atom is None:
            return None
        if isinstance(atom, CdfAtom):
            cdfs.append(atom)
        else:
            atoms.append(atom)
    if len(cdfs) > 1:
        atoms.insert(0, ProductAtom(tuple(a.event for a in cdfs), tuple(a.law for a in cdfs)))
    elif cdfs:
        atoms.insert(0, cdfs[0])
    return tuple(atoms)


def _match_group(
    members: Sequence[Tuple[Optional[str], Optional[Tuple[str, str]]]],
    whole: FailureExpr,
    model: DftModel,
    owners: Dict[str, SpareMeta],
) -> Optional[Atom]:
    required = {name for name, _ in members if name}
    pairs = {pair for _, pair in members if pair}
    names = set(required)
    for pair in pairs:
        names.update(pair)
    spares = {owners[name].name: owners[name] for name in names if name in owners}
    if len(spares) > 1:
        raise UnmatchedPattern(whole, "events of several spares depend on each other")

    if not spares:
        if not pairs and len(required) == 1:
            (name,) = required
            return CdfAtom(name, model.law(name))
        if len(pairs) == 1:
            ((x, y),) = pairs
            if required <= {x, y}:
                if y in required:
                    return AfterAtom(x, y, model.law(x), model.law(y))
                return BeforeAtom(x, y, model.law(x), model.law(y))
        raise UnmatchedPattern(whole, f"no atom for the events {sorted(names)}")

    (meta,) = spares.values()
    main = _main_name(meta, model)
    active, dormant = meta.active, meta.dormant
    if active in names:
        if dormant is not None and dormant in names:
            # a spare fails in one state only
            return None
        if active in required and required <= {active, main} and pairs <= {(main, active)}:
            return CspAtom(
                main,
                active,
                dormant,
                model.law(main),
                meta.conditional,
                model.law(dormant) if dormant else None,
            )
    elif dormant is not None and dormant in names:
        if required <= {dormant, main} and pairs <= {(dormant, main)}:
            if main in required:
                return AfterAtom(dormant, main, model.law(dormant), model.law(main))
            return BeforeAtom(dormant, main, model.law(dormant), model.law(main))
    raise UnmatchedPattern(whole, f"no atom for the events {sorted(names)} of spare {meta.name}")
