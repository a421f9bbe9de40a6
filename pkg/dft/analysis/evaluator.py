"""Analytic Pr(top fails by t): simplify, split into a union, expand, integrate."""
from __future__ import annotations

import itertools
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..algebra.expr import ALWAYS, NEVER, And, Basic, Before, FailureExpr, Or
from ..errors import NumericalBoundViolation, StepCapExceeded
from ..model.model import DftModel, SpareMeta
from ..rewrite.engine import RuleSet, default_rules, simplify
from .atoms import Atom, Factors, match_conjunction, wsp_atom
from .gates import _check_time
from .pie import DEFAULT_MAX_TERMS, PieTerm, pie_expand
from .quadrature import Estimate, QuadratureConfig

logger = logging.getLogger("dft.analysis")

MODES = ("exact", "paper")
BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class UnionTerm:
    # a fused warm-spare term carries both disjoint scenarios
    expr: FailureExpr
    scenarios: Tuple[FailureExpr, ...]
    spare: Optional[SpareMeta] = None


@dataclass
class Contribution:
    mask: int
    sign: int
    value: float


@dataclass
class ProbResult:
    value: float
    t: float
    method: str = "analytic"
    quad_error: float = 0.0
    mc_half_width: Optional[float] = None
    mode: str = "exact"
    term_count: int = 0
    union_size: int = 0
    contributions: List[Contribution] = field(default_factory=list)


def _operands(expr: FailureExpr) -> Tuple[FailureExpr, ...]:
    return expr.operands if isinstance(expr, Or) else (expr,)


def union_terms(expr: FailureExpr, model: DftModel) -> List[UnionTerm]:
    """Split a simplified expression into union events, fusing warm-spare scenario pairs."""
    if expr == NEVER:
        return []
    terms = list(_operands(expr))
    fused: Dict[int, UnionTerm] = {}
    consumed = set()
    for meta in model.spare_meta.values():
        if meta.kind != "warm" or meta.hot or len(meta.mains) != 1:
            continue
        main = model.resolve_expr(meta.mains[0])
        if not isinstance(main, Basic):
            continue
        dormant_first = frozenset((main, Before(Basic(meta.dormant), main)))
        activated = frozenset((Basic(meta.active), Before(main, Basic(meta.active))))
        positions = {}
        for index, term in enumerate(terms):
            if isinstance(term, And) and frozenset(term.operands) in (dormant_first, activated):
                positions[frozenset(term.operands)] = index
        if len(positions) != 2:
            continue
        first, second = sorted(positions.values())
        pair = (terms[first], terms[second])
        fused[first] = UnionTerm(Or(pair), pair, meta)
        consumed.add(second)
    return [
        fused.get(index, UnionTerm(term, (term,)))
        for index, term in enumerate(terms)
        if index not in consumed
    ]


class AnalyticPlan:
    """Everything about an analysis that does not depend on ``t``.

    Building the plan simplifies the top event, expands the union and matches
    every intersection to atoms. ``evaluate`` then integrates each distinct
    atom once per time point.
    """

    def __init__(
        self,
        model: DftModel,
        mode: str = "exact",
        max_terms: int = DEFAULT_MAX_TERMS,
        rules: Optional[RuleSet] = None,
        workers: int = 1,
    ) -> None:
        if mode not in MODES:
            raise ValueError(f"intersection mode must be one of {', '.join(MODES)}, got {mode!r}")
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        self.model = model
        self.mode = mode
        self.rules = rules or default_rules()
        self.workers = workers
        self.order = model.name_order()
        simplified = simplify(model.top_expr(), self.rules, self.order)
        if simplified.capped:
            raise StepCapExceeded(simplified.expr, simplified.steps)
        logger.info("Simplified top in %d steps", simplified.steps)
        self.expr = simplified.expr
        self.terms: List[UnionTerm] = []
        self.pie: List[PieTerm[int]] = []
        self.products: List[List[Factors]] = []
        if self.expr == ALWAYS:
            return
        self.terms = union_terms(self.expr, model)
        if not self.terms:
            return
        self.pie = pie_expand(list(range(len(self.terms))), max_terms)
        if mode == "paper":
            singles = [self._term_factors(term) for term in self.terms]
            for subset in self.pie:
                chosen = [singles[i] for i in subset.members]
                if any(item is None for item in chosen):
                    self.products.append([])
                else:
                    self.products.append([tuple(itertools.chain.from_iterable(chosen))])
        else:
            cache: Dict[FailureExpr, Optional[Factors]] = {}
            for subset in self.pie:
                self.products.append(
                    intersection_factors([self.terms[i] for i in subset.members], model, self.rules, cache)
                )
        self.uses: Counter = Counter(
            atom
            for products in self.products
            for factors in products
            for atom in factors
            if atom.quadrature
        )
        logger.info(
            "PIE plan: mode=%s terms=%d subsets=%d quadrature atoms=%d (uses=%d)",
            mode,
            len(self.terms),
            len(self.pie),
            len(self.uses),
            sum(self.uses.values()),
        )

    @property
    def term_count(self) -> int:
        return len(self.pie)

    def _term_factors(self, term: UnionTerm) -> Optional[Factors]:
        if term.spare is not None:
            return (wsp_atom(self.model, term.spare),)
        return match_conjunction(term.expr, self.model)

    def evaluate(self, t: float, cfg: Optional[QuadratureConfig] = None) -> ProbResult:
        cfg = cfg or QuadratureConfig()
        t = _check_time(t)
        if self.expr == ALWAYS:
            return ProbResult(1.0, t, mode=self.mode)
        if not self.terms:
            return ProbResult(0.0, t, mode=self.mode)

        values = self._atom_values(t, cfg)
        total = 0.0
        error = 0.0
        contributions: List[Contribution] = []
        for subset, products in zip(self.pie, self.products):
            subset_value = 0.0
            for factors in products:
                product = 1.0
                for atom in factors:
                    estimate = values[atom]
                    product *= estimate.value
                    error += estimate.error
                subset_value += product
            contribution = subset.sign * subset_value
            contributions.append(Contribution(subset.mask, subset.sign, contribution))
            total += contribution

        if not -error - BOUND_SLACK <= total <= 1.0 + error + BOUND_SLACK:
            raise NumericalBoundViolation(
                f"probability {total!r} at t={t} outside [0, 1] beyond error {error:g}"
            )
        return ProbResult(
            value=total,
            t=t,
            quad_error=error,
            mode=self.mode,
            term_count=len(self.pie),
            union_size=len(self.terms),
            contributions=contributions,
        )

    def _atom_values(self, t: float, cfg: QuadratureConfig) -> Dict[Atom, Estimate]:
        total_uses = sum(self.uses.values())
        atom_cfg = cfg.with_tol(cfg.tol / total_uses) if total_uses else cfg
        atoms = list(
            dict.fromkeys(atom for products in self.products for factors in products for atom in factors)
        )

        def compute(atom: Atom) -> Estimate:
            estimate = atom.compute(t, atom_cfg)
            logger.debug("atom %s t=%s value=%.15g error=%.3g", atom, t, estimate.value, estimate.error)
            return estimate

        if self.workers > 1 and len(atoms) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                estimates = list(pool.map(compute, atoms))
        else:
            estimates = [compute(atom) for atom in atoms]
        return dict(zip(atoms, estimates))


def intersection_factors(
    terms: Sequence[UnionTerm],
    model: DftModel,
    rules: Optional[RuleSet] = None,
    cache: Optional[Dict[FailureExpr, Optional[Factors]]] = None,
) -> List[Factors]:
    rules = rules or default_rules()
    cache = {} if cache is None else cache
    order = model.name_order()
    products: List[Factors] = []
    for choice in itertools.product(*(term.scenarios for term in terms)):
        conjunction = And.of(*choice) if len(choice) > 1 else choice[0]
        if conjunction not in cache:
            merged = simplify(conjunction, rules, order).expr
            cache[conjunction] = match_conjunction(merged, model)
        factors = cache[conjunction]
        if factors is not None:
            products.append(factors)
    return products


def intersect_prob(
    model: DftModel,
    terms: Sequence[FailureExpr],
    t: float,
    cfg: Optional[QuadratureConfig] = None,
    mode: str = "exact",
) -> Estimate:
    """Pr(every expression in ``terms`` has occurred by t)."""
    if mode not in MODES:
        raise ValueError(f"intersection mode must be one of {', '.join(MODES)}, got {mode!r}")
    cfg = cfg or QuadratureConfig()
    t = _check_time(t)
    union = [UnionTerm(term, (term,)) for term in terms]
    if mode == "paper":
        products: List[Factors] = []
        chosen = []
        for term in union:
            factors = match_conjunction(term.expr, model)
            if factors is None:
                return Estimate(0.0, 0.0)
            chosen.extend(factors)
        products.append(tuple(chosen))
    else:
        products = intersection_factors(union, model)
    uses = sum(1 for factors in products for atom in factors if atom.quadrature)
    atom_cfg = cfg.with_tol(cfg.tol / uses) if uses else cfg
    cache: Dict[Atom, Estimate] = {}
    total = Estimate(0.0, 0.0)
    for factors in products:
        value, error = 1.0, 0.0
        for atom in factors:
            if atom not in cache:
                cache[atom] = atom.compute(t, atom_cfg)
            value *= cache[atom].value
            error += cache[atom].error
        total = total + Estimate(value, error)
    return total


def dft_event_prob(
    model: DftModel,
    t: float,
    cfg: Optional[QuadratureConfig] = None,
    mode: str = "exact",
    max_terms: int = DEFAULT_MAX_TERMS,
    workers: int = 1,
    rules: Optional[RuleSet] = None,
) -> ProbResult:
    """Probability that the top event has occurred by ``t``."""
    return AnalyticPlan(model, mode, max_terms, rules, workers).evaluate(t, cfg)
