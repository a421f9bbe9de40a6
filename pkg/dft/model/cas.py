"""Built-in cardiac assist system benchmark.

Ten components in three subsystems: the pumps share one spare pump, the
motor unit has a switch that must not fail before the primary motor, and the
CPU unit depends on a cross switch and a system supervisor. All spares are
hot.

Component failure rates are placeholders chosen for the benchmark; override
them per component.
"""
from __future__ import annotations

from typing import Dict, Mapping, Optional

from ..algebra.expr import And, Basic, Before, FailureExpr, NameOrder, Or
from .model import DftModel
from .parser import parse_model

CAS_ORDER = ("CS", "SS", "MA", "MS", "MB", "P", "B", "PA", "PB", "PS")

CAS_RATES: Dict[str, float] = {
    "CS": 2e-4,
    "SS": 2e-4,
    "MA": 1e-3,
    "MS": 1e-3,
    "MB": 1e-3,
    "P": 5e-4,
    "B": 5e-4,
    "PA": 1e-3,
    "PB": 1e-3,
    "PS": 1e-3,
}

CAS_TIMES = (100.0, 500.0, 1000.0)

_CAS_TEMPLATE = """\
// cardiac assist system, all spares hot
top CAS;
CAS = or(PUMPS, pand(MS, MA), hsp(MA, MB), CPUS);
PUMPS = and(sharedspare(PA, PB, PS), sharedspare(PB, PA, PS));
CPUS = hsp(fdep(P, TRIGGER), fdep(B, TRIGGER));
TRIGGER = or(CS, SS);
{laws}
"""


def cas_model_text(rates: Optional[Mapping[str, float]] = None) -> str:
    merged = dict(CAS_RATES)
    for name, rate in (rates or {}).items():
        if name not in merged:
            raise KeyError(f"Unknown CAS component: {name}")
        merged[name] = float(rate)
    laws = "\n".join(f"{name} : exp(lambda={merged[name]!r});" for name in CAS_ORDER)
    return _CAS_TEMPLATE.format(laws=laws)


def cas_model(rates: Optional[Mapping[str, float]] = None) -> DftModel:
    return parse_model(cas_model_text(rates))


def cas_reduced_form() -> FailureExpr:
    order = NameOrder(CAS_ORDER)
    terms = [
        Basic("CS"),
        Basic("SS"),
        And.of("MA", Before.of("MS", "MA")),
        And.of("MA", "MB"),
        And.of("P", "B"),
        And.of("PA", "PB", "PS"),
    ]
    return Or(order.sort(terms))
