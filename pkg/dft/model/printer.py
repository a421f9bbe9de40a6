from __future__ import annotations

from typing import Dict, List

from ..algebra.expr import GATE_NAMES, Basic, FailureExpr, SharedSpare, Wsp, format_expr
from .model import DftModel, SpareMeta


def _gate_text(expr: FailureExpr, states: Dict[str, SpareMeta]) -> str:
    if isinstance(expr, Wsp) and isinstance(expr.active, Basic):
        meta = states.get(expr.active.name)
        if meta is not None and meta.kind == "warm":
            main = _gate_text(expr.main, states)
            return f"wsp({main}, {meta.name}, dormancy={meta.dormancy!r})"
    if isinstance(expr, SharedSpare) and isinstance(expr.active, Basic):
        meta = states.get(expr.active.name)
        if meta is not None and meta.kind == "shared":
            main = _gate_text(expr.main, states)
            other = _gate_text(expr.other_main, states)
            if meta.hot:
                return f"sharedspare({main}, {other}, {meta.name})"
            return f"sharedspare({main}, {other}, {meta.name}, dormancy={meta.dormancy!r})"
    children = expr.children()
    if not children:
        return format_expr(expr)
    name = GATE_NAMES[type(expr)]
    return f"{name}({', '.join(_gate_text(child, states) for child in children)})"


def print_expression(expr: FailureExpr, model: DftModel) -> str:
    return _gate_text(expr, model.state_owners())


def print_model(model: DftModel) -> str:
    states = model.state_owners()
    lines: List[str] = [f"top {model.top_name};"]
    for name, expr in model.definitions.items():
        lines.append(f"{name} = {_gate_text(expr, states)};")

    written = set()
    for name in model.declaration_order:
        meta = states.get(name)
        if meta is not None and meta.kind in {"warm", "shared"} and not meta.hot:
            if meta.name in written:
                continue
            written.add(meta.name)
            lines.append(f"{meta.name} : {meta.active_law.to_literal()};")
            continue
        lines.append(f"{name} : {model.basic_laws[name].to_literal()};")
    return "\n".join(lines) + "\n"
