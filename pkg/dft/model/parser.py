"""Reader for the line-oriented model format.

    // comment
    top SYSTEM;
    SYSTEM = or(PUMPS, pand(MS, MA));
    PUMPS = wsp(PA, PS, dormancy=0.3);
    fdep(TRIGGER; P, B);
    MA : exp(lambda=0.001);
    PS : weibull(shape=1.5, scale=800);

Parsing runs in two passes: statements are read into a small syntax tree
first, then gates are built once every distribution is known, because spare
gates need the law of their spare.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple, Union

from ..algebra.expr import (
    ALWAYS,
    NEVER,
    And,
    Basic,
    Before,
    Csp,
    FailureExpr,
    Fdep,
    GATE_NAMES,
    Hsp,
    InclBefore,
    Or,
    Pand,
    SharedSpare,
    Simult,
    Wsp,
    basics_in_order,
    substitute,
)
from ..distributions import Distribution, default_activation, dormant_variant, make_distribution
from ..distributions.families import check_dormancy
from ..errors import (
    CycleDetected,
    DftError,
    ModelSyntaxError,
    Redefined,
    Undefined,
)
from .model import DftModel, SpareMeta

logger = logging.getLogger("dft.model")

_TOKEN_RE = re.compile(
    r"""
    (?P<space>[ \t\r\f]+)
    |(?P<newline>\n)
    |(?P<comment>//[^\n]*)
    |(?P<number>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)
    |(?P<name>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<punct>[(),;=:])
    """,
    re.VERBOSE,
)

_GATES = {name: node for node, name in GATE_NAMES.items()}
_BINARY = {"pand": Pand, "before": Before, "ibefore": InclBefore, "simult": Simult}
_RESERVED = {"top", "always", "never"}

ACTIVE_SUFFIX = "_a"
DORMANT_SUFFIX = "_d"


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


@dataclass
class _Name:
    name: str
    line: int
    col: int


@dataclass
class _Const:
    value: FailureExpr
    line: int
    col: int


@dataclass
class _Call:
    gate: str
    args: List["_Node"]
    kwargs: Dict[str, Tuple[float, int, int]]
    line: int
    col: int


_Node = Union[_Name, _Const, _Call]


@dataclass
class _LawDecl:
    family: str
    params: Dict[str, float]
    dormancy: Optional[float]
    line: int
    col: int


@dataclass
class _FdepDecl:
    trigger: _Node
    deps: List[_Name]
    text: str
    line: int
    col: int


@dataclass
class _Statements:
    top: Optional[_Name] = None
    definitions: Dict[str, Tuple[_Node, int, int]] = field(default_factory=dict)
    laws: Dict[str, _LawDecl] = field(default_factory=dict)
    fdeps: List[_FdepDecl] = field(default_factory=list)


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if not match:
            raise ModelSyntaxError(line, col, "a name, number or one of ( ) , ; = :", text[pos])
        kind = match.lastgroup or ""
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind not in {"space", "comment"}:
            tokens.append(_Token(kind, match.group(), line, col))
        pos = match.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Reader:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self, offset: int = 0) -> _Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        token = self.peek()
        self.index = min(self.index + 1, len(self.tokens) - 1)
        return token

    def at(self, text: str) -> bool:
        token = self.peek()
        return token.kind in {"punct", "name"} and token.text == text

    def expect(self, text: str) -> _Token:
        token = self.peek()
        if token.text != text or token.kind == "eof":
            raise ModelSyntaxError(token.line, token.col, f"'{text}'", token.text or "end of input")
        return self.advance()

    def expect_name(self, what: str = "a name") -> _Token:
        token = self.peek()
        if token.kind != "name":
            raise ModelSyntaxError(token.line, token.col, what, token.text or "end of input")
        return self.advance()

    def expect_number(self) -> float:
        token = self.peek()
        if token.kind != "number":
            raise ModelSyntaxError(token.line, token.col, "a number", token.text or "end of input")
        self.advance()
        return float(token.text)

    # statements

    def statements(self) -> _Statements:
        result = _Statements()
        while self.peek().kind != "eof":
            token = self.peek()
            if token.kind != "name":
                raise ModelSyntaxError(token.line, token.col, "a statement", token.text)
            if token.text == "top":
                self.advance()
                if result.top is not None:
                    raise ModelSyntaxError(token.line, token.col, "a single top statement", "top")
                name = self.expect_name("the top event name")
                result.top = _Name(name.text, name.line, name.col)
                self.expect(";")
            elif token.text == "fdep" and self.peek(1).text == "(":
                result.fdeps.append(self._fdep_statement())
            elif self.peek(1).text == "=":
                self._check_new_name(result, token)
                self.advance()
                self.advance()
                expr = self.expression()
                self.expect(";")
                result.definitions[token.text] = (expr, token.line, token.col)
            elif self.peek(1).text == ":":
                self._check_new_name(result, token)
                self.advance()
                self.advance()
                result.laws[token.text] = self._law()
                self.expect(";")
            else:
                following = self.peek(1)
                raise ModelSyntaxError(
                    following.line, following.col, "'=' or ':'", following.text or "end of input"
                )
        return result

    def _check_new_name(self, result: _Statements, token: _Token) -> None:
        if token.text in _RESERVED:
            raise ModelSyntaxError(token.line, token.col, "a name that is not a keyword", token.text)
        if token.text in result.definitions or token.text in result.laws:
            raise Redefined(token.text)

    def _fdep_statement(self) -> _FdepDecl:
        start = self.advance()
        first = self.index
        self.expect("(")
        trigger = self.expression()
        self.expect(";")
        deps = []
        while True:
            name = self.expect_name("a dependent event name")
            deps.append(_Name(name.text, name.line, name.col))
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        last = self.index
        self.expect(";")
        text = "fdep" + "".join(_spaced(token) for token in self.tokens[first:last])
        return _FdepDecl(trigger, deps, text, start.line, start.col)

    def _law(self) -> _LawDecl:
        family = self.expect_name("a distribution family")
        self.expect("(")
        params: Dict[str, float] = {}
        dormancy: Optional[float] = None
        while True:
            key = self.expect_name("a parameter name")
            self.expect("=")
            value = self.expect_number()
            if key.text in params or (key.text == "dormancy" and dormancy is not None):
                raise ModelSyntaxError(key.line, key.col, "each parameter once", key.text)
            if key.text == "dormancy":
                dormancy = value
            else:
                params[key.text] = value
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        return _LawDecl(family.text, params, dormancy, family.line, family.col)

    # expressions

    def expression(self) -> _Node:
        token = self.expect_name("an expression")
        if token.text == "always":
            return _Const(ALWAYS, token.line, token.col)
        if token.text == "never":
            return _Const(NEVER, token.line, token.col)
        if not self.at("("):
            return _Name(token.text, token.line, token.col)
        gate = token.text.lower()
        if gate not in _GATES:
            raise ModelSyntaxError(token.line, token.col, "a gate name", token.text)
        self.advance()
        args: List[_Node] = []
        kwargs: Dict[str, Tuple[float, int, int]] = {}
        while True:
            if self.peek().kind == "name" and self.peek(1).text == "=":
                key = self.advance()
                self.advance()
                if key.text in kwargs:
                    raise ModelSyntaxError(key.line, key.col, "each keyword once", key.text)
                kwargs[key.text] = (self.expect_number(), key.line, key.col)
            else:
                if kwargs:
                    token_here = self.peek()
                    raise ModelSyntaxError(
                        token_here.line, token_here.col, "keywords after positional arguments",
                        token_here.text,
                    )
                args.append(self.expression())
            if not self.at(","):
                break
            self.advance()
        self.expect(")")
        return _Call(gate, args, kwargs, token.line, token.col)

    def expect_end(self) -> None:
        token = self.peek()
        if token.kind != "eof":
            raise ModelSyntaxError(token.line, token.col, "end of input", token.text)


def _spaced(token: _Token) -> str:
    if token.text in {",", ";"}:
        return token.text + " "
    return token.text


class _Builder:
    def __init__(
        self,
        laws: Optional[Dict[str, Distribution]] = None,
        law_dormancy: Optional[Dict[str, float]] = None,
        model_mode: bool = False,
        desugar: bool = False,
    ) -> None:
        self.laws = laws if laws is not None else {}
        self.law_dormancy = law_dormancy or {}
        self.model_mode = model_mode
        self.desugar = desugar
        self.definitions: Set[str] = set()
        self.spares: Dict[str, SpareMeta] = {}
        self.state_laws: Dict[str, Distribution] = {}
        self.consumed: Dict[str, str] = {}
        self.references: List[_Name] = []

    def build(self, node: _Node) -> FailureExpr:
        if isinstance(node, _Const):
            return node.value
        if isinstance(node, _Name):
            self.references.append(node)
            return Basic(node.name)
        return self._call(node)

    def _call(self, call: _Call) -> FailureExpr:
        gate = call.gate
        if call.kwargs and gate not in {"wsp", "sharedspare"}:
            key, (_, line, col) = next(iter(call.kwargs.items()))
            raise ModelSyntaxError(line, col, f"no keyword arguments to {gate}", key)
        if set(call.kwargs) - {"dormancy"}:
            key = sorted(set(call.kwargs) - {"dormancy"})[0]
            _, line, col = call.kwargs[key]
            raise ModelSyntaxError(line, col, "the keyword 'dormancy'", key)

        if gate in {"and", "or"}:
            operands = tuple(self.build(arg) for arg in call.args)
            return And(operands) if gate == "and" else Or(operands)
        if gate in _BINARY:
            left, right = self._arity(call, 2)
            return _BINARY[gate](self.build(left), self.build(right))
        if gate == "fdep":
            dep, trigger = self._arity(call, 2)
            dep_expr, trigger_expr = self.build(dep), self.build(trigger)
            if self.desugar:
                return Or((dep_expr, trigger_expr))
            return Fdep(dep_expr, trigger_expr)
        if gate == "hsp":
            main, spare = self._arity(call, 2)
            main_expr, spare_expr = self.build(main), self.build(spare)
            if self.desugar:
                return And((main_expr, spare_expr))
            return Hsp(main_expr, spare_expr)
        if gate == "csp":
            main, spare = self._arity(call, 2)
            main_expr = self.build(main)
            if self.model_mode:
                self._cold_spare(call, main_expr, spare)
            return Csp(main_expr, self.build(spare))
        if gate == "wsp":
            return self._wsp(call)
        return self._shared_spare(call)

    def _arity(self, call: _Call, count: int) -> List[_Node]:
        if len(call.args) != count:
            raise ModelSyntaxError(
                call.line, call.col, f"{count} arguments to {call.gate}", str(len(call.args))
            )
        return call.args

    def _alpha(self, call: _Call, spare: str) -> Optional[float]:
        if "dormancy" in call.kwargs:
            value, line, col = call.kwargs["dormancy"]
        elif spare in self.law_dormancy:
            value, line, col = self.law_dormancy[spare], call.line, call.col
        else:
            return None
        try:
            return check_dormancy(value)
        except ValueError as exc:
            raise ModelSyntaxError(line, col, "a dormancy factor in (0, 1]", repr(value)) from exc

    def _spare_name(self, call: _Call, node: _Node) -> str:
        if not isinstance(node, _Name) or node.name not in self.laws:
            line = getattr(node, "line", call.line)
            col = getattr(node, "col", call.col)
            found = node.name if isinstance(node, _Name) else "an expression"
            raise ModelSyntaxError(line, col, "a basic event with a distribution as the spare", found)
        return node.name

    def _claim(self, call: _Call, spare: str, owner: str) -> None:
        previous = self.consumed.get(spare)
        if previous is not None and previous != owner:
            raise ModelSyntaxError(call.line, call.col, "a spare not bound to another gate", spare)
        self.consumed[spare] = owner

    def _cold_spare(self, call: _Call, main: FailureExpr, spare_node: _Node) -> None:
        spare = self._spare_name(call, spare_node)
        self._claim(call, spare, f"csp:{main}")
        law = self.laws[spare]
        conditional = default_activation(law)
        self.spares[spare] = SpareMeta(
            name=spare,
            kind="cold",
            mains=(main,),
            active=spare,
            dormant=None,
            dormancy=0.0,
            law_tag=conditional.tag,
            conditional=conditional,
            active_law=law,
        )

    def _warm_states(self, call: _Call, spare: str, alpha: float) -> Tuple[str, str]:
        law = self.laws[spare]
        active, dormant = spare + ACTIVE_SUFFIX, spare + DORMANT_SUFFIX
        for state in (active, dormant):
            if state in self.laws or state in self.definitions:
                raise Redefined(state)
        self.state_laws[active] = law
        self.state_laws[dormant] = dormant_variant(law, alpha)
        return active, dormant

    def _wsp(self, call: _Call) -> FailureExpr:
        if len(call.args) == 3 and not call.kwargs:
            main, active, dormant = (self.build(arg) for arg in call.args)
            try:
                return Wsp(main, active, dormant)
            except ValueError as exc:
                raise ModelSyntaxError(call.line, call.col, "distinct spare states", str(dormant)) from exc
        if not self.model_mode or len(call.args) != 2:
            expected = "3 arguments to wsp" if not self.model_mode else "wsp(main, spare, dormancy=a)"
            raise ModelSyntaxError(call.line, call.col, expected, str(len(call.args)))
        main_node, spare_node = call.args
        main = self.build(main_node)
        spare = self._spare_name(call, spare_node)
        alpha = self._alpha(call, spare)
        if alpha is None:
            raise ModelSyntaxError(call.line, call.col, "dormancy=a for the warm spare", spare)
        self._claim(call, spare, f"wsp:{main}")
        active, dormant = self._warm_states(call, spare, alpha)
        law = self.laws[spare]
        conditional = default_activation(law)
        self.spares[spare] = SpareMeta(
            name=spare,
            kind="warm",
            mains=(main,),
            active=active,
            dormant=dormant,
            dormancy=alpha,
            law_tag=conditional.tag,
            conditional=conditional,
            active_law=law,
        )
        return Wsp(main, Basic(active), Basic(dormant))

    def _shared_spare(self, call: _Call) -> FailureExpr:
        if len(call.args) == 4 and not call.kwargs:
            main, other, active, dormant = (self.build(arg) for arg in call.args)
            return SharedSpare(main, other, active, dormant)
        if not self.model_mode or len(call.args) != 3:
            expected = (
                "4 arguments to sharedspare"
                if not self.model_mode
                else "sharedspare(main, other, spare[, dormancy=a])"
            )
            raise ModelSyntaxError(call.line, call.col, expected, str(len(call.args)))
        main_node, other_node, spare_node = call.args
        main, other = self.build(main_node), self.build(other_node)
        spare = self._spare_name(call, spare_node)
        alpha = self._alpha(call, spare)
        mains = (main, other)
        owner = "shared:" + ",".join(sorted(str(item) for item in mains))
        self._claim(call, spare, owner)
        existing = self.spares.get(spare)
        law = self.laws[spare]

        if alpha is None or alpha == 1.0:
            if existing is None:
                self.spares[spare] = SpareMeta(
                    name=spare,
                    kind="shared",
                    mains=mains,
                    active=spare,
                    dormant=spare,
                    dormancy=1.0,
                    law_tag="hot",
                    conditional=None,
                    active_law=law,
                )
            elif existing.dormancy != 1.0:
                raise ModelSyntaxError(call.line, call.col, "one dormancy per shared spare", spare)
            self.references.append(_Name(spare, call.line, call.col))
            return SharedSpare(main, other, Basic(spare), Basic(spare))

        if existing is None:
            active, dormant = self._warm_states(call, spare, alpha)
            conditional = default_activation(law)
            self.spares[spare] = SpareMeta(
                name=spare,
                kind="shared",
                mains=mains,
                active=active,
                dormant=dormant,
                dormancy=alpha,
                law_tag=conditional.tag,
                conditional=conditional,
                active_law=law,
            )
        elif existing.dormancy != alpha:
            raise ModelSyntaxError(call.line, call.col, "one dormancy per shared spare", spare)
        meta = self.spares[spare]
        return SharedSpare(main, other, Basic(meta.active), Basic(meta.dormant or meta.active))


def parse_expression(text: str, desugar: bool = False) -> FailureExpr:
    """Parse a single expression; every name becomes a basic event."""
    reader = _Reader(text)
    node = reader.expression()
    reader.expect_end()
    return _Builder(desugar=desugar).build(node)


def parse_model(text: str, desugar: bool = False) -> DftModel:
    statements = _Reader(text).statements()
    if statements.top is None:
        raise ModelSyntaxError(1, 1, "a 'top NAME;' statement", "none")

    laws: Dict[str, Distribution] = {}
    law_dormancy: Dict[str, float] = {}
    for name, decl in statements.laws.items():
        try:
            laws[name] = make_distribution(decl.family, decl.params)
        except (DftError, ValueError) as exc:
            raise ModelSyntaxError(decl.line, decl.col, "a valid distribution", str(exc)) from exc
        if decl.dormancy is not None:
            law_dormancy[name] = decl.dormancy

    builder = _Builder(laws, law_dormancy, model_mode=True, desugar=desugar)
    builder.definitions = set(statements.definitions)
    definitions: Dict[str, FailureExpr] = {}
    for name, (node, _, _) in statements.definitions.items():
        definitions[name] = builder.build(node)

    source_map: Dict[str, str] = {}
    dependents: Dict[str, List[FailureExpr]] = {}
    for decl in statements.fdeps:
        trigger = builder.build(decl.trigger)
        for dep in decl.deps:
            if dep.name == statements.top.name:
                raise ModelSyntaxError(dep.line, dep.col, "a dependent other than the top event", dep.name)
            builder.references.append(dep)
            dependents.setdefault(dep.name, []).append(trigger)
            source_map[dep.name] = decl.text

    _check_references(builder, statements, laws)

    if dependents:
        mapping = {name: Or((Basic(name), *triggers)) for name, triggers in dependents.items()}
        definitions = {name: substitute(expr, mapping) for name, expr in definitions.items()}

    basic_laws: Dict[str, Distribution] = {}
    declaration_order: List[str] = []
    warm = {meta.name: meta for meta in builder.spares.values() if not meta.hot and meta.dormant}
    for name in statements.laws:
        if name in warm:
            meta = warm[name]
            for state in (meta.active, meta.dormant):
                basic_laws[state] = builder.state_laws[state]
                declaration_order.append(state)
        else:
            basic_laws[name] = laws[name]
            declaration_order.append(name)

    _check_cycles(definitions)

    model = DftModel(
        top_name=statements.top.name,
        definitions=definitions,
        basic_laws=basic_laws,
        spare_meta=builder.spares,
        declaration_order=declaration_order,
        source_map=source_map,
    )
    logger.info(
        "Parsed model top=%s definitions=%d basics=%d spares=%d",
        model.top_name,
        len(definitions),
        len(basic_laws),
        len(builder.spares),
    )
    return model


def _check_references(builder: _Builder, statements: _Statements, laws: Dict[str, Distribution]) -> None:
    known = set(statements.definitions) | set(laws) | set(builder.state_laws)
    warm_spares = {
        meta.name for meta in builder.spares.values() if meta.dormant and not meta.hot
    }
    for ref in sorted(builder.references, key=lambda item: (item.line, item.col)):
        if ref.name in warm_spares:
            raise ModelSyntaxError(
                ref.line, ref.col, "a name not replaced by warm spare states", ref.name
            )
        if ref.name not in known:
            raise Undefined(ref.name)
    top = statements.top
    if top is not None and top.name not in statements.definitions and top.name not in laws:
        raise Undefined(top.name)


def _check_cycles(definitions: Dict[str, FailureExpr]) -> None:
    done: Set[str] = set()

    def visit(name: str, path: List[str]) -> None:
        if name in path:
            raise CycleDetected(path[path.index(name):] + [name])
        if name in done or name not in definitions:
            return
        path.append(name)
        for ref in basics_in_order(definitions[name]):
            visit(ref, path)
        path.pop()
        done.add(name)

    for name in definitions:
        visit(name, [])
