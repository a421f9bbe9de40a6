import pytest

from dft.algebra import ALWAYS, NEVER, And, Basic, Before, Fdep, Hsp, InclBefore, NameOrder, Or, Pand, Simult, Wsp
from dft.algebra.expr import size
from dft.analysis.evaluator import AnalyticPlan
from dft.errors import ModelSyntaxError, StepCapExceeded
from dft.model import parse_expression, parse_model
from dft.rewrite import (
    PatternRule,
    RewriteContext,
    check_equiv,
    check_rule,
    default_rules,
    load_rules,
    simplify,
    simplify_strict,
)
from dft.rewrite.rules import AbsorbOr, AndBeforeAbsorb, BeforeContra, DistributeAndOr, default_rule_list

XY = NameOrder(["X", "Y", "T"])


def test_fdep_becomes_or():
    assert simplify(Fdep(Basic("X"), Basic("T")), order=XY).expr == Or.of("X", "T")


def test_and_with_never():
    result = simplify(And.of("X", NEVER))
    assert result.expr == NEVER
    assert not result.capped


def test_hsp_becomes_and():
    order = NameOrder(["Y", "X"])
    assert simplify(Hsp(Basic("Y"), Basic("X")), order=order).expr == And.of("Y", "X")


def test_pand_becomes_and_with_before():
    assert simplify(Pand.of("X", "Y"), order=XY).expr == And.of("Y", Before.of("X", "Y"))


def test_warm_spare_expands_to_two_scenarios():
    expr = Wsp(Basic("Y"), Basic("A"), Basic("D"))
    result = simplify(expr, order=NameOrder(["Y", "A", "D"])).expr
    assert result == Or.of(And.of("Y", Before.of("D", "Y")), And.of("A", Before.of("Y", "A")))


def test_incl_before_absorbs_simult():
    rules = default_rules().without_distinct()
    expr = Or.of(InclBefore.of("X", "Y"), Simult.of("X", "Y"))
    assert simplify(expr, rules, XY).expr == InclBefore.of("X", "Y")


def test_simplify_is_idempotent():
    expr = parse_expression("or(and(X, or(Y, Z)), pand(Z, X), hsp(X, fdep(Y, T)), before(X, or(Y, never)))")
    once = simplify(expr).expr
    assert simplify(once).expr == once


@pytest.mark.parametrize(
    "text",
    [
        "or(and(X, or(Y, Z)), pand(Z, X))",
        "before(and(X, Y), or(Z, always))",
        "ibefore(or(X, Y), and(Y, Z))",
        "and(X, before(X, Y), or(simult(X, Y), ibefore(Y, X)))",
        "hsp(fdep(X, T), fdep(Y, T))",
        "wsp(Y, A, D)",
        "sharedspare(X, Y, A, D)",
        "csp(X, Y)",
    ],
)
def test_simplify_preserves_semantics(text):
    expr = parse_expression(text)
    general = simplify(expr, default_rules().without_distinct()).expr
    assert check_equiv(expr, general, 2000, 11)
    distinct = simplify(expr).expr
    assert check_equiv(expr, distinct, 2000, 11, distinct=True)


PATTERN_RULES = [r for r in default_rule_list() if isinstance(r, PatternRule)]


@pytest.mark.parametrize("rule", PATTERN_RULES, ids=lambda r: r.name)
def test_shipped_rules_are_sound(rule):
    assert check_rule(rule, trials=1000, seed=5)


@pytest.mark.parametrize(
    "rule, expr",
    [
        (AbsorbOr(), Or.of("A", And.of("A", "B"), And.of("B", Before.of("A", "B")))),
        (AndBeforeAbsorb(), And.of("A", "C", Before.of("A", "B"))),
        (BeforeContra(), And.of("C", Before.of("A", "B"), Before.of("B", "A"))),
    ],
)
def test_lattice_rules_are_sound(rule, expr):
    rewritten = rule.apply(expr, RewriteContext())
    assert rewritten is not None and rewritten != expr
    assert check_equiv(expr, rewritten, 2000, 3)


def test_distinct_rules_skip_identical_arguments():
    rule = default_rules().rule("simult-never")
    ctx = RewriteContext()
    assert rule.apply(Simult.of("X", "X"), ctx) is None
    assert rule.apply(Simult(And.of("A", "B"), Basic("C")), ctx) is None
    assert rule.apply(Simult.of("X", "Y"), ctx) == NEVER
    assert simplify(Simult.of("X", "X")).expr == Basic("X")


def test_without_distinct_keeps_ties():
    expr = Simult.of("X", "Y")
    assert simplify(expr, default_rules().without_distinct()).expr == expr
    assert simplify(expr).expr == NEVER


def test_associative_match_keeps_other_operands():
    assert simplify(Or.of("A", "B", NEVER)).expr == Or.of("A", "B")
    assert simplify(And.of("A", "B", ALWAYS)).expr == And.of("A", "B")


def test_step_cap():
    expr = parse_expression("and(hsp(X, Y), fdep(Z, T), pand(X, Z))")
    capped = simplify(expr, default_rules(step_cap=1))
    assert capped.capped
    assert capped.steps == 1
    assert check_equiv(expr, capped.expr, 500, 1)
    with pytest.raises(StepCapExceeded) as info:
        simplify_strict(expr, default_rules(step_cap=1))
    assert info.value.partial == capped.expr


def test_trace_names_rules():
    result = simplify(Fdep(Basic("X"), Basic("T")), order=XY)
    assert "fdep-or" in result.trace


def test_check_equiv_examples():
    assert check_equiv(Hsp(Basic("Y"), Basic("X")), And.of("Y", "X"), 1000, 7)
    verdict = check_equiv(Pand.of("X", "Y"), Pand.of("Y", "X"), 1000, 7)
    assert not verdict
    assert verdict.left != verdict.right
    assert check_equiv(Basic("X"), Or.of("X", "X"), 10, 0)


def test_check_equiv_is_deterministic():
    a = check_equiv(Before.of("X", "Y"), InclBefore.of("X", "Y"), 500, 9)
    b = check_equiv(Before.of("X", "Y"), InclBefore.of("X", "Y"), 500, 9)
    assert not a
    assert a.counterexample == b.counterexample
    # ties are what separate the two
    assert a.counterexample["X"] == a.counterexample["Y"]


def test_check_equiv_rejects_zero_trials():
    with pytest.raises(ValueError):
        check_equiv(Basic("X"), Basic("X"), 0, 0)


def test_load_rules():
    rules = load_rules(
        """
        // custom
        pand-never: pand(X, never) => never
        merge: or(and(X, before(Z, X)), and(Z, before(X, Z))) => and(X, Z) where distinct-basics(X, Z)
        """
    )
    assert [r.name for r in rules] == ["pand-never", "merge"]
    assert rules[1].requires_distinct
    assert not rules[0].requires_distinct
    extended = default_rules().extend(rules)
    assert simplify(Pand.of("A", NEVER), extended).expr == NEVER


def test_load_rules_errors():
    with pytest.raises(ModelSyntaxError) as info:
        load_rules("ok: and(X, X) => X\nbroken line\n")
    assert info.value.line == 2
    with pytest.raises(ModelSyntaxError):
        load_rules("bad: and(X, Y) => Z")
    with pytest.raises(ModelSyntaxError) as info:
        load_rules("bad: and(X, ) => X")
    assert info.value.line == 1


def test_distribution_expands_small_products():
    rule = DistributeAndOr()
    expr = And.of("C", Or.of("A", "B"), Or.of("D", "E"))
    rewritten = rule.apply(expr, RewriteContext())
    assert isinstance(rewritten, Or) and len(rewritten.operands) == 4
    assert check_equiv(expr, rewritten, 2000, 3)
    assert rule.apply(And.of("A", "B"), RewriteContext()) is None


def test_distribution_skips_large_products():
    wide = And(tuple(Or.of(f"A{i}", f"B{i}") for i in range(7)))
    assert DistributeAndOr().apply(wide, RewriteContext()) is None
    assert DistributeAndOr(max_products=128, max_nodes=10_000).apply(wide, RewriteContext()) is not None


def test_nested_disjunctions_stay_bounded():
    expr = Or.of("A9", "B9")
    for i in range(8, -1, -1):
        expr = And.of(Or.of(f"A{i}", f"B{i}"), expr)
    result = simplify(expr)
    assert not result.capped
    assert size(result.expr) <= 200
    assert check_equiv(expr, result.expr, 1000, 2)


def test_wide_conjunction_of_disjunctions_is_left_factored():
    expr = And(tuple(Or.of(f"A{i}", f"B{i}") for i in range(12)))
    result = simplify(expr)
    assert not result.capped
    assert size(result.expr) == size(expr)


def test_capped_plan_raises():
    model = parse_model("top T; T = and(hsp(X, Y), fdep(Z, W), pand(X, Z)); X : exp(lambda=1); Y : exp(lambda=1); Z : exp(lambda=1); W : exp(lambda=1);")
    with pytest.raises(StepCapExceeded) as info:
        AnalyticPlan(model, rules=default_rules(step_cap=1))
    assert info.value.steps == 1
