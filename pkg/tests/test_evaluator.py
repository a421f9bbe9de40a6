import math

import pytest
from conftest import AND2, CSP1, OR2, PAND2, WSP1, exp_cdf

from dft.algebra import And, Basic, Before
from dft.analysis import (
    AfterAtom,
    CspAtom,
    ProductAtom,
    QuadratureConfig,
    after_prob,
    dft_event_prob,
    intersect_prob,
    match_conjunction,
    pie_expand,
    union_terms,
    wsp_prob,
)
from dft.analysis.evaluator import AnalyticPlan
from dft.distributions import dormant_variant, exponential, memoryless_activation
from dft.errors import TermExplosion, UnmatchedPattern
from dft.model import DftModel, parse_model

SINGLE = "top T; T = A; A : exp(lambda=1);"


def test_single_basic():
    result = dft_event_prob(parse_model(SINGLE), 1.0)
    assert result.value == pytest.approx(0.6321206, abs=1e-7)
    assert result.value == pytest.approx(1 - math.exp(-1), abs=1e-10)
    assert result.term_count == 1
    assert result.quad_error == 0.0


def test_and_closed_form():
    result = dft_event_prob(parse_model(AND2), 1.0)
    assert result.value == pytest.approx(exp_cdf(1, 1) * exp_cdf(2, 1), abs=1e-12)


def test_or_through_inclusion_exclusion():
    result = dft_event_prob(parse_model(OR2), 1.0)
    fa, fb = exp_cdf(1, 1), exp_cdf(2, 1)
    assert result.value == pytest.approx(fa + fb - fa * fb, abs=1e-12)
    assert result.term_count == 3
    assert [c.mask for c in result.contributions] == [1, 2, 3]
    assert [c.sign for c in result.contributions] == [1, 1, -1]
    assert sum(c.value for c in result.contributions) == pytest.approx(result.value, abs=1e-15)


@pytest.mark.parametrize("text", [AND2, OR2, PAND2, CSP1, WSP1])
def test_zero_time(text):
    assert dft_event_prob(parse_model(text), 0.0).value == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("text", [OR2, PAND2, CSP1, WSP1])
def test_monotone_in_time(text):
    plan = AnalyticPlan(parse_model(text))
    values = [plan.evaluate(t).value for t in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0)]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    assert all(-1e-9 <= v <= 1 + 1e-9 for v in values)


def test_pand_model(quad):
    result = dft_event_prob(parse_model(PAND2), 1.0)
    expected = after_prob(exponential(1.0), exponential(2.0), 1.0, quad).value
    assert result.value == pytest.approx(expected, abs=1e-9)


def test_cold_spare_model():
    result = dft_event_prob(parse_model(CSP1), 1.0)
    assert result.value == pytest.approx(1 - 2 / math.e, abs=1e-9)


def test_warm_spare_model_is_fused(quad):
    model = parse_model(WSP1)
    plan = AnalyticPlan(model)
    assert len(plan.terms) == 1
    assert plan.terms[0].spare is not None
    law = exponential(1.0)
    expected = wsp_prob(law, memoryless_activation(law), dormant_variant(law, 0.5), 1.0, quad).value
    for mode in ("exact", "paper"):
        assert dft_event_prob(model, 1.0, mode=mode).value == pytest.approx(expected, abs=1e-9)


def test_warm_spare_with_independent_event(quad):
    text = WSP1.replace("T = wsp(Y, S, dormancy=0.5);", "T = or(wsp(Y, S, dormancy=0.5), Z);") + "Z : exp(lambda=0.5);\n"
    model = parse_model(text)
    law = exponential(1.0)
    w = wsp_prob(law, memoryless_activation(law), dormant_variant(law, 0.5), 1.0, quad).value
    fz = exp_cdf(0.5, 1.0)
    result = dft_event_prob(model, 1.0)
    assert result.union_size == 2
    assert result.value == pytest.approx(w + fz - w * fz, abs=1e-9)


def test_warm_spare_or_main_is_main():
    text = WSP1.replace("T = wsp(Y, S, dormancy=0.5);", "T = or(wsp(Y, S, dormancy=0.5), Y);")
    assert dft_event_prob(parse_model(text), 1.0).value == pytest.approx(exp_cdf(1, 1), abs=1e-12)


def test_spare_states_are_exclusive():
    model = parse_model(WSP1)
    scenarios = [And.of("Y", Before.of("S_d", "Y")), And.of("S_a", Before.of("Y", "S_a"))]
    assert intersect_prob(model, scenarios, 1.0).value == 0.0


def _cas_like_model() -> DftModel:
    laws = {name: exponential(rate) for name, rate in (("MA", 1.0), ("MS", 2.0), ("MB", 0.5), ("P", 1.5), ("B", 0.7), ("PA", 1.0), ("PB", 1.2), ("PS", 0.8))}
    return DftModel.from_expression(Basic("MA"), laws)


def test_intersection_of_disjoint_terms(quad):
    model = _cas_like_model()
    t = 0.8
    value = intersect_prob(model, [And.of("P", "B"), And.of("PA", "PB", "PS")], t).value
    expected = exp_cdf(1.5, t) * exp_cdf(0.7, t) * exp_cdf(1.0, t) * exp_cdf(1.2, t) * exp_cdf(0.8, t)
    assert value == pytest.approx(expected, abs=1e-12)


def test_intersection_of_shared_terms(quad):
    model = _cas_like_model()
    t = 0.8
    terms = [And.of("MA", Before.of("MS", "MA")), And.of("MA", "MB")]
    after = after_prob(exponential(2.0), exponential(1.0), t, quad).value
    exact = intersect_prob(model, terms, t, mode="exact").value
    paper = intersect_prob(model, terms, t, mode="paper").value
    assert exact == pytest.approx(after * exp_cdf(0.5, t), abs=1e-9)
    assert paper == pytest.approx(after * exp_cdf(1.0, t) * exp_cdf(0.5, t), abs=1e-9)
    assert paper < exact


def test_exact_and_paper_modes_differ_on_shared_events(quad):
    text = """\
top T;
T = or(pand(MS, MA), hsp(MA, MB));
MA : exp(lambda=1);
MS : exp(lambda=2);
MB : exp(lambda=0.5);
"""
    model = parse_model(text)
    t = 1.0
    after = after_prob(exponential(2.0), exponential(1.0), t, quad).value
    fa, fb = exp_cdf(1, t), exp_cdf(0.5, t)
    exact = dft_event_prob(model, t, mode="exact")
    paper = dft_event_prob(model, t, mode="paper")
    assert exact.value == pytest.approx(after + fa * fb - after * fb, abs=1e-9)
    assert paper.value == pytest.approx(after + fa * fb - after * fa * fb, abs=1e-9)
    assert exact.mode == "exact" and paper.mode == "paper"
    assert exact.contributions[-1].value != paper.contributions[-1].value


def test_constant_tops():
    never = parse_model("top T; T = and(A, never); A : exp(lambda=1);")
    assert dft_event_prob(never, 1.0).value == 0.0
    always = parse_model("top T; T = or(A, always); A : exp(lambda=1);")
    assert dft_event_prob(always, 1.0).value == 1.0


def test_unmatched_pattern():
    model = parse_model(
        "top T; T = and(before(A, B), before(B, C)); A : exp(lambda=1); B : exp(lambda=1); C : exp(lambda=1);"
    )
    with pytest.raises(UnmatchedPattern):
        dft_event_prob(model, 1.0)


def test_term_explosion():
    model = parse_model("top T; T = or(A, B, C); A : exp(lambda=1); B : exp(lambda=1); C : exp(lambda=1);")
    with pytest.raises(TermExplosion) as info:
        dft_event_prob(model, 1.0, max_terms=2)
    assert info.value.count == 3


def test_pie_expand():
    assert [(p.mask, p.sign, p.members) for p in pie_expand(["A"])] == [(1, 1, ("A",))]
    assert [(p.members, p.sign) for p in pie_expand(["A", "B"])] == [(("A",), 1), (("B",), 1), (("A", "B"), -1)]
    assert len(pie_expand(list(range(6)))) == 63
    with pytest.raises(ValueError):
        pie_expand([])
    with pytest.raises(TermExplosion):
        pie_expand(list(range(4)), max_terms=3)


def test_workers_do_not_change_the_value():
    text = """\
top T;
T = or(pand(MS, MA), hsp(MA, MB), csp(P, S));
MA : exp(lambda=1);
MS : exp(lambda=2);
MB : exp(lambda=0.5);
P : exp(lambda=0.3);
S : exp(lambda=0.9);
"""
    model = parse_model(text)
    cfg = QuadratureConfig(tol=1e-9)
    one = AnalyticPlan(model, workers=1).evaluate(1.5, cfg)
    four = AnalyticPlan(model, workers=4).evaluate(1.5, cfg)
    assert one.value == four.value
    assert one.quad_error <= cfg.tol


def test_atom_matching():
    model = parse_model(CSP1)
    atoms = match_conjunction(And.of("S", Before.of("Y", "S")), model)
    assert atoms == (CspAtom("Y", "S"),)
    model = parse_model(PAND2)
    assert match_conjunction(And.of("Y", Before.of("X", "Y")), model) == (AfterAtom("X", "Y", None, None),)
    model = parse_model(AND2)
    assert match_conjunction(And.of("A", "B"), model) == (ProductAtom(("A", "B"), ()),)


def test_union_terms_split():
    model = parse_model(OR2)
    plan = AnalyticPlan(model)
    assert [term.expr for term in union_terms(plan.expr, model)] == [Basic("A"), Basic("B")]


def test_quadrature_error_within_tolerance():
    cfg = QuadratureConfig(tol=1e-8)
    result = dft_event_prob(parse_model(WSP1), 2.0, cfg)
    assert result.quad_error <= cfg.tol


def test_cold_spare_needs_basic_main(quad):
    model = parse_model("top T; T = csp(or(A, B), S); A : exp(lambda=1); B : exp(lambda=1); S : exp(lambda=1);")
    with pytest.raises(UnmatchedPattern):
        dft_event_prob(model, 1.0)
