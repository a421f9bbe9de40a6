import pytest
from conftest import WSP1

from dft.algebra import ALWAYS, And, Basic, Csp, Hsp, Or, Pand, Wsp
from dft.distributions import Exponential, Weibull
from dft.errors import CycleDetected, ModelSyntaxError, Redefined, Undefined
from dft.model import cas_model, parse_expression, parse_model, print_expression, print_model

PUMPS = """\
// pump station
top SYSTEM;
SYSTEM = or(PUMPS, pand(MS, MA));
PUMPS = wsp(PA, PS, dormancy=0.3);
MA : exp(lambda=0.001);
MS : exp(lambda=0.002);
PA : exp(lambda=0.001);
PS : weibull(shape=1.5, scale=800);
"""

FDEP = """\
top T;
T = and(P, B);
TR = or(CS, SS);
fdep(TR; P, B);
P : exp(lambda=1);
B : exp(lambda=1);
CS : exp(lambda=0.1);
SS : exp(lambda=0.1);
"""


def test_parses_model():
    model = parse_model(PUMPS)
    assert model.top_name == "SYSTEM"
    assert list(model.definitions) == ["SYSTEM", "PUMPS"]
    assert model.basic_laws["MA"] == Exponential(0.001)
    meta = model.spare_meta["PS"]
    assert meta.kind == "warm"
    assert (meta.active, meta.dormant) == ("PS_a", "PS_d")
    assert meta.dormancy == 0.3
    assert "PS" not in model.basic_laws
    assert model.basic_laws["PS_a"] == Weibull(1.5, 800.0)
    dormant = model.basic_laws["PS_d"]
    assert dormant.cdf(100.0) == pytest.approx(1 - (1 - Weibull(1.5, 800.0).cdf(100.0)) ** 0.3, rel=1e-12)
    assert model.declaration_order == ["MA", "MS", "PA", "PS_a", "PS_d"]
    assert model.resolve("PUMPS") == Wsp(Basic("PA"), Basic("PS_a"), Basic("PS_d"))


def test_dormancy_on_the_law():
    model = parse_model("top T; T = wsp(Y, S); Y : exp(lambda=1); S : exp(lambda=1, dormancy=0.25);")
    assert model.spare_meta["S"].dormancy == 0.25
    assert model.basic_laws["S_d"] == Exponential(0.25)


def test_cold_spare_keeps_its_name():
    model = parse_model("top T; T = csp(Y, S); Y : exp(lambda=1); S : exp(lambda=2);")
    meta = model.spare_meta["S"]
    assert meta.kind == "cold"
    assert meta.active == "S" and meta.dormant is None
    assert model.top_expr() == Csp(Basic("Y"), Basic("S"))


def test_fdep_statement():
    model = parse_model(FDEP)
    trigger = Or((Basic("CS"), Basic("SS")))
    assert model.top_expr() == And((Or((Basic("P"), trigger)), Or((Basic("B"), trigger))))
    assert model.source_map["P"] == "fdep(TR; P, B)"


def test_fdep_cannot_target_top():
    with pytest.raises(ModelSyntaxError):
        parse_model("top T; T = A; fdep(B; T); A : exp(lambda=1); B : exp(lambda=1);")


def test_desugar():
    text = "top T; T = and(hsp(A, B), fdep(C, D)); A : exp(lambda=1); B : exp(lambda=1); C : exp(lambda=1); D : exp(lambda=1);"
    plain = parse_model(text).top_expr()
    assert isinstance(plain.operands[0], Hsp)
    sugared = parse_model(text, desugar=True).top_expr()
    assert sugared == And((And((Basic("A"), Basic("B"))), Or((Basic("C"), Basic("D")))))


def test_parse_expression():
    assert parse_expression("pand(X, Y)") == Pand(Basic("X"), Basic("Y"))
    assert parse_expression("and(A, always)") == And((Basic("A"), ALWAYS))
    assert parse_expression("wsp(Y, XA, XD)") == Wsp(Basic("Y"), Basic("XA"), Basic("XD"))
    with pytest.raises(ModelSyntaxError):
        parse_expression("wsp(Y, X, X)")
    with pytest.raises(ModelSyntaxError):
        parse_expression("and(A, B) extra")


def test_undefined_name():
    with pytest.raises(Undefined) as info:
        parse_model("top T; T = and(A, Q); A : exp(lambda=1);")
    assert info.value.name == "Q"


def test_undefined_top():
    with pytest.raises(Undefined):
        parse_model("top T; A : exp(lambda=1);")


def test_missing_top():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("A : exp(lambda=1);")
    assert (info.value.line, info.value.col) == (1, 1)


def test_redefined_name():
    with pytest.raises(Redefined):
        parse_model("top T; T = A; A : exp(lambda=1); A : exp(lambda=2);")


def test_cycle():
    with pytest.raises(CycleDetected) as info:
        parse_model("top T; T = and(U, A); U = or(T, A); A : exp(lambda=1);")
    assert info.value.path == ["T", "U", "T"]


def test_syntax_error_position():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("top T;\nT = and(A B);\nA : exp(lambda=1);\nB : exp(lambda=1);\n")
    error = info.value
    assert (error.line, error.col) == (2, 11)
    assert error.expected == "')'"
    assert error.found == "B"
    assert "line 2, column 11" in str(error)


def test_bad_character():
    with pytest.raises(ModelSyntaxError) as info:
        parse_model("top T;\nT = A & B;\n")
    assert (info.value.line, info.value.col) == (2, 7)


@pytest.mark.parametrize(
    "text",
    [
        "top T; T = A; A : exp(rate=1);",
        "top T; T = A; A : gamma(k=1);",
        "top T; T = A; A : exp(lambda=-1);",
        "top T; T = and(A, dormancy=1); A : exp(lambda=1);",
        "top T; T = wsp(A, S); A : exp(lambda=1); S : exp(lambda=1);",
        "top T; T = wsp(A, S, dormancy=1.5); A : exp(lambda=1); S : exp(lambda=1);",
        "top T; T = or(csp(A, S), csp(B, S)); A : exp(lambda=1); B : exp(lambda=1); S : exp(lambda=1);",
        "top T; T = or(wsp(A, S, dormancy=0.5), S); A : exp(lambda=1); S : exp(lambda=1);",
        "top T; T = csp(A, or(S, A)); A : exp(lambda=1); S : exp(lambda=1);",
        "top T; top U; T = A; A : exp(lambda=1);",
    ],
)
def test_rejected_models(text):
    with pytest.raises(ModelSyntaxError):
        parse_model(text)


@pytest.mark.parametrize("text", [PUMPS, FDEP, WSP1])
def test_print_parse_round_trip(text):
    model = parse_model(text)
    printed = print_model(model)
    again = parse_model(printed)
    assert again.digest() == model.digest()
    assert print_model(again) == printed


def test_printed_warm_spare_folds_states():
    model = parse_model(WSP1)
    assert print_model(model) == (
        "top T;\n"
        "T = wsp(Y, S, dormancy=0.5);\n"
        "Y : exp(lambda=1.0);\n"
        "S : exp(lambda=1.0);\n"
    )
    assert print_expression(model.top_expr(), model) == "wsp(Y, S, dormancy=0.5)"


def test_cas_model_parses():
    model = cas_model()
    assert model.top_name == "CAS"
    assert model.spare_meta["PS"].hot
    assert len(model.basic_laws) == 10
    assert parse_model(print_model(model)).digest() == model.digest()
