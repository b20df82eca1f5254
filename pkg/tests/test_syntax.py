import pytest
from hypothesis import given, settings, strategies as st

from helpers import HypSource, section, system
from z2ngeom.domains import Domain
from z2ngeom.localization import GradedFraction
from z2ngeom.products import product_domain
from z2ngeom.sections import ParameterSystem
from z2ngeom.syntax import (
    ParseError,
    UnknownSymbol,
    domain_text,
    infer_domain,
    morphism_text,
    parse_declarations,
    parse_expression,
    parse_fraction,
    parse_sheaf_file,
)

S = ParameterSystem.make(["x", "y"], [("xi1", "1"), ("xi2", "1")])


def parse(src, notes=None):
    return parse_expression(src, S, notes)


def test_expression_examples():
    x, xi1, xi2 = S.coord("x"), S.param("xi1"), S.param("xi2")
    assert parse("x^2 + x*xi1*xi2") == x * x + x * xi1 * xi2
    assert str(parse("xi2*xi1")) == "-xi1*xi2"
    notes = []
    assert str(parse("xi1*xi1", notes)) == "0"
    assert notes == ["note: xi1 is odd, so xi1*xi1 = 0"]
    notes = []
    assert parse("xi2^2", notes) == 0 and notes


def test_arithmetic_forms():
    assert str(parse("3/2*x^2*y - 1")) == "3/2*x^2*y - 1"
    assert str(parse("(1+x)/(1-x)")) == "(-x - 1)/(x - 1)"
    assert str(parse("1/(1 + xi1*xi2)")) == "1 - xi1*xi2"
    assert parse("x^-2") * parse("x^2") == 1
    assert parse("-(x - y)") == parse("y - x")


def test_syntax_errors_report_position():
    with pytest.raises(ParseError) as exc:
        parse("x + * 2")
    assert exc.value.position == 4
    with pytest.raises(ParseError) as exc:
        parse("(x + 1")
    assert exc.value.position == 6
    with pytest.raises(ParseError) as exc:
        parse("x $ 1")
    assert exc.value.position == 2


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol) as exc:
        parse("x + q")
    assert exc.value.position == 4


def test_division_by_nilpotent_is_rejected():
    with pytest.raises(ParseError):
        parse("1/xi1")
    with pytest.raises(ParseError):
        parse("xi1^-1")


def test_infer_domain():
    D = infer_domain(["x*theta2 + eta1", "y10 + y2"], rank=2)
    assert D.coords == ("x", "y2", "y10")
    assert D.params == ("eta1", "theta2")
    assert all(str(p.degree) == "01" for p in D.system.params)


def test_fraction_text():
    a = parse_fraction("[x*(1+xi1*xi2)] / [1+xi1*xi2]", S)
    assert isinstance(a, GradedFraction)
    assert str(a) == "[x + x*xi1*xi2] / [1 + xi1*xi2]"
    with pytest.raises(ParseError):
        parse_fraction("x / y", S)


DECL = """
# a comment
domain M
rank 1
coords x
param xi1 1
param xi2 : 1

domain N
coord y
param eta 1
truncation 1

morphism phi : M -> N
  y := x + xi1*xi2   # trailing comment
  eta := xi1
"""


def test_declarations():
    d = parse_declarations(DECL)
    M, N = d.domains["M"], d.domains["N"]
    assert M.params == ("xi1", "xi2") and N.system.truncation == 1
    phi = d.morphisms["phi"]
    assert str(phi.images["y"]) == "x + xi1*xi2"
    assert morphism_text(phi) == "morphism phi : M -> N\n  y := x + xi1*xi2\n  eta := xi1"
    assert parse_declarations(DECL, truncation=3).domains["N"].system.blocks == (((0,), 3),)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("domain M\nrank x", "line 2"),
        ("domain M\ncolour red", "unknown domain field"),
        ("morphism f : M -> N", "unknown domain"),
        ("domain M\ncoord x\nmorphism f : M -> M\n  z := x", "not a generator"),
        ("domain M\ncoord x\nmorphism f : M -> M\n  x := x +", "line 4"),
        ("y := 2", "unexpected line"),
    ],
)
def test_declaration_errors(text, fragment):
    with pytest.raises(ParseError) as exc:
        parse_declarations(text)
    assert fragment in str(exc.value)


def test_product_domain_text_round_trips():
    M = Domain.make("M", ["x"], [("xi", "1")], truncation=1)
    N = Domain.make("N", ["x"], [("eta", "1"), ("zeta", "1")])
    P = product_domain(M, N)
    text = domain_text(P.combined)
    back = parse_declarations(text).domains[P.combined.name]
    assert back.system == P.combined.system


def test_sheaf_file():
    parsed = parse_sheaf_file("points a b c\nopen a\nopen b\nvalues 2^2\nsections a b = 00,00 11,11\n")
    ab = frozenset("ab")
    assert len(parsed.space.opens) == 5
    assert len(parsed.presheaf.elements(ab)) == 2
    with pytest.raises(ParseError):
        parse_sheaf_file("points a\nopen z\n")
    with pytest.raises(ParseError):
        parse_sheaf_file("points a b\nvalues 3\ntransition 1 0 = 1>2 2>1\nchart a\nchart a b\n")


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_print_parse_round_trip(data):
    src = HypSource(data.draw)
    R = system(src, max_params=3)
    F = section(src, R)
    text = str(F)
    G = parse_expression(text, R)
    assert G == F
    assert str(G) == text
