import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from mixedcrn.cli import _read, bundled_examples
from mixedcrn.dsl import parse_model, parse_parametrization_text, render_expr, render_model
from mixedcrn.errors import ParseError

from conftest import k


def test_reversible_arrow_expands():
    m = parse_model("R1: A <-> B ; k1*a, k2*b\n")
    assert [r.label for r in m.network.reactions] == ["R1f", "R1r"]


def test_constants_and_defaults():
    m = parse_model("const alpha = 2, kbar\nR1: A -> B ; k1*a^alpha/(kbar^alpha + a^alpha)\n")
    alpha, kbar = k("alpha", "kbar")
    assert m.kinetics.constants == {alpha: 2.0, kbar: None}


def test_translate_and_free_directives(enzyme, insulin):
    assert set(enzyme.translations) == {"R5", "R6"}
    assert enzyme.translations["R5"] == (0, 1, 0, 0)
    assert insulin.free[:2] == ["X3", "X7"]


@pytest.mark.parametrize("text,where", [
    ("R1: A -> B ; k1*q\n", (1, 17)),
    ("R1: A -> ; k1*a\n", (1, 10)),
    ("R1: A -> B ; k1*(a\n", (1, 19)),
    ("R1: A -> A ; k1*a\n", (1, 1)),
    ("", (1, 1)),
])
def test_errors_carry_positions(text, where):
    with pytest.raises(ParseError) as info:
        parse_model(text)
    d = info.value.diagnostics[0]
    assert d.severity == "error"
    assert (d.span.line, d.span.column) == where


def test_all_errors_reported():
    with pytest.raises(ParseError) as info:
        parse_model("R1: A -> B ; k1*q\nR2: B -> ; k2\n")
    assert [d.span.line for d in info.value.diagnostics] == [1, 2]


def test_unused_species_warns():
    m = parse_model("species A B C\nR1: A -> B ; k1*a\n")
    assert any(d.severity == "warning" and "C" in d.message for d in m.diagnostics)


@pytest.mark.parametrize("name", bundled_examples())
def test_render_round_trip(name):
    m = parse_model(_read(name))
    text = render_model(m)
    again = parse_model(text)
    assert again.network == m.network
    assert again.translations == m.translations
    assert all(sp.simplify(again.kinetics.rates[l] - m.kinetics.rates[l]) == 0 for l in m.kinetics.rates)
    assert render_model(again) == text


def test_expression_printer_uses_caret():
    a, k1 = k("a", "k1")
    assert render_expr(k1 * a ** 2) == "a^2*k1"


def test_parametrization_file(enzyme):
    exprs = parse_parametrization_text("a = k1/k2  # comment\nB = 2\n", enzyme.network)
    assert set(exprs) == {"A", "B"}
    with pytest.raises(ParseError):
        parse_parametrization_text("z = 1\n", enzyme.network)


alphabet = st.sampled_from(list("ABXk12 _:;->+*/^(),=<#\n.") + ["species", "const", "translate", "by", "free"])


@settings(max_examples=400, deadline=None, derandomize=True)
@given(st.lists(alphabet, max_size=40).map("".join))
def test_parser_fuzz_only_raises_parse_error(text):
    try:
        parse_model(text)
    except ParseError as exc:
        assert exc.diagnostics
