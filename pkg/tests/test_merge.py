import pytest
import sympy as sp

from mixedcrn.errors import MergeContradiction, MethodInapplicable
from mixedcrn.merge import acr_report, compose_exclusive, merge_parametrizations, single_parameter_monomial
from mixedcrn.parametrization import Parametrization
from mixedcrn.pipeline import run_pipeline

from conftest import k

a1, a2, c, k1, k2 = k("a1", "a2", "c", "k1", "k2")


def test_monomial_detection():
    assert single_parameter_monomial(k1 * a1 ** 2, {a1, a2}) == (k1, a1, 2)
    assert single_parameter_monomial(k1 * a1 + 1, {a1}) is None
    assert single_parameter_monomial(k1 * a1 * a2, {a1, a2}) is None


def test_shared_species_pins_parameter():
    p1 = Parametrization(["A", "C"], {"A": k1 / k2, "C": a1}, [a1])
    p2 = Parametrization(["C", "D"], {"C": k2 / k1, "D": a2 * k1}, [a2])
    res = merge_parametrizations([p1, p2], ["A", "C", "D"])
    P = res.parametrization
    assert P["C"] == k2 / k1
    assert P["D"] == sp.Symbol("d", positive=True)
    assert res.assignments[a1] == k2 / k1
    assert acr_report(P) == {"A": True, "C": True, "D": False}


def test_contradiction():
    p1 = Parametrization(["C"], {"C": k1}, [])
    p2 = Parametrization(["C"], {"C": k2}, [])
    with pytest.raises(MergeContradiction):
        merge_parametrizations([p1, p2], ["C"])


def test_linear_parameter_is_solved():
    p1 = Parametrization(["C"], {"C": a1 + k1}, [a1])
    p2 = Parametrization(["C"], {"C": k2 + k1}, [])
    res = merge_parametrizations([p1, p2], ["C"])
    assert res.assignments[a1] == k2
    assert not res.residual


def test_reused_parameter_names_refused():
    p = Parametrization(["C"], {"C": a1}, [a1])
    with pytest.raises(MethodInapplicable):
        merge_parametrizations([p, p], ["C"])


def test_exclusive_composition():
    p1 = Parametrization(["A"], {"A": a1}, [a1])
    p2 = Parametrization(["B"], {"B": k1}, [])
    assert compose_exclusive(p1, p2).species == ["A", "B"]
    with pytest.raises(MethodInapplicable):
        compose_exclusive(p1, p1)


def test_enzyme_acr_exactly_in_b(enzyme):
    report = run_pipeline(enzyme)
    assert report.exit_code == 0
    assert [s for s, v in report.acr.items() if v] == ["B"]


def test_figure1_all_acr(figure1):
    report = run_pipeline(figure1)
    assert report.exit_code == 0
    assert all(report.acr.values())
    k2_, k3, k4, k5 = k("k2", "k3", "k4", "k5")
    assert report.parametrization["C"] == k5 / k4
    assert sp.simplify(report.parametrization["A"] - k3 / k2_) == 0
