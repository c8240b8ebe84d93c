import os

import numpy as np
import pytest
import sympy as sp

from mixedcrn.errors import ConfigurationError, EvaluationError
from mixedcrn.parametrization import Parametrization
from mixedcrn.pipeline import run_pipeline
from mixedcrn.verify import (exhaustive_finest, parametrization_from_expressions, residual_harness,
                             validate_parametrization)

from conftest import k

k1, k2, k5, k6, a, e = k("k1", "k2", "k5", "k6", "a", "e")


@pytest.fixture(scope="module")
def enzyme_merged(enzyme):
    return run_pipeline(enzyme).parametrization


def test_same_seed_same_bytes(enzyme, enzyme_merged):
    r1 = residual_harness(enzyme.network, enzyme.kinetics, enzyme_merged, seed=3)
    r2 = residual_harness(enzyme.network, enzyme.kinetics, enzyme_merged, seed=3)
    assert r1.to_json() == r2.to_json()
    r3 = residual_harness(enzyme.network, enzyme.kinetics, enzyme_merged, seed=4)
    assert r3.to_json() != r1.to_json()


def test_perturbed_formula_is_located(enzyme, enzyme_merged):
    bad = dict(enzyme_merged.expressions)
    bad["B"] = bad["B"] * k6
    P = Parametrization(enzyme_merged.species, bad, enzyme_merged.free_parameters)
    rep = residual_harness(enzyme.network, enzyme.kinetics, P)
    assert not rep.passed
    assert rep.failing_species in {"B", "AE", "E", "A"}
    assert set(rep.worst) >= {"k1", "k6", "e"}


def test_ten_thousand_samples(enzyme, enzyme_merged):
    assert validate_parametrization(enzyme.network, enzyme.kinetics, enzyme_merged, n_samples=10_000) < 1e-12


def test_missing_species(enzyme, enzyme_merged):
    P = Parametrization(["A"], {"A": enzyme_merged["A"]}, enzyme_merged.free_parameters)
    with pytest.raises(ConfigurationError):
        residual_harness(enzyme.network, enzyme.kinetics, P)


def test_non_positive_expression(enzyme, enzyme_merged):
    exprs = dict(enzyme_merged.expressions)
    exprs["B"] = k6 - k5
    with pytest.raises(EvaluationError):
        residual_harness(enzyme.network, enzyme.kinetics, Parametrization(enzyme_merged.species, exprs, []))


def test_references_between_species_resolve(enzyme):
    b = sp.Symbol("b", positive=True)
    P = parametrization_from_expressions(enzyme.network, enzyme.kinetics, {"B": k6 / k5, "A": b * e})
    assert P["A"] == k6 * e / k5
    assert P["E"] == e and e in P.free_parameters


def test_circular_references(enzyme):
    b, ae = k("b", "ae")
    with pytest.raises(ConfigurationError):
        parametrization_from_expressions(enzyme.network, enzyme.kinetics, {"B": ae, "AE": b})


def test_named_constant_override(insulin):
    report = run_pipeline(insulin, constant_values={"alpha": 3, "beta": 1, "kbar": 0.5})
    assert report.residual.passed


def test_exhaustive_cap(insulin):
    from mixedcrn.errors import StructuralError
    with pytest.raises(StructuralError):
        exhaustive_finest(insulin.network)


def published(insulin, name):
    from mixedcrn.dsl import parse_parametrization_text
    with open(os.path.join(os.path.dirname(__file__), "data", name)) as fh:
        exprs = parse_parametrization_text(fh.read(), insulin.network)
    return parametrization_from_expressions(insulin.network, insulin.kinetics, exprs)


def test_published_insulin_list_differs_only_in_x30(insulin):
    P = published(insulin, "insulin_published.txt")
    rep = residual_harness(insulin.network, insulin.kinetics, P)
    assert not rep.passed and rep.failing_species == "X30"
    merged = run_pipeline(insulin).parametrization
    consts = {c: v for c, v in insulin.kinetics.constants.items()}
    rng = np.random.default_rng(1)
    for s in P.species:
        d = (P[s] - merged[s]).subs(consts)
        syms = sorted(d.free_symbols, key=lambda q: q.name)
        vals = rng.uniform(0.5, 2.0, (20, len(syms)))
        diff = np.abs(sp.lambdify(syms, d, "numpy")(*vals.T))
        assert bool(np.all(diff < 1e-9)) == (s != "X30"), s


def test_regrouped_insulin_list_passes(insulin):
    P = published(insulin, "insulin_corrected.txt")
    assert sorted(p.name for p in P.free_parameters) == sorted(
        ["x3", "x7", "x10", "x21", "x26", "x31", "x33", "x34", "x36", "x38"])
    assert residual_harness(insulin.network, insulin.kinetics, P, n=500).passed
