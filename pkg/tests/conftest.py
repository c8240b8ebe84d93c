import random

import pytest
import sympy as sp

from mixedcrn.cli import load_model
from mixedcrn.network import Network, Reaction


@pytest.fixture(scope="session")
def figure1():
    return load_model("figure1.crn")


@pytest.fixture(scope="session")
def enzyme():
    return load_model("enzyme_appB.crn")


@pytest.fixture(scope="session")
def insulin():
    return load_model("insulin.crn")


@pytest.fixture(scope="session")
def yu_craciun():
    return load_model("yu_craciun.crn")


@pytest.fixture(scope="session")
def simple():
    return load_model("simple_translation.crn")


def k(*names):
    return [sp.Symbol(n, positive=True) for n in names]


def random_network(rng: random.Random, m: int, r: int, max_coeff: int = 2) -> Network:
    """Random network without self-loops; complexes have small coefficients."""
    species = [f"S{i + 1}" for i in range(m)]
    reactions = []
    while len(reactions) < r:
        src = tuple(rng.choice([0, 0, 1, max_coeff]) for _ in range(m))
        prod = tuple(rng.choice([0, 0, 1, max_coeff]) for _ in range(m))
        if src == prod:
            continue
        reactions.append(Reaction(f"R{len(reactions) + 1}", src, prod))
    return Network(species, reactions)
