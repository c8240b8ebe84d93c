"""Seeded property loops shared by the module tests and the acceptance run.

Each function raises AssertionError on the first counterexample and returns
the number of cases checked.
"""

import random
from fractions import Fraction

import networkx as nx
import sympy as sp

from mixedcrn.decomposition import finest_independent_decomposition
from mixedcrn.kinetics import mass_action_kinetics
from mixedcrn.linalg import exact_rank, generalized_inverse, kernel_basis, matmul, pivot_generalized_inverse
from mixedcrn.parametrization import is_generalized_inverse, tree_constants
from mixedcrn.translation import (Edge, GeneralizedNetwork, Vertex, check_dynamic_equivalence,
                                  preserves_reaction_vectors, translate)
from mixedcrn.verify import exhaustive_finest, tree_constant_by_enumeration

from conftest import random_network


def labelled_graph(n, edges):
    vs = tuple(Vertex(i, (i,), (i,)) for i in range(n))
    return GeneralizedNetwork(("S",), vs, tuple(Edge(t, h, w, False) for t, h, w in edges), tuple(range(n)))


def matrix_tree_small() -> int:
    """Every labelled strongly connected digraph on at most four vertices."""
    count = 0
    for n in range(1, 5):
        pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
        for mask in range(1 << len(pairs)):
            chosen = [p for i, p in enumerate(pairs) if mask >> i & 1]
            d = nx.DiGraph()
            d.add_nodes_from(range(n))
            d.add_edges_from(chosen)
            if not nx.is_strongly_connected(d):
                continue
            count += 1
            edges = [(a, b, sp.Symbol(f"w{a}{b}", positive=True)) for a, b in chosen]
            K = tree_constants(labelled_graph(n, edges))
            for r in range(n):
                assert sp.expand(K[r] - tree_constant_by_enumeration(n, edges, r)) == 0, (n, chosen, r)
    return count


def matrix_tree_random(samples: int = 500, seed: int = 5) -> int:
    """Random weakly connected 5-vertex digraphs with integer labels."""
    rng = random.Random(seed)
    pairs = [(a, b) for a in range(5) for b in range(5) if a != b]
    done = 0
    while done < samples:
        chosen = [p for p in pairs if rng.random() < 0.35]
        # tree constants are taken per weak component; compare on connected graphs
        if not chosen or len({v for p in chosen for v in p}) < 5 or not nx.is_weakly_connected(nx.DiGraph(chosen)):
            continue
        done += 1
        edges = [(a, b, sp.Integer(rng.randint(1, 9))) for a, b in chosen]
        K = tree_constants(labelled_graph(5, edges))
        for r in range(5):
            assert K[r] == tree_constant_by_enumeration(5, edges, r), (chosen, r)
    return done


def random_rational_matrix(rng: random.Random):
    n, m = rng.randint(1, 6), rng.randint(1, 6)
    rows = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(m)] for _ in range(n)]
    # duplicate combinations so that rank deficiency is common
    for _ in range(rng.randint(0, 2)):
        if n > 1:
            a, b = rng.sample(range(n), 2)
            c = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
            rows[a] = [x + c * y for x, y in zip(rows[b], rows[rng.randrange(n)])]
    return rows


def inverses_and_kernels(samples: int = 500, seed: int = 3) -> int:
    rng = random.Random(seed)
    for _ in range(samples):
        M = random_rational_matrix(rng)
        n_cols = len(M[0])
        assert is_generalized_inverse(M, generalized_inverse(M)), M
        assert is_generalized_inverse(M, pivot_generalized_inverse(M)[0]), M
        B = kernel_basis(M, n_cols)
        rank = exact_rank(M)
        assert rank == sp.Matrix(M).rank(), M
        if B and B[0]:
            assert all(v == 0 for row in matmul(M, B) for v in row), M
            assert exact_rank(B) == len(B[0]) == n_cols - rank, M
        else:
            assert rank == n_cols, M
    return samples


def decomposition_vs_oracle(samples: int = 500, seed: int = 7) -> int:
    rng = random.Random(seed)
    for _ in range(samples):
        net = random_network(rng, rng.randint(2, 4), rng.randint(2, 8), max_coeff=1)
        got = [list(p) for p in finest_independent_decomposition(net).partition]
        assert got == exhaustive_finest(net), net
    return samples


def random_shift_equivalence(samples: int = 200, seed: int = 11) -> int:
    rng = random.Random(seed)
    for _ in range(samples):
        net = random_network(rng, rng.randint(1, 3), rng.randint(1, 5))
        kin = mass_action_kinetics(net)
        shifts = {}
        for r in net.reactions:
            t = tuple(rng.choice([-1, 0, 0, 1, 2]) for _ in range(net.m))
            if min(a + b for a, b in zip(r.source + r.product, t + t)) >= 0:
                shifts[r.label] = t
        g = translate(net, kin, shifts)
        assert preserves_reaction_vectors(net, g), shifts
        assert check_dynamic_equivalence(net, kin, g) == 0.0, shifts
    return samples
