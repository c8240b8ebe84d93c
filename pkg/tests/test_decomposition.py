import time

import pytest

from mixedcrn.decomposition import (finest_independent_decomposition, is_independent, make_decomposition,
                                    mass_action_union, restrict_kinetics)
from mixedcrn.errors import StructuralError
from mixedcrn.network import Network, Reaction, deficiency
from mixedcrn.verify import exhaustive_finest

import properties


def test_block_diagonal_network_splits():
    net = Network(["A", "B", "C", "D"], [
        Reaction("R1", (1, 0, 0, 0), (0, 1, 0, 0)), Reaction("R2", (0, 1, 0, 0), (1, 0, 0, 0)),
        Reaction("R3", (0, 0, 1, 0), (0, 0, 0, 1)), Reaction("R4", (0, 0, 0, 1), (0, 0, 1, 0)),
    ])
    dec = finest_independent_decomposition(net)
    assert [list(p) for p in dec.partition] == [[0, 1], [2, 3]]
    assert exhaustive_finest(net) == [[0, 1], [2, 3]]


def test_figure1_agrees_with_oracle(figure1):
    net = figure1.network
    dec = finest_independent_decomposition(net)
    assert [list(p) for p in dec.partition] == exhaustive_finest(net)
    assert dec.labels(net) == [["R1", "R2", "R3"], ["R4", "R5"]]


def test_insulin_parts(insulin):
    net, kin = insulin.network, insulin.kinetics
    dec = finest_independent_decomposition(net)
    assert len(dec) == 10 and dec.independent
    assert sum(s.s for s in dec.summaries) == deficiency(net).s
    parts = restrict_kinetics(net, kin, dec)
    mixed = [labels for labels, (_, _, pure) in zip(dec.labels(net), parts) if not pure]
    assert mixed == [["R28", "R29", "R30"], ["R33", "R34"]]


def test_dependent_partition_detected(figure1):
    net = figure1.network
    assert not is_independent(net, [[0], [1, 2, 3, 4]])
    assert not make_decomposition(net, [[0, 1], [2, 3, 4]]).independent


def test_partition_must_cover():
    net = Network(["A"], [Reaction("R1", (1,), (0,)), Reaction("R2", (0,), (1,))])
    with pytest.raises(StructuralError):
        make_decomposition(net, [[0]])


def test_exclusive_union(figure1):
    net = figure1.network
    dec = finest_independent_decomposition(net)
    u = mass_action_union(net, dec, [True, False])
    assert not u.mutually_exclusive and u.shared_species == ("C",)


def test_random_networks_match_exhaustive_oracle():
    start = time.perf_counter()
    assert properties.decomposition_vs_oracle() == 500
    assert time.perf_counter() - start < 30
