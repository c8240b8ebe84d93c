import pytest

from mixedcrn.errors import StructuralError
from mixedcrn.network import (Network, Reaction, deficiency, format_complex, linkage_classes, reaction_vector,
                              stoichiometric_matrix, strong_linkage_classes)


def test_figure1_indices(figure1):
    s = deficiency(figure1.network)
    assert (s.n, s.ell, s.s, s.delta) == (7, 3, 3, 1)
    assert not s.weakly_reversible


def test_insulin_size(insulin):
    s = deficiency(insulin.network)
    assert (s.m, s.r) == (27, 36)


def test_reversible_pair_is_weakly_reversible():
    net = Network(["A", "B"], [Reaction("R1", (1, 0), (0, 1)), Reaction("R2", (0, 1), (1, 0))])
    s = deficiency(net)
    assert s.weakly_reversible and s.delta == 0
    assert linkage_classes(net) == strong_linkage_classes(net) == [[0, 1]]


def test_stoichiometric_matrix_columns_are_reaction_vectors(figure1):
    net = figure1.network
    sm = stoichiometric_matrix(net)
    for i, r in enumerate(net.reactions):
        assert tuple(row[i] for row in sm) == reaction_vector(r)


def test_self_loop_rejected():
    with pytest.raises(StructuralError):
        Reaction("R1", (1, 0), (1, 0))


def test_duplicate_label_rejected():
    r = Reaction("R1", (1,), (0,))
    with pytest.raises(StructuralError):
        Network(["A"], [r, r])


@pytest.mark.parametrize("vec,text", [((0, 0), "0"), ((2, 1), "2A + B"), ((1, -1), "A - B"), ((-1, 0), "-A")])
def test_format_complex(vec, text):
    assert format_complex(vec, ["A", "B"]) == text
