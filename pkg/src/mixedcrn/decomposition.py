"""Independent decompositions of the reaction set.

A partition of the reactions is independent when the stoichiometric subspace
is the direct sum of the parts' subspaces, which over the rationals is the
rank identity ``rank S = sum rank S_i``.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import networkx as nx

from .errors import StructuralError
from .kinetics import KineticAssignment, KineticsTag
from .linalg import exact_rank, independent_columns, solve_in_basis
from .network import Network, StructuralSummary, deficiency, reaction_vector, stoichiometric_matrix, support


@dataclass(frozen=True)
class Decomposition:
    """A reaction partition with per-part structural data.

    Attributes:
        partition: Sorted reaction-index lists, ordered by smallest member.
        summaries: One StructuralSummary per part.
        independent: Whether the ranks of the parts add up to the full rank.
    """

    partition: Tuple[Tuple[int, ...], ...]
    summaries: Tuple[StructuralSummary, ...]
    independent: bool

    def __len__(self):
        return len(self.partition)

    def part_of(self, reaction_index: int) -> int:
        for p, part in enumerate(self.partition):
            if reaction_index in part:
                return p
        raise StructuralError(f"reaction index {reaction_index} is in no part")

    def labels(self, net: Network) -> List[List[str]]:
        return [[net.reactions[i].label for i in part] for part in self.partition]


def _check_partition(net: Network, partition: Sequence[Sequence[int]]) -> List[List[int]]:
    parts = [sorted(set(p)) for p in partition]
    flat = [i for p in parts for i in p]
    if any(not p for p in parts):
        raise StructuralError("partition has an empty part")
    if len(flat) != len(set(flat)):
        raise StructuralError("partition parts overlap")
    if sorted(flat) != list(range(net.r)):
        raise StructuralError("partition does not cover every reaction exactly once")
    return parts


def _columns(net: Network, indices: Sequence[int]) -> List[List[int]]:
    """Reaction vectors of ``indices`` arranged as matrix columns."""
    vecs = [reaction_vector(net.reactions[i], net.m) for i in indices]
    return [[v[j] for v in vecs] for j in range(net.m)]


def is_independent(net: Network, partition: Sequence[Sequence[int]]) -> bool:
    parts = _check_partition(net, partition)
    total = exact_rank(stoichiometric_matrix(net))
    return total == sum(exact_rank(_columns(net, p)) for p in parts)


def make_decomposition(net: Network, partition: Sequence[Sequence[int]]) -> Decomposition:
    parts = sorted((tuple(p) for p in _check_partition(net, partition)), key=lambda p: p[0])
    summaries = tuple(deficiency(net.subnetwork(p)) for p in parts)
    return Decomposition(tuple(parts), summaries, is_independent(net, parts))


def finest_independent_decomposition(net: Network) -> Decomposition:
    """The unique finest independent decomposition.

    Reaction vectors are written in coordinates over a basis picked by
    leftmost pivoting; basis vectors that share a reaction are linked, and the
    connected components of that graph give the parts.
    """
    sm = stoichiometric_matrix(net)
    for i, r in enumerate(net.reactions):
        if not any(reaction_vector(r, net.m)):
            raise StructuralError(f"reaction {r.label} has a zero reaction vector")
    basis = independent_columns(sm)
    if not basis:
        raise StructuralError("stoichiometric matrix is zero")
    basis_cols = [[sm[j][b] for j in range(net.m)] for b in basis]
    g = nx.Graph()
    g.add_nodes_from(range(len(basis)))
    touched: List[List[int]] = []
    for i in range(net.r):
        coords = solve_in_basis(basis_cols, [sm[j][i] for j in range(net.m)])
        nz = [b for b, c in enumerate(coords) if c != 0]
        touched.append(nz)
        g.add_edges_from((a, b) for a in nz for b in nz if a < b)
    comp_of = {}
    for c, comp in enumerate(nx.connected_components(g)):
        for b in comp:
            comp_of[b] = c
    groups: Dict[int, List[int]] = {}
    for i, nz in enumerate(touched):
        groups.setdefault(comp_of[nz[0]], []).append(i)
    return make_decomposition(net, list(groups.values()))


def restrict_kinetics(net: Network, kin: KineticAssignment,
                      dec: Decomposition) -> List[Tuple[Network, KineticAssignment, bool]]:
    """Per part: (subnetwork, restricted kinetics, pure mass-action flag)."""
    out = []
    tags = kin.classify(net)
    for part in dec.partition:
        sub = net.subnetwork(part)
        labels = [net.reactions[i].label for i in part]
        pure = all(tags[l] is KineticsTag.MassAction for l in labels)
        out.append((sub, kin.restrict(labels), pure))
    return out


@dataclass(frozen=True)
class MassActionUnion:
    mass_action_parts: Tuple[int, ...]
    complement_parts: Tuple[int, ...]
    mutually_exclusive: bool
    shared_species: Tuple[str, ...] = field(default_factory=tuple)


def _species_in_complexes(net: Network, indices: Sequence[int]) -> set:
    out = set()
    for i in indices:
        r = net.reactions[i]
        out.update(support(r.source))
        out.update(support(r.product))
    return out


def mass_action_union(net: Network, dec: Decomposition, purity: Sequence[bool]) -> MassActionUnion:
    """Split parts into the mass-action union and its complement.

    The two sides are mutually exclusive when no species occurs in complexes
    of both.
    """
    if not dec.independent:
        raise StructuralError("decomposition is not independent")
    pure = tuple(p for p, flag in enumerate(purity) if flag)
    rest = tuple(p for p, flag in enumerate(purity) if not flag)
    sp_m = _species_in_complexes(net, [i for p in pure for i in dec.partition[p]])
    sp_c = _species_in_complexes(net, [i for p in rest for i in dec.partition[p]])
    shared = tuple(net.species[j] for j in sorted(sp_m & sp_c))
    return MassActionUnion(pure, rest, not shared, shared)
