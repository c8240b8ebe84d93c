"""Reaction networks and their structural indices.

A complex is a tuple of non-negative integers indexed like the network's
species; a reaction is a labelled (source, product) pair of complexes.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import StructuralError
from .linalg import exact_rank

Complex = Tuple[int, ...]


@dataclass(frozen=True)
class Species:
    id: int
    name: str


@dataclass(frozen=True)
class Reaction:
    label: str
    source: Complex
    product: Complex

    def __post_init__(self):
        if len(self.source) != len(self.product):
            raise StructuralError(f"reaction {self.label}: complexes have different lengths")
        if any(v < 0 for v in self.source + self.product):
            raise StructuralError(f"reaction {self.label}: negative stoichiometric coefficient")
        if self.source == self.product:
            raise StructuralError(f"reaction {self.label}: self-loop complex")


def reaction_vector(r: Reaction, m: Optional[int] = None) -> Tuple[int, ...]:
    """Product minus source."""
    if m is not None and (len(r.source) != m or len(r.product) != m):
        raise StructuralError(f"reaction {r.label} is not over {m} species")
    return tuple(p - s for s, p in zip(r.source, r.product))


def support(c: Sequence[int]) -> Tuple[int, ...]:
    return tuple(i for i, v in enumerate(c) if v != 0)


@dataclass(frozen=True)
class Network:
    """The triple (species, complexes, reactions).

    ``complexes`` is derived: distinct complexes in order of first appearance
    (source before product, reactions in input order).
    """

    species: Tuple[str, ...]
    reactions: Tuple[Reaction, ...]
    complexes: Tuple[Complex, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if len(set(self.species)) != len(self.species):
            raise StructuralError("duplicate species name")
        labels = [r.label for r in self.reactions]
        if len(set(labels)) != len(labels):
            dup = next(l for l in labels if labels.count(l) > 1)
            raise StructuralError(f"duplicate reaction label {dup!r}")
        m = len(self.species)
        seen: Dict[Complex, None] = {}
        for r in self.reactions:
            if len(r.source) != m:
                raise StructuralError(f"reaction {r.label} is not over {m} species")
            seen.setdefault(r.source)
            seen.setdefault(r.product)
        object.__setattr__(self, "complexes", tuple(seen))

    @property
    def m(self) -> int:
        return len(self.species)

    @property
    def n(self) -> int:
        return len(self.complexes)

    @property
    def r(self) -> int:
        return len(self.reactions)

    @property
    def species_list(self) -> List[Species]:
        return [Species(i, s) for i, s in enumerate(self.species)]

    def species_index(self, name: str) -> int:
        try:
            return self.species.index(name)
        except ValueError:
            raise StructuralError(f"unknown species {name!r}") from None

    def reaction_index(self, label: str) -> int:
        for i, r in enumerate(self.reactions):
            if r.label == label:
                return i
        raise StructuralError(f"unknown reaction {label!r}")

    def complex_index(self, c: Complex) -> int:
        return self.complexes.index(tuple(c))

    def format_complex(self, c: Sequence[int]) -> str:
        return format_complex(c, self.species)

    def subnetwork(self, indices: Iterable[int]) -> "Network":
        """Subnetwork induced by a set of reaction indices; species list is kept whole."""
        idx = sorted(set(indices))
        if not idx:
            raise StructuralError("empty subnetwork")
        return Network(self.species, tuple(self.reactions[i] for i in idx))

    def involved_species(self) -> List[int]:
        """Indices of species occurring in at least one complex."""
        used = set()
        for c in self.complexes:
            used.update(support(c))
        return sorted(used)


def format_complex(c: Sequence[int], names: Sequence[str]) -> str:
    """``2A + B``; signed vectors (shifts, differences) render as ``A - B``."""
    out = ""
    for v, name in zip(c, names):
        if not v:
            continue
        term = name if abs(v) == 1 else f"{abs(v)}{name}"
        if not out:
            out = term if v > 0 else f"-{term}"
        else:
            out += f" + {term}" if v > 0 else f" - {term}"
    return out or "0"


@dataclass(frozen=True)
class StructuralSummary:
    m: int
    r: int
    n: int
    ell: int
    s: int
    delta: int
    weakly_reversible: bool
    stoich_matrix: Tuple[Tuple[int, ...], ...]

    def as_dict(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "n": self.n,
            "ell": self.ell,
            "s": self.s,
            "delta": self.delta,
            "weakly_reversible": self.weakly_reversible,
        }


def stoichiometric_matrix(net: Network) -> List[List[int]]:
    """m x r integer matrix; column i is the vector of reaction i."""
    cols = [reaction_vector(r, net.m) for r in net.reactions]
    return [[cols[j][i] for j in range(net.r)] for i in range(net.m)]


def complex_graph(net: Network) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(range(net.n))
    for r in net.reactions:
        g.add_edge(net.complex_index(r.source), net.complex_index(r.product))
    return g


def _sorted_partition(components) -> List[List[int]]:
    return sorted((sorted(c) for c in components), key=lambda c: c[0])


def linkage_classes(net: Network) -> List[List[int]]:
    """Connected components of the undirected complex graph, as complex indices."""
    return _sorted_partition(nx.weakly_connected_components(complex_graph(net)))


def strong_linkage_classes(net: Network) -> List[List[int]]:
    return _sorted_partition(nx.strongly_connected_components(complex_graph(net)))


def is_weakly_reversible(net: Network) -> bool:
    strong = {tuple(c) for c in strong_linkage_classes(net)}
    return all(tuple(c) in strong for c in linkage_classes(net))


def deficiency(net: Network) -> StructuralSummary:
    sm = stoichiometric_matrix(net)
    s = exact_rank(sm)
    ell = len(linkage_classes(net))
    delta = net.n - ell - s
    assert delta >= 0, "deficiency must be non-negative"
    return StructuralSummary(
        m=net.m,
        r=net.r,
        n=net.n,
        ell=ell,
        s=s,
        delta=delta,
        weakly_reversible=is_weakly_reversible(net),
        stoich_matrix=tuple(tuple(row) for row in sm),
    )
