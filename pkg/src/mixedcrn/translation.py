"""Network translation into generalized networks.

Translating a reaction adds the same shift vector to its source and product,
so the reaction vector is unchanged, while the original source complex is kept
as the kinetic complex that drives the rate.  Vertices sharing a stoichiometric
complex but carrying different kinetic complexes are split and joined by
phantom edges with free labels ``sigma1, sigma2, ...``.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import sympy as sp

from .errors import MethodInapplicable, StructuralError
from .kinetics import (KineticAssignment, RateEvaluator, formation_rate, monomial, split_monomial,
                       symbol)
from .linalg import exact_rank
from .network import Complex, Network, format_complex, linkage_classes, reaction_vector

Shift = Tuple[int, ...]


@dataclass(frozen=True)
class Vertex:
    index: int
    stoich: Complex
    kinetic: Optional[Complex]


@dataclass(frozen=True)
class Edge:
    """A directed edge of a generalized network.

    Effective edges carry the originating reaction label, its rate law and the
    shift applied; phantom edges carry only a sigma label.
    """

    tail: int
    head: int
    label: sp.Expr
    phantom: bool
    reaction: Optional[str] = None
    rate: Optional[sp.Expr] = None
    shift: Optional[Shift] = None


@dataclass(frozen=True)
class GeneralizedNetwork:
    species: Tuple[str, ...]
    vertices: Tuple[Vertex, ...]
    edges: Tuple[Edge, ...]
    representatives: Tuple[int, ...]

    @property
    def phantom_edges(self) -> List[Edge]:
        return [e for e in self.edges if e.phantom]

    @property
    def effective_edges(self) -> List[Edge]:
        return [e for e in self.edges if not e.phantom]

    @property
    def sigmas(self) -> List[sp.Symbol]:
        return [e.label for e in self.phantom_edges]

    def graph(self) -> nx.MultiDiGraph:
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(len(self.vertices)))
        for k, e in enumerate(self.edges):
            g.add_edge(e.tail, e.head, key=k)
        return g

    def describe(self) -> List[str]:
        lines = []
        for v in self.vertices:
            kin = "-" if v.kinetic is None else format_complex(v.kinetic, self.species)
            star = "*" if v.index in self.representatives else " "
            lines.append(f"{star}{v.index + 1}: {format_complex(v.stoich, self.species)} ({kin})")
        for e in self.edges:
            kind = "phantom" if e.phantom else e.reaction
            lines.append(f"  {e.tail + 1} -> {e.head + 1} [{e.label}] {kind}")
        return lines


def _add(c: Sequence[int], t: Sequence[int]) -> Complex:
    return tuple(a + b for a, b in zip(c, t))


def edge_label(rate: sp.Expr, species: Sequence[sp.Symbol]) -> sp.Expr:
    """Coefficient of a monomial rate law, or the law itself when it is not one."""
    mono = split_monomial(rate, species)
    return mono[0] if mono is not None else rate


def translate(net: Network, kin: KineticAssignment, shifts: Optional[Mapping[str, Sequence[int]]] = None,
              sigma_prefix: str = "sigma", sigma_start: int = 1) -> GeneralizedNetwork:
    """Build the generalized network for per-reaction ``shifts`` (label -> vector).

    Unlisted reactions are not shifted.  Raises StructuralError when a shifted
    complex has a negative coordinate.
    """
    shifts = dict(shifts or {})
    zero = (0,) * net.m
    for lab in shifts:
        net.reaction_index(lab)
    moved = []
    for r in net.reactions:
        t = tuple(shifts.get(r.label, zero))
        if len(t) != net.m:
            raise StructuralError(f"shift for {r.label} has wrong length")
        src, prod = _add(r.source, t), _add(r.product, t)
        if min(src + prod) < 0:
            raise StructuralError(f"shift for {r.label} makes a coefficient negative")
        moved.append((r, t, src, prod))

    # stoichiometric classes in order of first appearance
    classes: Dict[Complex, List[Optional[Complex]]] = {}
    for r, _, src, prod in moved:
        classes.setdefault(src, [])
        if r.source not in classes[src]:
            classes[src].append(r.source)
        classes.setdefault(prod, [])
    vertices: List[Vertex] = []
    index: Dict[Tuple[Complex, Optional[Complex]], int] = {}
    reps: Dict[Complex, int] = {}
    for stoich, kinetics in classes.items():
        for kc in kinetics or [None]:
            index[(stoich, kc)] = len(vertices)
            vertices.append(Vertex(len(vertices), stoich, kc))
        reps[stoich] = index[(stoich, (kinetics or [None])[0])]

    edges: List[Edge] = []
    for r, t, src, prod in moved:
        rate = kin.rates[r.label]
        edges.append(Edge(index[(src, r.source)], reps[prod], edge_label(rate, kin.species), False,
                          r.label, rate, t))
    n_sigma = sigma_start
    for stoich, kinetics in classes.items():
        for kc in kinetics[1:]:
            edges.append(Edge(reps[stoich], index[(stoich, kc)], symbol(f"{sigma_prefix}{n_sigma}"), True))
            n_sigma += 1
    return GeneralizedNetwork(net.species, tuple(vertices), tuple(edges), tuple(sorted(reps.values())))


def _components(n: int, pairs) -> int:
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(pairs)
    return nx.number_connected_components(g)


def effective_deficiency(g: GeneralizedNetwork) -> int:
    """Deficiency of the stoichiometric network (distinct complexes, effective edges)."""
    stoich = sorted({v.stoich for v in g.vertices})
    pos = {c: i for i, c in enumerate(stoich)}
    eff = g.effective_edges
    ell = _components(len(stoich), [(pos[g.vertices[e.tail].stoich], pos[g.vertices[e.head].stoich]) for e in eff])
    vecs = [[a - b for a, b in zip(g.vertices[e.head].stoich, g.vertices[e.tail].stoich)] for e in eff]
    s = exact_rank(vecs) if vecs else 0
    return len(stoich) - ell - s


def kinetic_deficiency(g: GeneralizedNetwork) -> int:
    """Deficiency of the kinetic-order network: all vertices and all edges."""
    if any(v.kinetic is None for v in g.vertices):
        raise MethodInapplicable("a vertex has no kinetic complex (it is never a source)")
    ell = _components(len(g.vertices), [(e.tail, e.head) for e in g.edges])
    vecs = [[a - b for a, b in zip(g.vertices[e.head].kinetic, g.vertices[e.tail].kinetic)] for e in g.edges]
    s = exact_rank(vecs) if vecs else 0
    return len(g.vertices) - ell - s


def is_weakly_reversible(g: GeneralizedNetwork) -> bool:
    dg = nx.DiGraph()
    dg.add_nodes_from(range(len(g.vertices)))
    dg.add_edges_from((e.tail, e.head) for e in g.edges)
    weak = {frozenset(c) for c in nx.weakly_connected_components(dg)}
    strong = {frozenset(c) for c in nx.strongly_connected_components(dg)}
    return weak <= strong


def is_v_star_directed(g: GeneralizedNetwork) -> bool:
    reps = set(g.representatives)
    for e in g.edges:
        if e.phantom:
            same = g.vertices[e.tail].stoich == g.vertices[e.head].stoich
            if e.tail not in reps or not same:
                return False
        elif e.head not in reps:
            return False
    return True


def preserves_reaction_vectors(net: Network, g: GeneralizedNetwork) -> bool:
    for e in g.effective_edges:
        r = net.reactions[net.reaction_index(e.reaction)]
        vec = tuple(a - b for a, b in zip(g.vertices[e.head].stoich, g.vertices[e.tail].stoich))
        if vec != reaction_vector(r, net.m):
            return False
    return True


@dataclass(frozen=True)
class TranslationCheck:
    weakly_reversible: bool
    v_star_directed: bool
    effective_deficiency: int
    kinetic_deficiency: Optional[int]

    @property
    def ok(self) -> bool:
        return (self.weakly_reversible and self.v_star_directed
                and self.effective_deficiency == 0 and self.kinetic_deficiency == 0)

    def failures(self) -> List[str]:
        out = []
        if not self.weakly_reversible:
            out.append("translated network is not weakly reversible")
        if not self.v_star_directed:
            out.append("translated network is not V*-directed")
        if self.effective_deficiency != 0:
            out.append(f"effective deficiency is {self.effective_deficiency}")
        if self.kinetic_deficiency is None:
            out.append("kinetic deficiency undefined")
        elif self.kinetic_deficiency != 0:
            out.append(f"kinetic deficiency is {self.kinetic_deficiency}")
        return out


def check_translation(g: GeneralizedNetwork) -> TranslationCheck:
    try:
        kd: Optional[int] = kinetic_deficiency(g)
    except MethodInapplicable:
        kd = None
    return TranslationCheck(is_weakly_reversible(g), is_v_star_directed(g), effective_deficiency(g), kd)


def translated_formation_rate(g: GeneralizedNetwork, species: Sequence[sp.Symbol]) -> List[sp.Expr]:
    """ODE right-hand side of the generalized network.

    Monomial edge rates are rebuilt from the edge label and the tail's kinetic
    complex; other rate laws are transferred unchanged.  Phantom edges do not
    contribute.
    """
    f = [sp.Integer(0)] * len(species)
    for e in g.effective_edges:
        tail = g.vertices[e.tail]
        if split_monomial(e.rate, species) is not None:
            rate = e.label * monomial(tail.kinetic, species)
        else:
            rate = e.rate
        for j, (a, b) in enumerate(zip(g.vertices[e.head].stoich, tail.stoich)):
            if a != b:
                f[j] += (a - b) * rate
    return f


def check_dynamic_equivalence(net: Network, kin: KineticAssignment, g: GeneralizedNetwork,
                              samples: int = 20, seed: int = 0) -> float:
    """Max absolute difference between the original and translated right-hand sides.

    Polynomial systems are compared symbolically (returns exactly 0.0 or the
    numeric maximum of a nonzero difference); others numerically.
    """
    xs = list(kin.species)
    diff = [sp.expand(a - b) for a, b in zip(formation_rate(net, kin), translated_formation_rate(g, xs))]
    if all(d == 0 for d in diff):
        return 0.0
    rng = np.random.default_rng(seed)
    syms = sorted(set().union(*(d.free_symbols for d in diff)), key=lambda s: s.name)
    consts = {c: (v if v is not None else 1.0) for c, v in kin.constants.items()}
    fn = sp.lambdify(syms, [d.subs(consts) for d in diff], "numpy")
    worst = 0.0
    for _ in range(samples):
        vals = np.exp(rng.uniform(np.log(0.1), np.log(10.0), len(syms)))
        worst = max(worst, float(np.max(np.abs(np.asarray(fn(*vals), dtype=float)))))
    return worst


def _class_reactions(net: Network) -> List[List[int]]:
    """Reaction indices per linkage class of the original network."""
    out = []
    for cls in linkage_classes(net):
        members = set(cls)
        out.append([i for i, r in enumerate(net.reactions) if net.complex_index(r.source) in members])
    return out


def _candidate_shifts(net: Network, kin: KineticAssignment, reactions: Sequence[int],
                      placed: Sequence[Complex], budget: int) -> List[Shift]:
    own = set()
    for i in reactions:
        own.add(net.reactions[i].source)
        own.add(net.reactions[i].product)
    cands: Dict[Shift, None] = {(0,) * net.m: None}
    for c in sorted(own):
        for p in placed:
            cands.setdefault(tuple(b - a for a, b in zip(c, p)))
    rate_species = set()
    for i in reactions:
        syms = kin.rates[net.reactions[i].label].free_symbols
        rate_species.update(j for j, x in enumerate(kin.species) if x in syms)
    for j in sorted(rate_species):
        for sign in (1, -1):
            t = [0] * net.m
            t[j] = sign
            cands.setdefault(tuple(t))
    out = []
    for t in cands:
        if sum(abs(v) for v in t) > budget:
            continue
        if all(min(_add(c, t)) >= 0 for c in own):
            out.append(t)
    return sorted(out, key=lambda t: sum(abs(v) for v in t))


def search_translation(net: Network, kin: KineticAssignment, budget: int = 2,
                       max_evaluations: int = 200000) -> Optional[Dict[str, Shift]]:
    """Per-linkage-class shifts giving a weakly reversible translation with both
    deficiencies zero, or None.

    Classes are visited in order; the first keeps the zero shift.  Candidates
    for a class are the zero shift, shifts landing one of its complexes on an
    already placed complex, and single-species moves for species in its rate
    laws, all within an L1 budget.  Depth-first, first hit wins.
    """
    groups = _class_reactions(net)
    zero = (0,) * net.m
    evaluations = 0

    def assemble(chosen: Sequence[Shift]) -> Dict[str, Shift]:
        out = {}
        for grp, t in zip(groups, chosen):
            if any(t):
                for i in grp:
                    out[net.reactions[i].label] = t
        return out

    def dfs(k: int, chosen: List[Shift], placed: List[Complex]):
        nonlocal evaluations
        if k == len(groups):
            evaluations += 1
            shifts = assemble(chosen)
            if check_translation(translate(net, kin, shifts)).ok:
                return shifts
            return None
        cands = [zero] if k == 0 else _candidate_shifts(net, kin, groups[k], placed, budget)
        for t in cands:
            if evaluations >= max_evaluations:
                return None
            new = [_add(net.reactions[i].source, t) for i in groups[k]]
            new += [_add(net.reactions[i].product, t) for i in groups[k]]
            found = dfs(k + 1, chosen + [t], placed + [c for c in new if c not in placed])
            if found is not None:
                return found
        return None

    return dfs(0, [], [])


def class_shifts(net: Network, shifts: Mapping[str, Shift]) -> List[Tuple[List[str], Shift]]:
    """Group per-reaction shifts by original linkage class, for reporting."""
    out = []
    zero = (0,) * net.m
    for grp in _class_reactions(net):
        labels = [net.reactions[i].label for i in grp]
        out.append((labels, tuple(shifts.get(labels[0], zero))))
    return out
