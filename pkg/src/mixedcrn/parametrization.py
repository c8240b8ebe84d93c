"""Tree constants and closed-form positive steady states of translated networks.

For a weakly reversible, V*-directed generalized network whose effective and
kinetic deficiencies vanish, the positive steady states are exactly

    x = kappa^H * tau^(B^T)

where ``kappa`` holds the tree-constant ratios ``K_head / K_tail`` along a
spanning forest, ``M`` stacks the kinetic differences of the forest edges,
``H`` is any generalized inverse of ``M`` and the columns of ``B`` span
``ker M``.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import sympy as sp

from .errors import MethodInapplicable, StructuralError
from .kinetics import symbol
from .linalg import Matrix, generalized_inverse, is_zero, kernel_basis, matmul, pivot_generalized_inverse
from .translation import GeneralizedNetwork, check_translation

ForestEdge = Tuple[int, int]


@dataclass
class Parametrization:
    """Closed-form positive steady states.

    Attributes:
        species: Species names, in network order, that have an expression.
        expressions: Species name -> expression.
        free_parameters: Symbols that range over the positive reals.
        provenance: Short description of how the result was obtained.
    """

    species: List[str]
    expressions: Dict[str, sp.Expr]
    free_parameters: List[sp.Symbol]
    provenance: str = ""
    part: Optional[int] = None

    def __post_init__(self):
        missing = [s for s in self.species if s not in self.expressions]
        if missing:
            raise StructuralError(f"no expression for species {missing}")

    def __getitem__(self, name: str) -> sp.Expr:
        return self.expressions[name]

    def items(self):
        return [(s, self.expressions[s]) for s in self.species]

    def subs(self, mapping) -> "Parametrization":
        return Parametrization(list(self.species), {s: e.subs(mapping) for s, e in self.items()},
                               list(self.free_parameters), self.provenance, self.part)


def _laplacian(n: int, edges: Sequence[Tuple[int, int, sp.Expr]]) -> sp.Matrix:
    lap = sp.zeros(n, n)
    for t, h, w in edges:
        lap[t, h] -= w
        lap[t, t] += w
    return lap


def tree_constants(g: GeneralizedNetwork) -> List[sp.Expr]:
    """Tree constant of every vertex by the directed Matrix-Tree theorem.

    ``K_i`` is the principal minor of the out-degree Laplacian with row and
    column ``i`` removed, taken inside ``i``'s weak component.  A zero entry
    means no spanning tree points to that vertex.
    """
    graph = g.graph()
    out: List[sp.Expr] = [sp.Integer(0)] * len(g.vertices)
    for comp in nx.weakly_connected_components(graph):
        nodes = sorted(comp)
        pos = {v: i for i, v in enumerate(nodes)}
        edges = [(pos[e.tail], pos[e.head], e.label) for e in g.edges if e.tail in pos]
        lap = _laplacian(len(nodes), edges)
        for v in nodes:
            keep = [i for i in range(len(nodes)) if i != pos[v]]
            minor = lap.extract(keep, keep)
            out[v] = sp.expand(minor.det(method="berkowitz")) if keep else sp.Integer(1)
    return out


def spanning_forest(g: GeneralizedNetwork) -> List[ForestEdge]:
    """Breadth-first forest from the lowest vertex of each weak component.

    Edges are traversed in either direction but recorded as (tail, head).
    """
    adj: Dict[int, List[Tuple[int, ForestEdge]]] = {v.index: [] for v in g.vertices}
    for e in g.edges:
        adj[e.tail].append((e.head, (e.tail, e.head)))
        adj[e.head].append((e.tail, (e.tail, e.head)))
    seen = set()
    forest: List[ForestEdge] = []
    for start in sorted(adj):
        if start in seen:
            continue
        seen.add(start)
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w, edge in sorted(adj[v]):
                if w not in seen:
                    seen.add(w)
                    forest.append(edge)
                    queue.append(w)
    return forest


def kappa(forest: Sequence[ForestEdge], K: Sequence[sp.Expr]) -> List[sp.Expr]:
    out = []
    for t, h in forest:
        if K[t] == 0 or K[h] == 0:
            raise MethodInapplicable(f"zero tree constant on forest edge {t + 1}->{h + 1}; "
                                     "the network is not weakly reversible")
        out.append(sp.cancel(K[h] / K[t]))
    return out


def kinetic_difference_matrix(forest: Sequence[ForestEdge], g: GeneralizedNetwork,
                              columns: Optional[Sequence[int]] = None) -> Matrix:
    """One row ``kinetic(head) - kinetic(tail)`` per forest edge, over ``columns``."""
    cols = list(range(len(g.species))) if columns is None else list(columns)
    rows = []
    for t, h in forest:
        kt, kh = g.vertices[t].kinetic, g.vertices[h].kinetic
        if kt is None or kh is None:
            raise MethodInapplicable("forest edge touches a vertex without kinetic complex")
        rows.append([Fraction(kh[j] - kt[j]) for j in cols])
    return rows


def is_generalized_inverse(M: Sequence[Sequence], H: Sequence[Sequence]) -> bool:
    if not M:
        return True
    n_cols = len(M[0])
    prod = matmul(matmul(M, H, inner=n_cols), M, inner=len(M))
    return all(Fraction(a) == Fraction(b) for ra, rb in zip(prod, M) for a, b in zip(ra, rb))


def simplify_positive(expr: sp.Expr) -> sp.Expr:
    """Canonical form for expressions over positive symbols: factored when the
    expression is rational, otherwise with powers collected."""
    expr = sp.powsimp(sp.powdenest(expr, force=True), force=True)
    if expr.is_rational_function(*expr.free_symbols):
        return sp.factor(expr)
    return expr


def _power(base: sp.Expr, e: Fraction) -> sp.Expr:
    if e == 0:
        return sp.Integer(1)
    return base ** sp.Rational(e.numerator, e.denominator)


@dataclass
class ParamSystem:
    """Intermediate objects of a tree-constant parametrization."""

    graph: GeneralizedNetwork
    columns: List[int]
    tree_constants: List[sp.Expr]
    forest: List[ForestEdge]
    kappa: List[sp.Expr]
    M: Matrix
    H: Matrix
    B: Matrix
    sigmas: List[sp.Symbol]
    taus: List[sp.Symbol]
    result: Parametrization = field(default=None)


def parametrize(g: GeneralizedNetwork, species: Optional[Sequence[int]] = None,
                forest: Optional[Sequence[ForestEdge]] = None, H: Optional[Sequence[Sequence]] = None,
                inverse: str = "pivot", pinned: Sequence[int] = (), tau_prefix: str = "tau",
                tau_start: int = 1, check: bool = True,
                preference: Optional[Sequence[int]] = None) -> ParamSystem:
    """Closed-form steady states of a translated network.

    Args:
        g: The generalized network.
        species: Species indices to parametrize (default: all of ``g``'s).
        forest: Spanning forest as (tail, head) vertex pairs; any pair list
            that spans is accepted.  Defaults to :func:`spanning_forest`.
        H: A user-supplied generalized inverse (species x edges), checked.
        inverse: ``"pivot"`` (block inverse of a nonsingular submatrix, keeps
            integral exponents) or ``"moore-penrose"``.
        pinned: Species indices that should stay free when possible; they are
            searched last for pivots.
        preference: Species indices in the order pivots are searched
            (before ``pinned`` is applied); defaults to index order.
        check: Refuse unless the translation is weakly reversible, V*-directed and
            of effective and kinetic deficiency zero.

    Raises:
        MethodInapplicable: a hypothesis does not hold.
        StructuralError: the supplied H is not a generalized inverse.
    """
    if check:
        report = check_translation(g)
        if not report.ok:
            raise MethodInapplicable("; ".join(report.failures()))
    cols = list(range(len(g.species))) if species is None else list(species)
    K = tree_constants(g)
    F = list(spanning_forest(g) if forest is None else forest)
    kap = kappa(F, K)
    M = kinetic_difference_matrix(F, g, cols)
    rank_of = {c: n for n, c in enumerate(preference)} if preference is not None else {}
    ranked = sorted(range(len(cols)), key=lambda i: (cols[i] in set(pinned), rank_of.get(cols[i], len(rank_of)), i))
    order = ranked
    if H is not None:
        Hm = [[Fraction(v) for v in row] for row in H]
        if len(Hm) != len(cols) or any(len(row) != len(F) for row in Hm):
            raise StructuralError("H must be species x forest-edges")
        if not is_generalized_inverse(M, Hm):
            raise StructuralError("supplied H does not satisfy MHM = M")
    elif inverse == "moore-penrose":
        Hm = generalized_inverse(M) if M else []
    elif inverse == "pivot":
        Hm = pivot_generalized_inverse(M, order)[0] if M else []
    else:
        raise ValueError(f"unknown inverse {inverse!r}")
    if not Hm:
        Hm = [[] for _ in cols]
    Bm = kernel_basis(M, len(cols), order)
    n_tau = len(Bm[0]) if Bm else 0
    taus = [symbol(f"{tau_prefix}{tau_start + p}") for p in range(n_tau)]
    exprs: Dict[str, sp.Expr] = {}
    names = [g.species[c] for c in cols]
    for j, name in enumerate(names):
        e = sp.Integer(1)
        for k, h in zip(kap, Hm[j]):
            e *= _power(k, h)
        for t, b in zip(taus, Bm[j]):
            e *= _power(t, b)
        exprs[name] = simplify_positive(e)
    sigmas = g.sigmas
    result = Parametrization(names, exprs, list(sigmas) + taus, "tree constants")
    return ParamSystem(g, cols, K, F, kap, M, Hm, Bm, list(sigmas), taus, result)
