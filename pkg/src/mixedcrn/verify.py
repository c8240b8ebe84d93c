"""Independent checks: tree enumeration, exhaustive partition search and the
seeded residual harness.

Nothing here reuses the production routines it is meant to check: trees are
enumerated by brute force instead of determinants, and ranks come from sympy's
domain matrices rather than the in-house fraction elimination.
"""

import itertools
import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import ConfigurationError, EvaluationError, StructuralError
from .kinetics import KineticAssignment, RateEvaluator, concentration_name
from .network import Network, reaction_vector
from .parametrization import Parametrization

LabelledEdge = Tuple[int, int, sp.Expr]

DEFAULT_SEED = 20240501


def enumerate_rooted_trees(n: int, edges: Sequence[LabelledEdge], root: int,
                           max_vertices: int = 8) -> List[Tuple[int, ...]]:
    """All spanning arborescences pointing to ``root``, as tuples of edge indices.

    Each non-root vertex keeps exactly one outgoing edge; a choice is a tree
    iff following the kept edges from every vertex reaches the root.
    """
    if n > max_vertices:
        raise StructuralError(f"tree enumeration is capped at {max_vertices} vertices")
    outgoing = {v: [k for k, (t, h, _) in enumerate(edges) if t == v and h != v] for v in range(n)}
    others = [v for v in range(n) if v != root]
    if any(not outgoing[v] for v in others):
        return []
    trees = []
    for choice in itertools.product(*(outgoing[v] for v in others)):
        nxt = {v: edges[k][1] for v, k in zip(others, choice)}
        ok = True
        for v in others:
            seen = set()
            w = v
            while w != root:
                if w in seen:
                    ok = False
                    break
                seen.add(w)
                w = nxt[w]
            if not ok:
                break
        if ok:
            trees.append(tuple(choice))
    return trees


def tree_constant_by_enumeration(n: int, edges: Sequence[LabelledEdge], root: int) -> sp.Expr:
    total = sp.Integer(0)
    for tree in enumerate_rooted_trees(n, edges, root):
        total += sp.Mul(*[edges[k][2] for k in tree])
    return sp.expand(total)


def _rank_qq(cols: Sequence[Sequence[int]]) -> int:
    if not cols:
        return 0
    rows = [list(r) for r in zip(*cols)]
    return DomainMatrix([[QQ(v) for v in row] for row in rows], (len(rows), len(cols)), QQ).rank()


def _set_partitions(items: List[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def exhaustive_finest(net: Network, max_reactions: int = 10) -> List[List[int]]:
    """Finest independent partition by trying every set partition."""
    if net.r > max_reactions:
        raise StructuralError(f"exhaustive search is capped at {max_reactions} reactions")
    vecs = [reaction_vector(r, net.m) for r in net.reactions]

    @lru_cache(maxsize=None)
    def rank(subset: Tuple[int, ...]) -> int:
        return _rank_qq([vecs[i] for i in subset])

    total = rank(tuple(range(net.r)))
    best: Optional[List[List[int]]] = None
    for part in _set_partitions(list(range(net.r))):
        if best is not None and len(part) <= len(best):
            continue
        if sum(rank(tuple(sorted(p))) for p in part) == total:
            best = part
    return sorted((sorted(p) for p in best), key=lambda p: p[0])


@dataclass
class ResidualReport:
    """Outcome of the residual harness.

    ``worst`` holds the inputs of the sample with the largest residual.
    """

    seed: int
    samples: int
    tol: float
    max_residual: float
    median_residual: float
    passed: bool
    worst_index: int
    worst: Dict[str, float] = field(default_factory=dict)
    failing_species: Optional[str] = None
    per_sample: List[float] = field(default_factory=list, repr=False)

    def to_dict(self) -> Dict[str, object]:
        d = asdict(self)
        del d["per_sample"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _log_uniform(rng: np.random.Generator, n: int, lo: float = 0.1, hi: float = 10.0) -> np.ndarray:
    return np.exp(rng.uniform(np.log(lo), np.log(hi), n))


def residual_harness(net: Network, kin: KineticAssignment, P: Parametrization, seed: int = DEFAULT_SEED,
                     n: int = 100, tol: float = 1e-9, constant_values: Optional[Mapping[str, float]] = None,
                     substitutions: Optional[Mapping[sp.Symbol, sp.Expr]] = None) -> ResidualReport:
    """Sample rate constants and free parameters log-uniformly on [0.1, 10],
    evaluate ``P`` and report ``max_j |f_j| / (1 + sum |terms_j|)``.

    Args:
        constant_values: Overrides for named constants (name -> value).
        substitutions: Applied to ``P`` before sampling (for example composite
            rate constants in terms of the original ones).

    Raises:
        EvaluationError: an expression is non-positive or not finite.
        ConfigurationError: a species needed by the rate laws has no expression.
    """
    named = {c.name: c for c in kin.constants}
    const_vals: Dict[sp.Symbol, float] = {}
    for name, sym in named.items():
        v = (constant_values or {}).get(name, kin.constants[sym])
        if v is None:
            raise ConfigurationError(f"named constant {name} has no value")
        const_vals[sym] = float(v)
    exprs = {s: (e.subs(substitutions) if substitutions else e) for s, e in P.items()}
    conc_syms = set(kin.species)
    needed = set()
    for r in net.reactions:
        needed.update(kin.rates[r.label].free_symbols & conc_syms)
    names_by_sym = {sym: net.species[j] for j, sym in enumerate(kin.species)}
    missing = sorted(names_by_sym[s] for s in needed if names_by_sym[s] not in exprs)
    involved = [net.species[j] for j in net.involved_species()]
    missing += [s for s in involved if s not in exprs and s not in missing]
    if missing:
        raise ConfigurationError(f"parametrization has no expression for {missing}")
    ev = RateEvaluator(net, kin, {c.name: v for c, v in const_vals.items()})
    rate_params = list(ev.parameters)
    free = set()
    for e in exprs.values():
        free.update(e.free_symbols)
    free -= set(const_vals)
    free -= set(rate_params)
    sample_syms = rate_params + sorted(free, key=lambda s: s.name)
    rng = np.random.default_rng(seed)
    values = _log_uniform(rng, n * len(sample_syms)).reshape(n, len(sample_syms)) if sample_syms else np.zeros((n, 0))
    columns = {s: values[:, i] for i, s in enumerate(sample_syms)}
    conc = np.ones((n, net.m))
    for j, sym in enumerate(kin.species):
        name = net.species[j]
        if name not in exprs:
            continue
        e = exprs[name].subs(const_vals)
        args = sorted(e.free_symbols, key=lambda s: s.name)
        unbound = [a.name for a in args if a not in columns]
        if unbound:
            raise ConfigurationError(f"unbound symbol(s) {unbound} in expression for {name}")
        fn = sp.lambdify(args, e, "numpy")
        with np.errstate(all="ignore"):
            col = np.broadcast_to(np.asarray(fn(*[columns[a] for a in args]), dtype=float), (n,))
        bad = np.flatnonzero(~np.isfinite(col) | (col <= 0))
        if bad.size:
            raise EvaluationError(f"expression for {name} is not positive at sample {int(bad[0])}")
        conc[:, j] = col
    params = {s.name: columns[s] for s in rate_params}
    f, scale = ev.rhs_and_scale(conc, params)
    rel = np.max(np.abs(f) / (1.0 + scale), axis=1) if net.m else np.zeros(n)
    worst = int(np.argmax(rel)) if n else 0
    worst_vals = {s.name: float(columns[s][worst]) for s in sample_syms}
    failing = None
    if n and rel[worst] > tol:
        per = np.abs(f[worst]) / (1.0 + scale[worst])
        failing = net.species[int(np.argmax(per))]
    return ResidualReport(
        seed=seed,
        samples=n,
        tol=tol,
        max_residual=float(rel.max()) if n else 0.0,
        median_residual=float(np.median(rel)) if n else 0.0,
        passed=bool(n == 0 or rel.max() <= tol),
        worst_index=worst,
        worst=worst_vals,
        failing_species=failing,
        per_sample=[float(v) for v in rel],
    )


def parametrization_from_expressions(net: Network, kin: KineticAssignment,
                                     exprs: Mapping[str, sp.Expr]) -> Parametrization:
    """Build a parametrization from ``species -> expr`` as written by hand.

    Expressions may mention other species that have their own line; those are
    substituted in dependency order.  A species that has no line, or whose
    line mentions its own concentration (``X = x`` in the simplest case), is
    free: its symbol is a parameter and is never substituted.

    Raises:
        ConfigurationError: the references are circular.
    """
    by_sym = {kin.species[j]: net.species[j] for j in range(net.m)}
    sym_of = {v: k for k, v in by_sym.items()}
    free_species = {s for s, e in exprs.items() if s in sym_of and sym_of[s] in e.free_symbols}
    defined = {sym_of[s]: s for s in exprs if s in sym_of and s not in free_species}
    deps = nx.DiGraph()
    deps.add_nodes_from(exprs)
    for s, e in exprs.items():
        for x in e.free_symbols & set(defined):
            deps.add_edge(defined[x], s)
    try:
        order = list(nx.topological_sort(deps))
    except nx.NetworkXUnfeasible:
        cycle = [u for u, _ in nx.find_cycle(deps)]
        raise ConfigurationError(f"circular references between species {cycle}") from None
    resolved: Dict[str, sp.Expr] = {}
    for s in order:
        e = exprs[s]
        refs = e.free_symbols & set(defined)
        resolved[s] = e.xreplace({x: resolved[defined[x]] for x in refs}) if refs else e
    params = set()
    for e in resolved.values():
        params |= e.free_symbols & set(by_sym)
    for x in params:
        resolved.setdefault(by_sym[x], x)
    species = [s for s in net.species if s in resolved]
    known = set(by_sym) | set(kin.constants)
    for rate in kin.rates.values():
        known |= rate.free_symbols
    others = set()
    for e in resolved.values():
        others |= e.free_symbols - known
    free = [sym_of[s] for s in species if sym_of[s] in params] + sorted(others, key=lambda q: q.name)
    return Parametrization(species, resolved, free, "file")


def validate_parametrization(net: Network, kin: KineticAssignment, P: Parametrization, n_samples: int = 100,
                             tol: float = 1e-9, seed: int = DEFAULT_SEED, **kw) -> float:
    """Maximum relative residual of ``P`` over seeded samples."""
    return residual_harness(net, kin, P, seed=seed, n=n_samples, tol=tol, **kw).max_residual
