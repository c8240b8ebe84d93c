"""Steady states of subnetworks outside the reach of tree constants.

Two routes: direct elimination on the balance equations, solving one unknown
at a time where it appears linearly with a coefficient of fixed sign, and
clearing a shared positive denominator to obtain an associated mass-action
system with the same positive steady states.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp

from .errors import MethodInapplicable
from .kinetics import (KineticAssignment, KineticsTag, concentration_symbols, formation_rate, monomial,
                       split_monomial, symbol)
from .linalg import exact_rank, independent_rows
from .network import Network, Reaction, reaction_vector, stoichiometric_matrix
from .parametrization import Parametrization, simplify_positive


@dataclass(frozen=True)
class EliminationStep:
    species: str
    equation: str
    expression: sp.Expr


@dataclass
class EliminationPlan:
    steps: List[EliminationStep]
    free: List[str]


def _sign(term: sp.Expr) -> int:
    if term.is_positive:
        return 1
    if term.is_negative:
        return -1
    return 0


def linear_solve(eq: sp.Expr, x: sp.Symbol) -> Optional[sp.Expr]:
    """Positive root of ``eq = 0`` in ``x`` when ``eq`` is affine in ``x`` up to
    a monomial factor and both parts have a fixed, opposite sign."""
    num = sp.expand(sp.numer(sp.together(eq)))
    terms = sp.Add.make_args(num)
    powers = []
    for t in terms:
        c, e = t.as_independent(x, as_Add=False)
        if e == 1:
            powers.append((c, 0))
        elif e == x:
            powers.append((c, 1))
        elif e.is_Pow and e.base == x and e.exp.is_Integer and e.exp > 0:
            powers.append((c, int(e.exp)))
        else:
            return None
    low = min(p for _, p in powers)
    powers = [(c, p - low) for c, p in powers]
    if any(p > 1 for _, p in powers):
        return None
    a = [c for c, p in powers if p == 1]
    b = [c for c, p in powers if p == 0]
    if not a or not b:
        return None
    sa = {_sign(t) for t in a}
    sb = {_sign(t) for t in b}
    if len(sa) != 1 or len(sb) != 1 or 0 in sa or sa == sb:
        return None
    return simplify_positive(-sp.Add(*b) / sp.Add(*a))


def _hill_only(net: Network, kin: KineticAssignment, j: int) -> bool:
    """Species whose concentration only enters non-monomial rate laws."""
    x = kin.species[j]
    seen = False
    for r in net.reactions:
        e = kin.rates[r.label]
        if x in e.free_symbols:
            if split_monomial(e, kin.species) is not None:
                return False
            seen = True
    return seen


def default_free(net: Network, kin: KineticAssignment) -> List[int]:
    """Catalysts (never net-changed) and species appearing only inside
    quotient rate laws."""
    sm = stoichiometric_matrix(net)
    out = []
    for j in net.involved_species():
        if not any(sm[j]) or _hill_only(net, kin, j):
            out.append(j)
    return out


def solve_by_elimination(net: Network, kin: KineticAssignment, free: Optional[Sequence[str]] = None,
                         pinned: Sequence[str] = (), param_prefix: str = "pi",
                         param_start: int = 1) -> Tuple[Parametrization, EliminationPlan]:
    """Solve the balance equations of ``net`` by successive linear solves.

    Args:
        free: Species to keep free; default is the catalyst / quotient-only
            heuristic plus ``pinned``.
        pinned: Species that must stay free whenever possible.
        param_prefix: Free species become parameters ``pi1, pi2, ...``.

    Raises:
        MethodInapplicable: some unknown cannot be isolated.
    """
    involved = net.involved_species()
    sm = stoichiometric_matrix(net)
    rank = exact_rank(sm)
    if free is None:
        free_idx = set(default_free(net, kin))
        free_idx.update(net.species_index(s) for s in pinned if net.species_index(s) in involved)
    else:
        free_idx = {net.species_index(s) for s in free}
    unknowns = [j for j in involved if j not in free_idx]
    if len(unknowns) < rank:
        raise MethodInapplicable(f"{net.species} part: fewer unknowns ({len(unknowns)}) than equations ({rank})")
    # dependents are the highest-index unknowns; the rest become free
    extra = unknowns[:len(unknowns) - rank]
    free_idx.update(extra)
    dependents = [j for j in unknowns if j not in extra]

    f = formation_rate(net, kin)
    rows = [j for j in involved if any(sm[j])]
    eq_rows = [rows[i] for i in independent_rows([sm[j] for j in rows])] if rows else []
    xs = kin.species
    free_sorted = sorted(free_idx & set(involved))
    params = {j: symbol(f"{param_prefix}{param_start + n}") for n, j in enumerate(free_sorted)}
    sub = {xs[j]: p for j, p in params.items()}
    equations = {j: f[j].subs(sub) for j in eq_rows}
    solved: Dict[int, sp.Expr] = {}
    steps: List[EliminationStep] = []
    remaining = sorted(dependents, reverse=True)
    while remaining:
        progress = False
        for eq_j in list(equations):
            eq = equations[eq_j]
            present = [d for d in remaining if xs[d] in eq.free_symbols]
            for d in present:
                sol = linear_solve(eq, xs[d])
                if sol is None:
                    continue
                solved[d] = sol
                steps.append(EliminationStep(net.species[d], f"d{xs[eq_j].name}/dt", sol))
                del equations[eq_j]
                remaining.remove(d)
                for k in list(equations):
                    equations[k] = equations[k].subs(xs[d], sol)
                for k in list(solved):
                    solved[k] = solved[k].subs(xs[d], sol)
                progress = True
                break
            if progress:
                break
        if not progress:
            names = [net.species[d] for d in remaining]
            raise MethodInapplicable(f"cannot isolate {names}: remaining balances are not linear "
                                     "in any unknown with a sign-definite coefficient")
    exprs = {}
    for j in involved:
        exprs[net.species[j]] = params[j] if j in params else simplify_positive(solved[j])
    names = [net.species[j] for j in involved]
    plan = EliminationPlan(steps, [net.species[j] for j in free_sorted])
    return Parametrization(names, exprs, [params[j] for j in free_sorted], "elimination"), plan


@dataclass
class ClearedSystem:
    """An associated mass-action system obtained by clearing a denominator.

    Attributes:
        denominator: The shared positive denominator ``D``.
        network: Cleared network; its ODEs are ``D`` times the original ones.
        kinetics: Mass-action kinetics of the cleared network.
        substitutions: Composite rate constant -> its definition.
    """

    original: Network
    original_kinetics: KineticAssignment
    denominator: sp.Expr
    network: Network
    kinetics: KineticAssignment
    substitutions: Dict[sp.Symbol, sp.Expr] = field(default_factory=dict)


def _is_positive_polynomial(d: sp.Expr, xs: Sequence[sp.Symbol]) -> bool:
    d = sp.expand(d)
    if not d.is_polynomial(*xs):
        return False
    terms = sp.Add.make_args(d)
    has_const = any(not (t.free_symbols & set(xs)) for t in terms)
    return has_const and all(t.is_positive for t in terms)


def clear_denominators(net: Network, kin: KineticAssignment) -> ClearedSystem:
    """Multiply the ODEs by the single shared denominator of the rate laws and
    read off an associated mass-action network.

    Raises:
        MethodInapplicable: the denominators differ, are not polynomials with
            positive coefficients and positive constant term, or a term would
            need a negative stoichiometric coefficient.
    """
    xs = list(kin.species)
    dens = []
    nums = {}
    for r in net.reactions:
        num, den = sp.fraction(sp.together(kin.rates[r.label]))
        nums[r.label] = (num, sp.expand(den))
        if not den.free_symbols & set(xs):
            continue
        dens.append(sp.expand(den))
    shared = set(dens)
    if len(shared) > 1:
        raise MethodInapplicable("rate laws do not share a single denominator")
    D = dens[0] if dens else sp.Integer(1)
    if D != 1 and not _is_positive_polynomial(D, xs):
        raise MethodInapplicable(f"cannot certify that {D} is positive")
    emitted: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], sp.Expr] = {}
    for r in net.reactions:
        num, den = nums[r.label]
        if den.free_symbols & set(xs):
            scaled = sp.expand(num)
        else:
            scaled = sp.expand(num / den * D)
        vec = reaction_vector(r, net.m)
        poly = sp.Poly(scaled, *xs)
        for exps, coeff in sorted(poly.terms(), key=lambda t: (sum(t[0]), t[0])):
            if not coeff.is_positive:
                raise MethodInapplicable(f"term {coeff} of {r.label} is not positive")
            src = tuple(int(v) for v in exps)
            prod = tuple(a + b for a, b in zip(src, vec))
            if min(prod) < 0:
                raise MethodInapplicable(f"term of {r.label} would need a negative coefficient")
            key = (src, prod)
            emitted[key] = emitted.get(key, sp.Integer(0)) + coeff
    reactions = []
    rates = {}
    subs: Dict[sp.Symbol, sp.Expr] = {}
    for i, ((src, prod), coeff) in enumerate(emitted.items(), start=1):
        label = f"R{i}"
        coeff = sp.factor(coeff)
        if coeff.is_Symbol:
            k = coeff
        else:
            k = symbol(f"k{i}p")
            subs[k] = coeff
        reactions.append(Reaction(label, src, prod))
        rates[label] = k * monomial(src, xs)
    new = Network(net.species, tuple(reactions))
    return ClearedSystem(net, kin, D, new, KineticAssignment(tuple(xs), rates, kin.constants), subs)
