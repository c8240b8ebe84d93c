"""Combining subnetwork parametrizations into one for the whole network.

Species shared by several parts get several expressions.  Equating them pins
free parameters: whenever one side involves a single still-free parameter
``p``, either as ``c * p^e`` or linearly with a sign-definite coefficient,
``p`` is solved for and substituted everywhere.  Anything harder is kept as a
residual constraint.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import sympy as sp

from .errors import MergeContradiction, MethodInapplicable
from .kinetics import concentration_name, symbol
from .mixed import linear_solve
from .parametrization import Parametrization, simplify_positive


@dataclass
class MergeConstraint:
    """One equation between two expressions for the same species.

    ``resolution`` is ``"p := expr"`` when a parameter was solved for,
    ``"identical"`` when both sides already agreed and ``"residual"`` otherwise.
    """

    species: str
    left: sp.Expr
    right: sp.Expr
    resolution: str
    parts: Tuple[Optional[int], Optional[int]] = (None, None)


@dataclass
class MergeResult:
    parametrization: Parametrization
    constraints: List[MergeConstraint]
    assignments: Dict[sp.Symbol, sp.Expr]

    @property
    def residual(self) -> List[MergeConstraint]:
        return [c for c in self.constraints if c.resolution == "residual"]


def single_parameter_monomial(expr: sp.Expr, params: Set[sp.Symbol]):
    """``(c, p, e)`` when ``expr == c * p**e`` with ``c`` free of ``params``."""
    present = expr.free_symbols & params
    if len(present) != 1:
        return None
    p = next(iter(present))
    c, rest = sp.powsimp(expr, force=True).as_independent(p, as_Add=False)
    if rest == p:
        return c, p, sp.Integer(1)
    if rest.is_Pow and rest.base == p and rest.exp.is_Rational and rest.exp != 0:
        return c, p, rest.exp
    return None


def _equal(a: sp.Expr, b: sp.Expr, seed: int = 0) -> bool:
    d = sp.simplify(a - b)
    if d == 0:
        return True
    syms = sorted(d.free_symbols, key=lambda s: s.name)
    fn = sp.lambdify(syms, d, "numpy")
    rng = np.random.default_rng(seed)
    for _ in range(5):
        vals = rng.uniform(0.5, 2.0, len(syms))
        scale = 1.0 + abs(complex(sp.lambdify(syms, a, "numpy")(*vals)))
        if abs(complex(fn(*vals))) > 1e-9 * scale:
            return False
    return True


def merge_parametrizations(parts: Sequence[Parametrization], species_order: Sequence[str],
                           pinned: Sequence[str] = (), constants: Sequence[sp.Symbol] = ()) -> MergeResult:
    """Equate shared species across parts and solve for parameters.

    Args:
        parts: Per-part results; their parameter symbols must be distinct.
        species_order: Species names in network order (controls tie-breaks).
        pinned: Species to prefer as free parameters of the merged result.
        constants: Named constants (never parameters).

    Raises:
        MergeContradiction: two parameter-free expressions for one species differ.
    """
    params: Set[sp.Symbol] = set()
    for p in parts:
        overlap = params & set(p.free_parameters)
        if overlap:
            raise MethodInapplicable(f"parameter names reused across parts: {sorted(map(str, overlap))}")
        params.update(p.free_parameters)
    candidates: Dict[str, List[Tuple[Optional[int], sp.Expr]]] = {}
    for idx, p in enumerate(parts):
        for s, e in p.items():
            candidates.setdefault(s, []).append((p.part if p.part is not None else idx, e))
    order = [s for s in species_order if s in candidates]
    assign: Dict[sp.Symbol, sp.Expr] = {}
    final: Dict[str, sp.Expr] = {}
    consumed: Set[Tuple[str, int]] = set()
    constraints: List[MergeConstraint] = []
    free_species: List[str] = []

    def live() -> Set[sp.Symbol]:
        return params - set(assign)

    def current(e: sp.Expr) -> sp.Expr:
        return e.subs(assign) if assign else e

    def bind(p: sp.Symbol, value: sp.Expr):
        value = simplify_positive(value)
        for q in list(assign):
            assign[q] = simplify_positive(assign[q].subs(p, value))
        assign[p] = value

    def settle(s: str, i: int, part, e: sp.Expr) -> bool:
        target = final[s]
        if not (e.free_symbols & live()):
            if not _equal(e, target):
                raise MergeContradiction(f"species {s}: parts give different values {e} and {target}")
            constraints.append(MergeConstraint(s, target, e, "identical", (None, part)))
            consumed.add((s, i))
            return True
        mono = single_parameter_monomial(e, live())
        if mono is not None:
            c, p, k = mono
            value = (target / c) ** (1 / k)
        else:
            present = e.free_symbols & live()
            if len(present) != 1:
                return False
            p = next(iter(present))
            value = linear_solve(e - target, p)
            if value is None:
                return False
        bind(p, value)
        constraints.append(MergeConstraint(s, target, e, f"{p} := {simplify_positive(value)}", (None, part)))
        consumed.add((s, i))
        return True

    while True:
        progress = False
        for s in order:
            if s in final:
                continue
            for i, (part, e) in enumerate(candidates[s]):
                e = current(e)
                if not (e.free_symbols & live()):
                    final[s] = simplify_positive(e)
                    consumed.add((s, i))
                    progress = True
                    break
        for s in order:
            if s not in final:
                continue
            for i, (part, e) in enumerate(candidates[s]):
                if (s, i) in consumed:
                    continue
                if settle(s, i, part, current(e)):
                    progress = True
        if progress:
            continue
        # introduce a new free species, pinned ones first, exact parameters first
        ranked = [s for s in order if s in pinned] + [s for s in order if s not in pinned]
        pick = None
        for exact in (True, False):
            for s in ranked:
                if s in final:
                    continue
                for i, (part, e) in enumerate(candidates[s]):
                    e = current(e)
                    mono = single_parameter_monomial(e, live())
                    if mono is None or (exact and not (mono[0] == 1 and mono[2] == 1)):
                        continue
                    pick = (s, i, mono)
                    break
                if pick:
                    break
            if pick:
                break
        if pick is None:
            break
        s, i, (c, p, k) = pick
        x = symbol(concentration_name(s))
        bind(p, (x / c) ** (1 / k))
        final[s] = x
        free_species.append(s)
        consumed.add((s, i))

    leftover_params: List[sp.Symbol] = []
    for s in order:
        if s not in final:
            part, e = candidates[s][0]
            final[s] = simplify_positive(current(e))
            consumed.add((s, 0))
        for i, (part, e) in enumerate(candidates[s]):
            if (s, i) not in consumed:
                constraints.append(MergeConstraint(s, final[s], current(e), "residual", (None, part)))
    for s in order:
        final[s] = simplify_positive(current(final[s]))
    remaining = live()
    for p in sorted(remaining, key=lambda q: q.name):
        if any(p in final[s].free_symbols for s in order):
            leftover_params.append(p)
    free = [symbol(concentration_name(s)) for s in order if s in free_species] + leftover_params
    merged = Parametrization(list(order), final, free, "merge")
    return MergeResult(merged, constraints, dict(assign))


def acr_report(P: Parametrization) -> Dict[str, bool]:
    """Species -> True when its expression involves no free parameter."""
    free = set(P.free_parameters)
    return {s: not (e.free_symbols & free) for s, e in P.items()}


def compose_exclusive(ss_m: Parametrization, ss_c: Parametrization) -> Parametrization:
    """Concatenate parametrizations of mutually exclusive species sets."""
    shared = set(ss_m.species) & set(ss_c.species)
    if shared:
        raise MethodInapplicable(f"parts are not mutually exclusive; shared species {sorted(shared)}")
    exprs = dict(ss_m.expressions)
    exprs.update(ss_c.expressions)
    free = list(ss_m.free_parameters) + [p for p in ss_c.free_parameters if p not in ss_m.free_parameters]
    return Parametrization(list(ss_m.species) + list(ss_c.species), exprs, free, "exclusive composition")
