"""Symbolic rate laws, kinetics classification and the species formation rate.

Rate expressions are sympy expressions over positive symbols: species
concentrations (``x28``, ``a``), rate constants (``k1``) and named constants
(``alpha``, ``kbar``).  Named constants are never free steady-state parameters.
"""

import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .errors import ConfigurationError, EvaluationError, StructuralError
from .network import Complex, Network, reaction_vector


def symbol(name: str) -> sp.Symbol:
    """All symbols in the toolkit are positive reals."""
    return sp.Symbol(name, positive=True)


def concentration_name(species: str) -> str:
    return species.lower()


def concentration_symbols(net: Network) -> Tuple[sp.Symbol, ...]:
    return tuple(symbol(concentration_name(s)) for s in net.species)


def monomial(c: Sequence[int], xs: Sequence[sp.Symbol]) -> sp.Expr:
    return sp.Mul(*[x ** v for x, v in zip(xs, c) if v])


class KineticsTag(enum.Enum):
    MassAction = "MassAction"
    PowerLaw = "PowerLaw"
    Rational = "Rational"
    Other = "Other"


def split_monomial(expr: sp.Expr, species: Sequence[sp.Symbol]):
    """Split ``expr`` into (coefficient, {species: exponent}) if it is a single
    monomial in the species; return None otherwise."""
    spset = set(species)
    coeff = []
    powers: Dict[sp.Symbol, sp.Expr] = {}
    for f in sp.Mul.make_args(expr):
        if not (f.free_symbols & spset):
            coeff.append(f)
        elif f in spset:
            powers[f] = powers.get(f, 0) + 1
        elif f.is_Pow and f.base in spset and not (f.exp.free_symbols & spset):
            powers[f.base] = powers.get(f.base, 0) + f.exp
        else:
            return None
    return sp.Mul(*coeff), powers


def _is_algebraic_tree(expr: sp.Expr) -> bool:
    if expr.is_Symbol or expr.is_Number:
        return True
    if expr.is_Add or expr.is_Mul:
        return all(_is_algebraic_tree(a) for a in expr.args)
    if expr.is_Pow:
        return _is_algebraic_tree(expr.base) and (expr.exp.is_Number or expr.exp.is_Symbol)
    return False


def classify_rate(expr: sp.Expr, source: Sequence[int], species: Sequence[sp.Symbol]) -> KineticsTag:
    mono = split_monomial(expr, species)
    if mono is not None:
        coeff, powers = mono
        expected = {x: v for x, v in zip(species, source) if v}
        if coeff != 0 and powers == expected:
            return KineticsTag.MassAction
        return KineticsTag.PowerLaw
    if _is_algebraic_tree(expr):
        return KineticsTag.Rational
    return KineticsTag.Other


def mass_action_constant(expr: sp.Expr, species: Sequence[sp.Symbol]) -> sp.Expr:
    """Coefficient of a mass-action rate law (the edge label used in translations)."""
    mono = split_monomial(expr, species)
    if mono is None:
        raise StructuralError(f"{expr} is not a monomial rate law")
    return mono[0]


@dataclass(frozen=True)
class KineticAssignment:
    """One rate law per reaction label, plus named constants with optional defaults."""

    species: Tuple[sp.Symbol, ...]
    rates: Mapping[str, sp.Expr]
    constants: Mapping[sp.Symbol, Optional[float]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rates", dict(self.rates))
        object.__setattr__(self, "constants", dict(self.constants))

    def classify(self, net: Network) -> Dict[str, KineticsTag]:
        return {r.label: classify_rate(self.rates[r.label], r.source, self.species) for r in net.reactions}

    def check_covers(self, net: Network) -> None:
        missing = [r.label for r in net.reactions if r.label not in self.rates]
        if missing:
            raise StructuralError(f"no rate law for reactions {missing}")

    def rate_constants(self) -> List[sp.Symbol]:
        """Rate-constant symbols in order of first appearance."""
        skip = set(self.species) | set(self.constants)
        out: List[sp.Symbol] = []
        for e in self.rates.values():
            for s in sorted(e.free_symbols - skip, key=sp.default_sort_key):
                if s not in out:
                    out.append(s)
        return out

    def symbol_table(self) -> Dict[str, List[str]]:
        """Rate-constant name -> reactions whose law mentions it."""
        table: Dict[str, List[str]] = {}
        for k in self.rate_constants():
            table[k.name] = [lab for lab, e in self.rates.items() if k in e.free_symbols]
        return table

    def restrict(self, labels: Iterable[str]) -> "KineticAssignment":
        labels = list(labels)
        return KineticAssignment(self.species, {l: self.rates[l] for l in labels}, self.constants)

    def is_mass_action(self, net: Network) -> bool:
        tags = self.classify(net)
        return all(tags[r.label] is KineticsTag.MassAction for r in net.reactions)


def mass_action_kinetics(net: Network, constants: Optional[Sequence[sp.Expr]] = None) -> KineticAssignment:
    """Mass-action rate laws ``k_i * x^source`` with ``k1, k2, ...`` by default."""
    xs = concentration_symbols(net)
    if constants is None:
        constants = [symbol(f"k{i + 1}") for i in range(net.r)]
    rates = {r.label: k * monomial(r.source, xs) for r, k in zip(net.reactions, constants)}
    return KineticAssignment(xs, rates)


def formation_rate(net: Network, kin: KineticAssignment) -> List[sp.Expr]:
    """Symbolic species formation rate ``f(x) = sum_r K_r(x) (y' - y)``."""
    kin.check_covers(net)
    f = [sp.Integer(0)] * net.m
    for r in net.reactions:
        rate = kin.rates[r.label]
        for j, v in enumerate(reaction_vector(r, net.m)):
            if v:
                f[j] += v * rate
    return f


def formation_terms(net: Network, kin: KineticAssignment) -> List[List[sp.Expr]]:
    """Per species, the signed individual reaction contributions to ``f_j``."""
    terms: List[List[sp.Expr]] = [[] for _ in range(net.m)]
    for r in net.reactions:
        rate = kin.rates[r.label]
        for j, v in enumerate(reaction_vector(r, net.m)):
            if v:
                terms[j].append(v * rate)
    return terms


class RateEvaluator:
    """Vectorised numeric evaluation of the rate laws of a network.

    Arrays passed to :meth:`rates` have one row per sample.  Named constants
    must be bound at construction; every other symbol is an argument.
    """

    def __init__(self, net: Network, kin: KineticAssignment,
                 constant_values: Optional[Mapping[str, float]] = None):
        kin.check_covers(net)
        self.net = net
        self.kin = kin
        self.species = list(kin.species)
        consts = {}
        for c, default in kin.constants.items():
            value = (constant_values or {}).get(c.name, default)
            if value is None:
                raise ConfigurationError(f"named constant {c.name} has no value")
            consts[c] = value
        self.constant_values = consts
        self.parameters = kin.rate_constants()
        args = self.species + self.parameters
        self._num = []
        self._den = []
        for r in net.reactions:
            e = kin.rates[r.label].subs(consts)
            num, den = sp.fraction(sp.together(e))
            self._num.append(sp.lambdify(args, num, "numpy"))
            self._den.append(sp.lambdify(args, den, "numpy"))
        self._vectors = np.array([reaction_vector(r, net.m) for r in net.reactions], dtype=float)

    def _args(self, conc: np.ndarray, params: Mapping[str, np.ndarray]):
        conc = np.atleast_2d(np.asarray(conc, dtype=float))
        out = [conc[:, j] for j in range(len(self.species))]
        for p in self.parameters:
            if p.name not in params:
                raise ConfigurationError(f"unbound symbol {p.name}")
            out.append(np.broadcast_to(np.asarray(params[p.name], dtype=float), (conc.shape[0],)))
        return out

    def rates(self, conc, params) -> np.ndarray:
        """Array of shape (samples, reactions)."""
        args = self._args(conc, params)
        n = args[0].shape[0] if args else 1
        cols = []
        for r, num, den in zip(self.net.reactions, self._num, self._den):
            d = np.broadcast_to(np.asarray(den(*args), dtype=float), (n,))
            if np.any(d == 0):
                raise EvaluationError(f"zero denominator in rate law of {r.label}")
            cols.append(np.broadcast_to(np.asarray(num(*args), dtype=float), (n,)) / d)
        return np.stack(cols, axis=1)

    def rhs(self, conc, params) -> np.ndarray:
        return self.rates(conc, params) @ self._vectors

    def rhs_and_scale(self, conc, params) -> Tuple[np.ndarray, np.ndarray]:
        """``f`` together with ``sum_r |K_r (y'-y)_j|`` per species."""
        v = self.rates(conc, params)
        return v @ self._vectors, np.abs(v) @ np.abs(self._vectors)


def evaluate_rhs(net: Network, kin: KineticAssignment, conc: Sequence[float],
                 constants: Mapping[str, float]) -> np.ndarray:
    """Numeric ``f(x)`` at one point.

    ``constants`` binds rate constants and (optionally, overriding defaults)
    named constants by name.
    """
    conc = np.asarray(conc, dtype=float)
    if conc.shape != (net.m,):
        raise StructuralError(f"expected {net.m} concentrations, got {conc.shape}")
    if np.any(conc <= 0):
        raise EvaluationError("concentrations must be positive")
    ev = RateEvaluator(net, kin, {k: v for k, v in constants.items()})
    return ev.rhs(conc[None, :], constants)[0]


def check_positivity(net: Network, kin: KineticAssignment, n_samples: int = 50, seed: int = 0) -> List[str]:
    """Reactions tagged MassAction that violate ``K(c) > 0 iff supp y in supp c``
    on random points with randomly zeroed coordinates."""
    rng = np.random.default_rng(seed)
    tags = kin.classify(net)
    bad = []
    for r in net.reactions:
        if tags[r.label] is not KineticsTag.MassAction:
            continue
        e = kin.rates[r.label].subs({p: 1 for p in kin.rate_constants()})
        f = sp.lambdify(kin.species, e, "numpy")
        for _ in range(n_samples):
            c = rng.uniform(0.1, 10, net.m) * (rng.random(net.m) > 0.3)
            val = f(*c)
            should = all(c[i] > 0 for i, v in enumerate(r.source) if v)
            if (val > 0) != should:
                bad.append(r.label)
                break
    return bad
