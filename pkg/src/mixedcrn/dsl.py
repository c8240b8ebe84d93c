"""The ``.crn`` network format.

One statement per line; ``#`` starts a comment::

    species A B C                      # optional; fixes species order
    const alpha = 2                    # named constant with default value
    R1: B + C -> A + C ; k1*b*c
    R2: A <-> B ; k2*a , k3*b          # expands to R2f / R2r
    translate R5 by -X25               # user-chosen translation shift
    free X3 X7                         # species to keep as free parameters

Inside rate expressions the concentration of species ``X28`` is ``x28`` (the
species name lower-cased).  Identifiers resolve to a concentration, then to a
declared constant, then to a rate constant if they start with ``k``; anything
else is reported as an unknown species.

Parametrization files use the same expression grammar, one ``species = expr``
line each.
"""

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import sympy as sp
from sympy.printing.str import StrPrinter

from .errors import ParseError, StructuralError
from .kinetics import KineticAssignment, concentration_name, symbol
from .network import Network, Reaction

KEYWORDS = ("species", "const", "translate", "free")


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    start: int
    end: int


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    message: str
    span: SourceSpan

    def __str__(self):
        return f"{self.span.line}:{self.span.column}: {self.severity}: {self.message}"


@dataclass
class Model:
    """Everything a ``.crn`` file declares."""

    network: Network
    kinetics: KineticAssignment
    translations: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    free: List[str] = field(default_factory=list)
    diagnostics: List[ParseDiagnostic] = field(default_factory=list)

    def __iter__(self):
        # allows ``net, kin = parse_network(text)``
        return iter((self.network, self.kinetics))


_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<num>\d+(?:\.\d+)?)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op><->|->|[-+*/^(),;:=])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


class _Fail(Exception):
    def __init__(self, message, span):
        self.message = message
        self.span = span


def _tokenize(line: str, lineno: int, offset: int) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        mt = _TOKEN.match(line, pos)
        if mt is None:
            raise _Fail(f"unexpected character {line[pos]!r}",
                        SourceSpan(lineno, pos + 1, offset + pos, offset + pos + 1))
        kind = mt.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, mt.group(), SourceSpan(lineno, pos + 1, offset + pos, offset + mt.end())))
        pos = mt.end()
    end = SourceSpan(lineno, len(line) + 1, offset + len(line), offset + len(line))
    tokens.append(Token("eol", "", end))
    return tokens


class _Cursor:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.i += 1
        return t

    def accept(self, text: str) -> Optional[Token]:
        if self.peek().text == text and self.peek().kind in ("op", "ident"):
            return self.next()
        return None

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text:
            raise _Fail(f"expected {text!r}, found {t.text or 'end of line'!r}", t.span)
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise _Fail(f"expected {what}, found {t.text or 'end of line'!r}", t.span)
        return self.next()


def _parse_expr(cur: _Cursor, resolve) -> sp.Expr:
    """expr := term (('+'|'-') term)*; '^' binds tighter than unary minus."""

    def expr():
        value = term()
        while cur.peek().text in ("+", "-") and cur.peek().kind == "op":
            op = cur.next().text
            rhs = term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term():
        value = unary()
        while cur.peek().text in ("*", "/") and cur.peek().kind == "op":
            op = cur.next().text
            rhs = unary()
            value = value * rhs if op == "*" else value / rhs
        return value

    def unary():
        if cur.accept("-"):
            return -unary()
        if cur.accept("+"):
            return unary()
        return power()

    def power():
        base = atom()
        if cur.accept("^"):
            return base ** unary()
        return base

    def atom():
        t = cur.peek()
        if t.kind == "num":
            cur.next()
            return sp.Rational(t.text)
        if t.kind == "ident":
            cur.next()
            return resolve(t)
        if cur.accept("("):
            value = expr()
            cur.expect(")")
            return value
        raise _Fail(f"expected an expression, found {t.text or 'end of line'!r}", t.span)

    return expr()


def _parse_complex_terms(cur: _Cursor, allow_sign: bool = False) -> List[Tuple[int, Token]]:
    """complex := '0' | coef? NAME ('+' coef? NAME)*  -- returns (coef, name-token)."""
    if cur.peek().kind == "num" and cur.peek().text == "0" and cur.peek(1).kind != "ident":
        cur.next()
        return []
    terms = []
    sign = 1
    if allow_sign and cur.peek().text in ("+", "-"):
        sign = -1 if cur.next().text == "-" else 1
    while True:
        coef = 1
        if cur.peek().kind == "num":
            t = cur.next()
            if "." in t.text:
                raise _Fail("stoichiometric coefficients must be integers", t.span)
            coef = int(t.text)
        name = cur.expect_kind("ident", "species name")
        terms.append((sign * coef, name))
        if cur.peek().text == "+":
            cur.next()
            sign = 1
        elif allow_sign and cur.peek().text == "-":
            cur.next()
            sign = -1
        else:
            return terms


@dataclass
class _RawReaction:
    label: Token
    lhs: List[Tuple[int, Token]]
    rhs: List[Tuple[int, Token]]
    reversible: bool
    rate_cursors: List[_Cursor]


def parse_model(text: str) -> Model:
    """Parse a ``.crn`` document.  Raises :class:`ParseError` on any error."""
    diags: List[ParseDiagnostic] = []

    def error(message, span):
        diags.append(ParseDiagnostic("error", message, span))

    header: Optional[List[Token]] = None
    consts: Dict[str, Optional[sp.Rational]] = {}
    raw: List[_RawReaction] = []
    translate_raw: List[Tuple[Token, List[Tuple[int, Token]]]] = []
    free_raw: List[Token] = []

    offset = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        line_offset = offset
        offset += len(line.encode("utf-8")) + 1
        code = line.split("#", 1)[0]
        if not code.strip():
            continue
        try:
            tokens = _tokenize(code, lineno, line_offset)
            cur = _Cursor(tokens)
            first = cur.peek()
            if first.kind == "ident" and first.text in KEYWORDS and cur.peek(1).text != ":":
                cur.next()
                if first.text == "species":
                    if header is not None:
                        raise _Fail("duplicate species header", first.span)
                    header = []
                    while cur.peek().kind == "ident":
                        header.append(cur.next())
                    if not header:
                        raise _Fail("species header lists no species", first.span)
                elif first.text == "const":
                    while True:
                        name = cur.expect_kind("ident", "constant name")
                        value = None
                        if cur.accept("="):
                            neg = bool(cur.accept("-"))
                            num = cur.expect_kind("num", "number")
                            value = sp.Rational(num.text) * (-1 if neg else 1)
                        consts[name.text] = value
                        if not cur.accept(","):
                            break
                elif first.text == "translate":
                    label = cur.expect_kind("ident", "reaction label")
                    cur.expect("by")
                    terms = _parse_complex_terms(cur, allow_sign=True)
                    translate_raw.append((label, terms))
                else:
                    while cur.peek().kind == "ident":
                        free_raw.append(cur.next())
                    if not free_raw:
                        raise _Fail("free directive lists no species", first.span)
                cur.expect_kind("eol", "end of line")
                continue
            label = cur.expect_kind("ident", "reaction label")
            cur.expect(":")
            lhs = _parse_complex_terms(cur)
            arrow = cur.peek()
            if arrow.text not in ("->", "<->"):
                raise _Fail(f"expected '->' or '<->', found {arrow.text or 'end of line'!r}", arrow.span)
            cur.next()
            rhs = _parse_complex_terms(cur)
            cur.expect(";")
            # rate expressions are parsed once all species are known
            start = cur.i
            rates = [_Cursor(tokens[start:])]
            raw.append(_RawReaction(label, lhs, rhs, arrow.text == "<->", rates))
        except _Fail as exc:
            error(exc.message, exc.span)

    # species registry
    species: List[str] = []
    if header is not None:
        for t in header:
            if t.text in species:
                error(f"species {t.text!r} declared twice", t.span)
            else:
                species.append(t.text)
    for rr in raw:
        for _, tok in rr.lhs + rr.rhs:
            if tok.text not in species:
                if header is not None:
                    error(f"species {tok.text!r} not declared in species header", tok.span)
                else:
                    species.append(tok.text)
    conc = {}
    for s in species:
        c = concentration_name(s)
        if c in conc:
            error(f"species {s!r} and {conc[c]!r} share concentration symbol {c!r}",
                  SourceSpan(1, 1, 0, 0))
        conc[c] = s
    const_syms = {symbol(n): (float(v) if v is not None else None) for n, v in consts.items()}

    def resolve(tok: Token) -> sp.Symbol:
        name = tok.text
        if name in conc or name in consts or name.startswith("k"):
            return symbol(name)
        raise _Fail(f"rate expression references unknown species {name!r}", tok.span)

    def vector(terms):
        v = [0] * len(species)
        for coef, tok in terms:
            if tok.text in species:
                v[species.index(tok.text)] += coef
        return tuple(v)

    reactions: List[Reaction] = []
    rates: Dict[str, sp.Expr] = {}
    for rr in raw:
        try:
            cur = rr.rate_cursors[0]
            exprs = [_parse_expr(cur, resolve)]
            if rr.reversible:
                cur.expect(",")
                exprs.append(_parse_expr(cur, resolve))
            cur.expect_kind("eol", "end of line")
        except _Fail as exc:
            error(exc.message, exc.span)
            continue
        src, prod = vector(rr.lhs), vector(rr.rhs)
        if src == prod:
            error("self-loop complex: source and product coincide", rr.label.span)
            continue
        if rr.reversible:
            pairs = [(rr.label.text + "f", src, prod, exprs[0]), (rr.label.text + "r", prod, src, exprs[1])]
        else:
            pairs = [(rr.label.text, src, prod, exprs[0])]
        for label, a, b, e in pairs:
            if label in rates:
                error(f"duplicate reaction label {label!r}", rr.label.span)
                continue
            reactions.append(Reaction(label, a, b))
            rates[label] = e

    translations: Dict[str, Tuple[int, ...]] = {}
    for tok, terms in translate_raw:
        for _, name in terms:
            if name.text not in species:
                error(f"unknown species {name.text!r} in translation", name.span)
        if tok.text not in rates:
            error(f"translate names unknown reaction {tok.text!r}", tok.span)
        translations[tok.text] = vector(terms)

    free: List[str] = []
    for tok in free_raw:
        name = tok.text if tok.text in species else conc.get(tok.text)
        if name is None:
            error(f"free names unknown species {tok.text!r}", tok.span)
        elif name not in free:
            free.append(name)

    if not reactions and not any(d.severity == "error" for d in diags):
        error("no reactions", SourceSpan(1, 1, 0, 0))
    if any(d.severity == "error" for d in diags):
        raise ParseError(sorted(diags, key=lambda d: d.span.start))
    try:
        net = Network(tuple(species), tuple(reactions))
    except StructuralError as exc:
        raise ParseError([ParseDiagnostic("error", str(exc), SourceSpan(1, 1, 0, 0))]) from None
    used = set()
    for c in net.complexes:
        used.update(i for i, v in enumerate(c) if v)
    for i, s in enumerate(species):
        if i not in used:
            diags.append(ParseDiagnostic("warning", f"species {s!r} occurs in no reaction", SourceSpan(1, 1, 0, 0)))
    kin = KineticAssignment(tuple(symbol(concentration_name(s)) for s in species), rates, const_syms)
    return Model(net, kin, translations, free, diags)


def parse_network(text: str) -> Model:
    return parse_model(text)


class _CrnPrinter(StrPrinter):
    def _print_Pow(self, expr, rational=False):
        return super()._print_Pow(expr, rational=True)


def render_expr(expr: sp.Expr) -> str:
    return _CrnPrinter().doprint(sp.sympify(expr)).replace("**", "^")


def _render_shift(v: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for c, n in zip(v, names):
        if c == 0:
            continue
        mag = "" if abs(c) == 1 else str(abs(c))
        sign = "-" if c < 0 else "+"
        parts.append(f"{sign} {mag}{n}" if parts else f"{'-' if c < 0 else ''}{mag}{n}")
    return " ".join(parts) if parts else "0"


def _render_complex(c: Sequence[int], names: Sequence[str]) -> str:
    terms = [(f"{v}{n}" if v != 1 else n) for v, n in zip(c, names) if v]
    return " + ".join(terms) if terms else "0"


def render_network(net: Network, kin: KineticAssignment,
                   translations: Optional[Dict[str, Sequence[int]]] = None,
                   free: Sequence[str] = ()) -> str:
    """Canonical text form; ``parse_model(render_network(...))`` round-trips."""
    lines = ["species " + " ".join(net.species)]
    for c, v in kin.constants.items():
        lines.append(f"const {c.name}" + ("" if v is None else f" = {render_expr(sp.nsimplify(v))}"))
    for r in net.reactions:
        lines.append(f"{r.label}: {_render_complex(r.source, net.species)} -> "
                     f"{_render_complex(r.product, net.species)} ; {render_expr(kin.rates[r.label])}")
    for label, v in (translations or {}).items():
        lines.append(f"translate {label} by {_render_shift(v, net.species)}")
    if free:
        lines.append("free " + " ".join(free))
    return "\n".join(lines) + "\n"


def render_model(model: Model) -> str:
    return render_network(model.network, model.kinetics, model.translations, model.free)


def parse_expression(text: str, resolve=None) -> sp.Expr:
    """Parse one expression; every identifier becomes a positive symbol by default."""
    cur = _Cursor(_tokenize(text, 1, 0))
    try:
        value = _parse_expr(cur, resolve or (lambda t: symbol(t.text)))
        cur.expect_kind("eol", "end of expression")
    except _Fail as exc:
        raise ParseError([ParseDiagnostic("error", exc.message, exc.span)]) from None
    return value


def parse_parametrization_text(text: str, net: Network) -> Dict[str, sp.Expr]:
    """Read ``species = expr`` lines; keys are species names."""
    diags: List[ParseDiagnostic] = []
    out: Dict[str, sp.Expr] = {}
    by_conc = {concentration_name(s): s for s in net.species}
    offset = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        line_offset = offset
        offset += len(line.encode("utf-8")) + 1
        code = line.split("#", 1)[0]
        if not code.strip():
            continue
        try:
            cur = _Cursor(_tokenize(code, lineno, line_offset))
            lhs = cur.expect_kind("ident", "species")
            name = lhs.text if lhs.text in net.species else by_conc.get(lhs.text)
            if name is None:
                raise _Fail(f"unknown species {lhs.text!r}", lhs.span)
            if name in out:
                raise _Fail(f"species {name!r} assigned twice", lhs.span)
            cur.expect("=")
            out[name] = _parse_expr(cur, lambda t: symbol(t.text))
            cur.expect_kind("eol", "end of line")
        except _Fail as exc:
            diags.append(ParseDiagnostic("error", exc.message, exc.span))
    if diags:
        raise ParseError(diags)
    return out


def render_parametrization(exprs: Dict[str, sp.Expr], net: Network) -> str:
    lines = [f"{concentration_name(s)} = {render_expr(exprs[s])}" for s in net.species if s in exprs]
    return "\n".join(lines) + "\n"
