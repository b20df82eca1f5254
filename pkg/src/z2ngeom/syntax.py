"""Text formats: graded expressions, domain/morphism files, fractions, finite-space files.

Expression grammar (left associative, ``^`` binds tightest)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" "-"? INT)?
    atom   := INT | NAME | "(" expr ")"
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable

from .degrees import Degree
from .domains import Domain, Morphism
from .localization import GradedFraction
from .sections import ParameterSystem, Section

NAME_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")
PARAM_NAME_RE = re.compile(r"^(xi|eta|theta|zeta|tau|nu)[0-9_]*$")


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None, source: str = ""):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UnknownSymbol(ParseError):
    pass


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    i = 0
    while i < len(src):
        c = src[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < len(src) and src[j].isdigit():
                j += 1
            tokens.append(Token("int", src[i:j], i))
            i = j
        elif c.isalpha():
            m = NAME_RE.match(src, i)
            tokens.append(Token("name", m.group(), i))
            i = m.end()
        elif c in "+-*/^()":
            tokens.append(Token(c, c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i, src)
    tokens.append(Token("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str, system: ParameterSystem, notes: list[str]):
        self.src = src
        self.system = system
        self.tokens = tokenize(src)
        self.k = 0
        self.notes = notes

    @property
    def tok(self) -> Token:
        return self.tokens[self.k]

    def take(self, kind: str) -> Token:
        if self.tok.kind != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if self.tok.kind == "end" else repr(self.tok.text)
            raise ParseError(f"expected {want}, found {got}", self.tok.pos, self.src)
        t = self.tok
        self.k += 1
        return t

    def parse(self) -> Section:
        out = self.expr()
        self.take("end")
        return out

    def expr(self) -> Section:
        out = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take(self.tok.kind).kind
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Section:
        atoms: list[str] = []
        out = self.unary(atoms)
        while self.tok.kind in ("*", "/"):
            op = self.take(self.tok.kind)
            rhs = self.unary(atoms if op.kind == "*" else [])
            if op.kind == "*":
                out = out * rhs
            else:
                if not rhs.epsilon().is_invertible():
                    raise ParseError(f"division by a non-invertible expression {rhs}", op.pos, self.src)
                out = out * rhs.invert()
        seen = set()
        for name in atoms:
            if name in seen:
                self.notes.append(f"note: {name} is odd, so {name}*{name} = 0")
            seen.add(name)
        return out

    def unary(self, atoms: list[str]) -> Section:
        if self.tok.kind == "-":
            self.take("-")
            return -self.unary(atoms)
        if self.tok.kind == "+":
            self.take("+")
            return self.unary(atoms)
        return self.power(atoms)

    def power(self, atoms: list[str]) -> Section:
        start = self.tok
        base = self.atom()
        if self.tok.kind == "^":
            caret = self.take("^")
            neg = False
            if self.tok.kind == "-":
                self.take("-")
                neg = True
            k = int(self.take("int").text)
            if start.kind == "name" and start.text in self.system.names:
                p = self.system.params[self.system.index(start.text)]
                if p.odd and k >= 2:
                    self.notes.append(f"note: {start.text} is odd, so {start.text}^{k} = 0")
            if neg:
                if not base.epsilon().is_invertible():
                    raise ParseError("negative power of a non-invertible expression", caret.pos, self.src)
                return base.invert() ** k
            return base**k
        if start.kind == "name" and start.text in self.system.names and self.system.params[self.system.index(start.text)].odd:
            atoms.append(start.text)
        return base

    def atom(self) -> Section:
        t = self.tok
        if t.kind == "int":
            self.take("int")
            return self.system.const(int(t.text))
        if t.kind == "name":
            self.take("name")
            if t.text not in self.system.symbols():
                raise UnknownSymbol(f"unknown symbol {t.text!r}", t.pos, self.src)
            return self.system.symbol(t.text)
        if t.kind == "(":
            self.take("(")
            out = self.expr()
            self.take(")")
            return out
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected a number, symbol or '(', found {got}", t.pos, self.src)


def parse_expression(src: str, ctx: Domain | ParameterSystem, notes: list[str] | None = None) -> Section:
    system = ctx.system if isinstance(ctx, Domain) else ctx
    return _Parser(src, system, notes if notes is not None else []).parse()


def symbols_in(src: str) -> list[str]:
    return [t.text for t in tokenize(src) if t.kind == "name"]


def _natural_key(name: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


def infer_domain(sources: Iterable[str], rank: int = 1, truncation: int | None = None, name: str = "U") -> Domain:
    """Domain for bare expressions: xi*, eta*, theta*, ... are parameters of degree 0..01, the rest coordinates."""
    names = sorted({s for src in sources for s in symbols_in(src)}, key=_natural_key)
    params = [n for n in names if PARAM_NAME_RE.match(n)]
    coords = [n for n in names if n not in params]
    deg = Degree((0,) * (rank - 1) + (1,))
    return Domain.make(name, coords, [(p, deg) for p in params], rank=rank, truncation=truncation)


# -- fractions ---------------------------------------------------------------------

_FRACTION_RE = re.compile(r"^\s*\[(?P<num>.*)\]\s*/\s*\[(?P<den>.*)\]\s*$")


def split_fraction(src: str) -> tuple[str, str]:
    m = _FRACTION_RE.match(src)
    if not m:
        raise ParseError("fraction must look like [numerator] / [denominator]", 0, src)
    return m.group("num"), m.group("den")


def parse_fraction(src: str, ctx: Domain | ParameterSystem, notes: list[str] | None = None) -> GradedFraction:
    num, den = split_fraction(src)
    return GradedFraction(parse_expression(num, ctx, notes), parse_expression(den, ctx, notes))


# -- domain and morphism files ----------------------------------------------------------------


@dataclass
class _DomainDecl:
    name: str
    line: int
    rank: int | None = None
    coords: list[str] = field(default_factory=list)
    params: list[tuple[str, Degree]] = field(default_factory=list)
    truncation: int | None = None
    blocks: list[tuple[list[str], int]] = field(default_factory=list)


@dataclass
class _MorphismDecl:
    name: str
    source: str
    target: str
    line: int
    images: list[tuple[str, str, int]] = field(default_factory=list)


@dataclass
class Declarations:
    domains: dict[str, Domain] = field(default_factory=dict)
    morphisms: dict[str, Morphism] = field(default_factory=dict)

    def merge(self, other: "Declarations") -> "Declarations":
        out = Declarations(dict(self.domains), dict(self.morphisms))
        out.domains.update(other.domains)
        out.morphisms.update(other.morphisms)
        return out


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_declarations(
    text: str, known: Declarations | None = None, rank: int | None = None, truncation: int | None = None
) -> Declarations:
    """Read ``domain`` and ``morphism`` blocks, one declaration per line, ``#`` comments."""
    known = known or Declarations()
    domains: list[_DomainDecl] = []
    morphisms: list[_MorphismDecl] = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "domain":
                if not NAME_RE.fullmatch(rest):
                    raise ParseError(f"bad domain name {rest!r}")
                current = _DomainDecl(rest, lineno)
                domains.append(current)
            elif head == "morphism":
                m = re.fullmatch(r"(\w+)\s*:\s*(\w+)\s*->\s*(\w+)", rest)
                if not m:
                    raise ParseError("expected 'morphism NAME : SOURCE -> TARGET'")
                current = _MorphismDecl(m.group(1), m.group(2), m.group(3), lineno)
                morphisms.append(current)
            elif ":=" in line and isinstance(current, _MorphismDecl):
                sym, _, expr = line.partition(":=")
                current.images.append((sym.strip(), expr.strip(), lineno))
            elif isinstance(current, _DomainDecl):
                _domain_line(current, head, rest)
            else:
                raise ParseError(f"unexpected line {line!r}")
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    out = Declarations(dict(known.domains), dict(known.morphisms))
    for d in domains:
        if truncation is not None:
            d.truncation, d.blocks = truncation, []
        out.domains[d.name] = _build_domain(d, rank)
    for m in morphisms:
        out.morphisms[m.name] = _build_morphism(m, out)
    return out


def _domain_line(d: _DomainDecl, head: str, rest: str) -> None:
    if head == "rank":
        d.rank = int(rest)
    elif head in ("coords", "coord"):
        d.coords.extend(n for n in re.split(r"[\s,]+", rest) if n)
    elif head == "param":
        parts = rest.replace(":", " ").split()
        if len(parts) != 2:
            raise ParseError("expected 'param NAME DEGREE'")
        d.params.append((parts[0], Degree.parse(parts[1])))
    elif head == "params":
        for item in re.split(r"[\s,]+", rest):
            if item:
                name, _, deg = item.partition(":")
                d.params.append((name, Degree.parse(deg)))
    elif head == "truncation":
        d.truncation = int(rest)
    elif head == "block":
        names, _, order = rest.rpartition(":")
        d.blocks.append((names.split(), int(order)))
    else:
        raise ParseError(f"unknown domain field {head!r}")
    for n in d.coords + [p for p, _ in d.params]:
        if not NAME_RE.fullmatch(n):
            raise ParseError(f"bad symbol name {n!r}")


def _build_domain(d: _DomainDecl, rank: int | None) -> Domain:
    r = d.rank or rank
    if r is None and d.params:
        r = d.params[0][1].rank
    if r is None:
        r = 1
    dom = Domain.make(d.name, d.coords, d.params, rank=r, truncation=d.truncation)
    if d.blocks:
        system = dom.system
        blocks = tuple((tuple(sorted(system.index(n) for n in names)), order) for names, order in d.blocks)
        dom = Domain(d.name, ParameterSystem(system.coords, system.params, system.rank, blocks))
    return dom


def _build_morphism(m: _MorphismDecl, decls: Declarations) -> Morphism:
    for dom in (m.source, m.target):
        if dom not in decls.domains:
            raise ParseError(f"line {m.line}: unknown domain {dom!r}")
    src, tgt = decls.domains[m.source], decls.domains[m.target]
    images = {}
    for sym, expr, lineno in m.images:
        if sym not in tgt.generators():
            raise ParseError(f"line {lineno}: {sym!r} is not a generator of {tgt.name}")
        try:
            images[sym] = parse_expression(expr, src)
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    return Morphism(src, tgt, images, name=m.name)


def domain_text(domain: Domain, provenance: dict[str, str] | None = None) -> str:
    system = domain.system
    lines = [f"domain {domain.name}", f"rank {system.rank}"]
    prov = provenance or {}

    def tag(name):
        return f"  # from {prov[name]}" if name in prov else ""

    for x in system.coords:
        lines.append(f"coord {x}{tag(x)}")
    for p in system.params:
        lines.append(f"param {p.name} {p.degree}{tag(p.name)}")
    if len(system.blocks) == 1:
        lines.append(f"truncation {system.blocks[0][1]}")
    else:
        for idx, order in system.blocks:
            lines.append(f"block {' '.join(system.params[i].name for i in idx)} : {order}")
    lines.append(f"# dimension {system.dimension}")
    return "\n".join(lines)


def morphism_text(phi: Morphism, name: str | None = None, fmt: str = "text") -> str:
    lines = [f"morphism {name or phi.name or 'phi'} : {phi.source.name} -> {phi.target.name}"]
    for g, img in phi.images.items():
        lines.append(f"  {g} := {format_section(img, fmt)}")
    return "\n".join(lines)


def format_section(F: Section, fmt: str = "text") -> str:
    return F.sexpr() if fmt == "sexpr" else str(F)


# -- finite-space files ----------------------------------------------------------------------


@dataclass
class SheafFile:
    """A finite space, a presheaf of (Z/m)^k-valued functions on it, and optional gluing/direct-image data."""

    space: object
    presheaf: object
    values: object
    charts: list = field(default_factory=list)
    transitions: dict = field(default_factory=dict)
    target: object = None
    map: dict | None = None


def _value(token: str, m: int, k: int) -> tuple:
    if len(token) != k or not token.isdigit() or any(int(c) >= m for c in token):
        raise ParseError(f"bad value {token!r} for (Z/{m})^{k}")
    return tuple(int(c) for c in token)


def parse_sheaf_file(text: str) -> SheafFile:
    """Read the finite-space format.

    points a b c
    open a            # opens generate the topology under union and intersection
    basis a | b       # optional; default is the minimal neighbourhoods
    values 2          # Z/2; "values 2^2" for (Z/2)^2
    presheaf constant # optional; default is functions with per-open section tables
    sections a b = constant | all | 0,0 1,1
    chart a b         # gluing charts, in order 0, 1, ...
    transition 1 0 = 0>1 1>0
    target x y / target-open x / map a>x b>x c>y
    """
    from . import sheafkit as sk

    points: list[str] = []
    opens: list[list[str]] = []
    basis = None
    m, k = 2, 1
    kind = "function"
    tables: list[tuple[list[str], str, int]] = []
    charts: list[list[str]] = []
    trans: dict[tuple[int, int], dict] = {}
    tpoints: list[str] = []
    topens: list[list[str]] = []
    fmap = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "points":
                points = rest.split()
            elif head == "open":
                opens.append(rest.split())
            elif head == "basis":
                basis = [b.split() for b in rest.split("|")]
            elif head == "values":
                base, _, power = rest.partition("^")
                m, k = int(base), int(power or 1)
                if not 2 <= m <= 10 or k < 1:
                    raise ParseError("values must be Z/m with 2 <= m <= 10")
            elif head == "presheaf":
                if rest not in ("constant", "function"):
                    raise ParseError(f"unknown presheaf kind {rest!r}")
                kind = rest
            elif head == "sections":
                where, _, rule = rest.partition("=")
                tables.append((where.split(), rule.strip(), lineno))
            elif head == "chart":
                charts.append(rest.split())
            elif head == "transition":
                pair, _, table = rest.partition("=")
                j, i = (int(t) for t in pair.split())
                perm = {}
                for item in table.split():
                    a, _, b = item.partition(">")
                    perm[_value(a, m, k)] = _value(b, m, k)
                trans[(j, i)] = perm
            elif head == "target":
                tpoints = rest.split()
            elif head == "target-open":
                topens.append(rest.split())
            elif head == "map":
                fmap = dict(item.split(">") for item in rest.split())
            else:
                raise ParseError(f"unknown keyword {head!r}")
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if not points:
        raise ParseError("no points declared")
    unknown = {p for U in opens + (basis or []) + charts for p in U} - set(points)
    if unknown:
        raise ParseError(f"unknown point(s) {', '.join(sorted(unknown))}")
    try:
        space = sk.FiniteSpace.generated(points, opens, basis)
    except sk.SheafError as exc:
        raise ParseError(str(exc)) from None
    values = sk.zmod(m, k)
    if kind == "constant":
        if tables:
            raise ParseError("section tables cannot be combined with the constant presheaf")
        P = sk.constant_presheaf(space, values)
    else:
        allowed = {}
        for where, rule, lineno in tables:
            U = frozenset(where)
            if U not in space.opens:
                raise ParseError(f"line {lineno}: {{{','.join(where)}}} is not open")
            if rule in ("all", "constant"):
                allowed[U] = rule
            else:
                n = len(U)
                rows = []
                for tok in rule.split():
                    vals = tok.split(",")
                    if len(vals) != n:
                        raise ParseError(f"line {lineno}: section {tok!r} needs {n} values")
                    rows.append(tuple(_value(v, m, k) for v in vals))
                allowed[U] = rows
        P = sk.function_presheaf(space, values, allowed, name="F")
    target = None
    if tpoints:
        target = sk.FiniteSpace.generated(tpoints, topens)
        if fmap is None or set(fmap) != set(points) or not set(fmap.values()) <= set(tpoints):
            raise ParseError("map must send every point to a target point")
    rule = SheafFile(space, P, values, [frozenset(c) for c in charts], {}, target, fmap)
    for (j, i), perm in trans.items():
        full = {v: perm.get(v, v) for v in values.elements}
        if len(set(full.values())) != len(full) or any(
            full[values.add(a, b)] != values.add(full[a], full[b]) or full[values.mul(a, b)] != values.mul(full[a], full[b])
            for a in values.elements
            for b in values.elements
        ):
            raise ParseError(f"transition ({j}, {i}) is not an automorphism of {values.name}")
        perm = full
        rule.transitions[(j, i)] = perm
        if (i, j) not in trans:
            rule.transitions[(i, j)] = {b: a for a, b in perm.items()}
    return rule


def value_permutation(perm: dict):
    """Transition acting pointwise on function sections."""
    return lambda V, s: tuple(perm.get(v, v) for v in s)
