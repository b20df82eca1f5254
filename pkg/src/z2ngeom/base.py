"""Exact coefficient functions: rational functions over Q in degree-0 coordinates.

These stand in for smooth functions on a chart. Every value is kept as a
reduced fraction num/den of sparse polynomials with a monic denominator
(leading coefficient 1 under graded-lex order, variables in declaration
order), so equal functions in the same variable ring are equal field by field.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyRing

Scalar = Union[int, Fraction]


class BaseError(ArithmeticError):
    pass


class DivisionByZero(BaseError, ZeroDivisionError):
    pass


class PoleError(BaseError):
    """The denominator vanishes at the requested point."""


class UnknownVariable(BaseError, KeyError):
    def __str__(self):
        return self.args[0] if self.args else "unknown variable"


@lru_cache(maxsize=None)
def poly_ring(variables: tuple[str, ...]) -> PolyRing:
    return PolyRing(variables, QQ, grlex)


def _qq(c: Scalar):
    if isinstance(c, Fraction):
        return QQ(c.numerator, c.denominator)
    if isinstance(c, int):
        return QQ(c)
    # gmpy2 / sympy rationals
    return QQ(int(c.numerator), int(c.denominator))


def to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _union(a: tuple[str, ...], b: tuple[str, ...]) -> tuple[str, ...]:
    if a == b:
        return a
    return a + tuple(v for v in b if v not in a)


class BaseFunction:
    """A reduced rational function num/den with rational coefficients."""

    __slots__ = ("variables", "num", "den")

    def __init__(self, num, den=None, *, reduced: bool = False):
        ring = num.ring
        if den is None:
            den = ring.one
        elif den.ring != ring:
            den = den.set_ring(ring)
        if not den:
            raise DivisionByZero("denominator is the zero polynomial")
        if not reduced:
            num, den = _reduce(num, den)
        self.variables: tuple[str, ...] = tuple(str(s) for s in ring.symbols)
        self.num = num
        self.den = den

    # -- construction -------------------------------------------------
    @classmethod
    def const(cls, c: Scalar, variables: Iterable[str] = ()) -> "BaseFunction":
        ring = poly_ring(tuple(variables))
        return cls(ring.ground_new(_qq(c)), reduced=True)

    @classmethod
    def var(cls, name: str, variables: Iterable[str] | None = None) -> "BaseFunction":
        variables = tuple(variables) if variables is not None else (name,)
        if name not in variables:
            raise UnknownVariable(f"unknown variable {name!r}")
        ring = poly_ring(variables)
        return cls(ring.gens[variables.index(name)], reduced=True)

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, ...], Scalar], variables: Iterable[str]) -> "BaseFunction":
        ring = poly_ring(tuple(variables))
        return cls(ring.from_dict({m: _qq(c) for m, c in terms.items()}), reduced=True)

    @property
    def ring(self) -> PolyRing:
        return self.num.ring

    def in_variables(self, variables: Iterable[str]) -> "BaseFunction":
        """The same function viewed in a (larger) variable ring."""
        variables = tuple(variables)
        if variables == self.variables:
            return self
        missing = [v for v in self.used_variables() if v not in variables]
        if missing:
            raise UnknownVariable(f"unknown variable {missing[0]!r}")
        ring = poly_ring(variables)
        num = _move(self.num, ring)
        den = _move(self.den, ring)
        return BaseFunction(num, den)

    def rename(self, mapping: Mapping[str, str]) -> "BaseFunction":
        new = tuple(mapping.get(v, v) for v in self.variables)
        ring = poly_ring(new)
        return BaseFunction(ring.from_dict(dict(self.num)), ring.from_dict(dict(self.den)), reduced=True)

    def used_variables(self) -> tuple[str, ...]:
        degs = [max(a, b) for a, b in zip(self.num.degrees(), self.den.degrees())]
        return tuple(v for v, d in zip(self.variables, degs) if d > 0)

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_invertible(self) -> bool:
        return not self.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_ground

    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_ground

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise BaseError(f"{self} is not constant")
        return to_fraction(self.num.LC) / to_fraction(self.den.LC) if self.num else Fraction(0)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> tuple["BaseFunction", "BaseFunction"]:
        if not isinstance(other, BaseFunction):
            other = BaseFunction.const(other, self.variables)
        if other.variables == self.variables:
            return self, other
        variables = _union(self.variables, other.variables)
        return self.in_variables(variables), other.in_variables(variables)

    def __add__(self, other):
        a, b = self._coerce(other)
        if a.den == b.den:
            return BaseFunction(a.num + b.num, a.den)
        return BaseFunction(a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return BaseFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a.is_polynomial() and b.is_polynomial():
            return BaseFunction(a.num * b.num, reduced=True)
        return BaseFunction(a.num * b.num, a.den * b.den)

    __rmul__ = __mul__

    def inverse(self) -> "BaseFunction":
        if self.is_zero():
            raise DivisionByZero("division by the zero function")
        return BaseFunction(self.den, self.num)

    def __truediv__(self, other):
        a, b = self._coerce(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        a, b = self._coerce(other)
        return b * a.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return BaseFunction(self.num**k, self.den**k, reduced=True)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, BaseFunction):
            return NotImplemented
        if self.variables == other.variables:
            return self.num == other.num and self.den == other.den
        a, b = self._coerce(other)
        return a.num * b.den == b.num * a.den

    def __hash__(self):
        # independent of the ambient variable ring
        used = tuple(sorted(self.used_variables()))
        ring = poly_ring(used)
        f = BaseFunction(_move(self.num, ring), _move(self.den, ring))
        return hash((used, frozenset(f.num.items()), frozenset(f.den.items())))

    # -- calculus and evaluation ----------------------------------------
    def derivative(self, var: str) -> "BaseFunction":
        if var not in self.variables:
            raise UnknownVariable(f"unknown variable {var!r}")
        x = self.ring.gens[self.variables.index(var)]
        dn = self.num.diff(x)
        if self.den.is_ground:
            return BaseFunction(dn, self.den, reduced=True)
        dd = self.den.diff(x)
        return BaseFunction(dn * self.den - self.num * dd, self.den**2)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        values = []
        for v in self.variables:
            if v in point:
                values.append(_qq(point[v]))
            elif v in self.used_variables():
                raise UnknownVariable(f"no value bound for variable {v!r}")
            else:
                values.append(QQ(0))
        den = self.den(*values) if self.variables else self.den.LC
        if not den:
            raise PoleError(f"{self} has a pole at {dict(point)}")
        num = self.num(*values) if self.variables else (self.num.LC if self.num else QQ(0))
        return to_fraction(num) / to_fraction(den)

    def substitute(self, images: Mapping[str, "BaseFunction"], variables: Iterable[str]) -> "BaseFunction":
        """Compose: replace each variable v by images[v] (others kept), landing in ``variables``."""
        variables = tuple(variables)
        ring = poly_ring(variables)
        num_deg = self.num.degrees()
        den_deg = self.den.degrees()
        subs = []
        for i, v in enumerate(self.variables):
            top = max(num_deg[i], den_deg[i], 0)
            if v in images:
                img = images[v].in_variables(variables)
            elif top > 0:
                img = BaseFunction.var(v, variables)
            else:
                img = BaseFunction.const(0, variables)
            subs.append((img.num, img.den, top))
        num = _homogenized(self.num, subs, ring)
        den = _homogenized(self.den, subs, ring)
        if not den:
            raise PoleError(f"substitution into {self} hits a pole")
        return BaseFunction(num, den)

    # -- text -----------------------------------------------------------
    def __str__(self) -> str:
        return self.format(compact=False)

    def __repr__(self) -> str:
        return f"BaseFunction({self})"

    def format(self, compact: bool = False) -> str:
        num = format_poly(self.num, self.variables, compact)
        if self.den == self.ring.one:
            return num
        den = format_poly(self.den, self.variables, compact)
        if len(self.num) > 1:
            num = f"({num})"
        if not _is_atomic(self.den):
            den = f"({den})"
        return f"{num}/{den}"

    def is_single_term(self) -> bool:
        return self.den == self.ring.one and len(self.num) <= 1


def _is_atomic(p) -> bool:
    # a number or a single variable power
    if len(p) != 1:
        return False
    (monom, coeff), = p.terms()
    if sum(1 for e in monom if e) == 0:
        return to_fraction(coeff).denominator == 1 and coeff > 0
    return coeff == 1 and sum(1 for e in monom if e) == 1


def _move(p, ring):
    """Relabel p into ``ring``; variables absent from ``ring`` must not occur in p."""
    if p.ring == ring:
        return p
    dst = {str(s): i for i, s in enumerate(ring.symbols)}
    idx = [dst.get(str(s)) for s in p.ring.symbols]
    out = {}
    for monom, c in p.terms():
        m = [0] * len(dst)
        for i, e in zip(idx, monom):
            if e:
                if i is None:
                    raise UnknownVariable("polynomial uses a variable outside the target ring")
                m[i] = e
        out[tuple(m)] = c
    return ring.from_dict(out)


def _homogenized(p, subs, ring):
    """sum_m c_m prod_v n_v^{m_v} d_v^{top_v - m_v}."""
    total = ring.zero
    cache: dict[tuple[int, int, int], object] = {}

    def power(i, which, e):
        key = (i, which, e)
        if key not in cache:
            base = subs[i][which]
            cache[key] = base**e
        return cache[key]

    for monom, c in p.terms():
        term = ring.ground_new(c)
        for i, e in enumerate(monom):
            n, d, top = subs[i]
            if top == 0:
                continue
            if e:
                term = term * power(i, 0, e)
            if top - e:
                term = term * power(i, 1, top - e)
        total += term
    return total


def _reduce(num, den):
    ring = num.ring
    if not num:
        return ring.zero, ring.one
    if den.is_ground:
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
        return num, ring.one
    num, den = num.cancel(den)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def format_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(monom: tuple[int, ...], names: tuple[str, ...]) -> str:
    parts = []
    for name, e in zip(names, monom):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def format_poly(p, names: tuple[str, ...], compact: bool = False) -> str:
    if not p:
        return "0"
    plus, minus = ("+", "-") if compact else (" + ", " - ")
    out = []
    for k, (monom, coeff) in enumerate(p.terms()):
        c = to_fraction(coeff)
        neg = c < 0
        c = abs(c)
        mono = format_monomial(monom, names)
        if not mono:
            body = format_rational(c)
        elif c == 1:
            body = mono
        else:
            body = f"{format_rational(c)}*{mono}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append((minus if neg else plus) + body)
    return "".join(out)
