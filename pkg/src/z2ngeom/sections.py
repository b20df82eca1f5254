"""Truncated Z_2^n-graded formal power series sum_a f_a(x) xi^a.

Parameters are kept in a canonical order (degree in standard order, then
declaration index) and a monomial is stored as its exponent tuple in that
order. Multiplication concatenates words and sorts them back with the
generalized sign rule; odd parameters square to zero and even nonzero ones
are cut off by the truncation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .base import BaseFunction, Scalar
from .degrees import Degree, GradedDimension, RankMismatch, is_even, order_index, scalar_product

MultiIndex = tuple[int, ...]


class SystemMismatch(ValueError):
    pass


class NotInvertible(ArithmeticError):
    pass


@dataclass(frozen=True)
class Parameter:
    name: str
    degree: Degree

    @property
    def odd(self) -> bool:
        return not is_even(self.degree)


@dataclass(frozen=True)
class ParameterSystem:
    """Coordinates, parameters (canonical order) and truncation blocks.

    ``blocks`` is a tuple of (parameter positions, order): a monomial is kept
    iff its exponent sum over every block is at most that block's order.
    A freshly declared system has one block holding every parameter.
    """

    coords: tuple[str, ...]
    params: tuple[Parameter, ...]
    rank: int
    blocks: tuple[tuple[tuple[int, ...], int], ...]
    _signs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = list(self.coords) + [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate and parameter names must be unique: {names}")
        for p in self.params:
            if p.degree.rank != self.rank:
                raise RankMismatch(f"parameter {p.name} has degree {p.degree} but rank is {self.rank}")
            if p.degree.is_zero():
                raise ValueError(f"parameter {p.name} must have nonzero degree")
        keys = [order_index(p.degree) for p in self.params]
        if keys != sorted(keys):
            raise ValueError("parameters must be listed in canonical order")
        covered = sorted(i for idx, _ in self.blocks for i in idx)
        if covered != list(range(len(self.params))):
            raise ValueError("truncation blocks must partition the parameters")
        signs = tuple(
            tuple(scalar_product(a.degree, b.degree) for b in self.params) for a in self.params
        )
        object.__setattr__(self, "_signs", signs)

    @classmethod
    def make(
        cls,
        coords: Iterable[str],
        params: Iterable[tuple[str, Degree | str]] = (),
        rank: int | None = None,
        truncation: int | None = None,
    ) -> "ParameterSystem":
        decl = [(name, deg if isinstance(deg, Degree) else Degree.parse(deg)) for name, deg in params]
        if rank is None:
            if not decl:
                raise ValueError("rank must be given when there are no parameters")
            rank = decl[0][1].rank
        ordered = sorted(enumerate(decl), key=lambda t: (order_index(t[1][1]), t[0]))
        plist = tuple(Parameter(name, deg) for _, (name, deg) in ordered)
        if truncation is None:
            truncation = default_truncation(plist)
        return cls(tuple(coords), plist, rank, ((tuple(range(len(plist))), truncation),))

    # -- shape --------------------------------------------------------------
    @property
    def truncation(self) -> int:
        """Largest total parameter degree that can survive."""
        return sum(min(order, self._block_cap(idx)) for idx, order in self.blocks)

    def _block_cap(self, idx) -> int:
        # only odd parameters in a block: at most one of each
        if all(self.params[i].odd for i in idx):
            return len(idx)
        return 10**9

    @property
    def dimension(self) -> GradedDimension:
        return GradedDimension.from_degrees(len(self.coords), [p.degree for p in self.params], self.rank)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    def index(self, name: str) -> int:
        for i, p in enumerate(self.params):
            if p.name == name:
                return i
        raise KeyError(name)

    def symbol_degree(self, name: str) -> Degree:
        if name in self.coords:
            return Degree.zero(self.rank)
        return self.params[self.index(name)].degree

    def symbols(self) -> tuple[str, ...]:
        return self.coords + self.names

    def with_truncation(self, order: int) -> "ParameterSystem":
        return ParameterSystem(self.coords, self.params, self.rank, ((tuple(range(len(self.params))), order),))

    def allowed(self, alpha: MultiIndex) -> bool:
        for p, e in zip(self.params, alpha):
            if e > 1 and p.odd:
                return False
        for idx, order in self.blocks:
            if sum(alpha[i] for i in idx) > order:
                return False
        return True

    def monomial_degree(self, alpha: MultiIndex) -> Degree:
        bits = [0] * self.rank
        for p, e in zip(self.params, alpha):
            if e & 1:
                for k, b in enumerate(p.degree.bits):
                    bits[k] ^= b
        return Degree(tuple(bits))

    def product_sign(self, alpha: MultiIndex, beta: MultiIndex) -> int:
        """Sign of xi^alpha xi^beta -> xi^(alpha+beta); 0 when an odd parameter repeats."""
        parity = 0
        for i, a in enumerate(alpha):
            if not a:
                continue
            if beta[i] and self.params[i].odd:
                return 0
            row = self._signs[i]
            for j in range(i):
                if beta[j] and row[j]:
                    parity ^= (a * beta[j]) & 1
        return -1 if parity else 1

    def all_monomials(self) -> list[MultiIndex]:
        """Every retained multi-index, in print order."""
        out: list[MultiIndex] = [()]
        for i, p in enumerate(self.params):
            cap = 1 if p.odd else self.truncation
            out = [a + (e,) for a in out for e in range(cap + 1)]
        keep = [a for a in out if self.allowed(a)]
        return sorted(keep, key=_print_key)

    # -- element constructors --------------------------------------------------
    def zero(self) -> "Section":
        return Section(self, {})

    def one(self) -> "Section":
        return self.const(1)

    def const(self, c: Scalar | BaseFunction) -> "Section":
        return Section(self, {self.unit_index: _as_base(c, self.coords)})

    base = const

    @property
    def unit_index(self) -> MultiIndex:
        return (0,) * len(self.params)

    def coord(self, name: str) -> "Section":
        if name not in self.coords:
            raise KeyError(f"unknown coordinate {name!r}")
        return self.const(BaseFunction.var(name, self.coords))

    def param(self, name: str) -> "Section":
        alpha = [0] * len(self.params)
        alpha[self.index(name)] = 1
        return self.monomial(tuple(alpha))

    def monomial(self, alpha: MultiIndex, coeff: Scalar | BaseFunction = 1) -> "Section":
        if len(alpha) != len(self.params):
            raise ValueError("multi-index length does not match the parameter count")
        if not self.allowed(alpha):
            return self.zero()
        return Section(self, {tuple(alpha): _as_base(coeff, self.coords)})

    def symbol(self, name: str) -> "Section":
        return self.coord(name) if name in self.coords else self.param(name)


def default_truncation(params: Sequence[Parameter]) -> int:
    odd = sum(1 for p in params if p.odd)
    return odd + 2 * (len(params) - odd)


def _as_base(c, coords) -> BaseFunction:
    if isinstance(c, BaseFunction):
        return c.in_variables(coords)
    return BaseFunction.const(c, coords)


def _print_key(alpha: MultiIndex):
    return (sum(alpha), tuple(-e for e in alpha))


def monomial_sign(system: ParameterSystem, word: Sequence[str | int]) -> int:
    """Sign picked up sorting a word of parameters into canonical order; 0 if an odd one repeats."""
    sign, _ = normalize_word(system, word)
    return sign


def normalize_word(system: ParameterSystem, word: Sequence[str | int]) -> tuple[int, MultiIndex]:
    idx = [w if isinstance(w, int) else system.index(w) for w in word]
    sign = 1
    # bubble sort by adjacent transpositions
    n = len(idx)
    for end in range(n - 1, 0, -1):
        for k in range(end):
            a, b = idx[k], idx[k + 1]
            if a > b:
                if system._signs[a][b]:
                    sign = -sign
                idx[k], idx[k + 1] = b, a
    alpha = [0] * len(system.params)
    for i in idx:
        alpha[i] += 1
    for i, e in enumerate(alpha):
        if e > 1 and system.params[i].odd:
            return 0, tuple(alpha)
    return sign, tuple(alpha)


class Section:
    """A truncated series; ``terms`` maps multi-indices to nonzero coefficients."""

    __slots__ = ("system", "terms")

    def __init__(self, system: ParameterSystem, terms: Mapping[MultiIndex, BaseFunction]):
        self.system = system
        clean = {}
        for alpha, c in terms.items():
            if not c.is_zero():
                if c.variables != system.coords:
                    c = c.in_variables(system.coords)
                clean[alpha] = c
        self.terms: dict[MultiIndex, BaseFunction] = clean

    # -- structure ---------------------------------------------------------
    def _check(self, other: "Section") -> None:
        if other.system != self.system:
            raise SystemMismatch("sections live in different parameter systems")

    def _lift(self, other) -> "Section":
        if isinstance(other, Section):
            self._check(other)
            return other
        return self.system.const(other)

    def coefficient(self, alpha: MultiIndex) -> BaseFunction:
        c = self.terms.get(tuple(alpha))
        return c if c is not None else BaseFunction.const(0, self.system.coords)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def epsilon(self) -> BaseFunction:
        return self.coefficient(self.system.unit_index)

    def degree_decompose(self) -> dict[Degree, "Section"]:
        parts: dict[Degree, dict] = {}
        for alpha, c in self.terms.items():
            parts.setdefault(self.system.monomial_degree(alpha), {})[alpha] = c
        return {d: Section(self.system, t) for d, t in parts.items()}

    def is_homogeneous(self) -> bool:
        return len(self.degree_decompose()) <= 1

    def degree(self) -> Degree | None:
        """Degree of a nonzero homogeneous section; None for zero."""
        parts = self.degree_decompose()
        if not parts:
            return None
        if len(parts) > 1:
            raise ValueError("section is not homogeneous")
        return next(iter(parts))

    def has_degree(self, d: Degree) -> bool:
        return all(self.system.monomial_degree(a) == d for a in self.terms)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for alpha, c in other.terms.items():
            out[alpha] = out[alpha] + c if alpha in out else c
        return Section(self.system, out)

    __radd__ = __add__

    def __neg__(self):
        return Section(self.system, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c: Scalar | BaseFunction) -> "Section":
        c = _as_base(c, self.system.coords)
        return Section(self.system, {a: c * v for a, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, Section):
            return self.scale(other)
        self._check(other)
        system = self.system
        out: dict[MultiIndex, BaseFunction] = {}
        for alpha, f in self.terms.items():
            for beta, g in other.terms.items():
                gamma = tuple(a + b for a, b in zip(alpha, beta))
                if not system.allowed(gamma):
                    continue
                s = system.product_sign(alpha, beta)
                if not s:
                    continue
                term = f * g if s > 0 else -(f * g)
                out[gamma] = out[gamma] + term if gamma in out else term
        return Section(system, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        result = self.system.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, Section):
            return self * other.invert()
        return self.scale(_as_base(other, self.system.coords).inverse())

    def __rtruediv__(self, other):
        return self._lift(other) * self.invert()

    def invert(self) -> "Section":
        f = self.epsilon()
        if not f.is_invertible():
            raise NotInvertible(f"base projection {f} of {self} is not invertible")
        finv = f.inverse()
        u = -((self - self.system.const(f)).scale(finv))
        # (1 + u + ... + u^T) by Horner; u is nilpotent of order T+1
        total = self.system.one()
        for _ in range(self.system.truncation):
            total = self.system.one() + u * total
        return total.scale(finv)

    def retruncate(self, system: ParameterSystem) -> "Section":
        """Project onto a system with the same symbols but a smaller truncation."""
        if system.coords != self.system.coords or system.params != self.system.params:
            raise SystemMismatch("retruncation needs the same coordinates and parameters")
        return Section(system, {a: c for a, c in self.terms.items() if system.allowed(a)})

    def __eq__(self, other):
        if isinstance(other, Section):
            return self.system == other.system and self.terms == other.terms
        if isinstance(other, (int, Fraction, BaseFunction)):
            return self == self.system.const(other)
        return NotImplemented

    __hash__ = None

    # -- text -------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[MultiIndex, BaseFunction]]:
        return sorted(self.terms.items(), key=lambda t: _print_key(t[0]))

    def monomial_text(self, alpha: MultiIndex) -> str:
        return _monomial_text(self.system.names, alpha)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for alpha, c in self.sorted_terms():
            mono = self.monomial_text(alpha)
            if not mono:
                text = c.format()
            else:
                neg = _leading_negative(c)
                body = -c if neg else c
                if body == 1:
                    text = mono
                elif body.is_single_term():
                    text = f"{body.format()}*{mono}"
                else:
                    text = f"({body.format(compact=True)})*{mono}"
                text = "-" + text if neg else text
            if not out:
                out.append(text)
            elif text.startswith("-"):
                out.append(" - " + text[1:])
            else:
                out.append(" + " + text)
        return "".join(out)

    def sexpr(self) -> str:
        parts = []
        for alpha, c in self.sorted_terms():
            factors = []
            for name, e in zip(self.system.names, alpha):
                factors.extend([name] * e)
            inner = " ".join([f'"{c.format(compact=True)}"'] + factors)
            parts.append(f"(term {inner})")
        return "(sum" + "".join(" " + p for p in parts) + ")"

    def __repr__(self) -> str:
        return f"Section({self})"


def _monomial_text(names: Sequence[str], alpha: MultiIndex) -> str:
    parts = []
    for name, e in zip(names, alpha):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _leading_negative(c: BaseFunction) -> bool:
    terms = c.num.terms()
    return bool(terms) and terms[0][1] < 0
