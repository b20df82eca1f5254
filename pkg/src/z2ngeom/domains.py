"""Z_2^n-domains, their morphisms, points and characters.

A morphism is stored as the images of the target generators (coordinates and
parameters) under its pullback. The pullback of a general section substitutes
parameters directly and expands each coefficient f(y) around the base part b
of the coordinate images, f(b + nu) = sum_k d^k f(b) / k! nu^k, which is a
finite sum because nu is nilpotent in the truncated algebra.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import factorial
from typing import Mapping

from .base import BaseFunction, Scalar
from .sections import MultiIndex, ParameterSystem, Section, SystemMismatch

Point = dict[str, Fraction]


class DegreeViolation(ValueError):
    pass


class DomainMismatch(ValueError):
    pass


class CharacterError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    name: str
    system: ParameterSystem

    @classmethod
    def make(cls, name, coords=(), params=(), rank=None, truncation=None) -> "Domain":
        return cls(name, ParameterSystem.make(coords, params, rank=rank, truncation=truncation))

    @property
    def rank(self) -> int:
        return self.system.rank

    @property
    def coords(self) -> tuple[str, ...]:
        return self.system.coords

    @property
    def params(self) -> tuple[str, ...]:
        return self.system.names

    def generators(self) -> tuple[str, ...]:
        return self.system.symbols()

    def symbol(self, name: str) -> Section:
        return self.system.symbol(name)

    def __str__(self) -> str:
        return f"{self.name} = R^{self.system.dimension}"


class Morphism:
    """Phi: source -> target, given by phi*(g) for each target generator g."""

    __slots__ = ("source", "target", "images", "name")

    def __init__(self, source: Domain, target: Domain, images: Mapping[str, Section], name: str = ""):
        if source.rank != target.rank:
            raise DomainMismatch(f"rank {source.rank} domain cannot map to rank {target.rank} domain")
        missing = [g for g in target.generators() if g not in images]
        extra = [g for g in images if g not in target.generators()]
        if missing:
            raise DegreeViolation(f"no image given for target generator(s) {', '.join(missing)}")
        if extra:
            raise DegreeViolation(f"{', '.join(extra)} is not a generator of {target.name}")
        clean = {}
        for g in target.generators():
            img = images[g]
            if not isinstance(img, Section):
                img = source.system.const(img)
            if img.system != source.system:
                raise SystemMismatch(f"image of {g} does not live on {source.name}")
            want = target.system.symbol_degree(g)
            if not img.has_degree(want):
                raise DegreeViolation(f"image of {g} must be homogeneous of degree {want}, got {img}")
            clean[g] = img
        self.source = source
        self.target = target
        self.images: dict[str, Section] = clean
        self.name = name

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.source == other.source and self.target == other.target and self.images == other.images

    __hash__ = None

    def __repr__(self) -> str:
        body = ", ".join(f"{g} := {img}" for g, img in self.images.items())
        return f"Morphism({self.source.name} -> {self.target.name}: {body})"

    def pullback(self, F: Section) -> Section:
        return pullback(self, F)


def identity(domain: Domain) -> Morphism:
    return Morphism(domain, domain, {g: domain.symbol(g) for g in domain.generators()}, name="id")


def pullback(phi: Morphism, F: Section) -> Section:
    target = phi.target.system
    if F.system != target:
        raise SystemMismatch(f"section does not live on the target {phi.target.name}")
    src = phi.source.system
    bases = {y: phi.images[y].epsilon() for y in target.coords}
    shifts = {y: phi.images[y] - src.const(bases[y]) for y in target.coords}
    expand = _TaylorExpander(src, target.coords, bases, shifts)
    param_images = [phi.images[p.name] for p in target.params]
    mono_cache: dict[MultiIndex, Section] = {}

    def monomial_image(alpha: MultiIndex) -> Section:
        if alpha not in mono_cache:
            out = src.one()
            for img, e in zip(param_images, alpha):
                for _ in range(e):
                    out = out * img
            mono_cache[alpha] = out
        return mono_cache[alpha]

    result = src.zero()
    for alpha, f in F.terms.items():
        m = monomial_image(alpha)
        if m.is_zero():
            continue
        result = result + expand(f) * m
    return result


class _TaylorExpander:
    def __init__(self, system: ParameterSystem, coords, bases, shifts):
        self.system = system
        self.coords = tuple(coords)
        self.bases = bases
        self.active = [y for y in coords if not shifts[y].is_zero()]
        self.powers = {y: [system.one()] for y in self.active}
        self.shifts = shifts

    def _power(self, y: str, k: int) -> Section:
        table = self.powers[y]
        while len(table) <= k:
            table.append(table[-1] * self.shifts[y])
        return table[k]

    def __call__(self, f: BaseFunction) -> Section:
        return self._expand(f, 0, self.system.truncation)

    def _expand(self, f: BaseFunction, pos: int, budget: int) -> Section:
        if f.is_zero():
            return self.system.zero()
        if pos == len(self.active):
            return self.system.const(f.substitute(self.bases, self.system.coords))
        y = self.active[pos]
        total = self.system.zero()
        deriv = f
        for k in range(budget + 1):
            if k:
                deriv = deriv.derivative(y)
                if deriv.is_zero():
                    break
            nu_k = self._power(y, k)
            if nu_k.is_zero():
                break
            inner = self._expand(deriv * Fraction(1, factorial(k)), pos + 1, budget - k)
            total = total + inner * nu_k
        return total


def compose(psi: Morphism, phi: Morphism) -> Morphism:
    """The composite M -> P of psi: M -> N and phi: N -> P; its pullback is psi* phi*."""
    if psi.target != phi.source:
        raise DomainMismatch(f"cannot compose: {psi.target.name} is not {phi.source.name}")
    images = {g: pullback(psi, img) for g, img in phi.images.items()}
    return Morphism(psi.source, phi.target, images)


def base_map(phi: Morphism) -> dict[str, BaseFunction]:
    return {y: phi.images[y].epsilon() for y in phi.target.coords}


def apply_base_map(phi: Morphism, m: Mapping[str, Scalar]) -> Point:
    return {y: f.evaluate(m) for y, f in base_map(phi).items()}


def make_point(domain: Domain, values: Mapping[str, Scalar]) -> Point:
    missing = [x for x in domain.coords if x not in values]
    if missing:
        raise CharacterError(f"point does not assign coordinate(s) {', '.join(missing)}")
    return {x: Fraction(values[x]) for x in domain.coords}


def character_from_point(m: Mapping[str, Scalar], F: Section) -> Fraction:
    """epsilon_m(F): evaluate the base projection of F at m."""
    return F.epsilon().evaluate(m)


def in_maximal_ideal(m: Mapping[str, Scalar], F: Section) -> bool:
    return character_from_point(m, F) == 0


def character_of_point(domain: Domain, m: Mapping[str, Scalar]) -> dict[str, Fraction]:
    """The character epsilon_m recorded by its values on the generators."""
    m = make_point(domain, m)
    chi = dict(m)
    chi.update({xi: Fraction(0) for xi in domain.params})
    return chi


def point_from_character(domain: Domain, chi: Mapping[str, Scalar]) -> Point:
    for xi in domain.params:
        if chi.get(xi, 0) != 0:
            raise CharacterError(
                f"character sends {xi} (degree {domain.system.symbol_degree(xi)}) to a nonzero scalar"
            )
    unknown = [g for g in chi if g not in domain.generators()]
    if unknown:
        raise CharacterError(f"{unknown[0]} is not a generator of {domain.name}")
    return make_point(domain, {x: chi[x] for x in domain.coords if x in chi})


def apply_character(chi: Mapping[str, Scalar], F: Section) -> Fraction:
    """Extend a generator-level character to all of the algebra."""
    m = {x: chi[x] for x in F.system.coords}
    return character_from_point(m, F)


def generator_images(phi: Morphism) -> dict[str, Section]:
    return dict(phi.images)


def morphism_from_algebra_map(source: Domain, target: Domain, images: Mapping[str, Section]) -> Morphism:
    """Rebuild the morphism whose pullback sends target generators to ``images``."""
    return Morphism(source, target, images)


def point_domain(rank: int) -> Domain:
    return Domain("pt", ParameterSystem.make((), (), rank=rank))


def to_point(domain: Domain) -> Morphism:
    """The unique morphism to R^{0|0}; its pullback is r -> r*1."""
    return Morphism(domain, point_domain(domain.rank), {})


def morphisms_to_point(domain: Domain) -> list[Morphism]:
    """Every generator assignment for a morphism domain -> R^{0|0}.

    R^{0|0} has no generators, so the product of per-generator choices has
    exactly one element: the empty assignment.
    """
    pt = point_domain(domain.rank)
    gens = pt.generators()
    return [Morphism(domain, pt, dict(zip(gens, choice))) for choice in product(*([] for _ in gens))]
