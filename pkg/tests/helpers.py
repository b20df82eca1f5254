"""Random generators shared by the property tests and the acceptance suite.

Each generator takes a ``Source`` so the same code runs under hypothesis
(``HypSource``) and under a seeded ``random.Random`` (``RngSource``).
"""
from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from z2ngeom.base import BaseFunction
from z2ngeom.degrees import Degree, nonzero_degrees, standard_order
from z2ngeom.domains import Domain, Morphism
from z2ngeom.sections import ParameterSystem, Section


class RngSource:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def int(self, lo, hi):
        return self.rng.randint(lo, hi)

    def choice(self, seq):
        return self.rng.choice(list(seq))

    def bool(self, p=0.5):
        return self.rng.random() < p


class HypSource:
    """Wraps ``data.draw`` from ``st.data()``."""

    def __init__(self, draw):
        self.draw = draw

    def int(self, lo, hi):
        return self.draw(st.integers(lo, hi))

    def choice(self, seq):
        return self.draw(st.sampled_from(list(seq)))

    def bool(self, p=0.5):
        return self.draw(st.booleans())


def degree(src, rank: int, nonzero=True) -> Degree:
    pool = nonzero_degrees(rank) if nonzero else standard_order(rank)
    return src.choice(pool)


def scalar(src, lo=-3, hi=3, den=True) -> Fraction:
    q = src.int(1, 2) if den else 1
    return Fraction(src.int(lo, hi), q)


def polynomial(src, coords, max_deg=2, max_terms=3) -> BaseFunction:
    coords = tuple(coords)
    if not coords:
        return BaseFunction.const(scalar(src))
    terms = {}
    for _ in range(src.int(0, max_terms)):
        e = [0] * len(coords)
        for _ in range(src.int(0, max_deg)):
            e[src.int(0, len(coords) - 1)] += 1
        terms[tuple(e)] = scalar(src)
    return BaseFunction.from_terms(terms, coords)


def coefficient(src, coords, rational=True) -> BaseFunction:
    """A polynomial, sometimes divided by 1 + y^2 or 1 + y^2 + y^4.

    These denominators stay nonzero under any substitution of a real polynomial for y.
    """
    f = polynomial(src, coords)
    if rational and coords and src.int(0, 3) == 0:
        y = BaseFunction.var(src.choice(coords), coords)
        f = f / (1 + y * y if src.bool() else 1 + y * y + y**4)
    return f


def unit_coefficient(src, coords) -> BaseFunction:
    """Nonzero coefficient: constant plus polynomial."""
    f = polynomial(src, coords) + BaseFunction.const(src.int(1, 3), coords)
    return f if not f.is_zero() else BaseFunction.const(1, coords)


def system(src, rank=None, max_coords=2, max_params=3, truncation=None, min_params=0) -> ParameterSystem:
    rank = rank or src.int(1, 2)
    coords = ["x", "y", "z"][: src.int(0, max_coords)]
    names = ["xi1", "xi2", "xi3", "xi4"]
    params = [(names[i], degree(src, rank)) for i in range(src.int(min_params, max_params))]
    T = truncation if truncation is not None else (src.int(1, 4) if src.bool() else None)
    return ParameterSystem.make(coords, params, rank=rank, truncation=T)


def section(src, sys: ParameterSystem, density=3, rational=True) -> Section:
    monos = sys.all_monomials()
    terms = {}
    for _ in range(src.int(0, density)):
        alpha = src.choice(monos)
        terms[alpha] = coefficient(src, sys.coords, rational)
    return Section(sys, terms)


def homogeneous_section(src, sys: ParameterSystem, deg: Degree, density=3, rational=True) -> Section:
    monos = [a for a in sys.all_monomials() if sys.monomial_degree(a) == deg]
    if not monos:
        return sys.zero()
    terms = {}
    for _ in range(src.int(0, density)):
        terms[src.choice(monos)] = coefficient(src, sys.coords, rational)
    return Section(sys, terms)


def invertible_section(src, sys: ParameterSystem, density=3) -> Section:
    F = section(src, sys, density)
    base = unit_coefficient(src, sys.coords)
    return F - sys.const(F.epsilon()) + sys.const(base)


def domain(src, name, rank, prefix, max_coords=2, max_params=2, truncation=None) -> Domain:
    coords = [f"{prefix}{i}" for i in range(1, src.int(0, max_coords) + 1)]
    params = [(f"{prefix}p{i}", degree(src, rank)) for i in range(1, src.int(0, max_params) + 1)]
    return Domain.make(name, coords, params, rank=rank, truncation=truncation)


def morphism(src, source: Domain, target: Domain, density=2) -> Morphism:
    """Random degree-preserving morphism with polynomial coordinate images."""
    sys = source.system
    images = {}
    zero = Degree.zero(sys.rank)
    for y in target.coords:
        nil = homogeneous_section(src, sys, zero, density, rational=False)
        nil = nil - sys.const(nil.epsilon())
        images[y] = sys.const(polynomial(src, sys.coords)) + nil
    for p in target.system.params:
        images[p.name] = homogeneous_section(src, sys, p.degree, density, rational=False)
    return Morphism(source, target, images)
