"""Graded right fractions r s^-1 and the localization map into sections.

Denominators are homogeneous of even degree. With degree-0 denominators
every sign below is +1.
"""
from __future__ import annotations

from dataclasses import dataclass

from .base import Scalar
from .degrees import Degree, scalar_product
from .sections import NotInvertible, Section, SystemMismatch


class NotAdmissible(ValueError):
    """A denominator or witness outside the multiplicative set."""


def _degree(F: Section) -> Degree:
    d = F.degree()
    return d if d is not None else Degree.zero(F.system.rank)


def _sign(a: Degree, b: Degree) -> int:
    return -1 if scalar_product(a, b) else 1


def check_admissible(s: Section, *, degree_zero: bool = False) -> None:
    if s.is_zero():
        raise NotAdmissible("the zero section is not an admissible denominator")
    if not s.is_homogeneous():
        raise NotAdmissible(f"denominator {s} is not homogeneous")
    d = _degree(s)
    if not d.is_even():
        raise NotAdmissible(f"denominator {s} has odd degree {d}")
    if degree_zero:
        if not d.is_zero():
            raise NotAdmissible(f"denominator {s} must have degree 0")
        if not s.epsilon().is_invertible():
            raise NotAdmissible(f"denominator {s} has a non-invertible base projection")


@dataclass(frozen=True, eq=False)
class GradedFraction:
    numerator: Section
    denominator: Section

    def __post_init__(self):
        if self.numerator.system != self.denominator.system:
            raise SystemMismatch("numerator and denominator live in different systems")
        check_admissible(self.denominator)

    @property
    def system(self):
        return self.numerator.system

    @classmethod
    def embed(cls, F: Section) -> "GradedFraction":
        return cls(F, F.system.one())

    def degree(self) -> Degree | None:
        return self.numerator.degree()

    def __add__(self, other):
        return fraction_add(self, other)

    def __mul__(self, other):
        return fraction_mul(self, other)

    def __str__(self) -> str:
        return f"[{self.numerator}] / [{self.denominator}]"

    __repr__ = __str__


def fraction_equiv(a: GradedFraction, b: GradedFraction, sigma: Section | None = None) -> bool:
    """(r s' - (-1)^<s,s'> r' s) sigma == 0 for the given witness (default 1)."""
    if a.system != b.system:
        raise SystemMismatch("fractions in different systems")
    if sigma is None:
        sigma = a.system.one()
    check_admissible(sigma)
    r, s = a.numerator, a.denominator
    r2, s2 = b.numerator, b.denominator
    diff = r * s2 - (r2 * s).scale(_sign(_degree(s), _degree(s2)))
    return (diff * sigma).is_zero()


def fraction_add(a: GradedFraction, b: GradedFraction) -> GradedFraction:
    if a.system != b.system:
        raise SystemMismatch("fractions in different systems")
    r, s = a.numerator, a.denominator
    r2, s2 = b.numerator, b.denominator
    num = r * s2 + (r2 * s).scale(_sign(_degree(s), _degree(s2)))
    return GradedFraction(num, s * s2)


def fraction_mul(a: GradedFraction, b: GradedFraction) -> GradedFraction:
    """r s^-1 . r' s'^-1 = (-1)^<r'+s', s> r r' (s s')^-1, linear in r'."""
    if a.system != b.system:
        raise SystemMismatch("fractions in different systems")
    r, s = a.numerator, a.denominator
    s2 = b.denominator
    ds, ds2 = _degree(s), _degree(s2)
    num = a.system.zero()
    for d, part in b.numerator.degree_decompose().items():
        num = num + (r * part).scale(_sign(d + ds2, ds))
    return GradedFraction(num, s * s2)


def fraction_scale(c: Scalar, a: GradedFraction) -> GradedFraction:
    return GradedFraction(a.numerator.scale(c), a.denominator)


def lambda_map(a: GradedFraction) -> Section:
    """F s^-1 -> F * s^-1 computed in the section algebra."""
    s = a.denominator
    if not s.epsilon().is_invertible():
        raise NotInvertible(f"denominator {s} has a non-invertible base projection")
    return a.numerator * s.invert()


def embed(F: Section) -> GradedFraction:
    return GradedFraction.embed(F)
