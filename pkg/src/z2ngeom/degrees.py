"""The Z_2^n degree lattice.

A degree is an n-tuple of bits. Two homogeneous elements of degrees a, b
commute up to the sign (-1)^<a,b>, where <a,b> is the mod-2 scalar product.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence


class RankMismatch(ValueError):
    pass


@dataclass(frozen=True, order=False)
class Degree:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("a degree needs rank n >= 1")
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"degree entries must be 0 or 1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def parse(cls, text: str) -> "Degree":
        """Read a bit-string such as ``"011"``."""
        text = text.strip().strip("()").replace(",", "").replace(" ", "")
        if not text or any(c not in "01" for c in text):
            raise ValueError(f"not a bit-string degree: {text!r}")
        return cls(tuple(int(c) for c in text))

    @classmethod
    def zero(cls, rank: int) -> "Degree":
        return cls((0,) * rank)

    @property
    def rank(self) -> int:
        return len(self.bits)

    def is_zero(self) -> bool:
        return not any(self.bits)

    def is_even(self) -> bool:
        return is_even(self)

    def __add__(self, other: "Degree") -> "Degree":
        _check_rank(self, other)
        return Degree(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    __sub__ = __add__

    def __str__(self) -> str:
        return "".join(map(str, self.bits))

    def __repr__(self) -> str:
        return f"Degree({self})"


def _check_rank(a: Degree, b: Degree) -> None:
    if a.rank != b.rank:
        raise RankMismatch(f"degrees of rank {a.rank} and {b.rank} cannot be combined")


def scalar_product(a: Degree, b: Degree) -> int:
    _check_rank(a, b)
    return sum(x & y for x, y in zip(a.bits, b.bits)) & 1


def sign(a: Degree, b: Degree) -> int:
    """The commutation sign (-1)^<a,b>."""
    return -1 if scalar_product(a, b) else 1


def is_even(a: Degree) -> bool:
    return sum(a.bits) % 2 == 0


def degree_sum(degrees: Iterable[Degree], rank: int) -> Degree:
    total = Degree.zero(rank)
    for d in degrees:
        total = total + d
    return total


@lru_cache(maxsize=None)
def standard_order(n: int) -> tuple[Degree, ...]:
    """All 2^n degrees: even ones lexicographically, then odd ones lexicographically."""
    if n < 1:
        raise ValueError("rank n must be >= 1")
    everything = [Degree(bits) for bits in product((0, 1), repeat=n)]
    evens = [d for d in everything if is_even(d)]
    odds = [d for d in everything if not is_even(d)]
    return tuple(evens + odds)


def nonzero_degrees(n: int) -> tuple[Degree, ...]:
    return standard_order(n)[1:]


def order_index(d: Degree) -> int:
    return standard_order(d.rank).index(d)


@dataclass(frozen=True)
class GradedDimension:
    """Dimension p|q: p degree-0 coordinates and q[i] parameters of the i-th nonzero degree."""

    p: int
    q: tuple[int, ...]

    def __post_init__(self):
        q = tuple(int(v) for v in self.q)
        object.__setattr__(self, "q", q)
        if self.p < 0 or any(v < 0 for v in q):
            raise ValueError("dimension entries must be nonnegative")
        n = (len(q) + 1).bit_length() - 1
        if len(q) != 2**n - 1 or n < 1:
            raise ValueError(f"q must have 2^n - 1 entries, got {len(q)}")

    @property
    def rank(self) -> int:
        return (len(self.q) + 1).bit_length() - 1

    @property
    def total_parameters(self) -> int:
        return sum(self.q)

    @classmethod
    def from_degrees(cls, p: int, degrees: Sequence[Degree], rank: int) -> "GradedDimension":
        tail = nonzero_degrees(rank)
        counts = [0] * len(tail)
        for d in degrees:
            if d.rank != rank:
                raise RankMismatch(f"parameter degree {d} does not have rank {rank}")
            if d.is_zero():
                raise ValueError("parameters must have nonzero degree")
            counts[tail.index(d)] += 1
        return cls(p, tuple(counts))

    def __add__(self, other: "GradedDimension") -> "GradedDimension":
        if len(self.q) != len(other.q):
            raise RankMismatch("dimensions of different rank")
        return GradedDimension(self.p + other.p, tuple(a + b for a, b in zip(self.q, other.q)))

    def __str__(self) -> str:
        return f"{self.p}|({','.join(map(str, self.q))})"

    @classmethod
    def parse(cls, text: str) -> "GradedDimension":
        p, _, q = text.partition("|")
        q = q.strip().strip("()")
        return cls(int(p), tuple(int(v) for v in q.split(",") if v.strip()))
