"""Graded tensor products, product domains and their universal property.

The product of two chart domains carries the disjoint union of the symbols.
Each factor keeps its own truncation block, so the combined algebra is
exactly the tensor product of the two truncated algebras and

    f xi^a (x) g eta^b  ->  f g xi^a eta^b

is an algebra isomorphism, with the sign (-1)^<deg eta^b, deg xi^a'> paid
when the middle factors of a product of pure tensors are swapped.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .base import BaseFunction, poly_ring
from .degrees import RankMismatch, order_index, scalar_product
from .domains import Domain, DomainMismatch, Morphism, compose, pullback
from .sections import MultiIndex, Parameter, ParameterSystem, Section, SystemMismatch, normalize_word


class NotSeparable(ValueError):
    """A coefficient is not a finite sum of products f(left) g(right)."""


@dataclass(frozen=True)
class ProductDomain:
    left: Domain
    right: Domain
    combined: Domain
    left_names: tuple[tuple[str, str], ...]
    right_names: tuple[tuple[str, str], ...]

    def rename(self, i: int) -> dict[str, str]:
        return dict(self.left_names if i == 1 else self.right_names)

    def factor(self, i: int) -> Domain:
        return self.left if i == 1 else self.right

    @property
    def left_param_positions(self) -> tuple[int, ...]:
        names = self.combined.params
        ren = self.rename(1)
        return tuple(names.index(ren[p]) for p in self.left.params)

    @property
    def right_param_positions(self) -> tuple[int, ...]:
        names = self.combined.params
        ren = self.rename(2)
        return tuple(names.index(ren[p]) for p in self.right.params)


def product_domain(m1: Domain, m2: Domain, name: str | None = None) -> ProductDomain:
    if m1.rank != m2.rank:
        raise RankMismatch(f"cannot multiply rank {m1.rank} and rank {m2.rank} domains")
    g1, g2 = set(m1.generators()), set(m2.generators())
    clash = g1 & g2
    ren1 = {g: (f"{g}_1" if g in clash else g) for g in m1.generators()}
    ren2 = {g: (f"{g}_2" if g in clash else g) for g in m2.generators()}
    if len(set(ren1.values()) | set(ren2.values())) != len(g1) + len(g2):
        raise ValueError("suffixing did not resolve the name collision")
    s1, s2 = m1.system, m2.system
    coords = tuple(ren1[x] for x in s1.coords) + tuple(ren2[x] for x in s2.coords)
    decl = [Parameter(ren1[p.name], p.degree) for p in s1.params]
    decl += [Parameter(ren2[p.name], p.degree) for p in s2.params]
    # canonical order of the combined system: degree first, left factor before right
    order = sorted(range(len(decl)), key=lambda k: (order_index(decl[k].degree), k))
    params = tuple(decl[k] for k in order)
    where = {k: pos for pos, k in enumerate(order)}
    n1 = len(s1.params)
    blocks = []
    for idx, t in s1.blocks:
        blocks.append((tuple(sorted(where[i] for i in idx)), t))
    for idx, t in s2.blocks:
        blocks.append((tuple(sorted(where[n1 + i] for i in idx)), t))
    blocks = tuple(b for b in blocks if b[0]) or (((), 0),)
    system = ParameterSystem(coords, params, s1.rank, blocks)
    combined = Domain(name or f"{m1.name}x{m2.name}", system)
    return ProductDomain(m1, m2, combined, tuple(ren1.items()), tuple(ren2.items()))


# -- tensor elements ---------------------------------------------------------------


class TensorElement:
    """A finite sum of pure tensors (f xi^a) (x) (g eta^b) over two systems.

    ``terms`` maps (a, b) to a list of coefficient pairs (f, g).
    """

    __slots__ = ("left", "right", "terms")

    def __init__(self, left: ParameterSystem, right: ParameterSystem, terms=None):
        if left.rank != right.rank:
            raise RankMismatch("tensor factors must share the grading rank")
        self.left = left
        self.right = right
        clean: dict[tuple[MultiIndex, MultiIndex], list[tuple[BaseFunction, BaseFunction]]] = {}
        for key, pairs in (terms or {}).items():
            kept = [(f, g) for f, g in pairs if not f.is_zero() and not g.is_zero()]
            if kept:
                clean[key] = kept
        self.terms = clean

    @classmethod
    def pure(cls, F: Section, G: Section) -> "TensorElement":
        terms = {}
        for a, f in F.terms.items():
            for b, g in G.terms.items():
                terms.setdefault((a, b), []).append((f, g))
        return cls(F.system, G.system, terms)

    def _check(self, other: "TensorElement") -> None:
        if other.left != self.left or other.right != self.right:
            raise SystemMismatch("tensor elements over different systems")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        terms = {k: list(v) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            terms.setdefault(k, []).extend(v)
        return TensorElement(self.left, self.right, terms)

    def __neg__(self) -> "TensorElement":
        return TensorElement(self.left, self.right, {k: [(-f, g) for f, g in v] for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TensorElement):
            return tensor_mul(self, other)
        return TensorElement(self.left, self.right, {k: [(f * other, g) for f, g in v] for k, v in self.terms.items()})

    def pure_terms(self) -> Iterable[tuple[Section, Section]]:
        for (a, b), pairs in self.terms.items():
            for f, g in pairs:
                yield self.left.monomial(a, f), self.right.monomial(b, g)

    def is_zero(self) -> bool:
        return fundamental_iso(self).is_zero()

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        self._check(other)
        # the iso is injective, so it decides equality in the algebraic tensor product
        return fundamental_iso(self) == fundamental_iso(other)

    __hash__ = None

    def __str__(self) -> str:
        parts = []
        for F, G in self.pure_terms():
            parts.append(f"({F}) (x) ({G})")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


def tensor_mul(a: TensorElement, b: TensorElement) -> TensorElement:
    a._check(b)
    L, R = a.left, a.right
    out: dict = {}
    for (al, be), p1 in a.terms.items():
        deg_inner = R.monomial_degree(be)
        for (al2, be2), p2 in b.terms.items():
            alpha = tuple(x + y for x, y in zip(al, al2))
            beta = tuple(x + y for x, y in zip(be, be2))
            if not L.allowed(alpha) or not R.allowed(beta):
                continue
            s = L.product_sign(al, al2) * R.product_sign(be, be2)
            if not s:
                continue
            if scalar_product(deg_inner, L.monomial_degree(al2)):
                s = -s
            bucket = out.setdefault((alpha, beta), [])
            for f, g in p1:
                for f2, g2 in p2:
                    bucket.append((f * f2 if s > 0 else -(f * f2), g * g2))
    return TensorElement(L, R, out)


# -- the isomorphism ------------------------------------------------------------------


_PRODUCT_CACHE: dict = {}


def _default_product(left: ParameterSystem, right: ParameterSystem) -> ProductDomain:
    key = (left, right)
    if key not in _PRODUCT_CACHE:
        _PRODUCT_CACHE[key] = product_domain(Domain("L", left), Domain("R", right))
    return _PRODUCT_CACHE[key]


def _lift(f: BaseFunction, rename: Mapping[str, str], coords: tuple[str, ...]) -> BaseFunction:
    return f.rename(rename).in_variables(coords)


def fundamental_iso(t: TensorElement, P: ProductDomain | None = None) -> Section:
    """sum f_a xi^a (x) g_b eta^b  ->  sum f_a g_b xi^a eta^b on the product."""
    if P is None:
        P = _default_product(t.left, t.right)
    if P.left.system != t.left or P.right.system != t.right:
        raise SystemMismatch("tensor element does not match the product domain")
    system = P.combined.system
    lpos, rpos = P.left_param_positions, P.right_param_positions
    ren1, ren2 = P.rename(1), P.rename(2)
    out: dict[MultiIndex, BaseFunction] = {}
    for (alpha, beta), pairs in t.terms.items():
        word = [lpos[i] for i, e in enumerate(alpha) for _ in range(e)]
        word += [rpos[j] for j, e in enumerate(beta) for _ in range(e)]
        sign, gamma = normalize_word(system, word)
        if not sign or not system.allowed(gamma):
            continue
        for f, g in pairs:
            c = _lift(f, ren1, system.coords) * _lift(g, ren2, system.coords)
            c = c if sign > 0 else -c
            out[gamma] = out[gamma] + c if gamma in out else c
    return Section(system, out)


def fundamental_iso_inverse(F: Section, P: ProductDomain) -> TensorElement:
    system = P.combined.system
    if F.system != system:
        raise SystemMismatch("section does not live on the product domain")
    lpos, rpos = P.left_param_positions, P.right_param_positions
    terms: dict = {}
    for gamma, h in F.terms.items():
        alpha = tuple(gamma[i] for i in lpos)
        beta = tuple(gamma[j] for j in rpos)
        word = [lpos[i] for i, e in enumerate(alpha) for _ in range(e)]
        word += [rpos[j] for j, e in enumerate(beta) for _ in range(e)]
        sign, _ = normalize_word(system, word)
        for f, g in separate(h, P):
            terms.setdefault((alpha, beta), []).append((f if sign > 0 else -f, g))
    return TensorElement(P.left.system, P.right.system, terms)


def separate(h: BaseFunction, P: ProductDomain) -> list[tuple[BaseFunction, BaseFunction]]:
    """Write h(x, y) = sum_k f_k(x) g_k(y); the denominator must split as d1(x) d2(y)."""
    coords = P.combined.coords
    h = h.in_variables(coords)
    ren1, ren2 = P.rename(1), P.rename(2)
    lc = tuple(P.left.coords)
    rc = tuple(P.right.coords)
    li = [coords.index(ren1[x]) for x in lc]
    ri = [coords.index(ren2[y]) for y in rc]

    def split(poly):
        groups: dict[tuple[int, ...], dict[tuple[int, ...], object]] = {}
        for monom, c in poly.terms():
            groups.setdefault(tuple(monom[j] for j in ri), {})[tuple(monom[i] for i in li)] = c
        return groups

    den_groups = split(h.den)
    keys = list(den_groups)
    ref = den_groups[keys[0]]
    ref_poly = poly_ring(lc).from_dict(ref)
    d2 = {}
    for k in keys:
        g = poly_ring(lc).from_dict(den_groups[k])
        ratio = g.LC / ref_poly.LC
        if g * ref_poly.LC != ref_poly * g.LC:
            raise NotSeparable(f"denominator of {h} does not split into left and right factors")
        d2[k] = ratio
    d1f = BaseFunction(ref_poly)
    d2f = BaseFunction(poly_ring(rc).from_dict(d2))
    pairs = []
    for k, left_terms in sorted(split(h.num).items()):
        f = BaseFunction(poly_ring(lc).from_dict(left_terms)) / d1f
        g = BaseFunction.from_terms({k: 1}, rc) / d2f
        pairs.append((f, g))
    return pairs


# -- projections and universal property ------------------------------------------------


def projection(P: ProductDomain, i: int) -> Morphism:
    if i not in (1, 2):
        raise ValueError("projection index must be 1 or 2")
    factor = P.factor(i)
    ren = P.rename(i)
    images = {g: P.combined.symbol(ren[g]) for g in factor.generators()}
    return Morphism(P.combined, factor, images, name=f"Pi_{i}")


def tensor_left(F: Section, P: ProductDomain) -> Section:
    """T(f) = iso(f (x) 1)."""
    return fundamental_iso(TensorElement.pure(F, P.right.system.one()), P)


def tensor_right(G: Section, P: ProductDomain) -> Section:
    return fundamental_iso(TensorElement.pure(P.left.system.one(), G), P)


def universal_morphism(phi1: Morphism, phi2: Morphism, P: ProductDomain | None = None) -> Morphism:
    """The unique Psi: N -> M1 x M2 with Pi_i o Psi = Phi_i."""
    if phi1.source != phi2.source:
        raise DomainMismatch(f"sources {phi1.source.name} and {phi2.source.name} differ")
    if phi1.source.rank != phi2.source.rank:
        raise RankMismatch("morphisms of different rank")
    if P is None:
        P = product_domain(phi1.target, phi2.target)
    if P.left != phi1.target or P.right != phi2.target:
        raise DomainMismatch("product domain does not match the targets")
    images = {}
    for i, phi in ((1, phi1), (2, phi2)):
        ren = P.rename(i)
        for g, img in phi.images.items():
            images[ren[g]] = img
    return Morphism(phi1.source, P.combined, images, name="Psi")


def tensor_pullback(phi1: Morphism, phi2: Morphism, t: TensorElement) -> Section:
    """p(sum F_j (x) G_j) = sum phi1*(F_j) phi2*(G_j)."""
    total = phi1.source.system.zero()
    for F, G in t.pure_terms():
        total = total + pullback(phi1, F) * pullback(phi2, G)
    return total


def product_of_morphisms(psi1: Morphism, psi2: Morphism) -> Morphism:
    """Psi1 x Psi2: M1 x M2 -> N1 x N2, the factorization of (Psi1 o Pi_1, Psi2 o Pi_2)."""
    if psi1.source.rank != psi2.source.rank:
        raise RankMismatch("morphisms of different rank")
    PS = product_domain(psi1.source, psi2.source)
    PT = product_domain(psi1.target, psi2.target)
    f1 = compose(projection(PS, 1), psi1)
    f2 = compose(projection(PS, 2), psi2)
    out = universal_morphism(f1, f2, PT)
    out.name = "Psi1xPsi2"
    return out


def factors_through(X: Morphism, phi1: Morphism, phi2: Morphism, P: ProductDomain) -> bool:
    return compose(X, projection(P, 1)) == phi1 and compose(X, projection(P, 2)) == phi2

