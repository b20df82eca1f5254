"""Presheaves of algebras on finite topological spaces.

Everything here is decided by enumeration. On a finite space every point x
has a smallest open neighbourhood U_x, so the stalk at x is F(U_x) and a germ
family over U is locally implemented iff g_y = g_x|U_y for all y in U_x.
Section algebras are finite and tabulated (``FiniteAlgebra``); a presheaf
may also carry infinite algebras (e.g. section algebras of a domain), in
which case only the non-enumerating operations apply.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import chain, combinations, product
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

Open = frozenset


class SheafError(ValueError):
    pass


class NotContinuous(SheafError):
    pass


# -- finite algebras ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteAlgebra:
    elements: tuple
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_members", frozenset(self.elements))

    def __contains__(self, x) -> bool:
        return x in self._members

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def is_closed(self) -> bool:
        members = self._members
        if self.zero not in members or self.one not in members:
            return False
        return all(self.add(a, b) in members and self.mul(a, b) in members for a in self.elements for b in self.elements)


def zmod(m: int, k: int = 1) -> FiniteAlgebra:
    """(Z/m)^k with componentwise operations; elements are k-tuples."""
    elements = tuple(product(range(m), repeat=k))
    return FiniteAlgebra(
        elements,
        lambda a, b: tuple((x + y) % m for x, y in zip(a, b)),
        lambda a, b: tuple((x * y) % m for x, y in zip(a, b)),
        (0,) * k,
        (1 % m,) * k,
        name=f"Z/{m}" if k == 1 else f"(Z/{m})^{k}",
    )


def family_algebra(factors: Sequence[Any], elements: Iterable[tuple]) -> FiniteAlgebra:
    """A subalgebra of a product, elements being tuples with one entry per factor."""
    factors = tuple(factors)
    return FiniteAlgebra(
        tuple(elements),
        lambda a, b: tuple(f.add(x, y) for f, x, y in zip(factors, a, b)),
        lambda a, b: tuple(f.mul(x, y) for f, x, y in zip(factors, a, b)),
        tuple(f.zero for f in factors),
        tuple(f.one for f in factors),
    )


def function_algebra(values: FiniteAlgebra, size: int, keep: Callable[[tuple], bool] | Iterable[tuple] | None = None):
    """Functions from ``size`` points into ``values``, optionally cut down to a subalgebra."""
    everything = product(values.elements, repeat=size)
    if keep is None:
        elements = tuple(everything)
    elif callable(keep):
        elements = tuple(s for s in everything if keep(s))
    else:
        elements = tuple(sorted(set(map(tuple, keep))))
    return family_algebra([values] * size, elements)


# -- finite spaces ---------------------------------------------------------------------


def _open_key(points: Sequence[Hashable]):
    rank = {p: i for i, p in enumerate(points)}
    return lambda U: (len(U), sorted(rank[p] for p in U))


@dataclass(frozen=True)
class FiniteSpace:
    points: tuple
    opens: tuple[Open, ...]
    basis: tuple[Open, ...]

    def __post_init__(self):
        pts = frozenset(self.points)
        opens = set(self.opens)
        if Open() not in opens or pts not in opens:
            raise SheafError("opens must contain the empty set and the whole space")
        for U in opens:
            if not U <= pts:
                raise SheafError(f"open {set(U)} is not a subset of the points")
        for U, V in combinations(opens, 2):
            if U | V not in opens or U & V not in opens:
                raise SheafError(f"opens are not closed under union and intersection: {set(U)}, {set(V)}")
        for B in self.basis:
            if B not in opens:
                raise SheafError(f"basis element {set(B)} is not open")
        for U in opens:
            inside = [B for B in self.basis if B <= U]
            if frozenset().union(*inside) != U:
                raise SheafError(f"open {set(U)} is not a union of basis elements")
        key = _open_key(self.points)
        object.__setattr__(self, "opens", tuple(sorted(opens, key=key)))
        object.__setattr__(self, "basis", tuple(sorted(set(self.basis), key=key)))

    @classmethod
    def from_basis(cls, points: Sequence[Hashable], basis: Iterable[Iterable[Hashable]]) -> "FiniteSpace":
        basis = [Open(B) for B in basis]
        opens = {Open()}
        for r in range(1, len(basis) + 1):
            for combo in combinations(basis, r):
                opens.add(Open().union(*combo))
        opens.add(Open(points))
        return cls(tuple(points), tuple(opens), tuple(basis))

    @classmethod
    def from_opens(cls, points, opens, basis=None) -> "FiniteSpace":
        opens = {Open(U) for U in opens} | {Open(), Open(points)}
        if basis is None:
            basis = opens - {Open()}
        return cls(tuple(points), tuple(opens), tuple(Open(B) for B in basis))

    @classmethod
    def generated(cls, points, opens, basis=None) -> "FiniteSpace":
        """Close ``opens`` under union and intersection; default basis is the minimal neighbourhoods."""
        family = {Open(U) for U in opens} | {Open(), Open(points)}
        grew = True
        while grew:
            grew = False
            for U, V in combinations(list(family), 2):
                for W in (U | V, U & V):
                    if W not in family:
                        family.add(W)
                        grew = True
        if basis is not None:
            return cls.from_opens(points, family, basis)
        return cls.minimal_basis(points, family)

    @classmethod
    def minimal_basis(cls, points, opens) -> "FiniteSpace":
        """The space with its basis of minimal neighbourhoods U_x."""
        space = cls.from_opens(points, opens)
        return cls(space.points, space.opens, tuple({space.minimal_open(x) for x in space.points}))

    def order(self, U: Iterable[Hashable]) -> tuple:
        U = set(U)
        return tuple(p for p in self.points if p in U)

    def minimal_open(self, x) -> Open:
        return Open.intersection(*[U for U in self.opens if x in U])

    def opens_in(self, U: Open) -> tuple[Open, ...]:
        return tuple(V for V in self.opens if V <= U)

    def basis_in(self, U: Open) -> tuple[Open, ...]:
        return tuple(B for B in self.basis if B <= U)

    def covers(self, U: Open, proper: bool = True) -> Iterable[tuple[Open, ...]]:
        """Every family of opens inside U whose union is U."""
        candidates = [V for V in self.opens_in(U) if V and (V != U or not proper)]
        for r in range(1, len(candidates) + 1):
            for combo in combinations(candidates, r):
                if Open().union(*combo) == U:
                    yield combo

    def preimage(self, f: Mapping[Hashable, Hashable], V: Open) -> Open:
        return Open(x for x in self.points if f[x] in V)

    def is_continuous(self, f: Mapping[Hashable, Hashable], target: "FiniteSpace") -> bool:
        return all(self.preimage(f, V) in set(self.opens) for V in target.opens)


def label(U: Open, space: FiniteSpace) -> str:
    return "{" + ",".join(map(str, space.order(U))) + "}"


# -- presheaves --------------------------------------------------------------------------


class Presheaf:
    """Section algebras per open plus restriction maps restrict(U, V, s) for V <= U."""

    def __init__(self, space: FiniteSpace, sections: Mapping[Open, Any], restrict: Callable, name: str = ""):
        self.space = space
        self.sections = dict(sections)
        self._restrict = restrict
        self.name = name

    @property
    def opens(self) -> tuple[Open, ...]:
        return tuple(U for U in self.space.opens if U in self.sections)

    def restrict(self, U: Open, V: Open, s):
        if not V <= U:
            raise SheafError(f"cannot restrict from {set(U)} to a non-subset {set(V)}")
        if U == V:
            return s
        return self._restrict(U, V, s)

    def restricted_to(self, opens: Iterable[Open]) -> "Presheaf":
        keep = set(opens)
        return Presheaf(self.space, {U: A for U, A in self.sections.items() if U in keep}, self._restrict, self.name)

    def on_basis(self) -> "Presheaf":
        return self.restricted_to(self.space.basis)

    def elements(self, U: Open) -> tuple:
        A = self.sections[U]
        els = getattr(A, "elements", None)
        if els is None:
            raise SheafError("section algebra is not enumerable")
        return tuple(els)


def function_presheaf(space: FiniteSpace, values: FiniteAlgebra, allowed: Mapping[Open, Any] | None = None, name: str = "") -> Presheaf:
    """Sections on U are functions U -> values (in point order); restriction is restriction of functions.

    ``allowed[U]`` may be ``"all"``, ``"constant"``, a predicate or an explicit list.
    """
    allowed = allowed or {}
    sections = {}
    for U in space.opens:
        rule = allowed.get(U, "all")
        n = len(U)
        if rule == "all":
            keep = None
        elif rule == "constant":
            keep = (lambda s: len(set(s)) <= 1)
        else:
            keep = rule
        sections[U] = function_algebra(values, n, keep)

    def restrict(U, V, s):
        order = space.order(U)
        return tuple(s[order.index(p)] for p in space.order(V))

    return Presheaf(space, sections, restrict, name)


def constant_presheaf(space: FiniteSpace, values: FiniteAlgebra) -> Presheaf:
    """F(U) = values for U nonempty, F(empty) = 0, identity restrictions."""
    zero_ring = FiniteAlgebra(((),), lambda a, b: (), lambda a, b: (), (), ())
    sections = {U: (values if U else zero_ring) for U in space.opens}

    def restrict(U, V, s):
        return s if V else ()

    return Presheaf(space, sections, restrict, "constant")


def presheaf_violations(P: Presheaf) -> list[str]:
    """Identity/composition laws and algebra-morphism property of the restrictions."""
    out = []
    opens = P.opens
    for U in opens:
        A = P.sections[U]
        if isinstance(A, FiniteAlgebra) and not A.is_closed():
            out.append(f"sections over {label(U, P.space)} are not closed under the operations")
    for U in opens:
        els = P.elements(U)
        for V in opens:
            if not V <= U:
                continue
            B = P.sections[V]
            if P.restrict(U, V, P.sections[U].one) != B.one:
                out.append(f"restriction {label(U, P.space)} -> {label(V, P.space)} is not unital")
            for s in els:
                r = P.restrict(U, V, s)
                if r not in B:
                    out.append(f"restriction of {s} to {label(V, P.space)} is not a section")
                    break
                for W in opens:
                    if W <= V and P.restrict(V, W, r) != P.restrict(U, W, s):
                        out.append(f"restrictions {label(U, P.space)} -> {label(V, P.space)} -> {label(W, P.space)} do not compose")
            for s, t in product(els, repeat=2):
                A = P.sections[U]
                if P.restrict(U, V, A.add(s, t)) != B.add(P.restrict(U, V, s), P.restrict(U, V, t)) or P.restrict(
                    U, V, A.mul(s, t)
                ) != B.mul(P.restrict(U, V, s), P.restrict(U, V, t)):
                    out.append(f"restriction {label(U, P.space)} -> {label(V, P.space)} is not an algebra morphism")
                    break
    return out


# -- stalks -------------------------------------------------------------------------------


@dataclass
class Stalk:
    """F_x = colim_{U containing x} F(U), realized on the smallest such U."""

    presheaf: Presheaf
    point: Hashable
    neighbourhood: Open = field(init=False)

    def __post_init__(self):
        self.neighbourhood = self.presheaf.space.minimal_open(self.point)

    @property
    def algebra(self):
        return self.presheaf.sections[self.neighbourhood]

    def germ(self, U: Open, s):
        """pi^x_U(s)."""
        if self.point not in U:
            raise SheafError(f"{self.point} is not in {set(U)}")
        return self.presheaf.restrict(U, self.neighbourhood, s)


def stalk(P: Presheaf, x) -> Stalk:
    return Stalk(P, x)


def germs_equal(P: Presheaf, x, U: Open, s, V: Open, t) -> bool:
    """[s]_x == [t]_x straight from the colimit: agreement on some open W containing x."""
    for W in P.space.opens_in(U & V):
        if x in W and P.restrict(U, W, s) == P.restrict(V, W, t):
            return True
    return False


# -- sheaf axioms -----------------------------------------------------------------------------


@dataclass
class SheafReport:
    separated: bool = True
    glues: bool = True
    failures: list[str] = field(default_factory=list)

    @property
    def is_sheaf(self) -> bool:
        return self.separated and self.glues


def compatible_families(P: Presheaf, cover: Sequence[Open]) -> Iterable[tuple]:
    """Families (s_V) over the cover agreeing on pairwise intersections, by backtracking."""
    cover = list(cover)
    choices = [P.elements(V) for V in cover]

    def extend(prefix):
        k = len(prefix)
        if k == len(cover):
            yield tuple(prefix)
            return
        V = cover[k]
        for s in choices[k]:
            ok = True
            for W, t in zip(cover, prefix):
                I = V & W
                if I in P.sections and P.restrict(V, I, s) != P.restrict(W, I, t):
                    ok = False
                    break
            if ok:
                yield from extend(prefix + [s])

    yield from extend([])


def check_sheaf(P: Presheaf) -> SheafReport:
    report = SheafReport()
    empty = Open()
    if empty in P.sections and len(P.elements(empty)) != 1:
        # the empty cover of the empty set
        report.separated = len(P.elements(empty)) <= 1
        report.glues = len(P.elements(empty)) >= 1
        report.failures.append("sections over the empty set are not a single point")
    for U in P.opens:
        els = P.elements(U)
        for cover in P.space.covers(U):
            restr = {s: tuple(P.restrict(U, V, s) for V in cover) for s in els}
            seen: dict = {}
            for s, fam in restr.items():
                if fam in seen and seen[fam] != s:
                    report.separated = False
                    report.failures.append(f"locality fails on {label(U, P.space)}")
                seen.setdefault(fam, s)
            for fam in compatible_families(P, cover):
                if fam not in seen:
                    report.glues = False
                    report.failures.append(
                        f"compatible family on cover {[label(V, P.space) for V in cover]} of {label(U, P.space)} does not glue"
                    )
                    break
    return report


# -- sheafification -----------------------------------------------------------------------------


@dataclass
class Sheafification:
    """P+ together with the canonical morphism i: P -> P+."""

    source: Presheaf
    sheaf: Presheaf

    def i(self, U: Open, s) -> tuple:
        """s -> ([s]_x)_{x in U}."""
        return tuple(stalk(self.source, x).germ(U, s) for x in self.source.space.order(U))

    def is_isomorphism(self) -> bool:
        for U in self.source.opens:
            image = {self.i(U, s) for s in self.source.elements(U)}
            if len(image) != len(self.source.elements(U)) or image != set(self.sheaf.elements(U)):
                return False
        return True

    def injective_on(self, U: Open) -> bool:
        els = self.source.elements(U)
        return len({self.i(U, s) for s in els}) == len(els)


def locally_implemented(P: Presheaf, U: Open, family: Sequence) -> bool:
    """Each g_x equals [s]_y for y near x, with one section s (found on U_x)."""
    space = P.space
    order = space.order(U)
    value = dict(zip(order, family))
    for x in order:
        Ux = space.minimal_open(x)
        for y in space.order(Ux):
            if P.restrict(Ux, space.minimal_open(y), value[x]) != value[y]:
                return False
    return True


def sheafify(P: Presheaf) -> Sheafification:
    space = P.space
    stalks = {x: stalk(P, x) for x in space.points}
    sections = {}
    for U in space.opens:
        order = space.order(U)
        factors = [stalks[x].algebra for x in order]
        elements = [fam for fam in product(*[tuple(A.elements) for A in factors]) if locally_implemented(P, U, fam)]
        sections[U] = family_algebra(factors, elements)

    def restrict(U, V, fam):
        order = space.order(U)
        return tuple(fam[order.index(p)] for p in space.order(V))

    return Sheafification(P, Presheaf(space, sections, restrict, f"{P.name}+"))


def stalk_map(sh: Sheafification, x) -> dict:
    """The induced map P_x -> (P+)_x on germs, as a table."""
    src = stalk(sh.source, x)
    tgt = stalk(sh.sheaf, x)
    Ux = src.neighbourhood
    return {s: tgt.germ(Ux, sh.i(Ux, s)) for s in sh.source.elements(Ux)}


def stalks_preserved(sh: Sheafification) -> bool:
    for x in sh.source.space.points:
        table = stalk_map(sh, x)
        target = set(stalk(sh.sheaf, x).algebra.elements)
        if len(set(table.values())) != len(table) or set(table.values()) != target:
            return False
    return True


def morphism_violations(P: Presheaf, Q: Presheaf, maps: Callable[[Open, Any], Any], opens: Iterable[Open] | None = None) -> list[str]:
    """Check that maps(U, .) : P(U) -> Q(U) are algebra morphisms commuting with restriction."""
    out = []
    opens = list(opens) if opens is not None else [U for U in P.opens if U in Q.sections]
    for U in opens:
        A, B = P.sections[U], Q.sections[U]
        els = P.elements(U)
        if maps(U, A.one) != B.one:
            out.append(f"map on {label(U, P.space)} is not unital")
        for s in els:
            if maps(U, s) not in B:
                out.append(f"map on {label(U, P.space)} leaves the target algebra")
                break
        for s, t in product(els, repeat=2):
            if maps(U, A.add(s, t)) != B.add(maps(U, s), maps(U, t)) or maps(U, A.mul(s, t)) != B.mul(maps(U, s), maps(U, t)):
                out.append(f"map on {label(U, P.space)} is not an algebra morphism")
                break
        for V in opens:
            if V <= U:
                for s in els:
                    if Q.restrict(U, V, maps(U, s)) != maps(V, P.restrict(U, V, s)):
                        out.append(f"map does not commute with restriction {label(U, P.space)} -> {label(V, P.space)}")
                        break
    return out


# -- basis presheaves and their extension ------------------------------------------------------


def extend_basis_presheaf(P: Presheaf) -> Presheaf:
    """F-bar(W) = compatible families (f_B) over basis elements B inside W."""
    space = P.space
    missing = [B for B in space.basis if B not in P.sections]
    if missing:
        raise SheafError("basis presheaf must be defined on every basis element")
    sections = {}
    for W in space.opens:
        inside = space.basis_in(W)
        factors = [P.sections[B] for B in inside]
        sections[W] = family_algebra(factors, _basis_families(P, inside))

    def restrict(W, W2, fam):
        inside = space.basis_in(W)
        return tuple(fam[inside.index(B)] for B in space.basis_in(W2))

    return Presheaf(space, sections, restrict, f"{P.name}-bar")


def _basis_families(P: Presheaf, inside: Sequence[Open]) -> list[tuple]:
    space = P.space
    inside = list(inside)

    def compatible(Ba, fa, Bb, fb) -> bool:
        for Bc in space.basis_in(Ba & Bb):
            if P.restrict(Ba, Bc, fa) != P.restrict(Bb, Bc, fb):
                return False
        return True

    out = []

    def extend(prefix):
        k = len(prefix)
        if k == len(inside):
            out.append(tuple(prefix))
            return
        B = inside[k]
        for f in P.elements(B):
            if all(compatible(B, f, Bo, fo) for Bo, fo in zip(inside, prefix)):
                extend(prefix + [f])

    extend([])
    return out


def is_family_compatible(P: Presheaf, W: Open, family: Sequence) -> bool:
    """Membership test for F-bar(W) that does not enumerate (works for infinite algebras)."""
    inside = P.space.basis_in(W)
    for (Ba, fa), (Bb, fb) in combinations(zip(inside, family), 2):
        for Bc in P.space.basis_in(Ba & Bb):
            if P.restrict(Ba, Bc, fa) != P.restrict(Bb, Bc, fb):
                return False
    return True


def flat_map(P: Presheaf, W: Open, f) -> tuple:
    """flat_W: F(W) -> F-bar(W), f -> (f|_B)_{B inside W}, for W a basis element."""
    if W not in P.space.basis:
        raise SheafError(f"{set(W)} is not a basis element")
    return tuple(P.restrict(W, B, f) for B in P.space.basis_in(W))


def flat_is_bijective(P: Presheaf, Pbar: Presheaf, W: Open) -> bool:
    images = [flat_map(P, W, f) for f in P.elements(W)]
    return len(set(images)) == len(images) and set(images) == set(Pbar.elements(W))


def glue_into(O: Presheaf, W: Open, family: Sequence) -> Any:
    """b_W: the unique section of the sheaf O on W restricting to the given basis family."""
    inside = O.space.basis_in(W)
    hits = [s for s in O.elements(W) if all(O.restrict(W, B, s) == f for B, f in zip(inside, family))]
    if len(hits) != 1:
        raise SheafError(f"family on {label(W, O.space)} glues to {len(hits)} sections")
    return hits[0]


@dataclass
class BasisComparison:
    """iota_W = b_W o phi_W^-1 : F-bar+(W) -> O(W) for a sheaf O and F = O on the basis."""

    target: Presheaf
    extension: Presheaf
    sheafification: Sheafification

    def iota(self, W: Open, g) -> Any:
        inverse = {self.sheafification.i(W, f): f for f in self.extension.elements(W)}
        return glue_into(self.target, W, inverse[g])

    def bijective_on(self, W: Open) -> bool:
        els = self.sheafification.sheaf.elements(W)
        images = [self.iota(W, g) for g in els]
        return len(set(images)) == len(images) and set(images) == set(self.target.elements(W))


def basis_comparison(O: Presheaf) -> BasisComparison:
    Fbar = extend_basis_presheaf(O.on_basis())
    return BasisComparison(O, Fbar, sheafify(Fbar))


# -- gluing ----------------------------------------------------------------------------------


@dataclass
class GlueResult:
    ok: bool
    violation: tuple | None = None
    message: str = ""
    sheaf: Presheaf | None = None

    def __bool__(self) -> bool:
        return self.ok


def glue_check(
    space: FiniteSpace,
    cover: Sequence[Open],
    local: Sequence[Presheaf],
    transitions: Mapping[tuple[int, int], Callable[[Open, Any], Any]],
) -> GlueResult:
    """Check phi_kj phi_ji = phi_ki on triple overlaps; glue when it holds.

    ``transitions[(j, i)](V, s)`` maps F_i(V) -> F_j(V) for V inside U_i & U_j.
    Missing diagonal entries are taken to be identities.
    """
    cover = [Open(U) for U in cover]
    idx = range(len(cover))

    def phi(j, i):
        if (j, i) in transitions:
            return transitions[(j, i)]
        if i == j:
            return lambda V, s: s
        raise SheafError(f"no transition given for ({j}, {i})")

    for i in idx:
        for V in space.opens_in(cover[i]):
            for s in local[i].elements(V):
                if phi(i, i)(V, s) != s:
                    return GlueResult(False, (i, i, i), f"transition ({i},{i}) is not the identity on {label(V, space)}")
    for i, j, k in product(idx, repeat=3):
        triple = cover[i] & cover[j] & cover[k]
        for V in space.opens_in(triple):
            for s in local[i].elements(V):
                if phi(k, j)(V, phi(j, i)(V, s)) != phi(k, i)(V, s):
                    return GlueResult(
                        False,
                        (i, j, k),
                        f"cocycle condition fails for (i,j,k)=({i},{j},{k}) on {label(V, space)}",
                    )
    return GlueResult(True, sheaf=_glue(space, cover, local, phi))


def _glue(space, cover, local, phi) -> Presheaf:
    sections = {}
    members_of = {}
    for U in space.opens:
        members = [i for i, Ui in enumerate(cover) if U & Ui]
        members_of[U] = members
        pieces = [U & cover[i] for i in members]
        factors = [local[i].sections[W] for i, W in zip(members, pieces)]
        elements = []
        for fam in product(*[local[i].elements(W) for i, W in zip(members, pieces)]):
            ok = True
            for (a, i), (b, j) in product(enumerate(members), repeat=2):
                Wij = pieces[a] & pieces[b]
                if not Wij:
                    continue
                lhs = phi(j, i)(Wij, local[i].restrict(pieces[a], Wij, fam[a]))
                rhs = local[j].restrict(pieces[b], Wij, fam[b])
                if lhs != rhs:
                    ok = False
                    break
            if ok:
                elements.append(fam)
        sections[U] = family_algebra(factors, elements)

    def restrict(U, V, fam):
        out = []
        for i in members_of[V]:
            a = members_of[U].index(i)
            out.append(local[i].restrict(U & cover[i], V & cover[i], fam[a]))
        return tuple(out)

    return Presheaf(space, sections, restrict, "glued")


def morphism_cocycle(transitions: Mapping[tuple[int, int], Any]):
    """For chart transitions given as domain morphisms, the first (i, j, k) with
    (phi_ji then phi_kj) != phi_ki, comparing pullbacks on generators; None if all hold."""
    from .domains import compose

    labels = sorted({a for pair in transitions for a in pair})
    for i, j, k in product(labels, repeat=3):
        if (j, i) in transitions and (k, j) in transitions and (k, i) in transitions:
            if compose(transitions[(k, j)], transitions[(j, i)]) != transitions[(k, i)]:
                return (i, j, k)
    return None


# -- direct images ----------------------------------------------------------------------------


def pushforward(f: Mapping[Hashable, Hashable], P: Presheaf, target: FiniteSpace) -> Presheaf:
    """(f_* P)(V) = P(f^-1 V)."""
    src = P.space
    if not src.is_continuous(f, target):
        raise NotContinuous("map is not continuous: some preimage of an open is not open")
    sections = {V: P.sections[src.preimage(f, V)] for V in target.opens}

    def restrict(V, V2, s):
        return P.restrict(src.preimage(f, V), src.preimage(f, V2), s)

    return Presheaf(target, sections, restrict, f"f_*{P.name}")


@dataclass
class DirectImageComparison:
    """iota_V: (f_* P)+(V) -> (f_* P+)(V) built from the stalk maps u_x."""

    f: Mapping[Hashable, Hashable]
    presheaf: Presheaf
    target: FiniteSpace
    pushed_plus: Sheafification
    plus_pushed: Presheaf

    def u(self, x, germ):
        """u_x: (f_*P)_{f(x)} -> P_x."""
        src = self.presheaf.space
        Vy = self.target.minimal_open(self.f[x])
        return self.presheaf.restrict(src.preimage(self.f, Vy), src.minimal_open(x), germ)

    def iota(self, V: Open, family: tuple) -> tuple:
        value = dict(zip(self.target.order(V), family))
        src = self.presheaf.space
        return tuple(self.u(x, value[self.f[x]]) for x in src.order(src.preimage(self.f, V)))

    def violations(self) -> list[str]:
        return morphism_violations(self.pushed_plus.sheaf, self.plus_pushed, self.iota)


def direct_image_compare(f: Mapping[Hashable, Hashable], P: Presheaf, target: FiniteSpace) -> DirectImageComparison:
    pushed = pushforward(f, P, target)
    plus = sheafify(P)
    return DirectImageComparison(f, P, target, sheafify(pushed), pushforward(f, plus.sheaf, target))


def powerset(points: Sequence[Hashable]) -> list[Open]:
    return [Open(c) for c in chain.from_iterable(combinations(points, r) for r in range(len(points) + 1))]
