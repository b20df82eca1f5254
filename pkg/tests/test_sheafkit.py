from fractions import Fraction
from itertools import product

import pytest

from spaces import ZOO, chain3, sierpinski, two_open_points
from z2ngeom.domains import Domain, Morphism, compose, identity
from z2ngeom.sheafkit import (
    FiniteSpace,
    NotContinuous,
    SheafError,
    basis_comparison,
    check_sheaf,
    compatible_families,
    constant_presheaf,
    direct_image_compare,
    extend_basis_presheaf,
    flat_is_bijective,
    function_presheaf,
    germs_equal,
    glue_check,
    label,
    morphism_cocycle,
    presheaf_violations,
    sheafify,
    stalk,
    stalks_preserved,
    zmod,
)

Z2 = zmod(2)


def presheaves(space):
    """Function presheaf (a sheaf), constant presheaf, and constants on the whole space only."""
    top = frozenset(space.points)
    return {
        "functions": function_presheaf(space, Z2),
        "constant": constant_presheaf(space, Z2),
        "top_constant": function_presheaf(space, Z2, {top: "constant"}),
    }


def all_cases():
    for sname, make in ZOO.items():
        space = make()
        for pname, P in presheaves(space).items():
            yield f"{sname}-{pname}", P


CASES = dict(all_cases())


def sheafify_by_definition(P, U):
    """Germ families on U locally given by a single section on some open W containing the point."""
    space = P.space
    order = space.order(U)
    stalks = {x: stalk(P, x) for x in order}
    out = set()
    for fam in product(*[P.elements(stalks[x].neighbourhood) for x in order]):
        germ = dict(zip(order, fam))
        ok = True
        for x in order:
            found = False
            for W in space.opens_in(U):
                if x not in W:
                    continue
                for s in P.elements(W):
                    if all(germs_equal(P, y, stalks[y].neighbourhood, germ[y], W, s) for y in space.order(W)):
                        found = True
                        break
                if found:
                    break
            if not found:
                ok = False
                break
        if ok:
            out.add(fam)
    return out


def basis_families_by_definition(P, W):
    inside = P.space.basis_in(W)
    out = set()
    for fam in product(*[P.elements(B) for B in inside]):
        if all(
            P.restrict(Ba, Bc, fa) == P.restrict(Bb, Bc, fb)
            for (Ba, fa), (Bb, fb) in product(zip(inside, fam), repeat=2)
            for Bc in P.space.basis_in(Ba & Bb)
        ):
            out.add(fam)
    return out


def test_zoo_has_at_least_five_spaces():
    assert len(ZOO) >= 5


@pytest.mark.parametrize("name", sorted(CASES))
def test_presheaf_laws(name):
    assert presheaf_violations(CASES[name]) == []


@pytest.mark.parametrize("name", sorted(CASES))
def test_germs_match_colimit(name):
    P = CASES[name]
    space = P.space
    for x in space.points:
        st = stalk(P, x)
        nbhd = [U for U in space.opens if x in U]
        for U, V in product(nbhd, repeat=2):
            for s in P.elements(U):
                for t in P.elements(V):
                    assert (st.germ(U, s) == st.germ(V, t)) == germs_equal(P, x, U, s, V, t)


@pytest.mark.parametrize("name", sorted(CASES))
def test_sheafification(name):
    P = CASES[name]
    sh = sheafify(P)
    for U in P.space.opens:
        assert set(sh.sheaf.elements(U)) == sheafify_by_definition(P, U), label(U, P.space)
    assert presheaf_violations(sh.sheaf) == []
    assert check_sheaf(sh.sheaf).is_sheaf
    assert stalks_preserved(sh)
    report = check_sheaf(P)
    assert sh.is_isomorphism() == report.is_sheaf
    if report.separated:
        assert all(sh.injective_on(U) for U in P.space.opens)


def test_function_presheaf_is_sheaf_and_constant_is_not():
    space = two_open_points()
    assert check_sheaf(function_presheaf(space, Z2)).is_sheaf
    report = check_sheaf(constant_presheaf(space, Z2))
    assert report.separated and not report.glues


def test_sheafification_gains_glued_section():
    space = two_open_points()
    P = constant_presheaf(space, Z2)
    sh = sheafify(P)
    ab = frozenset("ab")
    assert len(P.elements(ab)) == 2 and len(sh.sheaf.elements(ab)) == 4
    assert not sh.is_isomorphism()


def test_stalk_examples():
    space = chain3()
    C = constant_presheaf(space, Z2)
    for x in space.points:
        assert set(stalk(C, x).algebra.elements) == set(Z2.elements)
    P = function_presheaf(space, Z2)
    assert stalk(P, "b").neighbourhood == frozenset("ab")


@pytest.mark.parametrize("name", sorted(CASES))
def test_flat_map_and_extension(name):
    P = CASES[name]
    B = P.on_basis()
    Pbar = extend_basis_presheaf(B)
    for W in P.space.opens:
        assert set(Pbar.elements(W)) == basis_families_by_definition(B, W)
    assert len(Pbar.elements(frozenset())) == 1
    for W in P.space.basis:
        assert flat_is_bijective(B, Pbar, W)
    assert check_sheaf(Pbar).is_sheaf


@pytest.mark.parametrize("sname", sorted(ZOO))
def test_basis_comparison_for_sheaves(sname):
    O = function_presheaf(ZOO[sname](), Z2)
    cmp = basis_comparison(O)
    for W in O.space.opens:
        assert cmp.bijective_on(W)


def test_extension_need_not_recover_a_non_sheaf():
    # F-bar only sees the basis; a presheaf that fails gluing is not recovered off the basis
    space = two_open_points()
    C = constant_presheaf(space, Z2)
    Cbar = extend_basis_presheaf(C.on_basis())
    ab = frozenset("ab")
    assert ab not in space.basis
    assert len(Cbar.elements(ab)) == 4 and len(C.elements(ab)) == 2
    with pytest.raises(SheafError):
        basis_comparison(C).bijective_on(ab)


def test_compatible_families_two_rectangles():
    space = ZOO["sierpinski_square"]()
    P = function_presheaf(space, Z2)
    U1 = frozenset(["00", "01"])
    U2 = frozenset(["00", "10"])
    fams = list(compatible_families(P, [U1, U2]))
    assert len(fams) == 8


# -- gluing -----------------------------------------------------------------------------------


def _swap(perm):
    return lambda V, s: tuple(perm[v] for v in s)


def test_glue_identity_transitions_recovers_original():
    space = chain3()
    P = function_presheaf(space, Z2)
    cover = [frozenset("ab"), frozenset("abc")]
    local = [P.restricted_to(space.opens_in(U)) for U in cover]
    res = glue_check(space, cover, local, {(0, 1): lambda V, s: s, (1, 0): lambda V, s: s})
    assert res.ok
    for U in space.opens:
        assert len(res.sheaf.elements(U)) == len(P.elements(U))
    assert check_sheaf(res.sheaf).is_sheaf


def test_glue_detects_broken_cocycle():
    V4 = zmod(2, 3)
    space = FiniteSpace.generated(["a", "b"], [["a"]])
    P = function_presheaf(space, V4)
    cover = [frozenset("a"), frozenset("ab"), frozenset("ab")]
    local = [P.restricted_to(space.opens_in(U)) for U in cover]

    def perm(p):
        return {v: tuple(v[p[i]] for i in range(3)) for v in V4.elements}

    s01, s12 = perm((1, 0, 2)), perm((0, 2, 1))
    inv = lambda d: {b: a for a, b in d.items()}  # noqa: E731
    composite = {v: s12[s01[v]] for v in V4.elements}
    good = {(1, 0): s01, (0, 1): inv(s01), (2, 1): s12, (1, 2): inv(s12), (2, 0): composite, (0, 2): inv(composite)}
    res = glue_check(space, cover, local, {k: _swap(v) for k, v in good.items()})
    assert res.ok and check_sheaf(res.sheaf).is_sheaf
    bad = dict(good)
    bad[(2, 0)], bad[(0, 2)] = s01, inv(s01)
    res = glue_check(space, cover, local, {k: _swap(v) for k, v in bad.items()})
    assert not res.ok
    assert res.violation is not None and len(set(res.violation)) > 1
    assert "cocycle" in res.message


def _linear(D, a, b, c):
    """x -> a x + b, xi -> c xi, with its inverse."""
    x, xi = D.symbol("x"), D.symbol("xi")
    fwd = Morphism(D, D, {"x": x.scale(a) + D.system.const(b), "xi": xi.scale(c)})
    back = Morphism(D, D, {"x": (x - D.system.const(b)).scale(Fraction(1, a)), "xi": xi.scale(Fraction(1, c))})
    return fwd, back


def test_morphism_cocycle_from_charts():
    D = Domain.make("D", ["x"], [("xi", "1")])
    charts = [_linear(D, 2, 1, 3), _linear(D, 1, -1, -1), _linear(D, 5, 0, 2)]
    for g, ginv in charts:
        assert compose(g, ginv) == identity(D) == compose(ginv, g)
    # transition U_j -> U_i is g_i o g_j^-1, i.e. compose(g_j^-1, g_i)
    trans = {(j, i): compose(charts[j][1], charts[i][0]) for i in range(3) for j in range(3)}
    assert morphism_cocycle(trans) is None
    broken = dict(trans)
    t = trans[(2, 0)]
    broken[(2, 0)] = Morphism(D, D, {"x": t.images["x"], "xi": -t.images["xi"]})
    assert morphism_cocycle(broken) is not None


# -- direct images --------------------------------------------------------------------------------


def test_direct_image_identity():
    space = chain3()
    P = function_presheaf(space, Z2)
    f = {p: p for p in space.points}
    cmp = direct_image_compare(f, P, space)
    assert cmp.violations() == []
    for V in space.opens:
        for fam in cmp.pushed_plus.sheaf.elements(V):
            assert cmp.iota(V, fam) == fam


def test_direct_image_collapse_constant():
    space = two_open_points()
    target = sierpinski()
    f = {"a": "a", "b": "a", "c": "b"}
    P = constant_presheaf(space, Z2)
    cmp = direct_image_compare(f, P, target)
    assert cmp.violations() == []


def test_direct_image_chain_restrictions():
    space = chain3()
    target = FiniteSpace.generated(["x", "y"], [["x"]])
    f = {"a": "x", "b": "x", "c": "y"}
    for P in presheaves(space).values():
        assert direct_image_compare(f, P, target).violations() == []


def test_direct_image_needs_continuity():
    space = chain3()
    target = sierpinski()
    with pytest.raises(NotContinuous):
        direct_image_compare({"a": "b", "b": "a", "c": "a"}, function_presheaf(space, Z2), target)
