"""Command line entry point: ``z2ngeom VERB [args] [--rank n] [--truncation T] [--domain FILE] ...``.

Exit codes: 0 success, 1 domain error, 2 parse or configuration error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import sheafkit as sk
from .base import BaseError
from .degrees import RankMismatch
from .domains import CharacterError, DegreeViolation, DomainMismatch, Morphism, compose, pullback
from .localization import GradedFraction, NotAdmissible, fraction_equiv, lambda_map
from .products import NotSeparable, factors_through, product_domain, projection, universal_morphism
from .sections import NotInvertible, SystemMismatch
from .syntax import (
    Declarations,
    ParseError,
    domain_text,
    format_section,
    infer_domain,
    morphism_text,
    parse_declarations,
    parse_expression,
    parse_fraction,
    parse_sheaf_file,
    split_fraction,
    value_permutation,
)

DOMAIN_ERRORS = (
    NotInvertible,
    DegreeViolation,
    DomainMismatch,
    CharacterError,
    NotAdmissible,
    NotSeparable,
    SystemMismatch,
    RankMismatch,
    BaseError,
    sk.NotContinuous,
)


class DomainFailure(Exception):
    """A check ran to completion and found a violation (exit code 1)."""


class ConfigError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def _declarations(args) -> Declarations:
    decls = Declarations()
    for path in list(args.domain or []) + ([args.morphism] if args.morphism else []):
        decls = parse_declarations(_read(path), decls, rank=args.rank, truncation=args.truncation)
    return decls


def _context(args, sources):
    decls = _declarations(args)
    if args.on:
        if args.on not in decls.domains:
            raise ConfigError(f"no domain named {args.on!r} is declared")
        return decls.domains[args.on]
    if decls.domains:
        return next(iter(decls.domains.values()))
    return infer_domain(sources, rank=args.rank or 1, truncation=args.truncation)


def _expressions(args, sources):
    ctx = _context(args, sources)
    notes: list[str] = []
    values = [parse_expression(src, ctx, notes) for src in sources]
    return ctx, values, notes


def _emit(out, lines):
    for line in lines:
        print(line, file=out)


def _morphism(decls: Declarations, name: str | None, position: int = 0) -> Morphism:
    if name is not None:
        if name not in decls.morphisms:
            raise ConfigError(f"no morphism named {name!r} is declared")
        return decls.morphisms[name]
    if len(decls.morphisms) <= position:
        raise ConfigError("not enough morphisms declared; pass --morphism FILE")
    return list(decls.morphisms.values())[position]


def cmd_normalize(args, out):
    _, (F,), notes = _expressions(args, [args.expr])
    _emit(out, notes + [format_section(F, args.format)])


def cmd_mul(args, out):
    _, values, notes = _expressions(args, args.exprs)
    total = values[0]
    for F in values[1:]:
        total = total * F
    _emit(out, notes + [format_section(total, args.format)])


def cmd_add(args, out):
    _, values, notes = _expressions(args, args.exprs)
    total = values[0]
    for F in values[1:]:
        total = total + F
    _emit(out, notes + [format_section(total, args.format)])


def cmd_invert(args, out):
    _, (F,), notes = _expressions(args, [args.expr])
    if not F.epsilon().is_invertible():
        raise NotInvertible(f"{F} is not invertible: its base part {F.epsilon()} is zero")
    _emit(out, notes + [format_section(F.invert(), args.format)])


def cmd_epsilon(args, out):
    _, (F,), notes = _expressions(args, [args.expr])
    _emit(out, notes + [str(F.epsilon())])


def cmd_pullback(args, out):
    decls = _declarations(args)
    phi = _morphism(decls, args.map)
    notes: list[str] = []
    F = parse_expression(args.expr, phi.target, notes)
    _emit(out, notes + [format_section(pullback(phi, F), args.format)])


def cmd_compose(args, out):
    decls = _declarations(args)
    psi = _morphism(decls, args.first)
    phi = _morphism(decls, args.second)
    comp = compose(psi, phi)
    _emit(out, [morphism_text(comp, f"{phi.name}_o_{psi.name}", args.format)])


def cmd_product(args, out):
    decls = _declarations(args)
    names = [args.left, args.right]
    for n in names:
        if n not in decls.domains:
            raise ConfigError(f"no domain named {n!r} is declared")
    M, N = (decls.domains[n] for n in names)
    P = product_domain(M, N, args.name)
    prov = {}
    for i, D in ((1, M), (2, N)):
        for g, new in P.rename(i).items():
            prov[new] = f"{D.name}.{g}"
    _emit(out, [domain_text(P.combined, prov)])


def cmd_universal(args, out):
    decls = _declarations(args)
    phi1 = _morphism(decls, args.first, 0)
    phi2 = _morphism(decls, args.second, 1)
    P = product_domain(phi1.target, phi2.target)
    psi = universal_morphism(phi1, phi2, P)
    lines = [morphism_text(psi, "Psi", args.format)]
    ok = True
    for i, phi in ((1, phi1), (2, phi2)):
        good = compose(psi, projection(P, i)) == phi
        ok = ok and good
        lines.append(f"Pi_{i} ∘ Psi = Phi_{i}: {'OK' if good else 'FAILED'}  ({phi.name or 'phi'} : {phi.source.name} -> {phi.target.name})")
    rebuilt = universal_morphism(compose(psi, projection(P, 1)), compose(psi, projection(P, 2)), P)
    unique = rebuilt == psi and factors_through(rebuilt, phi1, phi2, P)
    ok = ok and unique
    lines.append(f"Psi is determined by its components: {'OK' if unique else 'FAILED'}")
    _emit(out, lines)
    if not ok:
        raise DomainFailure("the factorization through the product does not commute")


def cmd_localize(args, out):
    sources = [s for f in args.fractions for s in split_fraction(f)]
    if args.witness:
        sources.append(args.witness)
    ctx = _context(args, sources)
    notes: list[str] = []
    fracs: list[GradedFraction] = [parse_fraction(f, ctx, notes) for f in args.fractions]
    lines = list(notes)
    fmt = args.format
    for k, a in enumerate(fracs, 1):
        lines.append(f"fraction {k}: [{format_section(a.numerator, fmt)}] / [{format_section(a.denominator, fmt)}]")
        lines.append(f"lambda {k}: {format_section(lambda_map(a), fmt)}")
    if len(fracs) == 2:
        a, b = fracs
        s, p = a + b, a * b
        lines.append(f"sum: [{format_section(s.numerator, fmt)}] / [{format_section(s.denominator, fmt)}]")
        lines.append(f"product: [{format_section(p.numerator, fmt)}] / [{format_section(p.denominator, fmt)}]")
        sigma = parse_expression(args.witness, ctx, notes) if args.witness else None
        lines.append(f"equivalent: {'yes' if fraction_equiv(a, b, sigma) else 'no'}")
    elif len(fracs) > 2:
        raise ConfigError("localize takes one or two fractions")
    _emit(out, lines)


def cmd_sheaf_check(args, out):
    desc = parse_sheaf_file(_read(args.file))
    space, P = desc.space, desc.presheaf
    L = lambda U: sk.label(U, space)  # noqa: E731
    lines = [f"space: {len(space.points)} points, {len(space.opens)} opens, basis {' '.join(L(B) for B in space.basis)}"]
    failed = []
    bad = sk.presheaf_violations(P)
    lines.append(f"presheaf laws: {'OK' if not bad else 'FAILED'}")
    lines.extend(f"  {b}" for b in bad)
    if bad:
        failed.append("presheaf laws")
        _emit(out, lines)
        raise DomainFailure("the declared data is not a presheaf of algebras")
    rep = sk.check_sheaf(P)
    lines.append(f"separated: {'yes' if rep.separated else 'no'}")
    lines.append(f"gluing: {'yes' if rep.glues else 'no'}")
    lines.extend(f"  {f}" for f in rep.failures[:5])
    sh = sk.sheafify(P)
    plus = sh.sheaf
    lines.append("sections: " + " ".join(f"{L(U)}:{len(P.elements(U))}->{len(plus.elements(U))}" for U in space.opens))
    plus_rep = sk.check_sheaf(plus)
    lines.append(f"sheafification is a sheaf: {'OK' if plus_rep.is_sheaf else 'FAILED'}")
    lines.append(f"stalks preserved: {'OK' if sk.stalks_preserved(sh) else 'FAILED'}")
    lines.append(f"i is an isomorphism: {'yes' if sh.is_isomorphism() else 'no'}")
    if not plus_rep.is_sheaf or not sk.stalks_preserved(sh):
        failed.append("sheafification")
    Pbar = sk.extend_basis_presheaf(P.on_basis())
    flat = [B for B in space.basis if not sk.flat_is_bijective(P.on_basis(), Pbar, B)]
    lines.append(f"flat map bijective on basis opens: {'OK' if not flat else 'FAILED on ' + ' '.join(map(L, flat))}")
    if desc.charts:
        local = [P.restricted_to(space.opens_in(U)) for U in desc.charts]
        trans = {pair: value_permutation(perm) for pair, perm in desc.transitions.items()}
        try:
            res = sk.glue_check(space, desc.charts, local, trans)
        except sk.SheafError as exc:
            raise ConfigError(str(exc)) from None
        if res.ok:
            lines.append("cocycle: OK")
            glued_rep = sk.check_sheaf(res.sheaf)
            lines.append(f"glued presheaf is a sheaf: {'yes' if glued_rep.is_sheaf else 'no'}")
        else:
            lines.append(f"cocycle: FAILED at (i,j,k)={res.violation}: {res.message}")
            failed.append("cocycle")
    if desc.target is not None:
        cmp = sk.direct_image_compare(desc.map, P, desc.target)
        viol = cmp.violations()
        lines.append(f"direct image comparison is a morphism of algebras: {'OK' if not viol else 'FAILED'}")
        lines.extend(f"  {v}" for v in viol[:5])
        if viol:
            failed.append("direct image")
    _emit(out, lines)
    if failed:
        raise DomainFailure(f"failed: {', '.join(failed)}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank", type=int, default=None, help="grading rank n for inferred domains")
    common.add_argument("--truncation", type=int, default=None, help="override the truncation order T")
    common.add_argument("--domain", action="append", help="domain declaration file (repeatable)")
    common.add_argument("--morphism", help="morphism declaration file")
    common.add_argument("--on", help="name of the declared domain expressions live on")
    common.add_argument("--format", choices=("text", "sexpr"), default="text")

    parser = argparse.ArgumentParser(prog="z2ngeom", description="Exact Z_2^n-graded section algebra", parents=[common])
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name, func, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        return p

    verb("normalize", cmd_normalize, "print the canonical form").add_argument("expr")
    verb("mul", cmd_mul, "multiply sections").add_argument("exprs", nargs="+")
    verb("add", cmd_add, "add sections").add_argument("exprs", nargs="+")
    verb("invert", cmd_invert, "inverse in the truncated algebra").add_argument("expr")
    verb("epsilon", cmd_epsilon, "base projection").add_argument("expr")
    p = verb("pullback", cmd_pullback, "pull a target expression back along a morphism")
    p.add_argument("expr")
    p.add_argument("--map", help="morphism name (default: the first declared)")
    p = verb("compose", cmd_compose, "composite of psi: M->N and phi: N->P")
    p.add_argument("first")
    p.add_argument("second")
    p = verb("product", cmd_product, "product of two declared domains")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--name", default=None)
    p = verb("universal", cmd_universal, "factor two morphisms through the product")
    p.add_argument("first", nargs="?")
    p.add_argument("second", nargs="?")
    p = verb("localize", cmd_localize, "graded fractions [num] / [den]")
    p.add_argument("fractions", nargs="+")
    p.add_argument("--witness", help="sigma for the equivalence test (default 1)")
    verb("sheaf-check", cmd_sheaf_check, "sheaf axioms, sheafification and gluing on a finite space").add_argument("file")
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except (DomainFailure, *DOMAIN_ERRORS) as exc:
        print(f"error: {exc}", file=err)
        return 1
    except (ParseError, ConfigError, sk.SheafError) as exc:
        print(f"error: {exc}", file=err)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
