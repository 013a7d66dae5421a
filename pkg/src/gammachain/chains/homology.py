"""Homology modules, Fitting ideals and structural checks over Laurent rings."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Sequence

import sympy

from ..grouprings.groups import AbelianGroup
from ..grouprings.ring import GroupRingElem, augmentation, format_elem
from ..laurent import AugmentedSystem, LaurentSubmodule
from ..verdicts import CapExceeded, Undecided
from .complex import BasedFreeChainComplex, ChainMap
from .matrix import Mat, determinant

MAX_FREE_RANK = 3
DEFAULT_MAX_MINORS = 20_000


class UnsupportedRing(ValueError):
    pass


def require_laurent(group, max_rank: int = MAX_FREE_RANK) -> AbelianGroup:
    if not isinstance(group, AbelianGroup):
        raise UnsupportedRing("this computation needs an abelian coefficient group")
    if group.free_rank > max_rank:
        raise UnsupportedRing(f"free rank {group.free_rank} is above the supported {max_rank}")
    return group


# -- Laurent polynomials via sympy -------------------------------------------------------


def _symbols(group: AbelianGroup):
    r = group.free_rank
    return tuple(sympy.symbols(f"z0:{r}")) if r else ()


def to_sympy(a: GroupRingElem):
    """Shift ``a`` to a polynomial; returns (expr, shift) with a = expr * t^shift."""
    G = a.group
    if G.torsion:
        raise UnsupportedRing("polynomial factorization needs a free abelian group")
    xs = _symbols(G)
    if not a.terms:
        return sympy.Integer(0), (0,) * G.free_rank
    mins = tuple(min(g[i] for g, _ in a.terms) for i in range(G.free_rank))
    expr = sympy.Integer(0)
    for g, c in a.terms:
        mon = sympy.Integer(c)
        for x, e, m in zip(xs, g, mins):
            mon *= x ** (e - m)
        expr += mon
    return sympy.expand(expr), mins


def from_sympy(expr, group: AbelianGroup) -> GroupRingElem:
    xs = _symbols(group)
    expr = sympy.expand(expr)
    if not xs:
        return GroupRingElem.integer(group, int(expr))
    P = sympy.Poly(expr, *xs)
    return GroupRingElem(group, {tuple(int(e) for e in mon): int(c) for mon, c in P.terms()})


def normalize_generator(a: GroupRingElem) -> GroupRingElem:
    """Representative of a up to ±monomials: minimal exponents 0, first term positive.

    "First" is the term with the lexicographically smallest exponent vector.
    Only the free part of the exponents is shifted.
    """
    if not a.terms:
        return a
    G = a.group
    r = G.free_rank
    mins = [min(g[i] for g, _ in a.terms) for i in range(r)]
    shift = tuple(-m for m in mins) + (0,) * (G.ngens - r)
    b = a.left_translate(G.normalize(shift))
    if b.terms[0][1] < 0:
        b = -b
    return b


def laurent_gcd(elems: Sequence[GroupRingElem]) -> GroupRingElem:
    """Normalized gcd in the Laurent ring of a free abelian group (0 for no nonzero input)."""
    elems = [a for a in elems if a.terms]
    if not elems:
        raise ValueError("gcd of nothing")
    G = elems[0].group
    g = sympy.Integer(0)
    for a in elems:
        e, _ = to_sympy(a)
        g = sympy.gcd(g, e)
        if g == 1 or g == -1:
            break
    return normalize_generator(from_sympy(g, G))


# -- kernels and presentations -----------------------------------------------------------


def unit_vector(group, m: int, i: int) -> list[GroupRingElem]:
    z, o = GroupRingElem.zero(group), GroupRingElem.one(group)
    return [o if j == i else z for j in range(m)]


def prune_redundant(group, m: int, vecs: list, token=None) -> list:
    """Drop generators lying in the span of the remaining ones (greedy, from the end)."""
    keep = [v for v in vecs if any(v)]
    # deduplicate first
    seen, uniq = set(), []
    for v in keep:
        key = tuple(a.terms for a in v)
        if key not in seen:
            seen.add(key)
            uniq.append(v)
    keep = uniq
    i = len(keep) - 1
    while i >= 0 and len(keep) > 1:
        rest = keep[:i] + keep[i + 1:]
        if LaurentSubmodule(group, m, rest, token=token).contains(keep[i]):
            keep = rest
        i -= 1
    return keep


def kernel_generators(M: Mat, token=None) -> list[list[GroupRingElem]]:
    """Generators of {x : x M = 0} (row vectors of length M.nrows)."""
    G = M.group
    n = M.nrows
    if n == 0:
        return []
    if M.ncols == 0 or M.is_zero():
        return [unit_vector(G, n, i) for i in range(n)]
    require_laurent(G)
    syz = AugmentedSystem(G, M.ncols, [list(r) for r in M.rows], token=token).syzygies()
    return prune_redundant(G, n, syz, token)


@dataclass
class FittingIdeal:
    index: int
    generators: list  # normalized, pruned
    gcd: GroupRingElem | None = None
    principal: bool | None = None
    undecided: Undecided | None = None

    @property
    def is_zero(self) -> bool:
        return self.undecided is None and not self.generators

    @property
    def is_unit(self) -> bool:
        return (self.undecided is None and len(self.generators) == 1
                and self.generators[0].is_trivial_unit())

    def describe(self) -> str:
        if self.undecided is not None:
            return f"undecided ({self.undecided.reason})"
        if not self.generators:
            return "(0)"
        if self.principal:
            return f"({format_elem(self.gcd)})"
        return "(" + ", ".join(format_elem(g) for g in self.generators) + ")"


def _ideal_from(group, elems, token=None) -> FittingIdeal:
    elems = [normalize_generator(a) for a in elems if a.terms]
    if not elems:
        return FittingIdeal(-1, [])
    one = GroupRingElem.one(group)
    if any(a == one for a in elems):
        return FittingIdeal(-1, [one], one, True)
    uniq = sorted(set(elems), key=lambda a: (len(a.terms), a.terms))
    gens = [[a] for a in uniq]
    gens = prune_redundant(group, 1, gens, token)
    gens = [v[0] for v in gens]
    if LaurentSubmodule(group, 1, [[a] for a in gens], token=token).is_everything():
        return FittingIdeal(-1, [one], one, True)
    gcd = principal = None
    if not group.torsion:
        gcd = laurent_gcd(gens)
        principal = LaurentSubmodule(group, 1, [[a] for a in gens], token=token).contains([gcd])
        if principal:
            gens = [gcd]
    return FittingIdeal(-1, gens, gcd, principal)


def fitting_ideal(R: Mat, ngens: int, j: int, max_minors: int | None = None,
                  token=None) -> FittingIdeal:
    """Fitting ideal Fitt_j of the module presented by R (rows = relations)."""
    G = R.group
    s = ngens - j
    if s <= 0:
        one = GroupRingElem.one(G)
        return FittingIdeal(j, [one], one, True)
    if s > R.nrows:
        return FittingIdeal(j, [])
    total = comb(R.nrows, s) * comb(ngens, s)
    if max_minors is None:
        max_minors = DEFAULT_MAX_MINORS
    if total > max_minors:
        return FittingIdeal(j, [], undecided=Undecided(f"{total} minors above cap {max_minors}"))
    minors = []
    for rows in combinations(range(R.nrows), s):
        for cols in combinations(range(ngens), s):
            if token:
                token.check()
            d = determinant(R.block(rows, cols))
            if d.terms:
                minors.append(d)
    try:
        out = _ideal_from(G, minors, token)
    except CapExceeded as exc:
        return FittingIdeal(j, [], undecided=Undecided(str(exc)))
    out.index = j
    return out


def eliminate_units(R: Mat, ngens: int) -> tuple[Mat, int]:
    """Tietze-simplify a presentation: use ±monomial entries to delete generator/relation pairs."""
    G = R.group
    rows = [list(r) for r in R.rows if any(a.terms for a in r)]
    cols = list(range(ngens))
    while True:
        hit = None
        for i, r in enumerate(rows):
            for jj, j in enumerate(cols):
                if r[j].terms and r[j].unit_part() is not None:
                    hit = (i, j)
                    break
            if hit:
                break
        if hit is None:
            break
        i, j = hit
        piv = rows[i]
        uinv = piv[j] ** -1
        new = []
        for k, r in enumerate(rows):
            if k == i:
                continue
            c = r[j] * uinv
            if c.terms:
                r = [a - c * b for a, b in zip(r, piv)]
            if any(r[x].terms for x in cols if x != j):
                new.append(r)
        rows = new
        cols.remove(j)
    out = Mat(G, len(rows), len(cols), [[r[j] for j in cols] for r in rows])
    return out, len(cols)


@dataclass
class HomologyPresentation:
    degree: int
    group: object
    generators: list  # cycles in C_k generating H_k
    relations: Mat  # relations x len(generators)
    reduced: Mat  # unit-pruned presentation
    reduced_ngens: int
    fitting: list = field(default_factory=list)

    @property
    def first_elementary_ideal(self) -> FittingIdeal:
        """The first nonzero Fitting ideal (lowest index)."""
        for F in self.fitting:
            if not F.is_zero:
                return F
        return FittingIdeal(len(self.fitting), [])

    @property
    def is_zero_module(self) -> bool:
        return self.reduced_ngens == 0

    def describe(self) -> str:
        lines = [f"H_{self.degree}: {self.reduced_ngens} generator(s), "
                 f"{self.reduced.nrows} relation(s)"]
        for r in self.reduced.rows:
            lines.append("  [" + ", ".join(format_elem(a) for a in r) + "]")
        for F in self.fitting:
            lines.append(f"  E_{F.index} = {F.describe()}")
        return "\n".join(lines)


def homology_presentation(C: BasedFreeChainComplex, k: int, max_minors: int | None = None,
                          token=None) -> HomologyPresentation:
    G = require_laurent(C.group)
    n = C.rank(k)
    Z = kernel_generators(C.boundary(k), token)
    p = len(Z)
    rels: list = []
    B = C.boundary(k + 1)
    if p:
        system = AugmentedSystem(G, n, Z, token=token)
        for row in B.rows:
            c = system.lift(list(row))
            if c is None:
                raise ArithmeticError("boundary is not a cycle: d∘d != 0")
            rels.append(c)
        rels.extend(system.syzygies())
    R = Mat(G, len(rels), p, rels)
    reduced, q = eliminate_units(R, p)
    fits = []
    for j in range(q + 1):
        F = fitting_ideal(reduced, q, j, max_minors, token)
        fits.append(F)
        if F.is_unit:
            break
    return HomologyPresentation(k, G, Z, R, reduced, q, fits)


# -- H0 and small chain objects --------------------------------------------------------------


def _integer_invariants(M: Mat) -> tuple[int, list[int]]:
    """(rank of cokernel's free part, nontrivial invariant factors) of an integer matrix."""
    ncols = M.ncols
    if M.nrows == 0 or ncols == 0:
        return ncols, []
    A = sympy.Matrix([[augmentation(a) for a in r] for r in M.rows])
    from sympy.matrices.normalforms import smith_normal_form
    S = smith_normal_form(A, domain=sympy.ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
    nonzero = [d for d in diag if d]
    return ncols - len(nonzero), [d for d in nonzero if d != 1]


def h0_trivial_check(C: BasedFreeChainComplex, token=None) -> bool:
    """Is coker d1 isomorphic to Z with every group element acting trivially?"""
    G = require_laurent(C.group)
    n0 = C.rank(0)
    if n0 == 0:
        return False
    free, tors = _integer_invariants(C.boundary(1))
    if free != 1 or tors:
        return False
    if G.ngens == 0:
        return True
    im = LaurentSubmodule(G, n0, [list(r) for r in C.boundary(1).rows], token=token)
    one = GroupRingElem.one(G)
    for i in range(G.ngens):
        g = GroupRingElem.monomial(G, G.generator(i)) - one
        for e in range(n0):
            v = [g if j == e else GroupRingElem.zero(G) for j in range(n0)]
            if not im.contains(v):
                return False
    return True


@dataclass(frozen=True)
class Verdict:
    status: str  # "pass", "fail", "pass-with-caveat"
    reason: str = ""

    def __bool__(self):
        return self.status != "fail"


def _projective_cokernel(M: Mat, token=None):
    """True/False/None(unknown): is coker(M) projective (hence free) of constant rank?"""
    n = M.ncols
    try:
        R, q = eliminate_units(M, n)
        for j in range(q + 1):
            F = fitting_ideal(R, q, j, token=token)
            if F.undecided:
                return None
            if not F.is_zero:
                return F.is_unit
        return True
    except CapExceeded:
        return None


def small_chain_object_check(C: BasedFreeChainComplex, extended: bool = False, token=None) -> Verdict:
    try:
        require_laurent(C.group)
    except UnsupportedRing as exc:
        return Verdict("fail", str(exc))
    C = C.trimmed()
    caveat = None
    if C.top > 2:
        if not extended:
            return Verdict("fail", "cells above degree 2 (use extended mode)")
        try:
            for k in range(3, C.top + 1):
                H = homology_presentation(C, k, token=token)
                if not H.is_zero_module and not H.first_elementary_ideal.is_unit:
                    return Verdict("fail", f"H_{k} is nonzero")
            split = _projective_cokernel(C.boundary(3), token)
        except CapExceeded as exc:
            return Verdict("pass-with-caveat", f"exactness above degree 2 not certified: {exc}")
        if split is None:
            caveat = "splitting of d3 could not be certified at cap"
        elif not split:
            return Verdict("fail", "d3 is not split (cokernel not projective)")
    if not h0_trivial_check(C, token):
        return Verdict("fail", "H0 is not the trivial module Z")
    if caveat:
        return Verdict("pass-with-caveat", caveat)
    return Verdict("pass", "small chain object")


def realization_hypotheses_check(f: ChainMap, token=None) -> Verdict:
    """H0 isomorphism and H1 epimorphism for a map over an abelian (or trivial) group ring."""
    try:
        G = require_laurent(f.source.group)
    except UnsupportedRing as exc:
        return Verdict("fail", str(exc))
    D, C = f.source, f.target
    n0 = C.rank(0)
    F0, F1 = f.at(0), f.at(1)
    imC1 = [list(r) for r in C.boundary(1).rows]
    # H0 surjective
    span = LaurentSubmodule(G, n0, [list(r) for r in F0.rows] + imC1, token=token)
    for i in range(n0):
        if not span.contains(unit_vector(G, n0, i)):
            return Verdict("fail", "H0 not surjective")
    # H0 injective
    vecs = [list(r) for r in F0.rows] + imC1
    if vecs and n0:
        syz = AugmentedSystem(G, n0, vecs, token=token).syzygies()
        imD1 = LaurentSubmodule(G, D.rank(0), [list(r) for r in D.boundary(1).rows], token=token)
        for s in syz:
            if not imD1.contains(s[: D.rank(0)]):
                return Verdict("fail", "H0 not injective")
    elif D.rank(0) and not n0:
        if not LaurentSubmodule(G, D.rank(0), [list(r) for r in D.boundary(1).rows]).is_everything():
            return Verdict("fail", "H0 not injective")
    # H1 surjective
    n1 = C.rank(1)
    if n1:
        ZD = kernel_generators(D.boundary(1), token)
        images = [list((Mat(G, 1, D.rank(1), [z]) @ F1).rows[0]) for z in ZD]
        span1 = LaurentSubmodule(G, n1, images + [list(r) for r in C.boundary(2).rows], token=token)
        for z in kernel_generators(C.boundary(1), token):
            if not span1.contains(z):
                return Verdict("fail", "H1 not surjective")
    return Verdict("pass", "H0 isomorphism and H1 epimorphism")
