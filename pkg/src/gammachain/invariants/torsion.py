"""Torsion of chain equivalences over Laurent rings and their Cohn localizations.

The torsion of an equivalence f is the torsion of its mapping cone, computed
over the fraction field by the determinant formula

    tau = prod_k det(d_k[S_k, J_{k-1}]) ^ ((-1)^(k+1))

where S_k picks rows of d_k and J_{k-1} is the complement of S_{k-1}.  The
row choice is made by elimination at a random point modulo a large prime and
then confirmed exactly.  The class is reported modulo ±monomials as a sorted
multiset of irreducible integer factors.

For free abelian groups the Whitehead group vanishes, so an equivalence over
Z[Gamma] is simple exactly when its torsion is ±monomial.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import sympy

from ..chains.complex import BasedFreeChainComplex, ChainMap, identity_map
from ..chains.homology import (from_sympy, homology_presentation, normalize_generator,
                               require_laurent, to_sympy, _symbols)
from ..chains.matrix import Mat, block_diag, hstack, vstack
from ..grouprings.groups import AbelianGroup, GroupHom, identity_hom
from ..grouprings.ring import GroupRingElem, coefficient_change, format_elem
from ..verdicts import CapExceeded, Undecided

PRIME = 2_147_483_647
MAX_DET_SIZE = 14


class NotSigmaInvertible(ValueError):
    pass


class NotAcyclic(ValueError):
    pass


# -- determinants ------------------------------------------------------------------------


def laurent_det(M: Mat) -> GroupRingElem:
    """Exact determinant of a square Laurent matrix (fraction-free, via sympy)."""
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    G = require_laurent(M.group)
    n = M.nrows
    if n == 0:
        return GroupRingElem.one(G)
    if n > MAX_DET_SIZE:
        raise CapExceeded(f"determinant of size {n} above cap {MAX_DET_SIZE}")
    if G.torsion:
        from ..chains.matrix import determinant
        return determinant(M)
    xs = _symbols(G)
    rows, shift = [], [0] * G.free_rank
    for r in M.rows:
        nz = [g for a in r for g, _ in a.terms]
        mins = [min(g[i] for g in nz) if nz else 0 for i in range(G.free_rank)]
        rows.append([_poly_expr(a, xs, mins) for a in r])
        shift = [s + m for s, m in zip(shift, mins)]
    d = sympy.expand(sympy.Matrix(rows).det(method="bareiss"))
    if d == 0:
        return GroupRingElem.zero(G)
    return from_sympy(d, G).left_translate(tuple(shift))


def _poly_expr(a: GroupRingElem, xs, mins):
    expr = sympy.Integer(0)
    for g, c in a.terms:
        mon = sympy.Integer(c)
        for x, e, m in zip(xs, g, mins):
            mon *= x ** (e - m)
        expr += mon
    return expr


def cohn_invertibility(Mx: Mat, lam: GroupHom) -> bool:
    """Is Mx invertible over the localization inverting matrices invertible over Z[target]?"""
    if Mx.nrows != Mx.ncols:
        raise ValueError("cohn_invertibility needs a square matrix")
    if lam.source != Mx.group:
        raise ValueError("hom source does not match the matrix ring")
    image = coefficient_change(laurent_det(Mx), lam)
    return image.unit_part() is not None


# -- torsion elements ------------------------------------------------------------------------


@dataclass(frozen=True)
class TorsionElement:
    """Class in K_1 of the localization modulo ±monomials.

    ``factors`` is a sorted tuple of (normalized irreducible, exponent).
    ``sign`` and ``monomial`` record the discarded unit for information only.
    """

    group: object
    factors: tuple = ()
    sign: int = 1
    monomial: tuple = ()

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    def __mul__(self, other: "TorsionElement") -> "TorsionElement":
        acc: dict = {}
        for f, e in self.factors + other.factors:
            acc[f] = acc.get(f, 0) + e
        mono = tuple(a + b for a, b in zip(self.monomial, other.monomial)) if self.monomial else other.monomial
        return TorsionElement(self.group, _sorted_factors(acc), self.sign * other.sign, mono)

    def inverse(self) -> "TorsionElement":
        return TorsionElement(self.group, tuple((f, -e) for f, e in self.factors), self.sign,
                              tuple(-x for x in self.monomial))

    def same_class(self, other: "TorsionElement") -> bool:
        return self.factors == other.factors

    def describe(self) -> str:
        if not self.factors:
            return "1"
        parts = []
        for f, e in self.factors:
            s = f"({format_elem(f)})"
            parts.append(s if e == 1 else f"{s}^{e}")
        return "*".join(parts)

    def as_json(self):
        return [[format_elem(f), e] for f, e in self.factors]


def _sorted_factors(acc: dict) -> tuple:
    items = [(f, e) for f, e in acc.items() if e]
    return tuple(sorted(items, key=lambda fe: (len(fe[0].terms), fe[0].terms)))


def factor_class(num: Sequence[GroupRingElem], den: Sequence[GroupRingElem] = ()) -> TorsionElement:
    """Normalized factorization of prod(num)/prod(den) modulo ±monomials."""
    elems = [a for a in list(num) + list(den)]
    if not elems:
        raise ValueError("nothing to factor")
    G = elems[0].group
    acc: dict = {}
    sign = 1
    mono = [0] * G.free_rank
    for a, s in [(a, 1) for a in num] + [(a, -1) for a in den]:
        if not a.terms:
            raise NotAcyclic("zero determinant")
        expr, shift = to_sympy(a)
        mono = [m + s * x for m, x in zip(mono, shift)]
        c, fl = sympy.factor_list(expr, *_symbols(G)) if G.free_rank else (expr, [])
        c = int(c)
        if c < 0:
            sign = -sign
            c = -c
        if c != 1:
            for p, e in sympy.factorint(c).items():
                f = GroupRingElem.integer(G, int(p))
                acc[f] = acc.get(f, 0) + s * e
        for poly, e in fl:
            f = from_sympy(poly.as_expr() if hasattr(poly, "as_expr") else poly, G)
            if len(f.terms) == 1 and abs(f.terms[0][1]) == 1:
                # a monomial factor: part of the discarded unit
                if f.terms[0][1] < 0 and e % 2:
                    sign = -sign
                continue
            nf = normalize_generator(f)
            if nf != f and (f.terms[0][1] < 0) and e % 2:
                sign = -sign
            acc[nf] = acc.get(nf, 0) + s * e
    return TorsionElement(G, _sorted_factors(acc), sign, tuple(mono))


def sigma_check(tau: TorsionElement, lam: GroupHom) -> list[GroupRingElem]:
    """Factors whose image under lam is not ±monomial (empty list means Sigma-invertible)."""
    return [f for f, _ in tau.factors if coefficient_change(f, lam).unit_part() is None]


# -- mapping cones ------------------------------------------------------------------------------


def mapping_cone(f: ChainMap) -> BasedFreeChainComplex:
    """cone_k = D_k + C_{k-1}; row blocks [[dD_k, 0], [f_{k-1}, -dC_{k-1}]]."""
    C, D = f.source, f.target
    G = C.group
    top = max(D.top, C.top + 1)
    labels = [tuple(f"D.{x}" for x in (D.labels[k] if k <= D.top else ()))
              + tuple(f"C.{x}" for x in (C.labels[k - 1] if 1 <= k <= C.top + 1 else ()))
              for k in range(top + 1)]
    mats = []
    for k in range(1, top + 1):
        dD = D.boundary(k)
        top_blk = hstack([dD, Mat.zeros(G, D.rank(k), C.rank(k - 2))], G, D.rank(k))
        bot_blk = hstack([f.at(k - 1), -C.boundary(k - 1)], G, C.rank(k - 1))
        mats.append(vstack([top_blk, bot_blk], G, D.rank(k - 1) + C.rank(k - 2)))
    return BasedFreeChainComplex.build(G, labels, mats)


def _eval_entry(a: GroupRingElem, point: list[int], orders: list[int], p: int) -> int:
    acc = 0
    for g, c in a.terms:
        v = c % p
        for x, e in zip(point, g):
            v = v * pow(x, e % (p - 1), p) % p
        acc = (acc + v) % p
    return acc


def _independent_rows(rows: list[list[int]], p: int) -> list[int]:
    """Indices of a maximal independent set of rows over GF(p), greedy in order."""
    basis: list[tuple[int, list[int]]] = []
    chosen = []
    for idx, r in enumerate(rows):
        v = list(r)
        for piv, b in basis:
            if v[piv]:
                c = v[piv]
                v = [(x - c * y) % p for x, y in zip(v, b)]
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            continue
        inv = pow(v[piv], p - 2, p)
        v = [x * inv % p for x in v]
        basis.append((piv, v))
        chosen.append(idx)
    return chosen


def complex_torsion(E: BasedFreeChainComplex, seed: int = 0, tries: int = 4) -> TorsionElement:
    """Torsion of a complex acyclic over the fraction field of a Laurent ring."""
    G = require_laurent(E.group)
    if G.torsion:
        raise NotAcyclic("fraction-field torsion needs a free abelian group")
    rng = random.Random(seed)
    for _ in range(tries):
        point = [rng.randrange(2, PRIME - 1) for _ in range(G.free_rank)]
        choice = _choose(E, point)
        if choice is not None:
            break
    else:
        raise NotAcyclic("complex is not acyclic over the fraction field")
    num, den = [], []
    for k, (S, J) in choice.items():
        if not S:
            continue
        A = E.d[k].block(S, J)
        d = laurent_det(A)
        if not d.terms:
            raise NotAcyclic("a chosen minor vanished exactly")
        (num if (k + 1) % 2 == 0 else den).append(d)
    if not num and not den:
        return TorsionElement(G, (), 1, (0,) * G.free_rank)
    return factor_class(num, den)


def _choose(E: BasedFreeChainComplex, point):
    p = PRIME
    S_prev: list[int] = []
    out = {}
    for k in range(1, E.top + 1):
        J = [j for j in range(E.rank(k - 1)) if j not in S_prev]
        M = E.d[k]
        rows = [[_eval_entry(M[i, j], point, [], p) for j in J] for i in range(M.nrows)]
        S = _independent_rows(rows, p) if J else []
        if len(S) != len(J):
            return None
        out[k] = (S, J)
        S_prev = S
    # acyclic at the top: every top cell used
    if len(S_prev) != E.rank(E.top):
        return None
    if E.top == 0 and E.rank(0):
        return None
    return out


def torsion_det(f: ChainMap, lam: GroupHom | None = None, seed: int = 0) -> TorsionElement:
    """Torsion of f over the localization, modulo ±monomials.

    When ``lam`` is given every factor must become ±monomial under it
    (the localization condition); otherwise :class:`NotSigmaInvertible`.
    """
    tau = complex_torsion(mapping_cone(f), seed)
    if lam is not None:
        bad = sigma_check(tau, lam)
        if bad:
            raise NotSigmaInvertible("torsion factors not invertible after reduction: "
                                     + ", ".join(format_elem(b) for b in bad))
    return tau


@dataclass(frozen=True)
class SimplenessVerdict:
    status: str  # "simple", "not-simple", "not-equivalence", "undecided"
    torsion: TorsionElement | None = None
    reason: str = ""

    @property
    def simple(self) -> bool:
        return self.status == "simple"


def is_acyclic_over_ring(E: BasedFreeChainComplex):
    """True/False/Undecided: does the complex have vanishing homology over Z[Gamma]?"""
    try:
        for k in range(E.top + 1):
            H = homology_presentation(E, k)
            if H.is_zero_module:
                continue
            F0 = H.fitting[0] if H.fitting else None
            if F0 is not None and F0.undecided is not None:
                return Undecided(F0.undecided.reason)
            if F0 is None or not F0.is_unit:
                return False
        return True
    except CapExceeded as exc:
        return Undecided(str(exc))


def is_monomial_matrix(M) -> bool:
    """Square, with exactly one ±(group element) per row and per column."""
    if M.nrows != M.ncols:
        return False
    seen = set()
    for r in M.rows:
        nz = [j for j, a in enumerate(r) if a.terms]
        if len(nz) != 1 or r[nz[0]].unit_part() is None or nz[0] in seen:
            return False
        seen.add(nz[0])
    return True


def simpleness_certificate(f: ChainMap, seed: int = 0) -> SimplenessVerdict:
    """Decide whether f is a simple equivalence over Z[Gamma], Gamma free abelian."""
    top = max(f.source.top, f.target.top)
    if f.commutes() and all(is_monomial_matrix(f.at(k)) for k in range(top + 1)):
        # a based isomorphism by monomial matrices: its torsion is a ±monomial
        G = f.source.group
        zero = (0,) * getattr(G, "free_rank", 0)
        return SimplenessVerdict("simple", TorsionElement(G, (), 1, zero),
                                 "based isomorphism with monomial matrices")
    G = require_laurent(f.source.group)
    if G.torsion:
        return SimplenessVerdict("undecided", reason="torsion in Gamma: Whitehead group not known to vanish")
    cone = mapping_cone(f)
    ac = is_acyclic_over_ring(cone)
    if ac is False:
        try:
            tau = complex_torsion(cone, seed)
            note = f"; torsion over the fraction field {tau.describe()}"
        except (NotAcyclic, CapExceeded):
            tau, note = None, ""
        return SimplenessVerdict("not-equivalence", tau, "mapping cone has homology" + note)
    if not isinstance(ac, bool):
        return SimplenessVerdict("undecided", reason=ac.reason)
    try:
        tau = complex_torsion(cone, seed)
    except CapExceeded as exc:
        return SimplenessVerdict("undecided", reason=str(exc))
    if tau.is_trivial:
        return SimplenessVerdict("simple", tau, "torsion is ±monomial")
    return SimplenessVerdict("not-simple", tau, f"torsion class {tau.describe()}")
