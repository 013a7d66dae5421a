"""Submodules of free modules over integral Laurent rings Z[A], A abelian.

Strong Gröbner bases over Z (Buchberger with S- and GCD-polynomials and
Euclidean coefficient reduction).  The Laurent ring is modelled as a
quotient of a polynomial ring: every free generator t_i gets a partner
variable u_i with t_i u_i = 1, every torsion generator s of order n the
relation s^n = 1.  These relations are added at every module position, so
normal forms are canonical for the Laurent module.

Normal forms are unique: at each term the coefficient is reduced into
[0, a) where a generates the ideal of leading coefficients at that term,
which a strong basis provides.
"""

from __future__ import annotations

import heapq
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

from .grouprings.groups import AbelianGroup
from .grouprings.ring import GroupRingElem
from .verdicts import CancelToken, CapExceeded

DEFAULT_MAX_BASIS = 4000

# A module vector in polynomial form: {(monomial, position): coefficient}
PolyVec = dict


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class Engine:
    """Polynomial-side bookkeeping for one Laurent ring."""

    def __init__(self, group: AbelianGroup):
        if not isinstance(group, AbelianGroup):
            raise TypeError("Laurent module computations need an abelian coefficient group")
        self.group = group
        self.r = group.free_rank
        self.torsion = group.torsion
        self.nvars = 2 * self.r + len(self.torsion)

    # conversion -----------------------------------------------------------
    def to_mon(self, g) -> tuple[int, ...]:
        r = self.r
        free = g[:r]
        return (tuple(max(e, 0) for e in free) + tuple(max(-e, 0) for e in free)
                + tuple(g[r:]))

    def from_mon(self, m) -> tuple[int, ...]:
        r = self.r
        return self.group.normalize(tuple(m[i] - m[r + i] for i in range(r)) + tuple(m[2 * r:]))

    def vec_to_poly(self, vec: Sequence[GroupRingElem], offset: int = 0) -> PolyVec:
        out: PolyVec = {}
        for j, a in enumerate(vec):
            for g, c in a.terms:
                key = (self.to_mon(g), j + offset)
                out[key] = out.get(key, 0) + c
        return {k: c for k, c in out.items() if c}

    def poly_to_vec(self, f: PolyVec, positions: Iterable[int], offset: int = 0) -> list[GroupRingElem]:
        positions = list(positions)
        acc = {p: {} for p in positions}
        for (m, p), c in f.items():
            if p in acc:
                g = self.from_mon(m)
                acc[p][g] = acc[p].get(g, 0) + c
        return [GroupRingElem(self.group, acc[p]) for p in positions]

    def relations(self, positions: Iterable[int]) -> list[PolyVec]:
        out = []
        n = self.nvars
        for p in positions:
            for i in range(self.r):
                m = [0] * n
                m[i] = 1
                m[self.r + i] = 1
                out.append({(tuple(m), p): 1, ((0,) * n, p): -1})
            for k, order in enumerate(self.torsion):
                m = [0] * n
                m[2 * self.r + k] = order
                out.append({(tuple(m), p): 1, ((0,) * n, p): -1})
        return out


@lru_cache(maxsize=None)
def _mon_key(m: tuple[int, ...]):
    # graded reverse lexicographic
    return (sum(m), tuple(-e for e in reversed(m)))


def _term_key(t):
    m, p = t
    return (p, _mon_key(m))


def _lead(f: PolyVec):
    return max(f, key=_term_key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _shift(f: PolyVec, m, c: int) -> PolyVec:
    return {(tuple(x + y for x, y in zip(mm, m)), p): cc * c for (mm, p), cc in f.items()}


def _axpy(f: PolyVec, g: PolyVec, m, c: int) -> None:
    """f -= c * x^m * g  (in place)."""
    for (mm, p), cc in g.items():
        key = (tuple(x + y for x, y in zip(mm, m)), p)
        v = f.get(key, 0) - c * cc
        if v:
            f[key] = v
        else:
            f.pop(key, None)


class StrongBasis:
    """A strong Gröbner basis of a polynomial submodule."""

    def __init__(self, gens: Iterable[PolyVec], max_basis: int | None = None,
                 token: CancelToken | None = None):
        self.basis: list[PolyVec] = []
        self.leads: list = []
        self.by_pos: dict[int, list[int]] = {}
        self.max_basis = DEFAULT_MAX_BASIS if max_basis is None else max_basis
        self.token = token
        self._build([dict(g) for g in gens if g])

    def _add(self, f: PolyVec) -> int:
        idx = len(self.basis)
        lt = _lead(f)
        self.basis.append(f)
        self.leads.append((lt, f[lt]))
        self.by_pos.setdefault(lt[1], []).append(idx)
        if idx >= self.max_basis:
            raise CapExceeded(f"Gröbner basis grew past {self.max_basis} elements")
        return idx

    def _pairs_with(self, idx: int, heap: list):
        (m, p), _ = self.leads[idx]
        for j in self.by_pos.get(p, []):
            if j == idx:
                continue
            mj = self.leads[j][0][0]
            lcm = tuple(max(x, y) for x, y in zip(m, mj))
            heapq.heappush(heap, (sum(lcm), min(idx, j), max(idx, j)))

    def _build(self, gens: list[PolyVec]):
        heap: list = []
        for f in gens:
            f = self.reduce(f)
            if f:
                idx = self._add(f)
                self._pairs_with(idx, heap)
        seen = set()
        while heap:
            if self.token:
                self.token.check()
            _, i, j = heapq.heappop(heap)
            if (i, j) in seen:
                continue
            seen.add((i, j))
            for h in self._pair_polys(i, j):
                h = self.reduce(h)
                if h:
                    idx = self._add(h)
                    self._pairs_with(idx, heap)

    def _pair_polys(self, i: int, j: int) -> list[PolyVec]:
        (mi, _), a = self.leads[i]
        (mj, _), b = self.leads[j]
        L = tuple(max(x, y) for x, y in zip(mi, mj))
        si = tuple(x - y for x, y in zip(L, mi))
        sj = tuple(x - y for x, y in zip(L, mj))
        gi, gj = self.basis[i], self.basis[j]
        out = []
        l = abs(a * b) // gcd(a, b)
        s = _shift(gi, si, l // a)
        _axpy(s, gj, sj, l // b)
        out.append(s)
        if a % b and b % a:
            d, u, v = _xgcd(a, b)
            g = _shift(gi, si, u)
            _axpy(g, gj, sj, -v)
            out.append(g)
        return out

    def _best_divisor(self, t):
        m, p = t
        best = None
        for k in self.by_pos.get(p, ()):
            (lm, _), lc = self.leads[k]
            if _divides(lm, m) and (best is None or abs(lc) < abs(self.leads[best][1])):
                best = k
        return best

    def reduce(self, f: PolyVec) -> PolyVec:
        """Full Euclidean reduction; the result is the canonical normal form."""
        f = {k: c for k, c in f.items() if c}
        done: PolyVec = {}
        while f:
            t = _lead(f)
            c = f[t]
            k = self._best_divisor(t)
            if k is not None:
                (lm, _), lc = self.leads[k]
                r = c % abs(lc)
                q = (c - r) // lc
                if q:
                    shift = tuple(x - y for x, y in zip(t[0], lm))
                    _axpy(f, self.basis[k], shift, q)
            c = f.pop(t, 0)
            if c:
                done[t] = c
        return done


class LaurentSubmodule:
    """Submodule of Z[A]^m spanned by given vectors, with canonical normal forms."""

    def __init__(self, group: AbelianGroup, m: int, gens: Sequence[Sequence[GroupRingElem]],
                 max_basis: int | None = None, token: CancelToken | None = None):
        self.engine = Engine(group)
        self.group = group
        self.m = m
        self.gens = [list(v) for v in gens]
        for v in self.gens:
            if len(v) != m:
                raise ValueError(f"generator has length {len(v)}, expected {m}")
        polys = [self.engine.vec_to_poly(v) for v in self.gens]
        polys += self.engine.relations(range(m))
        self.gb = StrongBasis(polys, max_basis, token)

    def normal_form(self, vec: Sequence[GroupRingElem]) -> list[GroupRingElem]:
        f = self.gb.reduce(self.engine.vec_to_poly(vec))
        return self.engine.poly_to_vec(f, range(self.m))

    def contains(self, vec: Sequence[GroupRingElem]) -> bool:
        return not self.gb.reduce(self.engine.vec_to_poly(vec))

    def is_everything(self) -> bool:
        zero = GroupRingElem.zero(self.group)
        one = GroupRingElem.one(self.group)
        return all(self.contains([one if i == j else zero for i in range(self.m)])
                   for j in range(self.m))


class AugmentedSystem:
    """GB of (v_j | e_j) with the v-block ordered first: syzygies and lifts."""

    def __init__(self, group: AbelianGroup, m: int, vectors: Sequence[Sequence[GroupRingElem]],
                 max_basis: int | None = None, token: CancelToken | None = None):
        self.engine = E = Engine(group)
        self.group = group
        self.m = m
        self.p = p = len(vectors)
        polys = []
        for j, v in enumerate(vectors):
            f = E.vec_to_poly(v, offset=p)
            f[((0,) * E.nvars, j)] = f.get(((0,) * E.nvars, j), 0) + 1
            polys.append(f)
        polys += E.relations(range(p + m))
        self.gb = StrongBasis(polys, max_basis, token)

    def syzygies(self) -> list[list[GroupRingElem]]:
        out = []
        seen = set()
        for f in self.gb.basis:
            if all(pos < self.p for (_, pos) in f):
                vec = self.engine.poly_to_vec(f, range(self.p))
                key = tuple(v.terms for v in vec)
                if any(vec) and key not in seen:
                    seen.add(key)
                    out.append(vec)
        return out

    def lift(self, vec: Sequence[GroupRingElem]) -> list[GroupRingElem] | None:
        """Coefficients c with sum_j c_j v_j == vec, or None if not in the span."""
        f = self.gb.reduce(self.engine.vec_to_poly(vec, offset=self.p))
        if any(pos >= self.p for (_, pos) in f):
            return None
        return [-c for c in self.engine.poly_to_vec(f, range(self.p))]


def syzygies(group, m: int, vectors, **kw) -> list[list[GroupRingElem]]:
    """Generators of {c : sum_j c_j vectors[j] = 0}."""
    if not vectors:
        return []
    return AugmentedSystem(group, m, vectors, **kw).syzygies()


def lift(group, m: int, vectors, target, **kw):
    if not vectors:
        return [] if not any(target) else None
    return AugmentedSystem(group, m, vectors, **kw).lift(target)
