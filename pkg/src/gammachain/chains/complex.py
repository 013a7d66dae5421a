"""Based free chain complexes, chain maps, homotopies and simple moves.

Degrees run from 0 to ``top``.  ``d[k]`` is the boundary from degree k to
k-1, stored with one row per degree-k basis element (row-vector convention,
see :mod:`gammachain.chains.matrix`), so ``d[k] @ d[k-1] == 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..grouprings.groups import GroupHom
from ..grouprings.ring import GroupRingElem, RingTagError, coefficient_change
from .matrix import Mat


class ChainError(ValueError):
    pass


@dataclass(frozen=True)
class BasedFreeChainComplex:
    group: object
    labels: tuple  # labels[k] = tuple of basis labels in degree k
    d: tuple  # d[k] for k = 0..top; d[0] is the 0 x 0-column map and unused

    def __post_init__(self):
        labels = tuple(tuple(str(x) for x in ls) for ls in self.labels)
        if not labels:
            labels = ((),)
        object.__setattr__(self, "labels", labels)
        d = list(self.d)
        if len(d) == len(labels) - 1:
            d = [Mat.zeros(self.group, len(labels[0]), 0)] + d
        if len(d) != len(labels):
            raise ChainError("need one boundary matrix per positive degree")
        d[0] = Mat.zeros(self.group, len(labels[0]), 0)
        for k in range(1, len(labels)):
            M = d[k]
            if M.shape != (len(labels[k]), len(labels[k - 1])):
                raise ChainError(f"d{k} has shape {M.shape}, expected "
                                 f"{(len(labels[k]), len(labels[k - 1]))}")
            if M.group != self.group:
                raise RingTagError(f"d{k} is over a different ring")
        object.__setattr__(self, "d", tuple(d))

    @classmethod
    def build(cls, group, labels: Sequence[Sequence[str]], mats: Sequence[Mat]) -> "BasedFreeChainComplex":
        """``mats[k-1]`` is the boundary from degree k."""
        return cls(group, tuple(tuple(ls) for ls in labels), tuple(mats))

    @property
    def top(self) -> int:
        return len(self.labels) - 1

    def rank(self, k: int) -> int:
        return len(self.labels[k]) if 0 <= k <= self.top else 0

    def ranks(self) -> list[int]:
        return [len(ls) for ls in self.labels]

    def boundary(self, k: int) -> Mat:
        """Boundary from degree k, defined (possibly empty) for every integer k."""
        if 1 <= k <= self.top:
            return self.d[k]
        return Mat.zeros(self.group, self.rank(k), self.rank(k - 1))

    def extended(self, top: int) -> "BasedFreeChainComplex":
        """Same complex padded with empty degrees up to ``top``."""
        if top <= self.top:
            return self
        labels = list(self.labels) + [()] * (top - self.top)
        mats = list(self.d[1:]) + [Mat.zeros(self.group, 0, len(labels[k - 1]))
                                   for k in range(self.top + 1, top + 1)]
        return BasedFreeChainComplex(self.group, tuple(labels), tuple([None] + mats))

    def trimmed(self) -> "BasedFreeChainComplex":
        """Drop empty top degrees."""
        t = self.top
        while t > 0 and not self.labels[t]:
            t -= 1
        return BasedFreeChainComplex(self.group, self.labels[: t + 1], self.d[: t + 1])

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.ranks()))

    def with_boundary(self, k: int, M: Mat) -> "BasedFreeChainComplex":
        d = list(self.d)
        d[k] = M
        return BasedFreeChainComplex(self.group, self.labels, tuple(d))


def zero_complex(group, ranks: Sequence[int] = (0,)) -> BasedFreeChainComplex:
    labels = [tuple(f"e{k}_{i}" for i in range(n)) for k, n in enumerate(ranks)]
    mats = [Mat.zeros(group, ranks[k], ranks[k - 1]) for k in range(1, len(ranks))]
    return BasedFreeChainComplex.build(group, labels, mats)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    messages: tuple = ()
    failing_degree: int | None = None
    failing_entry: tuple | None = None
    composite_value: GroupRingElem | None = None

    def __bool__(self):
        return self.valid


def validate_complex(C: BasedFreeChainComplex) -> ValidationReport:
    """Check dimensions and d∘d = 0; report the first failing entry."""
    for k in range(1, C.top + 1):
        if C.d[k].shape != (C.rank(k), C.rank(k - 1)):
            return ValidationReport(False, (f"d{k} has the wrong shape",), k)
    for k in range(2, C.top + 1):
        P = C.d[k] @ C.d[k - 1]
        hit = P.first_nonzero()
        if hit:
            i, j, v = hit
            return ValidationReport(
                False,
                (f"d{k}*d{k - 1} is nonzero at ({C.labels[k][i]}, {C.labels[k - 2][j]})",),
                k, (i, j), v)
    return ValidationReport(True, ("ok",))


# -- maps and homotopies -------------------------------------------------------------


def _check_same_ring(C, D):
    if C.group != D.group:
        raise RingTagError("complexes are over different rings")


@dataclass(frozen=True)
class ChainMap:
    source: BasedFreeChainComplex
    target: BasedFreeChainComplex
    maps: tuple  # maps[k]: rank_k(source) x rank_k(target)

    def __post_init__(self):
        _check_same_ring(self.source, self.target)
        top = max(self.source.top, self.target.top)
        maps = list(self.maps) + [None] * (top + 1 - len(self.maps))
        for k in range(top + 1):
            shape = (self.source.rank(k), self.target.rank(k))
            if maps[k] is None:
                maps[k] = Mat.zeros(self.source.group, *shape)
            if maps[k].shape != shape:
                raise ChainError(f"map in degree {k} has shape {maps[k].shape}, expected {shape}")
        object.__setattr__(self, "maps", tuple(maps[: top + 1]))

    def at(self, k: int) -> Mat:
        if 0 <= k < len(self.maps):
            return self.maps[k]
        return Mat.zeros(self.source.group, self.source.rank(k), self.target.rank(k))

    def commutes(self) -> bool:
        return self.first_defect() is None

    def first_defect(self):
        top = max(self.source.top, self.target.top)
        for k in range(1, top + 1):
            lhs = self.source.boundary(k) @ self.at(k - 1)
            rhs = self.at(k) @ self.target.boundary(k)
            if lhs != rhs:
                return k
        return None

    def then(self, other: "ChainMap") -> "ChainMap":
        """``other o self``."""
        if self.target != other.source:
            raise ChainError("cannot compose: intermediate complexes differ")
        top = max(self.source.top, other.target.top, self.target.top)
        return ChainMap(self.source, other.target,
                        tuple(self.at(k) @ other.at(k) for k in range(top + 1)))

    def __sub__(self, other: "ChainMap") -> list[Mat]:
        top = max(self.source.top, self.target.top)
        return [self.at(k) - other.at(k) for k in range(top + 1)]


def identity_map(C: BasedFreeChainComplex) -> ChainMap:
    return ChainMap(C, C, tuple(Mat.identity(C.group, C.rank(k)) for k in range(C.top + 1)))


def zero_map(C: BasedFreeChainComplex, D: BasedFreeChainComplex) -> ChainMap:
    return ChainMap(C, D, ())


@dataclass(frozen=True)
class ChainHomotopy:
    f: ChainMap
    g: ChainMap
    h: tuple  # h[k]: rank_k(source) x rank_{k+1}(target)

    def __post_init__(self):
        S, T = self.f.source, self.f.target
        if self.g.source != S or self.g.target != T:
            raise ChainError("homotopic maps must share source and target")
        top = max(S.top, T.top)
        h = list(self.h) + [None] * (top + 1 - len(self.h))
        for k in range(top + 1):
            shape = (S.rank(k), T.rank(k + 1))
            if h[k] is None:
                h[k] = Mat.zeros(S.group, *shape)
            if h[k].shape != shape:
                raise ChainError(f"homotopy in degree {k} has shape {h[k].shape}, expected {shape}")
        object.__setattr__(self, "h", tuple(h[: top + 1]))

    def at(self, k: int) -> Mat:
        S, T = self.f.source, self.f.target
        if 0 <= k < len(self.h):
            return self.h[k]
        return Mat.zeros(S.group, S.rank(k), T.rank(k + 1))

    def holds(self) -> bool:
        """f - g = d h + h d in every degree."""
        S, T = self.f.source, self.f.target
        for k in range(max(S.top, T.top) + 1):
            lhs = self.f.at(k) - self.g.at(k)
            rhs = S.boundary(k) @ self.at(k - 1) + self.at(k) @ T.boundary(k + 1)
            if lhs != rhs:
                return False
        return True


def zero_homotopy(f: ChainMap, g: ChainMap | None = None) -> ChainHomotopy:
    return ChainHomotopy(f, f if g is None else g, ())


# -- simple moves --------------------------------------------------------------------


@dataclass(frozen=True)
class SimpleMove:
    """One elementary based change.

    kinds:
      ``stabilize``   add a pair (e_k, e_{k-1}) with d e_k = e_{k-1}
      ``destabilize`` remove such a pair: ``index`` in degree k, ``other`` in k-1
      ``slide``       replace basis element ``index`` of degree k by e_index + r e_other
      ``unit``        replace basis element ``index`` of degree k by u e_index, u = ±g
    """

    kind: str
    degree: int
    index: int = -1
    other: int = -1
    coeff: GroupRingElem | None = None
    labels: tuple = ()

    def __post_init__(self):
        if self.kind not in ("stabilize", "destabilize", "slide", "unit"):
            raise ChainError(f"unknown move kind {self.kind!r}")
        if self.kind == "slide" and self.index == self.other:
            raise ChainError("a slide needs two distinct basis elements")
        if self.kind == "unit" and (self.coeff is None or self.coeff.unit_part() is None):
            raise ChainError("unit basis change needs a coefficient ±(group element)")


@dataclass(frozen=True)
class MoveWitness:
    move: SimpleMove
    forward: ChainMap  # C -> C'
    backward: ChainMap  # C' -> C
    source_homotopy: ChainHomotopy  # backward o forward ~ id
    target_homotopy: ChainHomotopy  # forward o backward ~ id
    det_factor: GroupRingElem  # contribution to the torsion determinant (±g or 1)

    def verify(self) -> bool:
        return (self.forward.commutes() and self.backward.commutes()
                and self.source_homotopy.holds() and self.target_homotopy.holds())


def describe_move(m: SimpleMove) -> str:
    if m.kind in ("slide", "unit"):
        c = m.coeff
        coeff = str(c) if c is not None else "1"
        return f"{m.kind}(deg {m.degree}, {m.index}, {m.other}, {coeff})"
    if m.kind == "stabilize":
        return f"stabilize(deg {m.degree}" + (f", {m.labels[0]}/{m.labels[1]})" if m.labels else ")")
    return f"{m.kind}(deg {m.degree}, {m.index}, {m.other})"


def _elementary(group, n: int, i: int, j: int, r: GroupRingElem) -> Mat:
    I = Mat.identity(group, n)
    return I.with_entry(i, j, I[i, j] + r)


def _fresh(existing: Sequence[str], stem: str) -> str:
    taken = set(existing)
    n = 0
    while f"{stem}{n}" in taken:
        n += 1
    return f"{stem}{n}"


def apply_simple_move(C: BasedFreeChainComplex, m: SimpleMove) -> tuple[BasedFreeChainComplex, MoveWitness]:
    grp = C.group
    one = GroupRingElem.one(grp)
    k = m.degree
    if m.kind == "stabilize":
        if k < 1:
            raise ChainError("stabilize needs degree >= 1")
        D = C.extended(k)
        labels = [list(ls) for ls in D.labels]
        if m.labels:
            hi, lo = m.labels
        else:
            hi, lo = _fresh(labels[k], f"s{k}_"), _fresh(labels[k - 1], f"s{k - 1}_")
        if hi in labels[k] or lo in labels[k - 1]:
            raise ChainError("stabilization label already in use")
        labels[k].append(hi)
        labels[k - 1].append(lo)
        d = list(D.d)
        n_hi, n_lo = len(labels[k]), len(labels[k - 1])
        # d_k gains a row (new e_k) and a column (new e_{k-1})
        rows = [list(r) + [GroupRingElem.zero(grp)] for r in d[k].rows]
        rows.append([GroupRingElem.zero(grp)] * (n_lo - 1) + [one])
        d[k] = Mat(grp, n_hi, n_lo, rows)
        if k + 1 <= D.top:
            d[k + 1] = Mat(grp, d[k + 1].nrows, n_hi,
                           [list(r) + [GroupRingElem.zero(grp)] for r in d[k + 1].rows])
        if k - 1 >= 1:
            d[k - 1] = Mat(grp, n_lo, d[k - 1].ncols,
                           list(d[k - 1].rows) + [[GroupRingElem.zero(grp)] * d[k - 1].ncols])
        C2 = BasedFreeChainComplex(grp, tuple(map(tuple, labels)), tuple(d))
        top = C2.top
        fwd = ChainMap(C, C2, tuple(_inclusion(grp, C.rank(j), C2.rank(j)) for j in range(top + 1)))
        bwd = ChainMap(C2, C, tuple(_inclusion(grp, C.rank(j), C2.rank(j)).transpose()
                                    for j in range(top + 1)))
        # id - fwd∘bwd is the projection onto the new pair; contract it
        h = [Mat.zeros(grp, C2.rank(j), C2.rank(j + 1)) for j in range(top + 1)]
        h[k - 1] = h[k - 1].with_entry(C2.rank(k - 1) - 1, C2.rank(k) - 1, one)
        w = MoveWitness(m, fwd, bwd,
                        zero_homotopy(fwd.then(bwd), identity_map(C)),
                        ChainHomotopy(identity_map(C2), bwd.then(fwd), tuple(h)), one)
        return C2, w

    if not 0 <= k <= C.top:
        raise ChainError(f"degree {k} out of range")
    n = C.rank(k)
    if m.kind == "destabilize":
        i, j = m.index, m.other
        if k < 1 or not (0 <= i < n) or not (0 <= j < C.rank(k - 1)):
            raise ChainError("destabilize: index out of range")
        dk = C.d[k]
        pattern = all(dk[i, c] == (one if c == j else GroupRingElem.zero(grp))
                      for c in range(dk.ncols))
        pattern = pattern and all(not dk[r, j] for r in range(dk.nrows) if r != i)
        above = C.boundary(k + 1)
        pattern = pattern and all(not above[r, i] for r in range(above.nrows))
        if not pattern:
            raise ChainError("destabilize: the pair is not in stabilized form")
        keep_hi = [r for r in range(n) if r != i]
        keep_lo = [c for c in range(C.rank(k - 1)) if c != j]
        labels = [list(ls) for ls in C.labels]
        labels[k] = [labels[k][r] for r in keep_hi]
        labels[k - 1] = [labels[k - 1][c] for c in keep_lo]
        d = list(C.d)
        d[k] = dk.block(keep_hi, keep_lo)
        if k + 1 <= C.top:
            d[k + 1] = above.block(range(above.nrows), keep_hi)
        if k - 1 >= 1:
            d[k - 1] = C.d[k - 1].block(keep_lo, range(C.d[k - 1].ncols))
        C2 = BasedFreeChainComplex(grp, tuple(map(tuple, labels)), tuple(d))
        keep = {k: keep_hi, k - 1: keep_lo}
        fwd_m, bwd_m = [], []
        for t in range(C.top + 1):
            ks = keep.get(t, list(range(C.rank(t))))
            S = _selection(grp, C.rank(t), ks)  # C2_t -> C_t
            bwd_m.append(S)
            fwd_m.append(S.transpose())
        fwd = ChainMap(C, C2, tuple(fwd_m))
        bwd = ChainMap(C2, C, tuple(bwd_m))
        h = [Mat.zeros(grp, C.rank(t), C.rank(t + 1)) for t in range(C.top + 1)]
        h[k - 1] = h[k - 1].with_entry(j, i, one)
        w = MoveWitness(m, fwd, bwd,
                        ChainHomotopy(identity_map(C), fwd.then(bwd), tuple(h)),
                        zero_homotopy(bwd.then(fwd), identity_map(C2)), one)
        return C2, w

    i = m.index
    if not 0 <= i < n:
        raise ChainError("move index out of range")
    d = list(C.d)
    if m.kind == "slide":
        j = m.other
        if not 0 <= j < n:
            raise ChainError("slide: second index out of range")
        r = m.coeff if m.coeff is not None else one
        if r.group != grp:
            raise RingTagError("slide coefficient over the wrong ring")
        E = _elementary(grp, n, i, j, r)  # new basis in terms of old
        Einv = _elementary(grp, n, i, j, -r)
        if k >= 1:
            d[k] = E @ C.d[k]
        if k + 1 <= C.top:
            d[k + 1] = C.d[k + 1] @ Einv
        det = one
        to_new, to_old = Einv, E
    else:
        u = m.coeff
        if u.group != grp:
            raise RingTagError("unit coefficient over the wrong ring")
        uinv = u ** -1
        E = Mat.identity(grp, n).with_entry(i, i, u)
        Einv = Mat.identity(grp, n).with_entry(i, i, uinv)
        if k >= 1:
            d[k] = E @ C.d[k]
        if k + 1 <= C.top:
            d[k + 1] = C.d[k + 1] @ Einv
        det = u
        to_new, to_old = Einv, E
    C2 = BasedFreeChainComplex(grp, C.labels, tuple(d))
    fwd_m = [Mat.identity(grp, C.rank(t)) for t in range(C.top + 1)]
    bwd_m = list(fwd_m)
    fwd_m[k], bwd_m[k] = to_new, to_old
    fwd = ChainMap(C, C2, tuple(fwd_m))
    bwd = ChainMap(C2, C, tuple(bwd_m))
    w = MoveWitness(m, fwd, bwd,
                    zero_homotopy(fwd.then(bwd), identity_map(C)),
                    zero_homotopy(bwd.then(fwd), identity_map(C2)), det)
    return C2, w


def _inclusion(group, n: int, m: int) -> Mat:
    """First-n-coordinates inclusion, n x m."""
    one, zero = GroupRingElem.one(group), GroupRingElem.zero(group)
    return Mat(group, n, m, [[one if a == b else zero for b in range(m)] for a in range(n)])


def _selection(group, n: int, keep: Sequence[int]) -> Mat:
    """len(keep) x n matrix picking the kept coordinates."""
    one, zero = GroupRingElem.one(group), GroupRingElem.zero(group)
    return Mat(group, len(keep), n, [[one if c == r else zero for c in range(n)] for r in keep])


def apply_moves(C: BasedFreeChainComplex, moves: Sequence[SimpleMove]):
    """Apply a sequence of moves; returns (C', composite forward map, witnesses)."""
    cur = C
    comp = identity_map(C)
    wits = []
    for m in moves:
        cur, w = apply_simple_move(cur, m)
        comp = comp.then(w.forward)
        wits.append(w)
    return cur, comp, wits


# -- change of coefficients -------------------------------------------------------------


def tensor_reduce(C: BasedFreeChainComplex, lam: GroupHom) -> BasedFreeChainComplex:
    if C.group != lam.source:
        raise RingTagError("tensor_reduce: complex ring does not match hom source")
    mats = [None] + [C.d[k].map_entries(lambda a: coefficient_change(a, lam), lam.target)
                     for k in range(1, C.top + 1)]
    return BasedFreeChainComplex(lam.target, C.labels, tuple(mats))


def reduce_map(f: ChainMap, lam: GroupHom) -> ChainMap:
    S, T = tensor_reduce(f.source, lam), tensor_reduce(f.target, lam)
    return ChainMap(S, T, tuple(M.map_entries(lambda a: coefficient_change(a, lam), lam.target)
                                for M in f.maps))
