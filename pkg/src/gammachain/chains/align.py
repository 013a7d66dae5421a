"""Make a chain map basis-preserving on 0- and 1-chains by simple moves.

Given f: C -> D over Z[G] whose reduction is an H_0 isomorphism and an H_1
epimorphism, produce simple moves on both sides and a map f': C' -> D' whose
degree-0 and degree-1 matrices are permutation matrices, together with a
homotopy H: C -> D' with  beta f - f' alpha = dH + Hd,  where alpha and beta
are the composite forward maps of the moves.

Outline (all over Z[G]):
  1. cancel unit entries of d_1 until both sides have a single 0-cell;
  2. make f_0 = 1 by a unit move on D_0 and a homotopy k_0 with values in D_1;
  3. stabilize D with one (2,1) pair per 1-cell c_i of C and slide the new
     1-cell to s_i + f(c_i); stabilize C with one pair per 1-cell d_j of D and
     slide the new 1-cell to t_j + x_j, where d x_j = d d_j and x_j is
     corrected by cycles of C until d_j - f(x_j) is a boundary;
  4. solve the remaining homotopy k_1 by module lifting and read off f'.
Only degrees <= 2 are touched.  Any failed lift is reported as undecided.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..grouprings.groups import AbelianGroup, GroupHom
from ..grouprings.ring import GroupRingElem, augmentation
from ..laurent import AugmentedSystem
from .complex import (BasedFreeChainComplex, ChainHomotopy, ChainMap, SimpleMove,
                      apply_simple_move, identity_map, reduce_map)
from .homology import h0_trivial_check, kernel_generators, realization_hypotheses_check
from .matrix import Mat
from .reduction import reduce_complex


class AlignError(ValueError):
    """The input does not satisfy the alignment hypotheses."""


@dataclass
class AlignResult:
    status: str  # "aligned" or "undecided"
    f: ChainMap
    source: BasedFreeChainComplex | None = None
    target: BasedFreeChainComplex | None = None
    map: ChainMap | None = None
    source_moves: list = field(default_factory=list)
    target_moves: list = field(default_factory=list)
    homotopy: tuple = ()
    reason: str = ""

    @property
    def aligned(self) -> bool:
        return self.status == "aligned"

    def describe(self) -> str:
        if not self.aligned:
            return f"undecided: {self.reason}"
        return (f"aligned with {len(self.source_moves)} source moves and "
                f"{len(self.target_moves)} target moves; ranks {self.source.ranks()} -> "
                f"{self.target.ranks()}")


# -- bookkeeping --------------------------------------------------------------------------------


def _zeros(G, n, m):
    return Mat.zeros(G, n, m)


class _Track:
    """Current complex plus composite forward/backward maps and the homotopy s
    with  id - A Ab = d s + s d  on the original complex."""

    def __init__(self, C: BasedFreeChainComplex, top: int):
        self.orig = C = C.extended(top)
        self.top = top
        self.cur = C
        G = C.group
        self.moves: list[SimpleMove] = []
        self.A = [Mat.identity(G, C.rank(k)) for k in range(top + 1)]
        self.Ab = [Mat.identity(G, C.rank(k)) for k in range(top + 1)]
        self.s = [_zeros(G, C.rank(k), C.rank(k + 1)) for k in range(top + 1)]

    def apply(self, m: SimpleMove):
        new, w = apply_simple_move(self.cur, m)
        new = new.extended(self.top)
        src = w.source_homotopy
        # orient the witness homotopy as  id - bwd fwd = d s_w + s_w d
        sign = 1 if src.f == identity_map(src.f.source) else -1
        top = self.top
        for k in range(top + 1):
            sw = src.at(k)
            if sign < 0:
                sw = -sw
            self.s[k] = self.s[k] + self.A[k] @ sw @ self.Ab[k + 1] if k < top else self.s[k]
        self.A = [self.A[k] @ w.forward.at(k) for k in range(top + 1)]
        self.Ab = [w.backward.at(k) @ self.Ab[k] for k in range(top + 1)]
        self.cur = new
        self.moves.append(m)

    def d(self, k: int) -> Mat:
        return self.cur.boundary(k)


def _is_permutation(M: Mat) -> bool:
    if M.nrows != M.ncols:
        return False
    one = GroupRingElem.one(M.group)
    cols = set()
    for r in M.rows:
        nz = [j for j, a in enumerate(r) if a.terms]
        if len(nz) != 1 or r[nz[0]] != one:
            return False
        cols.add(nz[0])
    return len(cols) == M.nrows


def is_basis_preserving(f: ChainMap, degrees=(0, 1)) -> bool:
    return all(_is_permutation(f.at(k)) for k in degrees)


def _row_mat(G, v, n):
    return Mat(G, 1, n, [list(v)])


def _lift_rows(G, basis: Mat, targets: Mat):
    """Matrix X with X @ basis == targets, or None if some row is outside the row span."""
    n = basis.nrows
    out = []
    system = None
    for r in targets.rows:
        if not any(a.terms for a in r):
            out.append([GroupRingElem.zero(G)] * n)
            continue
        if n == 0:
            return None
        if system is None:
            system = AugmentedSystem(G, basis.ncols, [list(b) for b in basis.rows])
        c = system.lift(list(r))
        if c is None:
            return None
        out.append(c)
    return Mat(G, targets.nrows, n, out)


def _fresh_label(taken: set, base: str) -> str:
    lab = base
    while lab in taken:
        lab += "'"
    taken.add(lab)
    return lab


def _size(a: GroupRingElem) -> int:
    return sum(abs(c) for _, c in a.terms)


def _cost(M: Mat) -> int:
    return sum(_size(a) for r in M.rows for a in r)


def _ratios(a: GroupRingElem, b: GroupRingElem):
    """Monomials r with a + r b cancelling some term of a."""
    G = a.group
    seen = set()
    for ga, ca in a.terms:
        for gb, cb in b.terms:
            if ca % cb == 0:
                g = G.mul(ga, G.inv(gb))
                key = (g, -ca // cb)
                if key not in seen:
                    seen.add(key)
                    yield GroupRingElem.monomial(G, g, -ca // cb)


def _has_unit(M: Mat) -> bool:
    return any(a.terms and a.unit_part() is not None for r in M.rows for a in r)


def _improving_slide(C: BasedFreeChainComplex, k: int):
    """A slide in degree k or k-1 that makes a unit entry in d_k or shrinks d_k."""
    M = C.boundary(k)
    best, best_cost = None, _cost(M)
    moves = []
    for i in range(M.nrows):
        for j in range(M.nrows):
            if i != j:
                for c in range(M.ncols):
                    moves += [SimpleMove("slide", k, i, j, r) for r in _ratios(M[i, c], M[j, c])]
    for c in range(M.ncols):
        for c2 in range(M.ncols):
            if c != c2:
                for i in range(M.nrows):
                    # column c2 becomes c2 - r c
                    moves += [SimpleMove("slide", k - 1, c, c2, -r) for r in _ratios(M[i, c2], M[i, c])]
    for m in moves:
        N = apply_simple_move(C, m)[0].boundary(k)
        if _has_unit(N):
            return m
        cost = _cost(N)
        if cost < best_cost:
            best, best_cost = m, cost
    return best


def _cancel_zero_cells(tr: _Track, rounds: int = 40):
    for _ in range(rounds):
        if tr.cur.rank(0) <= 1:
            return
        _, moves, _ = reduce_complex(tr.cur, degrees=(1,))
        for m in moves:
            tr.apply(m)
        if tr.cur.rank(0) <= 1:
            return
        m = _improving_slide(tr.cur, 1)
        if m is None:
            return
        tr.apply(m)


# -- the alignment ------------------------------------------------------------------------------


def check_hypotheses(f: ChainMap, lam: GroupHom | None = None):
    if f.source.group != f.target.group:
        raise AlignError("source and target must be over the same ring")
    if not isinstance(f.source.group, AbelianGroup):
        raise AlignError("alignment needs an abelian coefficient group")
    if not f.commutes():
        raise AlignError("the input is not a chain map")
    g = reduce_map(f, lam) if lam is not None else f
    v = realization_hypotheses_check(g)
    if not v:
        raise AlignError(f"hypotheses fail: {v.reason}")
    if not h0_trivial_check(f.source):
        raise AlignError("H0 of the source is not the trivial module")


def align_one_skeleton(f: ChainMap, lam: GroupHom | None = None, check: bool = True) -> AlignResult:
    """Align f on 0- and 1-chains; see the module docstring for the construction."""
    if check:
        check_hypotheses(f, lam)
    C0, D0 = f.source, f.target
    G = C0.group
    top = max(C0.top, D0.top, 2)
    if is_basis_preserving(f):
        return _finish(f, _Track(C0, top), _Track(D0, top), [None] * (top + 1))

    cs, ds = _Track(C0, top), _Track(D0, top)
    F = [f.at(k) for k in range(top + 1)]

    def transported(k):
        return cs.Ab[k] @ F[k] @ ds.A[k]

    # 1. single 0-cell on each side
    for tr in (cs, ds):
        _cancel_zero_cells(tr)
    if cs.cur.rank(0) != 1 or ds.cur.rank(0) != 1:
        return AlignResult("undecided", f, reason="could not cancel down to a single 0-cell")

    # 2. f_0 = 1
    u = transported(0)[0, 0]
    if u.unit_part() is not None:
        ds.apply(SimpleMove("unit", 0, 0, coeff=u))
    else:
        eps = augmentation(u)
        if eps not in (1, -1):
            raise AlignError("f_0 does not induce an isomorphism on H_0")
        if eps == -1:
            ds.apply(SimpleMove("unit", 0, 0, coeff=-GroupRingElem.one(G)))
    u = transported(0)[0, 0]
    k0 = _lift_rows(G, ds.d(1), Mat(G, 1, 1, [[u - 1]]))
    if k0 is None:
        return AlignResult("undecided", f, reason="no homotopy found at cap (degree 0)")
    k0 = -k0  # f~ = f + d k + k d has f~_0 = 1
    Ft1 = transported(1) + cs.d(1) @ k0
    if _is_permutation(Ft1) and not any(a.terms for r in k0.rows for a in r):
        return _finish(f, cs, ds, [k0] + [None] * top, want1=Ft1)

    # 3a. cycles of C and the target data for the new source 1-cells
    m, n = cs.cur.rank(1), ds.cur.rank(1)
    dC1, dD1, dD2 = cs.d(1), ds.d(1), ds.d(2)
    xs = []
    if n:
        cyc = kernel_generators(dC1) if m else []
        cyc_img = [list((_row_mat(G, z, m) @ Ft1).rows[0]) for z in cyc]
        for j in range(n):
            x = _lift_rows(G, dC1, dD1.block([j], [0]))
            if x is None:
                return AlignResult("undecided", f, reason=f"boundary of target 1-cell {j} "
                                                          "does not lift to the source")
            xv = list(x.rows[0])
            r = Mat.identity(G, n).block([j], range(n)) - _row_mat(G, xv, m) @ Ft1
            coeffs = _lift_rows(G, Mat.from_rows(G, cyc_img + [list(b) for b in dD2.rows], n)
                                if cyc_img or dD2.nrows else Mat.zeros(G, 0, n), r)
            if coeffs is None:
                return AlignResult("undecided", f, reason="no homotopy found at cap "
                                                          f"(target 1-cell {j} not hit on H_1)")
            a = coeffs.rows[0][: len(cyc)]
            for al, z in zip(a, cyc):
                xv = [p + al * q for p, q in zip(xv, z)]
            xs.append(xv)

    # 3b. stabilize and slide on both sides
    taken_d1, taken_d2 = set(ds.cur.labels[1]), set(ds.cur.labels[2])
    for i in range(m):
        lab = cs.cur.labels[1][i]
        ds.apply(SimpleMove("stabilize", 2, labels=(_fresh_label(taken_d2, lab + "~"),
                                                    _fresh_label(taken_d1, lab))))
        for j in range(n):
            c = Ft1[i, j]
            if c.terms:
                ds.apply(SimpleMove("slide", 1, n + i, j, c))
    taken_c1, taken_c2 = set(cs.cur.labels[1]), set(cs.cur.labels[2])
    for j in range(n):
        lab = ds.cur.labels[1][j]
        cs.apply(SimpleMove("stabilize", 2, labels=(_fresh_label(taken_c2, lab + "~"),
                                                    _fresh_label(taken_c1, lab))))
        for i, c in enumerate(xs[j]):
            if c.terms:
                cs.apply(SimpleMove("slide", 1, m + j, i, c))

    # 4. wanted degree-1 map: c_i -> s_i, t_j -> d_j
    one = GroupRingElem.one(G)
    W = Mat.zeros(G, m + n, n + m)
    for i in range(m):
        W = W.with_entry(i, n + i, one)
    for j in range(n):
        W = W.with_entry(m + j, j, one)
    k0p = Mat(G, 1, n + m, [list(k0.rows[0]) + [GroupRingElem.zero(G)] * m])
    return _finish(f, cs, ds, [k0p] + [None] * top, want1=W)


def _finish(f, cs: _Track, ds: _Track, k: list, want1: Mat | None = None) -> AlignResult:
    """Solve k_1, assemble f' and H, and verify everything."""
    G = cs.cur.group
    top = cs.top
    F = [f.at(k_) for k_ in range(top + 1)]
    Fpp = [cs.Ab[j] @ F[j] @ ds.A[j] for j in range(top + 1)]
    C1, D1 = cs.cur, ds.cur
    kk = [k[j] if k[j] is not None else _zeros(G, C1.rank(j), D1.rank(j + 1))
          for j in range(top + 1)]
    if want1 is not None:
        resid = want1 - Fpp[1] - C1.boundary(1) @ kk[0]
        k1 = _lift_rows(G, D1.boundary(2), resid)
        if k1 is None:
            return AlignResult("undecided", f, reason="no homotopy found at cap (degree 1)")
        kk[1] = k1
    maps = [Fpp[j] + kk[j] @ D1.boundary(j + 1) + (C1.boundary(j) @ kk[j - 1] if j else Fpp[0].scale(0))
            for j in range(top + 1)]
    fp = ChainMap(C1, D1, tuple(maps))
    alpha = ChainMap(cs.orig, C1, tuple(cs.A))
    beta = ChainMap(ds.orig, D1, tuple(ds.A))
    fo = ChainMap(cs.orig, ds.orig, tuple(F))
    H = tuple(cs.s[j] @ F[j + 1] @ ds.A[j + 1] - cs.A[j] @ kk[j] if j < top
              else _zeros(G, cs.orig.rank(j), D1.rank(j + 1)) for j in range(top + 1))
    hom = ChainHomotopy(fo.then(beta), alpha.then(fp), H)
    if not (fp.commutes() and is_basis_preserving(fp) and hom.holds()):
        return AlignResult("undecided", f, reason="internal verification failed")
    return AlignResult("aligned", f, C1, D1, fp, list(cs.moves), list(ds.moves), H,
                       "basis-preserving in degrees 0 and 1")


# -- independent replay check ---------------------------------------------------------------------


def replay_check(res: AlignResult) -> tuple[bool, str]:
    """Replay both move lists from scratch and confirm every postcondition."""
    if not res.aligned:
        return False, "not aligned"
    f = res.f
    top = max(res.source.top, res.target.top, f.source.top, f.target.top)
    out = []
    for X, moves, want in ((f.source, res.source_moves, res.source),
                           (f.target, res.target_moves, res.target)):
        cur = X.extended(top)
        comp = [Mat.identity(X.group, cur.rank(k)) for k in range(top + 1)]
        for mv in moves:
            cur, w = apply_simple_move(cur, mv)
            cur = cur.extended(top)
            if not w.verify():
                return False, f"witness for {mv.kind} fails"
            comp = [comp[k] @ w.forward.at(k) for k in range(top + 1)]
        if cur != want.extended(top):
            return False, "replayed complex differs from the reported one"
        out.append((X.extended(top), cur, comp))
    (Cx, C1, A), (Dx, D1, B) = out
    fp = ChainMap(C1, D1, tuple(res.map.at(k) for k in range(top + 1)))
    if not fp.commutes():
        return False, "f' is not a chain map"
    for k in (0, 1):
        if not _is_permutation(fp.at(k)):
            return False, f"f' is not a basis bijection in degree {k}"
    for k in range(3, top + 1):
        if Cx.rank(k) != C1.rank(k) or Dx.rank(k) != D1.rank(k) \
                or Cx.boundary(k + 1) != C1.boundary(k + 1):
            return False, f"degree {k} changed"
    for k in range(top + 1):
        lhs = f.at(k) @ B[k] - A[k] @ fp.at(k)
        hk = res.homotopy[k]
        rhs = hk @ D1.boundary(k + 1)
        if k:
            rhs = rhs + Cx.boundary(k) @ res.homotopy[k - 1]
        if lhs != rhs:
            return False, f"homotopy identity fails in degree {k}"
    return True, "replayed"


# -- random instances -----------------------------------------------------------------------------


def _random_coeff(G, rng: random.Random) -> GroupRingElem:
    r = G.ngens
    g = tuple(rng.randint(-1, 1) for _ in range(r))
    return GroupRingElem.monomial(G, G.normalize(g), rng.choice((1, -1)))


def scramble(C: BasedFreeChainComplex, rng: random.Random, steps: int, max_cells: int = 3):
    """Random slides, units and low-degree stabilizations; returns (C', moves, fwd, bwd)."""
    G = C.group
    top = max(C.top, 2)
    tr = _Track(C, top)
    for _ in range(steps):
        cur = tr.cur
        choice = rng.random()
        if choice < 0.2 and cur.rank(1) < max_cells and cur.rank(0) < max_cells:
            tr.apply(SimpleMove("stabilize", 1))
        elif choice < 0.35 and cur.rank(2) < max_cells and cur.rank(1) < max_cells:
            tr.apply(SimpleMove("stabilize", 2))
        elif choice < 0.5:
            k = rng.choice([k for k in range(top + 1) if cur.rank(k)] or [0])
            if cur.rank(k):
                tr.apply(SimpleMove("unit", k, rng.randrange(cur.rank(k)), coeff=_random_coeff(G, rng)))
        else:
            ks = [k for k in range(top + 1) if cur.rank(k) >= 2]
            if ks:
                k = rng.choice(ks)
                i, j = rng.sample(range(cur.rank(k)), 2)
                tr.apply(SimpleMove("slide", k, i, j, _random_coeff(G, rng)))
    fwd = ChainMap(tr.orig, tr.cur, tuple(tr.A))
    bwd = ChainMap(tr.cur, tr.orig, tuple(tr.Ab))
    return tr.cur, list(tr.moves), fwd, bwd


def random_instance(rng: random.Random, steps: int = 4):
    """A chain map satisfying the alignment hypotheses over Z[t^±].

    C is the Fox complex of a random presentation with one or two generators
    mapping onto Z, D adds one random relator, f is the cellular inclusion,
    and both sides are scrambled by random simple moves.
    """
    from ..foxcover import RelativeTwoComplex, fox_complex
    from ..grouprings.groups import FreeGroup
    from ..grouprings.words import Word

    G = AbelianGroup(1, (), ("t",))
    ngen = rng.randint(1, 2)
    F = FreeGroup(ngen, tuple("xy"[:ngen]))
    imgs = [(1,)] + [(rng.randint(-1, 1),) for _ in range(ngen - 1)]
    phi = GroupHom(F, G, tuple(imgs))

    def kernel_word():
        letters = [(rng.randrange(ngen), rng.choice((1, -1))) for _ in range(rng.randint(1, 4))]
        w = Word()
        for g, e in letters:
            w = w * Word.gen(g, e)
        total = sum(e * imgs[g][0] for g, e in letters)
        return w * Word.gen(0, -total)

    rels = [kernel_word() for _ in range(rng.randint(0, 1))]
    rels = [w for w in rels if not w.is_identity()]
    extra = kernel_word()
    if extra.is_identity():
        extra = Word.gen(0, 1) * Word.gen(0, -1)
    X = RelativeTwoComplex(F, tuple(rels), phi)
    Y = X.with_relators(tuple(rels) + (extra,))
    C, D = fox_complex(X), fox_complex(Y)
    top = 2
    C, D = C.extended(top), D.extended(top)
    one = GroupRingElem.one(G)
    incl2 = Mat.zeros(G, C.rank(2), D.rank(2))
    for i in range(C.rank(2)):
        incl2 = incl2.with_entry(i, i, one)
    f = ChainMap(C, D, (Mat.identity(G, C.rank(0)), Mat.identity(G, C.rank(1)), incl2))
    C2, _, _, bwdC = scramble(C, rng, steps)
    D2, _, fwdD, _ = scramble(D, rng, steps)
    return bwdC.then(f).then(fwdD)
