"""Suspension, the boundary chain map of a pair, and pullback (stratified) chains.

Sign conventions: the suspension of C has C_{n-1} in degree n with boundary
(-1)^{n-1} d.  For a pair (X, Y) the boundary chain map in degree n is
s_n times the Y-columns of the absolute boundary, where s_1 = 1 and
s_n = (-1)^n s_{n-1}; these are exactly the signs that make it a chain map
into the suspension.

A pullback module is stored by generators in ambient coordinates
(x over Z[Gamma], y over Z[Lambda]):
  cell generators   (x_i, sigma(d x_i))   for each relative cell x_i,
  kernel generators (0, (k - 1) e_j)      for each Y-cell e_j and each
                                          generator k of ker(lambda).
sigma lifts Gamma-coefficients to Lambda through a fixed section of lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .chains.complex import BasedFreeChainComplex, ChainError, ChainMap, tensor_reduce
from .chains.homology import require_laurent
from .chains.matrix import Mat
from .foxcover import RelativeTwoComplex, fox_complex
from .grouprings.groups import AbelianGroup, FreeGroup, GroupHom, hom_apply
from .grouprings.ring import GroupRingElem, coefficient_change
from .grouprings.words import Word
from .laurent import lift


class StratifiedError(ValueError):
    pass


def suspend(C: BasedFreeChainComplex) -> BasedFreeChainComplex:
    G = C.group
    labels = [()] + [tuple(ls) for ls in C.labels]
    mats = [Mat.zeros(G, C.rank(0), 0)]
    for n in range(2, C.top + 2):
        M = C.d[n - 1]
        mats.append(M if (n - 1) % 2 == 0 else -M)
    return BasedFreeChainComplex.build(G, labels, mats)


def pair_sign(n: int) -> int:
    s = 1
    for k in range(2, n + 1):
        s *= (-1) ** k
    return s


# -- pairs from presentations ----------------------------------------------------------------


def boundary_subcomplex(X: RelativeTwoComplex, hom: GroupHom | None = None) -> RelativeTwoComplex:
    """The marked subcomplex Y as an absolute 2-complex.

    ``hom`` maps Y's generators (in sorted boundary order) to the coefficient
    group; by default it is the restriction of X's map.
    """
    gens = sorted(X.boundary_generators)
    F = FreeGroup(len(gens), tuple(X.F.names[g] for g in gens))
    where = {g: i for i, g in enumerate(gens)}
    rels = [Word(tuple((where[g], e) for g, e in X.relators[i].letters))
            for i in sorted(X.boundary_relators)]
    names = [X.relator_names[i] for i in sorted(X.boundary_relators)]
    if hom is None:
        hom = GroupHom(F, X.group, tuple(X.phi.images[g] for g in gens))
    return RelativeTwoComplex(F, tuple(rels), hom, tuple(names))


def boundary_chain_map(X: RelativeTwoComplex) -> ChainMap:
    """d: C(X, Y) -> suspension of C(Y), both over X's coefficient ring."""
    if not (X.boundary_generators or X.boundary_relators or X.basepoint_relative):
        raise StratifiedError("the pair has no marked boundary")
    G = X.group
    rel = fox_complex(X)
    Y = boundary_subcomplex(X)
    target = suspend(fox_complex(Y))
    absolute = fox_complex(RelativeTwoComplex(X.F, X.relators, X.phi, X.relator_names))
    # absolute cell orders: degree 0 [p], degree 1 generators, degree 2 relators
    interior = {1: X.interior_generators(), 2: X.interior_relators()}
    boundary = {0: [0], 1: sorted(X.boundary_generators), 2: sorted(X.boundary_relators)}
    top = max(rel.top, target.top)
    maps = []
    for n in range(top + 1):
        rows = interior.get(n, []) if n <= rel.top else []
        cols = boundary.get(n - 1, []) if n >= 1 else []
        s = pair_sign(n)
        data = [[absolute.d[n][i, j] * s for j in cols] for i in rows]
        maps.append(Mat(G, len(rows), len(cols), data))
    f = ChainMap(rel.extended(top), target.extended(top), tuple(maps))
    if not f.commutes():
        raise StratifiedError("boundary map is not a chain map (sign or basis mismatch)")
    return f


# -- integer data of lambda --------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaData:
    """Section and kernel of an abelian homomorphism, via Smith normal form."""

    lam: GroupHom

    def __post_init__(self):
        L, G = self.lam.source, self.lam.target
        if not (isinstance(L, AbelianGroup) and isinstance(G, AbelianGroup)):
            raise StratifiedError("stratified chains need abelian Lambda and Gamma")
        rows = [list(im) for im in self.lam.images]
        r = G.free_rank
        for k, n in enumerate(G.torsion):
            row = [0] * G.ngens
            row[r + k] = n
            rows.append(row)
        M = Matrix(rows) if rows and G.ngens else Matrix.zeros(len(rows), max(G.ngens, 0))
        object.__setattr__(self, "_M", M)

    @property
    def kernel(self) -> list[tuple]:
        """Generators of ker(lambda) as elements of Lambda (nonidentity, deduplicated)."""
        return _kernel(self)

    def section(self, g) -> tuple:
        return _section(self, tuple(g))


@lru_cache(maxsize=None)
def _snd(ld: LambdaData):
    M = ld._M
    if M.cols == 0:
        return None
    return smith_normal_decomp(M, domain=ZZ)


@lru_cache(maxsize=None)
def _kernel(ld: LambdaData) -> list[tuple]:
    L = ld.lam.source
    a = L.ngens
    M = ld._M
    if M.cols == 0:
        cand = [L.generator(i) for i in range(a)]
    else:
        S, U, _ = _snd(ld)
        cand = []
        for i in range(M.rows):
            if all(S[i, j] == 0 for j in range(S.cols)):
                cand.append(L.normalize([int(U[i, j]) for j in range(a)]))
    out = []
    for v in cand:
        if v != L.identity() and v not in out:
            out.append(v)
    return sorted(out)


@lru_cache(maxsize=None)
def _section(ld: LambdaData, g: tuple) -> tuple:
    L, G = ld.lam.source, ld.lam.target
    if g == G.identity():
        return L.identity()
    snd = _snd(ld)
    if snd is None:
        raise StratifiedError("lambda is not surjective")
    S, U, V = snd
    eV = Matrix([list(g)]) * V
    u = []
    for i in range(S.rows):
        s = S[i, i] if i < S.cols else 0
        val = eV[0, i] if i < S.cols else 0
        if s == 0:
            if val != 0:
                raise StratifiedError(f"lambda is not surjective: {G.format_element(g)} has no preimage")
            u.append(0)
        else:
            if val % s:
                raise StratifiedError(f"lambda is not surjective: {G.format_element(g)} has no preimage")
            u.append(int(val // s))
    v = Matrix([u]) * U
    pre = L.normalize([int(v[0, j]) for j in range(L.ngens)])
    if hom_apply(ld.lam, pre) != G.normalize(g):
        raise StratifiedError("section check failed")
    return pre


def lift_coeff(a: GroupRingElem, ld: LambdaData) -> GroupRingElem:
    L = ld.lam.source
    acc: dict = {}
    for g, c in a.terms:
        h = ld.section(g)
        acc[h] = acc.get(h, 0) + c
    return GroupRingElem(L, acc)


# -- stratified complex -----------------------------------------------------------------------


@dataclass(frozen=True)
class MemberGen:
    label: str
    kind: str  # "cell" or "kernel"
    x: tuple  # over Z[Gamma], length rank CXY_n
    y: tuple  # over Z[Lambda], length rank CY_{n-1}


@dataclass(frozen=True)
class StratifiedComplex:
    gamma: BasedFreeChainComplex
    lam_boundary: BasedFreeChainComplex
    d: ChainMap
    lam: GroupHom
    members: tuple  # members[n] = tuple of MemberGen
    boundary: tuple  # boundary[n]: Mat over Z[Lambda], gens_n x gens_{n-1}

    @property
    def top(self) -> int:
        return len(self.members) - 1

    @property
    def Lambda(self):
        return self.lam.source

    def suspended_y(self, n: int) -> Mat:
        """Boundary of the suspended Lambda chains from degree n (y-part)."""
        return suspend(self.lam_boundary).extended(self.top).boundary(n)

    def ambient_boundary(self, n: int, g: MemberGen):
        x = [GroupRingElem.zero(self.gamma.group)] * self.gamma.rank(n - 1)
        A = self.gamma.boundary(n)
        i = self.gamma.labels[n].index(g.label.split("|")[0]) if g.kind == "cell" else None
        if i is not None:
            x = list(A.rows[i])
        Sy = self.suspended_y(n)
        y = [GroupRingElem.zero(self.Lambda)] * Sy.ncols
        for j, c in enumerate(g.y):
            if c.terms:
                y = [a + c * b for a, b in zip(y, Sy.rows[j])]
        return tuple(x), tuple(y)

    def combine(self, n: int, coeffs: Sequence[GroupRingElem]):
        """Z[Lambda]-combination of degree-n generators in ambient coordinates."""
        Gm = self.gamma.group
        x = [GroupRingElem.zero(Gm)] * self.gamma.rank(n)
        y = [GroupRingElem.zero(self.Lambda)] * self.lam_boundary.extended(self.top).rank(n - 1) \
            if n >= 1 else []
        for c, g in zip(coeffs, self.members[n]):
            if not c.terms:
                continue
            cg = coefficient_change(c, self.lam)
            x = [a + cg * b for a, b in zip(x, g.x)]
            y = [a + c * b for a, b in zip(y, g.y)]
        return tuple(x), tuple(y)

    def check_boundary(self) -> bool:
        """Each stored boundary row reproduces the ambient boundary of its generator."""
        for n in range(1, self.top + 1):
            for g, row in zip(self.members[n], self.boundary[n].rows):
                if self.ambient_boundary(n, g) != self.combine(n - 1, row):
                    return False
        return True

    def squares_to_zero(self) -> bool:
        for n in range(2, self.top + 1):
            P = self.boundary[n] @ self.boundary[n - 1]
            for row in P.rows:
                x, y = self.combine(n - 2, row)
                if any(a.terms for a in x + y):
                    return False
        return True


def _kernel_gen_index(j: int, k: int, nk: int, ncell: int) -> int:
    return ncell + j * nk + k


def _suspension_target(CY: BasedFreeChainComplex, lam: GroupHom) -> BasedFreeChainComplex:
    return suspend(tensor_reduce(CY, lam))


def build_stratified(CXY: BasedFreeChainComplex, CY: BasedFreeChainComplex, d: ChainMap,
                     lam: GroupHom) -> StratifiedComplex:
    if CY.group != lam.source or CXY.group != lam.target:
        raise StratifiedError("rings do not match lambda")
    require_laurent(lam.source)
    CXY, CY = CXY.trimmed(), CY.trimmed()
    top = max(CXY.top, CY.top + 1)
    CXY_, target = CXY.extended(top), _suspension_target(CY, lam).extended(top)
    if d.source.trimmed().extended(top) != CXY_ or d.target.trimmed().extended(top) != target:
        raise StratifiedError("d must map the relative chains into the lambda-reduced suspension")
    if not d.commutes():
        raise StratifiedError("d is not a chain map")
    ld = LambdaData(lam)
    kern = ld.kernel
    L = lam.source
    one = GroupRingElem.one(L)
    kpolys = [GroupRingElem.monomial(L, k) - one for k in kern]
    CYs = suspend(CY).extended(top)
    members, boundary = [], []
    for n in range(top + 1):
        gens = []
        dn = d.at(n)
        for i, lab in enumerate(CXY_.labels[n]):
            x = tuple(GroupRingElem.one(CXY.group) if l == i else GroupRingElem.zero(CXY.group)
                      for l in range(CXY_.rank(n)))
            y = tuple(lift_coeff(a, ld) for a in dn.rows[i])
            gens.append(MemberGen(lab, "cell", x, y))
        for j, lab in enumerate(CYs.labels[n]):
            for k, kp in enumerate(kpolys):
                y = tuple(kp if l == j else GroupRingElem.zero(L) for l in range(CYs.rank(n)))
                x = tuple(GroupRingElem.zero(CXY.group) for _ in range(CXY_.rank(n)))
                gens.append(MemberGen(f"({L.format_element(kern[k])}-1){lab}", "kernel", x, y))
        members.append(tuple(gens))
    S = StratifiedComplex(CXY_, CY.extended(top - 1) if top >= 1 else CY, d, lam,
                          tuple(members), ())
    bmats = [Mat.zeros(L, len(members[0]), 0)]
    nk = len(kern)
    for n in range(1, top + 1):
        rows = []
        A = CXY_.boundary(n)
        Sy = CYs.boundary(n)
        nprev = len(members[n - 1])
        ncell_prev = CXY_.rank(n - 1)
        for g in members[n]:
            row = [GroupRingElem.zero(L)] * nprev
            if g.kind == "cell":
                i = CXY_.labels[n].index(g.label)
                coeffs = [lift_coeff(a, ld) for a in A.rows[i]]
                row[:ncell_prev] = coeffs
                _, y_amb = S.ambient_boundary(n, g)
                _, y_cells = S.combine(n - 1, row)
                resid = [a - b for a, b in zip(y_amb, y_cells)]
                for m, r in enumerate(resid):
                    if not r.terms:
                        continue
                    sol = lift(L, 1, [[kp] for kp in kpolys], [r]) if kpolys else None
                    if sol is None:
                        raise StratifiedError("residual is not in the kernel ideal of lambda")
                    for k, c in enumerate(sol):
                        row[_kernel_gen_index(m, k, nk, ncell_prev)] += c
            else:
                j, k = divmod(members[n].index(g) - CXY_.rank(n), nk)
                for m, c in enumerate(Sy.rows[j]):
                    if c.terms:
                        row[_kernel_gen_index(m, k, nk, ncell_prev)] += c
            rows.append(row)
        bmats.append(Mat(L, len(members[n]), nprev, rows))
    S = StratifiedComplex(CXY_, S.lam_boundary, d, lam, tuple(members), tuple(bmats))
    if not S.check_boundary():
        raise StratifiedError("internal: pullback boundary does not match ambient boundary")
    return S


def reduce_stratified(S: StratifiedComplex) -> BasedFreeChainComplex:
    """Quotient by the ker(lambda) stratum, then reduce coefficients to Z[Gamma].

    The cell generators project onto the relative cells, so the result is
    based on the same labels; its matrices are the lambda-images of the
    cell-to-cell boundary coefficients.
    """
    G = S.gamma.group
    mats = []
    for n in range(1, S.top + 1):
        nc, pc = S.gamma.rank(n), S.gamma.rank(n - 1)
        B = S.boundary[n]
        rows = [[coefficient_change(B[i, j], S.lam) for j in range(pc)] for i in range(nc)]
        mats.append(Mat(G, nc, pc, rows))
    return BasedFreeChainComplex.build(G, S.gamma.labels, mats).trimmed()


def stratified_from_pair(X: RelativeTwoComplex, psi: GroupHom, lam: GroupHom) -> StratifiedComplex:
    """Stratified chains of (X, Y) with Y's map psi into Lambda and lambda: Lambda -> Gamma."""
    Y = boundary_subcomplex(X, psi)
    for i, im in enumerate(psi.images):
        if hom_apply(lam, im) != boundary_subcomplex(X).phi.images[i]:
            raise StratifiedError(f"lambda o psi differs from phi on {Y.F.names[i]}")
    d = boundary_chain_map(X)
    return build_stratified(fox_complex(X), fox_complex(Y), d, lam)


# -- natural map --------------------------------------------------------------------------------


@dataclass(frozen=True)
class StratifiedMap:
    source: BasedFreeChainComplex  # relative chains over Z[Lambda]
    target: StratifiedComplex
    coeffs: tuple  # coeffs[n]: Mat over Z[Lambda], source basis x target generators
    ambient: tuple  # ambient[n][i] = (x, y) image of basis element i

    def commutes(self) -> bool:
        S = self.target
        for n in range(1, S.top + 1):
            for i in range(self.source.extended(S.top).rank(n)):
                x, y = self.ambient[n][i]
                row = self.source.extended(S.top).boundary(n).rows[i]
                lhs = _ambient_sum(S, n - 1, row, self.ambient[n - 1])
                # boundary of (x, y) in the pullback
                A = S.gamma.boundary(n)
                bx = [GroupRingElem.zero(S.gamma.group)] * A.ncols
                for l, c in enumerate(x):
                    if c.terms:
                        bx = [a + c * b for a, b in zip(bx, A.rows[l])]
                Sy = S.suspended_y(n)
                by = [GroupRingElem.zero(S.Lambda)] * Sy.ncols
                for l, c in enumerate(y):
                    if c.terms:
                        by = [a + c * b for a, b in zip(by, Sy.rows[l])]
                if lhs != (tuple(bx), tuple(by)):
                    return False
        return True


def _ambient_sum(S: StratifiedComplex, n: int, coeffs, images):
    Gm = S.gamma.group
    x = [GroupRingElem.zero(Gm)] * S.gamma.rank(n)
    ylen = S.lam_boundary.extended(S.top).rank(n - 1) if n >= 1 else 0
    y = [GroupRingElem.zero(S.Lambda)] * ylen
    for c, (ix, iy) in zip(coeffs, images):
        if not c.terms:
            continue
        cg = coefficient_change(c, S.lam)
        x = [a + cg * b for a, b in zip(x, ix)]
        y = [a + c * b for a, b in zip(y, iy)]
    return tuple(x), tuple(y)


def natural_map(X_lifted: RelativeTwoComplex, S: StratifiedComplex) -> StratifiedMap:
    """The map forced by the pullback: a cell goes to (its lambda-reduction, its boundary in Y).

    ``X_lifted`` is the pair with its map lifted to Lambda.  Both projections
    of the result are checked, which also pins the map down uniquely.
    """
    lam = S.lam
    if X_lifted.group != lam.source:
        raise StratifiedError("the lifted pair must have Lambda coefficients")
    C = fox_complex(X_lifted)
    dL = boundary_chain_map(X_lifted)
    if tensor_reduce(C, lam).extended(S.top) != S.gamma:
        raise StratifiedError("the lift is not compatible: reduced chains differ")
    ld = LambdaData(lam)
    kern = ld.kernel
    nk = len(kern)
    L = lam.source
    one = GroupRingElem.one(L)
    kpolys = [GroupRingElem.monomial(L, k) - one for k in kern]
    Ce = C.extended(S.top)
    coeffs, ambient = [], []
    for n in range(S.top + 1):
        rows, imgs = [], []
        dn = dL.at(n)
        for i in range(Ce.rank(n)):
            row = [GroupRingElem.zero(L)] * len(S.members[n])
            row[i] = one
            y_true = tuple(dn.rows[i])
            y_cell = S.members[n][i].y
            for m, (a, b) in enumerate(zip(y_true, y_cell)):
                r = a - b
                if not r.terms:
                    continue
                sol = lift(L, 1, [[kp] for kp in kpolys], [r]) if kpolys else None
                if sol is None:
                    raise StratifiedError("lift diagram does not commute")
                for k, c in enumerate(sol):
                    row[Ce.rank(n) + m * nk + k] += c
            x = S.members[n][i].x
            imgs.append((x, y_true))
            if S.combine(n, row) != (x, y_true):
                raise StratifiedError("internal: generator expansion mismatch")
            rows.append(row)
        coeffs.append(Mat(L, Ce.rank(n), len(S.members[n]), rows))
        ambient.append(tuple(imgs))
    f = StratifiedMap(Ce, S, tuple(coeffs), tuple(ambient))
    if not f.commutes():
        raise StratifiedError("natural map fails to commute with the pullback boundary")
    return f


# -- container file ------------------------------------------------------------------------------
#
#   [gamma]            a complex file (relative chains over Z[Gamma])
#   [lambda-boundary]  a complex file (chains of Y over Z[Lambda])
#   [lambda]           source: <ring>, target: <ring>, then "i -> element" lines
#   [d]                "d{n}[i,j] = element" entries of the boundary chain map


def format_stratified(S: StratifiedComplex) -> str:
    from .chains.fileformat import format_complex, format_ring
    from .grouprings.ring import format_canonical

    lam = S.lam
    out = ["[gamma]", format_complex(S.gamma.trimmed()).rstrip("\n"),
           "[lambda-boundary]", format_complex(S.lam_boundary.trimmed()).rstrip("\n"),
           "[lambda]", f"source: {format_ring(lam.source)}", f"target: {format_ring(lam.target)}"]
    for i, im in enumerate(lam.images):
        out.append(f"{i} -> {' '.join(str(x) for x in im) or '.'}")
    out.append("[d]")
    for n, M in enumerate(S.d.maps):
        for i in range(M.nrows):
            for j in range(M.ncols):
                if M[i, j].terms:
                    out.append(f"d{n}[{i},{j}] = {format_canonical(M[i, j])}")
    return "\n".join(out) + "\n"


def parse_stratified(text: str) -> StratifiedComplex:
    import re

    from .chains.fileformat import FormatError, parse_complex_lines, parse_ring
    from .grouprings.ring import parse_elem

    blocks: dict[str, tuple[int, list[str]]] = {}
    current = None
    for n, raw in enumerate(text.splitlines()):
        s = raw.split("#", 1)[0].strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
            if current in blocks:
                raise FormatError(f"section [{current}] given twice", n + 1, 1)
            blocks[current] = (n + 1, [])
        elif current is not None:
            blocks[current][1].append(raw)
        elif s:
            raise FormatError("text before the first section", n + 1, 1)
    for need in ("gamma", "lambda-boundary", "lambda", "d"):
        if need not in blocks:
            raise FormatError(f"missing [{need}] section")
    CXY = parse_complex_lines(blocks["gamma"][1], blocks["gamma"][0])
    CY = parse_complex_lines(blocks["lambda-boundary"][1], blocks["lambda-boundary"][0])
    start, lines = blocks["lambda"]
    src = tgt = None
    images = {}
    for n, raw in enumerate(lines, start=start + 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("source:"):
            src = parse_ring(s[7:], n)
        elif s.startswith("target:"):
            tgt = parse_ring(s[7:], n)
        elif "->" in s:
            i, _, body = s.partition("->")
            body = body.strip()
            images[int(i)] = () if body == "." else tuple(int(x) for x in body.split())
        else:
            raise FormatError(f"cannot parse {s!r}", n, 1)
    if src is None or tgt is None:
        raise FormatError("[lambda] needs source: and target: lines", start, 1)
    lam = GroupHom(src, tgt, tuple(images.get(i, tgt.identity()) for i in range(src.ngens)))
    top = max(CXY.top, CY.top + 1)
    CXYe, target = CXY.extended(top), _suspension_target(CY, lam).extended(top)
    data = [[[GroupRingElem.zero(tgt)] * target.rank(k) for _ in range(CXYe.rank(k))]
            for k in range(top + 1)]
    start, lines = blocks["d"]
    pat = re.compile(r"d(\d+)\[(\d+),(\d+)\]\s*=\s*(.+)$")
    for n, raw in enumerate(lines, start=start + 1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        m = pat.match(s)
        if not m:
            raise FormatError(f"cannot parse {s!r}", n, 1)
        k, i, j = (int(m.group(t)) for t in (1, 2, 3))
        try:
            data[k][i][j] = parse_elem(m.group(4), tgt)
        except (IndexError, ValueError) as exc:
            raise FormatError(str(exc), n, 1) from None
    d = ChainMap(CXYe, target, tuple(Mat(tgt, CXYe.rank(k), target.rank(k), data[k])
                                     for k in range(top + 1)))
    return build_stratified(CXY, CY, d, lam)
