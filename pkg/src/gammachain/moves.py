"""Decomposition records and certified handle moves.

A record is the algebraic shadow of a decomposition: a free 1-skeleton, a
map phi to Gamma, base relators (the spine), labelled W-handle attaching
words and labelled M-dual words.  The tower is built from the 1-skeleton and
base relators; level-n chains have one 2-cell per base relator and per
handle, with rows the Fox vectors over Z[Gamma_n], relative to the basepoint
and the marked boundary generators.

A move changes one handle word w to w * c where c is a product of factors:
  pair   [a, b] with a, b in ker phi,
  dual   u m^(+-1) u^-1 for a stored M-dual word m,
  grope  the boundary word of a capped grope whose caps lie in ker phi.
M-dual words use boundary generators only and lie in ker phi, so their Fox
entries vanish in the relative chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

from .chains.complex import BasedFreeChainComplex, ChainMap
from .chains.matrix import Mat
from .chains.fileformat import FormatError
from .foxcover import RelativeTwoComplex, format_hom, parse_group_sections
from .grouprings.fox import fox_jacobian_row, fox_row_with
from .grouprings.groups import FreeGroup, GroupHom, hom_apply
from .grouprings.grope import ShapeError, cap_count, grope_boundary_word, shape_height, simplest_shape, \
    subgropes_at_depth
from .grouprings.ring import GroupRingElem
from .grouprings.words import Word, WordError, commutator, format_word, parse_word
from .textio import Section, read_sections, split_list, word_format_error
from .tower import MAX_TOWER_LEVEL, TowerLevel, gamma_n_descriptor
from .verdicts import Undecided, is_undecided


class RecordError(ValueError):
    pass


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class DecompositionRecord:
    F: FreeGroup
    phi: GroupHom
    relators: tuple = ()  # base relators (Words)
    relator_names: tuple = ()
    handles: tuple = ()  # (label, Word)
    mduals: tuple = ()  # (label, Word)
    boundary_generators: frozenset = frozenset()
    notes: tuple = ()  # unchecked geometric annotations

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        names = tuple(self.relator_names) or tuple(f"r{i + 1}" for i in range(len(self.relators)))
        object.__setattr__(self, "relator_names", names)
        object.__setattr__(self, "handles", tuple((str(a), w) for a, w in self.handles))
        object.__setattr__(self, "mduals", tuple((str(a), w) for a, w in self.mduals))
        object.__setattr__(self, "boundary_generators", frozenset(self.boundary_generators))
        labels = list(names) + [a for a, _ in self.handles]
        if len(set(labels)) != len(labels):
            raise RecordError("relator and handle labels must be distinct")
        if len({a for a, _ in self.mduals}) != len(self.mduals):
            raise RecordError("M-dual labels must be distinct")
        ident = self.group.identity()
        for name, w in list(zip(names, self.relators)) + list(self.handles):
            self.F.check_word(w)
            if hom_apply(self.phi, w) != ident:
                raise RecordError(f"{name} does not lie in the kernel of phi")
        for name, w in self.mduals:
            self.F.check_word(w)
            if hom_apply(self.phi, w) != ident:
                raise RecordError(f"M-dual {name} does not lie in the kernel of phi")
            if any(g not in self.boundary_generators for g, _ in w.letters):
                raise RecordError(f"M-dual {name} uses generators off the boundary")

    @property
    def group(self):
        return self.phi.target

    def handle(self, label: str) -> Word:
        for a, w in self.handles:
            if a == label:
                return w
        raise RecordError(f"no handle labelled {label!r}")

    def mdual(self, label: str) -> Word:
        for a, w in self.mduals:
            if a == label:
                return w
        raise RecordError(f"no M-dual labelled {label!r}")

    def with_handle(self, label: str, w: Word) -> "DecompositionRecord":
        self.handle(label)
        return replace(self, handles=tuple((a, w if a == label else v) for a, v in self.handles))

    def base(self) -> RelativeTwoComplex:
        """Spine presentation used for the tower: 1-skeleton and base relators only."""
        return RelativeTwoComplex(self.F, self.relators, self.phi, self.relator_names,
                                  self.boundary_generators, frozenset(), True)

    def two_cells(self) -> list[tuple[str, Word]]:
        return list(zip(self.relator_names, self.relators)) + list(self.handles)


# -- level chains ---------------------------------------------------------------------------


def level_fox_row(w: Word, L: TowerLevel) -> list[GroupRingElem]:
    if L.n == 0:
        return fox_jacobian_row(w, L.X.phi)
    return fox_row_with(w, L.X.F.rank, L.group, L.group.generator)


def level_chains(R: DecompositionRecord, n: int = 0, L: TowerLevel | None = None) -> BasedFreeChainComplex:
    """Relative chains of the record over Z[Gamma_n(base)]."""
    L = L or gamma_n_descriptor(R.base(), n)
    ring = L.group
    gens = [i for i in range(R.F.rank) if i not in R.boundary_generators]
    cells = R.two_cells()
    rows = []
    for _, w in cells:
        row = level_fox_row(w, L)
        rows.append([row[g] for g in gens])
    d2 = Mat(ring, len(cells), len(gens), rows)
    d1 = Mat(ring, len(gens), 0, [[] for _ in gens])
    return BasedFreeChainComplex.build(ring, [(), [R.F.names[g] for g in gens], [a for a, _ in cells]],
                                       [d1, d2])


# -- certificates ------------------------------------------------------------------------------


@dataclass(frozen=True)
class PairFactor:
    a: Word
    b: Word

    def word(self, R) -> Word:
        return commutator(self.a, self.b)

    def inverse(self) -> "PairFactor":
        return PairFactor(self.b, self.a)


@dataclass(frozen=True)
class DualFactor:
    u: Word
    label: str
    sign: int = 1

    def word(self, R) -> Word:
        m = R.mdual(self.label)
        return self.u * (m if self.sign > 0 else m.inverse()) * self.u.inverse()

    def inverse(self) -> "DualFactor":
        return DualFactor(self.u, self.label, -self.sign)


@dataclass(frozen=True)
class GropeFactor:
    shape: object  # see grouprings.grope
    leaves: tuple

    def word(self, R) -> Word:
        return grope_boundary_word(self.shape, self.leaves)

    @property
    def height(self) -> int:
        return shape_height(self.shape)

    def inverse(self) -> "GropeFactor":
        # [A1,B1]...[Ag,Bg] inverts to [Bg,Ag]...[B1,A1]
        pairs, leaves, pos = [], [], 0
        blocks = []
        for a, b in self.shape:
            na, nb = cap_count(a), cap_count(b)
            blocks.append((a, b, self.leaves[pos:pos + na], self.leaves[pos + na:pos + na + nb]))
            pos += na + nb
        for a, b, la, lb in reversed(blocks):
            pairs.append((b, a))
            leaves.extend(lb)
            leaves.extend(la)
        return GropeFactor(pairs, tuple(leaves))


@dataclass(frozen=True)
class MoveCertificate:
    target: str
    factors: tuple = ()
    notes: tuple = ()

    def word(self, R: DecompositionRecord) -> Word:
        out = Word()
        for f in self.factors:
            out = out * f.word(R)
        return out

    def inverse(self) -> "MoveCertificate":
        return MoveCertificate(self.target, tuple(f.inverse() for f in reversed(self.factors)),
                               self.notes)

    @property
    def pairs(self):
        return [f for f in self.factors if isinstance(f, PairFactor)]

    @property
    def gropes(self):
        return [f for f in self.factors if isinstance(f, GropeFactor)]


def validate_certificate(R: DecompositionRecord, cert: MoveCertificate) -> None:
    """Raise CertificateError unless every factor satisfies the kernel lift condition."""
    R.handle(cert.target)
    ident = R.group.identity()
    for f in cert.factors:
        if isinstance(f, PairFactor):
            for w in (f.a, f.b):
                R.F.check_word(w)
                if hom_apply(R.phi, w) != ident:
                    raise CertificateError(
                        f"pair word {format_word(w, R.F.names)} is not in the kernel of phi")
        elif isinstance(f, DualFactor):
            R.F.check_word(f.u)
            try:
                R.mdual(f.label)
            except RecordError as exc:
                raise CertificateError(str(exc)) from None
            if f.sign not in (1, -1):
                raise CertificateError("dual factor sign must be +1 or -1")
        elif isinstance(f, GropeFactor):
            try:
                grope_boundary_word(f.shape, f.leaves)
            except ShapeError as exc:
                raise CertificateError(str(exc)) from None
            for w in f.leaves:
                R.F.check_word(w)
                if hom_apply(R.phi, w) != ident:
                    raise CertificateError(
                        f"grope cap {format_word(w, R.F.names)} is not in the kernel of phi")
        else:
            raise CertificateError(f"unknown factor {f!r}")


def _basis_bijection(S: BasedFreeChainComplex, T: BasedFreeChainComplex) -> ChainMap:
    return ChainMap(S, T, tuple(Mat.identity(S.group, S.rank(k)) for k in range(S.top + 1)))


def apply_move(R: DecompositionRecord, cert: MoveCertificate, level: int = 0):
    """Return (R', evident chain map over Z[Gamma_level]) after checking it commutes."""
    validate_certificate(R, cert)
    w = R.handle(cert.target)
    R2 = R.with_handle(cert.target, w * cert.word(R))
    C1, C2 = level_chains(R, level), level_chains(R2, level)
    f = _basis_bijection(C1, C2)
    if level == 0 and not f.commutes():
        raise AssertionError("internal: a certified move changed the Z[Gamma] boundary")
    return R2, f


def factor_words(R: DecompositionRecord, cert: MoveCertificate) -> list[Word]:
    """Words whose triviality at a level makes the move exact at that level."""
    out = []
    for f in cert.factors:
        if isinstance(f, PairFactor):
            out += [f.a, f.b]
        elif isinstance(f, DualFactor):
            out.append(R.mdual(f.label))
        else:
            out += _top_pair_words(f)
    return out


def _top_pair_words(f: GropeFactor) -> list[Word]:
    words, pos = [], 0
    for a, b in f.shape:
        na, nb = cap_count(a), cap_count(b)
        words.append(grope_boundary_word(a, f.leaves[pos:pos + na]))
        words.append(grope_boundary_word(b, f.leaves[pos + na:pos + na + nb]))
        pos += na + nb
    return words


def deformation_level(R: DecompositionRecord, cert: MoveCertificate, cap: int = MAX_TOWER_LEVEL):
    """Largest j <= cap with every factor word trivial in Gamma_j(base).

    By the Fox product rule, chains at every level i <= j are then unchanged
    entry for entry.  Returns (j, note) where note explains an undecided stop.
    """
    validate_certificate(R, cert)
    words = factor_words(R, cert)
    level = 0
    for j in range(1, cap + 1):
        L = gamma_n_descriptor(R.base(), j)
        for w in words:
            v = L.is_trivial(w)
            if is_undecided(v):
                return level, v.reason
            if v is not True:
                return level, ""
        level = j
    return level, ""


def check_grope_lift(cert: GropeFactor, k: int, L: TowerLevel):
    """Every depth-(n - j) sub-grope word is trivial at level j, for all j <= k.

    ``L`` supplies the base presentation; levels below k are rebuilt from it.
    Returns True/False, or Undecided at level 2 with relators.
    """
    n = cert.height
    if k < 0 or k > n:
        raise ValueError("need 0 <= k <= height")
    for j in range(k + 1):
        Lj = L if j == L.n else gamma_n_descriptor(L.X, j)
        for w in subgropes_at_depth(cert.shape, cert.leaves, n - j):
            v = Lj.is_trivial(w)
            if is_undecided(v):
                return v
            if not v:
                return False
    return True


@dataclass
class MoveTrace:
    start: DecompositionRecord
    end: DecompositionRecord
    composite: ChainMap
    log: list = field(default_factory=list)


def move_trace(R: DecompositionRecord, certs: Sequence[MoveCertificate], level: int = 0) -> MoveTrace:
    cur = R
    comp = None
    log = []
    for i, c in enumerate(certs):
        nxt, f = apply_move(cur, c, level)
        comp = f if comp is None else comp.then(f)
        log.append(f"move {i + 1}: handle {c.target} times {format_word(c.word(cur), R.F.names)}")
        cur = nxt
    if comp is None:
        C = level_chains(R, level)
        comp = _basis_bijection(C, C)
    return MoveTrace(R, cur, comp, log)


# -- file format ---------------------------------------------------------------------------------
#
#   [group] / [boundary] / [hom]   as for presentations ([group] relators are the base relators)
#   [whandles]    A = word
#   [mduals]      m1 = word
#   [move target=A]
#   pair: a, b
#   dual: u; m1; -1
#   grope: 2 | c1; c2; c3; c4          (simplest shape of the given height)


def _word(text: str, names, ln) -> Word:
    try:
        return parse_word(text, names)
    except WordError as exc:
        raise word_format_error(exc, ln, text) from None


def _labelled(sec: Section, names) -> list[tuple[str, Word]]:
    out = []
    for ln in sec.lines:
        out.append((ln.key, _word(ln.value, names, ln)))
    return out


def parse_certificate(sec: Section, names) -> MoveCertificate:
    target = sec.attrs.get("target")
    if not target:
        raise FormatError("[move] needs target=<handle label>", sec.number, 1)
    factors = []
    for ln in sec.lines:
        if ln.key == "pair":
            parts = split_list(ln.value)
            if len(parts) != 2:
                raise FormatError("pair needs two words", ln.number, ln.value_column)
            factors.append(PairFactor(_word(parts[0], names, ln), _word(parts[1], names, ln)))
        elif ln.key == "dual":
            parts = split_list(ln.value, ";")
            if len(parts) not in (2, 3):
                raise FormatError("dual needs 'u; label' or 'u; label; sign'", ln.number,
                                  ln.value_column)
            sign = int(parts[2]) if len(parts) == 3 else 1
            factors.append(DualFactor(_word(parts[0], names, ln), parts[1], sign))
        elif ln.key == "grope":
            head, _, body = ln.value.partition("|")
            try:
                h = int(head)
            except ValueError:
                raise FormatError("grope needs 'height | caps'", ln.number, ln.value_column) from None
            leaves = tuple(_word(x, names, ln) for x in split_list(body, ";"))
            factors.append(GropeFactor(simplest_shape(h), leaves))
        elif ln.key == "note":
            continue
        else:
            raise FormatError(f"unknown [move] key {ln.key!r}", ln.number, ln.column)
    notes = tuple(ln.value for ln in sec.lines if ln.key == "note")
    return MoveCertificate(target, tuple(factors), notes)


def parse_record(text: str) -> tuple[DecompositionRecord, list[MoveCertificate]]:
    sections = read_sections(text)
    F, rels, rel_names, bgens, brels, basepoint, phi, by = parse_group_sections(sections)
    if brels:
        raise FormatError("records mark boundary generators only")
    handles = _labelled(by["whandles"][0], F.names) if "whandles" in by else []
    mduals = _labelled(by["mduals"][0], F.names) if "mduals" in by else []
    notes = tuple(ln.value for s in by.get("notes", []) for ln in s.lines)
    try:
        R = DecompositionRecord(F, phi, tuple(rels), tuple(rel_names), tuple(handles), tuple(mduals),
                                frozenset(bgens), notes)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    certs = [parse_certificate(s, F.names) for s in by.get("move", [])]
    return R, certs


def format_record(R: DecompositionRecord, certs: Sequence[MoveCertificate] = ()) -> str:
    names = R.F.names
    out = ["[group]", "generators: " + ", ".join(names)]
    for n, r in zip(R.relator_names, R.relators):
        out.append(f"relators: {n} = {format_word(r, names)}")
    if R.boundary_generators:
        out += ["[boundary]", "generators: " + ", ".join(names[i] for i in sorted(R.boundary_generators))]
    out.append("[hom]")
    out.extend(format_hom(R.phi))
    if R.handles:
        out.append("[whandles]")
        out += [f"{a} = {format_word(w, names)}" for a, w in R.handles]
    if R.mduals:
        out.append("[mduals]")
        out += [f"{a} = {format_word(w, names)}" for a, w in R.mduals]
    for c in certs:
        out.append(f"[move target={c.target}]")
        for f in c.factors:
            if isinstance(f, PairFactor):
                out.append(f"pair: {format_word(f.a, names)}, {format_word(f.b, names)}")
            elif isinstance(f, DualFactor):
                out.append(f"dual: {format_word(f.u, names)}; {f.label}; {f.sign}")
            else:
                if f.shape != simplest_shape(f.height):
                    raise FormatError("only simplest-shape gropes can be written to a file")
                out.append(f"grope: {f.height} | " + "; ".join(format_word(w, names) for w in f.leaves))
        out += [f"note: {x}" for x in c.notes]
    return "\n".join(out) + "\n"
