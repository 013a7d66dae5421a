"""Cellular chains of covers of presentation 2-complexes.

Presentation file format::

    [group]
    generators: x, y
    relators: x*y*x*y^-1*x^-1*y^-1
    [boundary]
    generators:
    relators:
    [hom]
    target: abelian r=1 torsion=[] names=t
    x -> t
    y -> t

Several relators may share a ``relators:`` line separated by ``;`` and the
line may be repeated.  A relator may be named with ``name = word``.
``[boundary]`` also accepts ``basepoint: yes`` to delete the 0-cell alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .chains.complex import BasedFreeChainComplex
from .chains.fileformat import FormatError, format_ring, parse_ring
from .chains.matrix import Mat
from .grouprings.fox import fox_jacobian_row
from .grouprings.groups import AbelianGroup, FreeGroup, GroupHom, hom_apply
from .grouprings.ring import GroupRingElem, format_elem, parse_elem
from .grouprings.words import Word, WordError, format_word, parse_word
from .laurent import LaurentSubmodule
from .textio import Section, read_sections, split_list, word_format_error

BASEPOINT = "p"


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class RelativeTwoComplex:
    F: FreeGroup
    relators: tuple  # Words
    phi: GroupHom
    relator_names: tuple = ()
    boundary_generators: frozenset = frozenset()
    boundary_relators: frozenset = frozenset()
    basepoint_relative: bool = False

    def __post_init__(self):
        rels = tuple(self.relators)
        object.__setattr__(self, "relators", rels)
        names = tuple(self.relator_names) or tuple(f"r{i + 1}" for i in range(len(rels)))
        if len(names) != len(rels) or len(set(names)) != len(names):
            raise PresentationError("relator names must be distinct, one per relator")
        object.__setattr__(self, "relator_names", names)
        object.__setattr__(self, "boundary_generators", frozenset(self.boundary_generators))
        object.__setattr__(self, "boundary_relators", frozenset(self.boundary_relators))
        if self.phi.source != self.F:
            raise PresentationError("hom source must be the presentation's free group")
        ident = self.phi.target.identity()
        for name, r in zip(names, rels):
            self.F.check_word(r)
            if hom_apply(self.phi, r) != ident:
                raise PresentationError(f"relator {name} does not map to the identity")
        for i in self.boundary_relators:
            used = {g for g, _ in rels[i].letters}
            if not used <= self.boundary_generators:
                raise PresentationError(f"boundary relator {names[i]} uses interior generators")

    @property
    def group(self):
        return self.phi.target

    @property
    def is_relative(self) -> bool:
        return bool(self.basepoint_relative or self.boundary_generators or self.boundary_relators)

    def interior_generators(self) -> list[int]:
        return [i for i in range(self.F.rank) if i not in self.boundary_generators]

    def interior_relators(self) -> list[int]:
        return [i for i in range(len(self.relators)) if i not in self.boundary_relators]

    def with_relators(self, relators: Sequence[Word], names: Sequence[str] = (),
                      boundary: Sequence[int] = ()) -> "RelativeTwoComplex":
        return RelativeTwoComplex(self.F, tuple(relators), self.phi, tuple(names),
                                  self.boundary_generators, frozenset(boundary),
                                  self.basepoint_relative)


def fox_complex(X: RelativeTwoComplex) -> BasedFreeChainComplex:
    """Chains of the cover with 0-cell lifted to the identity coset.

    d2 row r = Fox Jacobian of r pushed through phi; d1 row x_i = phi(x_i) - 1.
    Boundary-marked cells (and the 0-cell, whenever anything is marked) are
    deleted.
    """
    G = X.group
    gens = X.interior_generators()
    rels = X.interior_relators()
    one = GroupRingElem.one(G)
    rows2 = []
    for i in rels:
        row = fox_jacobian_row(X.relators[i], X.phi)
        rows2.append([row[g] for g in gens])
    d2 = Mat(G, len(rels), len(gens), rows2)
    labels1 = [X.F.names[g] for g in gens]
    labels2 = [X.relator_names[i] for i in rels]
    if X.is_relative:
        d1 = Mat(G, len(gens), 0, [[] for _ in gens])
        labels0 = []
    else:
        d1 = Mat(G, len(gens), 1,
                 [[GroupRingElem.monomial(G, X.phi.images[g]) - one] for g in gens])
        labels0 = [BASEPOINT]
    return BasedFreeChainComplex.build(G, [labels0, labels1, labels2], [d1, d2])


@dataclass(frozen=True)
class H1Class:
    fox: tuple  # Fox vector pushed through phi (interior coordinates)
    normal_form: tuple  # canonical representative modulo the relator span

    @property
    def is_zero(self) -> bool:
        return not any(a.terms for a in self.normal_form)

    def describe(self) -> str:
        return "(" + ",".join(format_elem(a) for a in self.normal_form) + ")"


class KernelClassifier:
    """Caches the relator span so many kernel classes can be reduced cheaply."""

    def __init__(self, X: RelativeTwoComplex, token=None):
        if not isinstance(X.group, AbelianGroup):
            raise PresentationError("kernel classes need an abelian coefficient group")
        self.X = X
        self.gens = X.interior_generators()
        self.span = LaurentSubmodule(
            X.group, len(self.gens),
            [[row[g] for g in self.gens]
             for row in (fox_jacobian_row(X.relators[i], X.phi) for i in X.interior_relators())],
            token=token)

    def classify(self, w: Word) -> H1Class:
        X = self.X
        X.F.check_word(w)
        if hom_apply(X.phi, w) != X.group.identity():
            raise PresentationError(f"word {format_word(w, X.F.names)} is not in the kernel")
        row = fox_jacobian_row(w, X.phi)
        fox = tuple(row[g] for g in self.gens)
        return H1Class(fox, tuple(self.span.normal_form(list(fox))))


def kernel_h1_class(w: Word, X: RelativeTwoComplex) -> H1Class:
    return KernelClassifier(X).classify(w)


# -- file format -------------------------------------------------------------------------


def _words(section: Section, key: str, names) -> list[tuple[str | None, Word, int, int]]:
    out = []
    for ln in section.values(key):
        for item in split_list(ln.value, ";"):
            label = None
            body = item
            if "=" in item:
                label, body = (x.strip() for x in item.split("=", 1))
            try:
                out.append((label, parse_word(body, names), ln.number, ln.value_column))
            except WordError as exc:
                raise word_format_error(exc, ln, body) from None
    return out


def parse_hom_section(sec: Section, F: FreeGroup) -> GroupHom:
    tl = sec.first("target")
    if tl is None:
        raise FormatError("[hom] needs a 'target:' line", sec.number, 1)
    G = parse_ring(tl.value, tl.number)
    images = [None] * F.rank
    for ln in sec.lines:
        if ln.key == "target":
            continue
        if ln.key not in F.names:
            raise FormatError(f"unknown generator {ln.key!r}", ln.number, ln.column)
        try:
            e = parse_elem(ln.value, G)
        except ValueError as exc:
            raise FormatError(str(exc), ln.number, ln.value_column) from None
        if len(e.terms) != 1 or e.terms[0][1] != 1:
            raise FormatError("a generator image must be a single group element", ln.number,
                              ln.value_column)
        images[F.names.index(ln.key)] = e.terms[0][0]
    for i, im in enumerate(images):
        if im is None:
            raise FormatError(f"no image given for generator {F.names[i]}", sec.number, 1)
    return GroupHom(F, G, tuple(images))


def parse_group_sections(sections: list[Section]):
    """Shared by presentations and records: returns (F, relators, names, boundary, phi)."""
    by = {}
    for s in sections:
        by.setdefault(s.name, []).append(s)
    if "group" not in by:
        raise FormatError("missing [group] section")
    gsec = by["group"][0]
    gl = gsec.first("generators")
    if gl is None:
        raise FormatError("[group] needs a 'generators:' line", gsec.number, 1)
    names = tuple(split_list(gl.value))
    try:
        F = FreeGroup(len(names), names)
    except ValueError as exc:
        raise FormatError(str(exc), gl.number, gl.value_column) from None
    rels = _words(gsec, "relators", names)
    rel_names = []
    for i, (label, _, n, c) in enumerate(rels):
        rel_names.append(label or f"r{i + 1}")
    bgens, brels, basepoint = set(), set(), False
    for bsec in by.get("boundary", []):
        for ln in bsec.lines:
            if ln.key == "generators":
                for g in split_list(ln.value):
                    if g not in names:
                        raise FormatError(f"unknown generator {g!r}", ln.number, ln.value_column)
                    bgens.add(names.index(g))
            elif ln.key == "relators":
                for r in split_list(ln.value, ";"):
                    if r not in rel_names:
                        raise FormatError(f"unknown relator {r!r}", ln.number, ln.value_column)
                    brels.add(rel_names.index(r))
            elif ln.key == "basepoint":
                basepoint = ln.value.lower() in ("yes", "true", "1")
            else:
                raise FormatError(f"unknown [boundary] key {ln.key!r}", ln.number, ln.column)
    if "hom" not in by:
        raise FormatError("missing [hom] section")
    phi = parse_hom_section(by["hom"][0], F)
    return F, [w for _, w, _, _ in rels], rel_names, bgens, brels, basepoint, phi, by


def parse_presentation(text: str) -> RelativeTwoComplex:
    F, rels, rel_names, bgens, brels, basepoint, phi, _ = parse_group_sections(read_sections(text))
    try:
        return RelativeTwoComplex(F, tuple(rels), phi, tuple(rel_names), frozenset(bgens),
                                  frozenset(brels), basepoint)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def format_hom(phi: GroupHom) -> list[str]:
    G = phi.target
    out = [f"target: {format_ring(G)}"]
    for name, im in zip(phi.source.names, phi.images):
        out.append(f"{name} -> {G.format_element(im)}")
    return out


def format_presentation(X: RelativeTwoComplex) -> str:
    names = X.F.names
    out = ["[group]", "generators: " + ", ".join(names)]
    for n, r in zip(X.relator_names, X.relators):
        out.append(f"relators: {n} = {format_word(r, names)}")
    if X.is_relative:
        out.append("[boundary]")
        if X.boundary_generators:
            out.append("generators: " + ", ".join(names[i] for i in sorted(X.boundary_generators)))
        if X.boundary_relators:
            out.append("relators: " + "; ".join(X.relator_names[i]
                                                for i in sorted(X.boundary_relators)))
        if X.basepoint_relative:
            out.append("basepoint: yes")
    out.append("[hom]")
    out.extend(format_hom(X.phi))
    return "\n".join(out) + "\n"


def presentation(generators: Sequence[str], relators: Sequence[str], images: Sequence,
                 target: AbelianGroup, **kw) -> RelativeTwoComplex:
    """Convenience constructor from strings and exponent tuples."""
    F = FreeGroup(len(generators), tuple(generators))
    phi = GroupHom(F, target, tuple(images))
    return RelativeTwoComplex(F, tuple(parse_word(r, F.names) for r in relators), phi, **kw)
