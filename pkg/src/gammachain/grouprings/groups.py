"""Coefficient groups and homomorphisms between them.

Every group here hands out canonical, hashable, totally ordered element keys,
so group-ring elements can be compared by plain dictionary equality.  A group
object implements ``identity``, ``mul``, ``inv``, ``generator`` and
``format_element``; ``tag`` is the structural descriptor used as ring tag
(display names are not part of it).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

from .words import Word, format_word


class GroupError(ValueError):
    pass


def group_pow(group, a, n: int):
    if n < 0:
        a, n = group.inv(a), -n
    result = group.identity()
    base = a
    while n:
        if n & 1:
            result = group.mul(result, base)
        base = group.mul(base, base)
        n >>= 1
    return result


@dataclass(frozen=True, eq=False)
class AbelianGroup:
    """Z^free_rank + Z/torsion[0] + ...; elements are integer tuples."""

    free_rank: int
    torsion: tuple[int, ...] = ()
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise GroupError("free rank must be nonnegative")
        tors = tuple(int(n) for n in self.torsion)
        for n in tors:
            if n < 2:
                raise GroupError(f"torsion orders must be >= 2, got {n}")
        for a, b in zip(tors, tors[1:]):
            if b % a:
                raise GroupError(f"torsion orders {tors} are not a divisibility chain")
        object.__setattr__(self, "torsion", tors)
        k = self.free_rank + len(tors)
        names = tuple(self.names) or default_names(k)
        if len(names) != k or len(set(names)) != k:
            raise GroupError("need one distinct name per cyclic factor")
        object.__setattr__(self, "names", names)

    @property
    def tag(self):
        return ("abelian", self.free_rank, self.torsion)

    def __eq__(self, other):
        return isinstance(other, AbelianGroup) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    is_commutative = True

    def is_free_abelian(self) -> bool:
        return not self.torsion

    def normalize(self, v: Sequence[int]) -> tuple[int, ...]:
        v = tuple(int(x) for x in v)
        if len(v) != self.ngens:
            raise GroupError(f"element {v} has wrong length for {self}")
        r = self.free_rank
        return v[:r] + tuple(x % n for x, n in zip(v[r:], self.torsion))

    def identity(self):
        return (0,) * self.ngens

    def mul(self, a, b):
        return self.normalize(tuple(x + y for x, y in zip(a, b)))

    def inv(self, a):
        return self.normalize(tuple(-x for x in a))

    def generator(self, i: int):
        v = [0] * self.ngens
        v[i] = 1
        return self.normalize(v)

    def order(self, i: int) -> int | None:
        """Order of the i-th generator (None when infinite)."""
        return None if i < self.free_rank else self.torsion[i - self.free_rank]

    def format_element(self, a) -> str:
        parts = []
        for name, e in zip(self.names, a):
            if e == 1:
                parts.append(name)
            elif e:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def describe(self) -> str:
        return f"abelian r={self.free_rank} torsion={list(self.torsion)}"

    def __repr__(self):
        return f"AbelianGroup({self.free_rank}, {self.torsion})"


def default_names(k: int) -> tuple[str, ...]:
    return tuple(f"t{i + 1}" for i in range(k))


def trivial_group() -> AbelianGroup:
    return AbelianGroup(0)


@dataclass(frozen=True, eq=False)
class FreeGroup:
    rank: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        names = tuple(self.names) or tuple(f"x{i + 1}" for i in range(self.rank))
        if len(names) != self.rank or len(set(names)) != self.rank:
            raise GroupError("generator names must be distinct, one per generator")
        object.__setattr__(self, "names", names)

    @property
    def tag(self):
        return ("free", self.rank)

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and self.rank == other.rank

    def __hash__(self):
        return hash(self.tag)

    ngens = property(lambda self: self.rank)
    is_commutative = False

    def identity(self):
        return Word()

    def mul(self, a: Word, b: Word) -> Word:
        return a * b

    def inv(self, a: Word) -> Word:
        return a.inverse()

    def generator(self, i: int) -> Word:
        if not 0 <= i < self.rank:
            raise GroupError(f"generator index {i} out of range")
        return Word.gen(i)

    def check_word(self, w: Word) -> Word:
        if w.max_generator() >= self.rank:
            raise GroupError(f"word uses generator outside rank {self.rank}")
        return w

    def format_element(self, a: Word) -> str:
        return format_word(a, self.names)

    def describe(self) -> str:
        return f"free rank={self.rank}"

    def __repr__(self):
        return f"FreeGroup({list(self.names)})"


@dataclass(frozen=True, eq=False)
class GroupHom:
    """Homomorphism given by the images of the source generators."""

    source: Any
    target: Any
    images: tuple = field(default=())

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) != self.source.ngens:
            raise GroupError(f"need {self.source.ngens} generator images, got {len(images)}")
        if isinstance(self.target, AbelianGroup):
            images = tuple(self.target.normalize(im) for im in images)
        object.__setattr__(self, "images", images)
        if isinstance(self.source, AbelianGroup):
            for i, im in enumerate(images):
                n = self.source.order(i)
                if n is not None and group_pow(self.target, im, n) != self.target.identity():
                    raise GroupError(f"image of generator {i} does not respect its order {n}")

    @property
    def tag(self):
        return (self.source.tag, self.target.tag, self.images)

    def __eq__(self, other):
        return isinstance(other, GroupHom) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __call__(self, element):
        return hom_apply(self, element)

    def compose(self, after: "GroupHom") -> "GroupHom":
        """``after o self``."""
        if after.source != self.target:
            raise GroupError("composition: target/source mismatch")
        return GroupHom(self.source, after.target, tuple(after(im) for im in self.images))


def hom_apply(h: GroupHom, element):
    """Evaluate ``h`` on a source element (a Word or an exponent tuple)."""
    tgt = h.target
    out = tgt.identity()
    if isinstance(h.source, FreeGroup):
        h.source.check_word(element)
        for g, e in element.letters:
            out = tgt.mul(out, group_pow(tgt, h.images[g], e))
        return out
    element = h.source.normalize(element)
    for i, e in enumerate(element):
        if e:
            out = tgt.mul(out, group_pow(tgt, h.images[i], e))
    return out


def identity_hom(group) -> GroupHom:
    return GroupHom(group, group, tuple(group.generator(i) for i in range(group.ngens)))


def trivializing_hom(group) -> GroupHom:
    triv = trivial_group()
    return GroupHom(group, triv, tuple(() for _ in range(group.ngens)))


def abelianization(F: FreeGroup) -> GroupHom:
    A = AbelianGroup(F.rank, names=tuple(f"t{i + 1}" for i in range(F.rank)))
    return GroupHom(F, A, tuple(A.generator(i) for i in range(F.rank)))
