"""The derived-series tower F/K^(n) R for a presentation with phi: F -> Gamma.

Level 0 is Gamma.  Level 1 elements are pairs (phi(w), normal form of the
Fox vector of w modulo the relator span); this is exact.  Level 2 elements
are pairs (level-1 image, Fox vector over Z[level 1]); equal keys always
mean equal elements, while distinct keys are only conclusive when there are
no relators (the free solvable case), so level-2 equality is three-valued.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .chains.complex import BasedFreeChainComplex
from .chains.homology import HomologyPresentation, homology_presentation
from .foxcover import RelativeTwoComplex, fox_complex
from .grouprings.fox import fox_jacobian_row, fox_row_with
from .grouprings.groups import AbelianGroup, FreeGroup, GroupHom, hom_apply
from .grouprings.ring import GroupRingElem, format_elem
from .grouprings.words import Word, format_word
from .laurent import LaurentSubmodule
from .verdicts import Undecided

MAX_TOWER_LEVEL = 2


class TowerCapError(ValueError):
    pass


class KernelMismatch(ValueError):
    def __init__(self, msg: str, witness: Word | None = None, side: str = ""):
        super().__init__(msg)
        self.witness = witness
        self.side = side


def _terms_vec(vec: Sequence[GroupRingElem]) -> tuple:
    return tuple(a.terms for a in vec)


class Gamma1Group:
    """F / [K, K] R, elements keyed by (phi-image, Fox normal form)."""

    is_commutative = False

    def __init__(self, F: FreeGroup, phi: GroupHom, relators: Sequence[Word] = (), token=None):
        if not isinstance(phi.target, AbelianGroup):
            raise TypeError("level 1 needs an abelian base group")
        self.F = F
        self.phi = phi
        self.base = phi.target
        self.relators = tuple(relators)
        self.rank = F.rank
        self.span = LaurentSubmodule(self.base, F.rank,
                                     [fox_jacobian_row(r, phi) for r in self.relators], token=token)
        self._nf: dict = {}
        self._tag = ("gamma1", F.tag, phi.tag, tuple(r.letters for r in self.relators))

    @property
    def tag(self):
        return self._tag

    def __eq__(self, other):
        return isinstance(other, Gamma1Group) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f"Gamma1Group(rank={self.rank}, relators={len(self.relators)})"

    @property
    def ngens(self) -> int:
        return self.rank

    def _vec(self, key) -> list[GroupRingElem]:
        return [GroupRingElem(self.base, t) for t in key]

    def _normal(self, vec: Sequence[GroupRingElem]) -> tuple:
        k = _terms_vec(vec)
        got = self._nf.get(k)
        if got is None:
            got = _terms_vec(self.span.normal_form(list(vec)))
            self._nf[k] = got
        return got

    def identity(self):
        return (self.base.identity(), ((),) * self.rank)

    def generator(self, i: int):
        v = [GroupRingElem.zero(self.base)] * self.rank
        v[i] = GroupRingElem.one(self.base)
        return (self.phi.images[i], self._normal(v))

    def mul(self, a, b):
        g, v = a
        h, u = b
        vec = [x + y.left_translate(g) for x, y in zip(self._vec(v), self._vec(u))]
        return (self.base.mul(g, h), self._normal(vec))

    def inv(self, a):
        g, v = a
        gi = self.base.inv(g)
        return (gi, self._normal([-x.left_translate(gi) for x in self._vec(v)]))

    def image(self, w: Word):
        row = fox_jacobian_row(w, self.phi)
        return (hom_apply(self.phi, w), self._normal(row))

    def hom(self) -> GroupHom:
        return GroupHom(self.F, self, tuple(self.generator(i) for i in range(self.rank)))

    def format_element(self, a) -> str:
        g, v = a
        vec = ", ".join(format_elem(x) for x in self._vec(v))
        return f"<{self.base.format_element(g)}|{vec}>"


class Gamma2Group:
    """Keys (level-1 element, Fox vector over Z[level 1]); see module docstring."""

    is_commutative = False

    def __init__(self, lower: Gamma1Group):
        self.lower = lower
        self.F = lower.F
        self.rank = lower.rank
        self.exact = not lower.relators
        self._tag = ("gamma2",) + lower.tag[1:]

    @property
    def tag(self):
        return self._tag

    def __eq__(self, other):
        return isinstance(other, Gamma2Group) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    @property
    def ngens(self) -> int:
        return self.rank

    def identity(self):
        return (self.lower.identity(), ((),) * self.rank)

    def generator(self, i: int):
        L = self.lower
        vec = [()] * self.rank
        vec[i] = ((L.identity(), 1),)
        return (L.generator(i), tuple(vec))

    def _translate(self, g, terms) -> GroupRingElem:
        return GroupRingElem(self.lower, terms).left_translate(g)

    def mul(self, a, b):
        g, v = a
        h, u = b
        L = self.lower
        vec = tuple((GroupRingElem(L, x) + self._translate(g, y)).terms for x, y in zip(v, u))
        return (L.mul(g, h), vec)

    def inv(self, a):
        g, v = a
        L = self.lower
        gi = L.inv(g)
        return (gi, tuple((-self._translate(gi, x)).terms for x in v))

    def image(self, w: Word):
        L = self.lower
        row = fox_row_with(w, self.rank, L, L.generator)
        return (L.image(w), tuple(a.terms for a in row))

    def hom(self) -> GroupHom:
        return GroupHom(self.F, self, tuple(self.generator(i) for i in range(self.rank)))

    def format_element(self, a) -> str:
        return repr(a)

    def equal(self, a, b):
        """True, False, or Undecided."""
        if a == b:
            return True
        if a[0] != b[0]:
            return False
        if self.exact:
            return False
        return Undecided("level-2 keys differ and relators are present (certified-partial)")


@dataclass
class TowerLevel:
    n: int
    X: RelativeTwoComplex
    group: object
    phi_n: GroupHom
    warnings: tuple = ()

    @property
    def base(self) -> AbelianGroup:
        return self.X.group

    def describe(self) -> str:
        names = ", ".join(self.X.F.names)
        rels = "; ".join(format_word(r, self.X.F.names) for r in self.X.relators) or "none"
        head = {0: "Gamma", 1: "Gamma_1 (metabelian over Gamma, exact word problem)",
                2: "Gamma_2 (certified-partial word problem)"}[self.n]
        return f"level {self.n}: {head}; generators {names}; relators {rels}; base {self.base.describe()}"

    def kernel_module(self) -> HomologyPresentation:
        """H_1 of the absolute Fox complex: the module K/[K,K]R."""
        X = self.X
        Xabs = RelativeTwoComplex(X.F, X.relators, X.phi, X.relator_names)
        return homology_presentation(fox_complex(Xabs), 1)

    def is_trivial(self, w: Word):
        """True/False, or Undecided at level 2 with relators."""
        if self.n == 0:
            return hom_apply(self.X.phi, w) == self.base.identity()
        if self.n == 1:
            return self.group.image(w) == self.group.identity()
        return self.group.equal(self.group.image(w), self.group.identity())

    def equal(self, a, b):
        if self.n == 2:
            return self.group.equal(a, b)
        return a == b


def gamma_n_descriptor(X: RelativeTwoComplex, n: int, token=None) -> TowerLevel:
    if n < 0:
        raise TowerCapError("level must be >= 0")
    if n > MAX_TOWER_LEVEL:
        raise TowerCapError(f"level {n} is above the tower cap {MAX_TOWER_LEVEL}")
    if n == 0:
        return TowerLevel(0, X, X.group, X.phi)
    G1 = Gamma1Group(X.F, X.phi, X.relators, token)
    if n == 1:
        return TowerLevel(1, X, G1, G1.hom())
    G2 = Gamma2Group(G1)
    warn = () if G2.exact else ("level 2 with relators: distinct keys are not conclusive",)
    return TowerLevel(2, X, G2, G2.hom(), ("level 2 is expensive; word lengths should stay small",) + warn)


def word_is_trivial_in_gamma1(w: Word, L: TowerLevel) -> bool:
    if L.n != 1:
        raise TowerCapError("word_is_trivial_in_gamma1 needs a level-1 descriptor")
    g, cls = L.group.image(w)
    return g == L.base.identity() and not any(cls)


@dataclass
class LiftIdentification:
    level: int  # the new level n+1
    source: TowerLevel
    target: TowerLevel
    generator_map: tuple  # index i -> index i (shared 1-skeleton)
    checked: tuple = ()  # (side, relator name) pairs verified
    notes: tuple = ()

    @property
    def group(self):
        return self.source.group

    def describe(self) -> str:
        return (f"canonical identification at level {self.level}: identity on the shared "
                f"1-skeleton ({len(self.generator_map)} generators), "
                f"{len(self.checked)} relator checks")


def lift_identification(A: RelativeTwoComplex, B: RelativeTwoComplex, n: int,
                        token=None) -> LiftIdentification:
    """Identify the level-(n+1) groups of A and B across a shared 1-skeleton.

    Checks that every relator of each side dies in the other's level-(n+1)
    group, which makes the identity on generators an isomorphism.
    """
    if n not in (0, 1):
        raise TowerCapError("lift_identification supports n in {0, 1}")
    if A.F.names != B.F.names:
        raise KernelMismatch("the two sides do not share a 1-skeleton (generator labels differ)")
    if A.phi != B.phi:
        raise KernelMismatch("the two sides use different maps to Gamma")
    LA = gamma_n_descriptor(A, n + 1, token)
    LB = gamma_n_descriptor(B, n + 1, token)
    checked = []
    notes = []
    for side, L, other in (("A", LA, B), ("B", LB, A)):
        for name, r in zip(other.relator_names, other.relators):
            verdict = L.is_trivial(r)
            if verdict is True:
                checked.append((side, name))
            elif verdict is False:
                raise KernelMismatch(
                    f"relator {name} of {'B' if side == 'A' else 'A'} is nontrivial in the "
                    f"level-{n + 1} group of {side}", r, side)
            else:
                notes.append(f"relator {name}: {verdict.reason}")
    return LiftIdentification(n + 1, LA, LB, tuple(range(A.F.rank)), tuple(checked), tuple(notes))
