"""Derived-series membership in free groups via iterated Magnus embeddings.

F/F^(k+1) embeds into the semidirect product of F/F^(k) with
Z[F/F^(k)]^rank, sending w to (w F^(k), Fox vector of w).  Iterating gives a
canonical key for every element of every free solvable quotient, so
membership in F^(n) is exact; the only limit is cost, which is capped.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..verdicts import CapExceeded, Undecided
from .words import Word

DEFAULT_MAX_LEVEL = 5
DEFAULT_MAX_TERMS = 200_000


@dataclass(frozen=True)
class FreeSolvableQuotient:
    """F/F^(level) for the free group of the given rank.

    level 0 is trivial, level 1 the abelianization (keys are exponent
    tuples), level k >= 2 keys are ``(parent_key, vector)`` with vector a
    tuple of term-tuples over the level k-1 group ring.
    """

    rank: int
    level: int
    max_terms: int = DEFAULT_MAX_TERMS

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("level must be >= 0")

    @property
    def parent(self) -> "FreeSolvableQuotient":
        return FreeSolvableQuotient(self.rank, self.level - 1, self.max_terms)

    ngens = property(lambda self: self.rank)
    is_commutative = property(lambda self: self.level <= 1)

    @property
    def tag(self):
        return ("free-solvable", self.rank, self.level)

    def identity(self):
        if self.level == 0:
            return ()
        if self.level == 1:
            return (0,) * self.rank
        return (self.parent.identity(), ((),) * self.rank)

    def generator(self, i: int):
        if self.level == 0:
            return ()
        if self.level == 1:
            v = [0] * self.rank
            v[i] = 1
            return tuple(v)
        P = self.parent
        vec = [()] * self.rank
        vec[i] = ((P.identity(), 1),)
        return (P.generator(i), tuple(vec))

    def _translate(self, g, terms):
        """Left-multiply a parent group-ring element (term tuple) by g."""
        P = self.parent
        acc: dict = {}
        for h, c in terms:
            k = P.mul(g, h)
            acc[k] = acc.get(k, 0) + c
        if len(acc) > self.max_terms:
            raise CapExceeded(f"term budget {self.max_terms} exceeded at level {self.level}")
        return acc

    @staticmethod
    def _add(acc: dict, terms, sign=1):
        for h, c in terms:
            acc[h] = acc.get(h, 0) + sign * c
        return tuple(sorted((h, c) for h, c in acc.items() if c))

    def mul(self, a, b):
        if self.level == 0:
            return ()
        if self.level == 1:
            return tuple(x + y for x, y in zip(a, b))
        P = self.parent
        ga, va = a
        gb, vb = b
        vec = tuple(self._add(dict(x), self._translate(ga, y).items()) for x, y in zip(va, vb))
        return (P.mul(ga, gb), vec)

    def inv(self, a):
        if self.level == 0:
            return ()
        if self.level == 1:
            return tuple(-x for x in a)
        P = self.parent
        g, v = a
        gi = P.inv(g)
        vec = tuple(self._add({}, self._translate(gi, x).items(), -1) for x in v)
        return (gi, vec)

    def image(self, w: Word):
        out = self.identity()
        gens = [self.generator(i) for i in range(self.rank)]
        invs = [self.inv(g) for g in gens]
        for g, s in w.syllables():
            out = self.mul(out, gens[g] if s > 0 else invs[g])
        return out

    def format_element(self, a) -> str:
        return repr(a)


def derived_membership(w: Word, n: int, rank: int | None = None,
                       max_level: int = DEFAULT_MAX_LEVEL,
                       max_terms: int = DEFAULT_MAX_TERMS):
    """Is ``w`` in the n-th derived subgroup F^(n)?

    Returns True/False, or :class:`Undecided` when ``n`` exceeds
    ``max_level`` or the term budget runs out.
    """
    if n < 0:
        raise ValueError("level must be >= 0")
    if rank is None:
        rank = w.max_generator() + 1
    if n == 0:
        return True
    if n > max_level:
        return Undecided(f"level {n} above cap {max_level}")
    if any(w.exponent_sums(rank)):
        return False
    Q = FreeSolvableQuotient(rank, n, max_terms)
    try:
        return Q.image(w) == Q.identity()
    except CapExceeded as exc:
        return Undecided(str(exc))
