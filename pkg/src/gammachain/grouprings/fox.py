"""Fox free differential calculus."""

from __future__ import annotations

from typing import Callable

from .groups import FreeGroup, GroupHom, hom_apply
from .ring import GroupRingElem
from .words import Word


def fox_derivative(w: Word, i: int, phi: GroupHom) -> GroupRingElem:
    """d w / d x_i pushed through ``phi`` into the target group ring.

    Product rule d(uv) = du + phi(u) dv, d x_i/d x_i = 1.
    """
    return fox_jacobian_row(w, phi, only=i)[i]


def fox_jacobian_row(w: Word, phi: GroupHom, only: int | None = None) -> list[GroupRingElem]:
    """All partial derivatives of ``w`` in one left-to-right pass."""
    F = phi.source
    if not isinstance(F, FreeGroup):
        raise TypeError("Fox derivatives need a free source group")
    if only is not None and not 0 <= only < F.rank:
        raise IndexError(f"generator index {only} out of range for rank {F.rank}")
    F.check_word(w)
    return fox_row_with(w, F.rank, phi.target, lambda g: hom_apply(phi, Word.gen(g)))


def fox_row_with(w: Word, rank: int, group, image: Callable[[int], object]) -> list[GroupRingElem]:
    """Fox row for ``w`` given a callable giving generator images in ``group``."""
    mul, inv = group.mul, group.inv
    gens = [image(g) for g in range(rank)]
    acc: list[dict] = [dict() for _ in range(rank)]
    prefix = group.identity()
    for g, s in w.syllables():
        if s > 0:
            d = acc[g]
            d[prefix] = d.get(prefix, 0) + 1
            prefix = mul(prefix, gens[g])
        else:
            prefix = mul(prefix, inv(gens[g]))
            d = acc[g]
            d[prefix] = d.get(prefix, 0) - 1
    return [GroupRingElem(group, d) for d in acc]


def fox_identity_holds(w: Word, phi: GroupHom) -> bool:
    """Check phi(w) - 1 == sum_i (dw/dx_i) (phi(x_i) - 1) exactly."""
    tgt = phi.target
    one = GroupRingElem.one(tgt)
    lhs = GroupRingElem.monomial(tgt, hom_apply(phi, w)) - one
    rhs = GroupRingElem.zero(tgt)
    for i, d in enumerate(fox_jacobian_row(w, phi)):
        rhs = rhs + d * (GroupRingElem.monomial(tgt, phi.images[i]) - one)
    return lhs == rhs
