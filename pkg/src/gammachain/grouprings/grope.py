"""Boundary words of capped gropes.

A shape is either ``None`` (a cap) or a list of symplectic pairs
``[(a, b), ...]``, each entry again a shape.  A genus-g surface whose basis
curves are all capped is ``[(None, None)] * g``.
"""

from __future__ import annotations

from typing import Sequence

from .words import Word, commutator


class ShapeError(ValueError):
    pass


def simplest_shape(height: int):
    """The simplest grope of the given height: genus one at every stage."""
    if height < 0:
        raise ShapeError("height must be >= 0")
    shape = None
    for _ in range(height):
        shape = [(shape, shape)]
    return shape


def shape_height(shape) -> int:
    if shape is None:
        return 0
    return 1 + max(max(shape_height(a), shape_height(b)) for a, b in shape)


def cap_count(shape) -> int:
    if shape is None:
        return 1
    return sum(cap_count(a) + cap_count(b) for a, b in shape)


def _boundary(shape, leaves: Sequence[Word], pos: int) -> tuple[Word, int]:
    if shape is None:
        return leaves[pos], pos + 1
    if not shape:
        raise ShapeError("a surface stage needs genus >= 1")
    out = Word()
    for a, b in shape:
        wa, pos = _boundary(a, leaves, pos)
        wb, pos = _boundary(b, leaves, pos)
        out = out * commutator(wa, wb)
    return out, pos


def grope_boundary_word(shape, leaves: Sequence[Word]) -> Word:
    """Boundary word of ``shape`` with caps labelled depth-first by ``leaves``."""
    need = cap_count(shape)
    if len(leaves) != need:
        raise ShapeError(f"shape has {need} caps but {len(leaves)} leaf words were given")
    w, _ = _boundary(shape, leaves, 0)
    return w


def subgropes_at_depth(shape, leaves: Sequence[Word], depth: int) -> list[Word]:
    """Boundary words of every sub-grope rooted at the given depth.

    Depth 0 is the whole grope; the sub-gropes at depth ``height`` are the
    caps.  Branches that end in a cap before ``depth`` contribute that cap.
    """
    out: list[Word] = []

    def walk(sh, pos, d):
        if d == depth or sh is None:
            w, end = _boundary(sh, leaves, pos)
            out.append(w)
            return end
        for a, b in sh:
            pos = walk(a, pos, d + 1)
            pos = walk(b, pos, d + 1)
        return pos

    if len(leaves) != cap_count(shape):
        raise ShapeError("leaf count does not match shape")
    walk(shape, 0, 0)
    return out
