"""Greedy cancellation of unit entries by simple moves."""

from __future__ import annotations

from ..grouprings.ring import GroupRingElem
from .complex import BasedFreeChainComplex, ChainMap, SimpleMove, apply_simple_move, identity_map


def _find_unit(C: BasedFreeChainComplex, degrees=None):
    for k in range(1, C.top + 1):
        if degrees is not None and k not in degrees:
            continue
        M = C.d[k]
        for i in range(M.nrows):
            for j in range(M.ncols):
                if M[i, j].terms and M[i, j].unit_part() is not None:
                    return k, i, j
    return None


def reduce_complex(C: BasedFreeChainComplex, max_steps: int = 500, degrees=None):
    """Cancel unit entries until none are left.

    Returns (reduced complex, list of SimpleMoves, composite forward map).
    Each cancellation normalizes the unit to 1, clears its column with slides
    in degree k and its row with slides in degree k-1, then destabilizes.
    ``degrees`` restricts which boundaries d_k are searched.
    """
    moves: list[SimpleMove] = []
    comp: ChainMap = identity_map(C)
    cur = C

    def do(m):
        nonlocal cur, comp
        cur, w = apply_simple_move(cur, m)
        comp = comp.then(w.forward)
        moves.append(m)

    for _ in range(max_steps):
        hit = _find_unit(cur, degrees)
        if hit is None:
            break
        k, i, j = hit
        u = cur.d[k][i, j]
        if u != GroupRingElem.one(cur.group):
            do(SimpleMove("unit", k, i, coeff=u ** -1))
        for r in range(cur.d[k].nrows):
            c = cur.d[k][r, j]
            if r != i and c.terms:
                do(SimpleMove("slide", k, r, i, -c))
        for c in range(cur.d[k].ncols):
            a = cur.d[k][i, c]
            if c != j and a.terms:
                do(SimpleMove("slide", k - 1, j, c, a))
        do(SimpleMove("destabilize", k, i, j))
    return cur, moves, comp
