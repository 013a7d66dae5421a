"""Quick built-in checks run by ``gammachain selftest``."""

from __future__ import annotations

import random

from .chains.align import align_one_skeleton, random_instance, replay_check
from .chains.fileformat import format_complex, parse_complex
from .chains.homology import homology_presentation
from .foxcover import RelativeTwoComplex, fox_complex, presentation
from .grouprings.derived import derived_membership
from .grouprings.grope import grope_boundary_word, simplest_shape
from .grouprings.groups import AbelianGroup, FreeGroup, GroupHom, trivial_group
from .grouprings.words import Word, commutator, conjugate, parse_word
from .invariants.compare import tower_compare
from .moves import DecompositionRecord
from .stratified import reduce_stratified, stratified_from_pair

Z = AbelianGroup(1, (), ("t",))


def standard_records():
    """Handle y versus y[y, x y x^-1] over F = <x, y>, x -> t, y -> 1."""
    F = FreeGroup(2, ("x", "y"))
    phi = GroupHom(F, Z, ((1,), (0,)))
    x, y = Word.gen(0), Word.gen(1)
    A = DecompositionRecord(F, phi, (), (), (("A", y),))
    B = DecompositionRecord(F, phi, (), (), (("A", y * commutator(y, conjugate(y, x))),))
    return A, B


def _trefoil():
    X = presentation(["x", "y"], ["x*y*x*y^-1*x^-1*y^-1"], [(1,), (1,)], Z)
    H = homology_presentation(fox_complex(X), 1)
    got = H.first_elementary_ideal.describe()
    return got == "(t^2 - t + 1)", f"first elementary ideal {got}"


def _roundtrip():
    X = presentation(["x", "y"], ["x*y*x*y^-1*x^-1*y^-1"], [(1,), (1,)], Z)
    text = format_complex(fox_complex(X))
    return format_complex(parse_complex(text)) == text, "complex file round trip"


def _separation():
    A, B = standard_records()
    rep = tower_compare(A, B, 1)
    want = "equivalent at level 0, obstructed at level 1 for the chosen lift"
    return rep.summary() == want and rep.exit_code == 2, rep.summary()


def _grope():
    names = ("x", "y")
    leaves = {1: ["x", "y"], 2: ["x", "y", "x*y", "y*x^2"]}
    ok = True
    for n in (1, 2):
        w = grope_boundary_word(simplest_shape(n), [parse_word(c, names) for c in leaves[n]])
        ok = ok and derived_membership(w, n, 2) is True and derived_membership(w, n + 1, 2) is False
    return ok, "simplest gropes of height 1, 2 lie in F^(n) and not in F^(n+1)"


def _stratified():
    """(D^2, S^1) with Lambda = Z and Gamma trivial."""
    F = FreeGroup(1, ("a",))
    X = RelativeTwoComplex(F, (Word.gen(0),), GroupHom(F, trivial_group(), ((),)), ("r1",),
                           frozenset({0}))
    s = AbelianGroup(1, (), ("s",))
    psi = GroupHom(FreeGroup(1, ("a",)), s, ((1,),))
    lam = GroupHom(s, trivial_group(), ((),))
    S = stratified_from_pair(X, psi, lam)
    ok = S.check_boundary() and S.squares_to_zero() and \
        reduce_stratified(S) == fox_complex(X).trimmed()
    return ok, "disk relative to its boundary circle"


def _alignment(seed: int):
    rng = random.Random(seed)
    done = 0
    for _ in range(5):
        res = align_one_skeleton(random_instance(rng))
        if res.aligned and replay_check(res)[0]:
            done += 1
    return done == 5, f"{done}/5 random alignments replayed"


def run_selftest(seed: int = 0):
    checks = [("trefoil ideal", _trefoil), ("file round trip", _roundtrip),
              ("tower separation", _separation), ("grope levels", _grope),
              ("stratified reduction", _stratified), ("alignment", lambda: _alignment(seed))]
    out = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, never crash the selftest
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        out.append((name, bool(ok), detail))
    return out
