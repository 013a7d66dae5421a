import random

import pytest

from gammachain.chains import format_complex, validate_complex
from gammachain.foxcover import PresentationError, RelativeTwoComplex, fox_complex
from gammachain.grouprings import (AbelianGroup, FreeGroup, GroupHom, GroupRingElem, Word,
                                   commutator, trivial_group)
from gammachain.grouprings.groups import hom_apply
from gammachain.laurent import LaurentSubmodule
from gammachain.stratified import (LambdaData, StratifiedError, format_stratified, natural_map,
                                   parse_stratified, reduce_stratified, stratified_from_pair,
                                   suspend)

from _gen import NAMES, random_word

S1 = AbelianGroup(1, (), ("s",))
SU = AbelianGroup(2, (), ("s", "u"))
T = AbelianGroup(1, (), ("t",))

LAMBDAS = [
    GroupHom(SU, T, ((1,), (1,))),
    GroupHom(SU, T, ((1,), (0,))),
    GroupHom(S1, trivial_group(), ((),)),
    GroupHom(S1, T, ((1,),)),
    GroupHom(SU, S1, ((2,), (1,))),
]


def _kill(w: Word, images) -> Word:
    """Make w trivial under images, using that generator i maps to the i-th basis element."""
    v = [0] * len(images[0])
    for g, e in w.letters:
        v = [a + e * b for a, b in zip(v, images[g])]
    for i, e in enumerate(v):
        if e:
            w = w * Word.gen(i, -e)
    return w


def random_pair(rng: random.Random):
    """(X over Gamma, X lifted to Lambda, psi, lambda) with the lift hypothesis holding."""
    lam = rng.choice(LAMBDAS)
    L = lam.source
    b = rng.randint(L.ngens, 3)
    n = rng.randint(b, 4)
    F = FreeGroup(n, NAMES[:n])
    imL = [L.generator(i) if i < L.ngens else tuple(rng.randint(-2, 2) for _ in range(L.ngens))
           for i in range(n)]
    rels, brels = [], []
    for _ in range(rng.randint(0, 2)):
        rels.append(_kill(random_word(rng, b, 8), imL))
        brels.append(len(rels) - 1)
    for _ in range(rng.randint(0, 3)):
        rels.append(_kill(random_word(rng, n, 10), imL))
    phiL = GroupHom(F, L, tuple(imL))
    phi = GroupHom(F, lam.target, tuple(hom_apply(lam, g) for g in imL))
    kw = dict(boundary_generators=frozenset(range(b)), boundary_relators=frozenset(brels))
    X = RelativeTwoComplex(F, tuple(rels), phi, **kw)
    XL = RelativeTwoComplex(F, tuple(rels), phiL, **kw)
    psi = GroupHom(FreeGroup(b, NAMES[:b]), L, tuple(imL[:b]))
    return X, XL, psi, lam


def test_disk_relative_to_circle():
    F = FreeGroup(1, ("a",))
    X = RelativeTwoComplex(F, (Word.gen(0),), GroupHom(F, trivial_group(), ((),)), ("r1",),
                           frozenset({0}))
    psi = GroupHom(FreeGroup(1, ("a",)), S1, ((1,),))
    lam = GroupHom(S1, trivial_group(), ((),))
    S = stratified_from_pair(X, psi, lam)
    assert S.check_boundary() and S.squares_to_zero()
    assert format_complex(reduce_stratified(S)) == format_complex(fox_complex(X).trimmed())


def test_kernel_stratum_is_not_killed_by_plain_tensoring():
    """The degree-one member module is I = (s - 1); I/I^2 is Z, not zero."""
    s1 = GroupRingElem.monomial(S1, (1,)) - GroupRingElem.one(S1)
    assert not LaurentSubmodule(S1, 1, [[s1 * s1]]).contains([s1])


def test_random_pairs_reduce_and_square_to_zero():
    rng = random.Random(17)
    for _ in range(30):
        X, XL, psi, lam = random_pair(rng)
        S = stratified_from_pair(X, psi, lam)
        assert S.check_boundary()
        assert S.squares_to_zero()
        assert format_complex(reduce_stratified(S)) == format_complex(fox_complex(X).trimmed())


def test_natural_map_is_forced_by_the_projections():
    rng = random.Random(23)
    for _ in range(20):
        X, XL, psi, lam = random_pair(rng)
        S = stratified_from_pair(X, psi, lam)
        f = natural_map(XL, S)
        assert f.commutes()
        # the ambient image of every cell is (its reduction, its boundary in Y): nothing to choose
        from gammachain.stratified import boundary_chain_map
        dL = boundary_chain_map(XL)
        for n, imgs in enumerate(f.ambient):
            for i, (x, y) in enumerate(imgs):
                assert y == tuple(dL.at(n).rows[i])
                assert all(a == (GroupRingElem.one(S.gamma.group) if l == i else GroupRingElem.zero(S.gamma.group))
                           for l, a in enumerate(x))
            for i, row in enumerate(f.coeffs[n].rows):
                assert S.combine(n, row) == imgs[i]


def test_lift_hypothesis_failure_is_detected():
    # x y^-1 dies in Z[t] but not in Z[s, u]
    F = FreeGroup(3, ("x", "y", "z"))
    lam = LAMBDAS[0]
    imL = ((1, 0), (0, 1), (0, 0))
    rel = Word.gen(0) * Word.gen(1).inverse() * commutator(Word.gen(2), Word.gen(0))
    phi = GroupHom(F, T, tuple(hom_apply(lam, g) for g in imL))
    X = RelativeTwoComplex(F, (rel,), phi, boundary_generators=frozenset({0, 1}))
    S = stratified_from_pair(X, GroupHom(FreeGroup(2, ("x", "y")), SU, imL[:2]), lam)
    assert S.squares_to_zero()
    with pytest.raises(PresentationError):
        RelativeTwoComplex(F, (rel,), GroupHom(F, SU, imL), boundary_generators=frozenset({0, 1}))


def test_inconsistent_psi_is_rejected():
    rng = random.Random(1)
    X, XL, psi, lam = random_pair(rng)
    bad = GroupHom(psi.source, psi.target, tuple(psi.target.mul(g, g) for g in psi.images))
    if any(hom_apply(lam, a) != hom_apply(lam, b) for a, b in zip(bad.images, psi.images)):
        with pytest.raises(StratifiedError):
            stratified_from_pair(X, bad, lam)


def test_lambda_data_kernel_and_section():
    ld = LambdaData(LAMBDAS[0])
    for k in ld.kernel:
        assert hom_apply(LAMBDAS[0], k) == (0,)
    assert hom_apply(LAMBDAS[0], ld.section((3,))) == (3,)


def test_suspension_shifts_and_validates():
    X, _, _, _ = random_pair(random.Random(4))
    C = fox_complex(X)
    SC = suspend(C)
    assert SC.ranks() == [0] + C.ranks()
    assert validate_complex(SC).valid


def test_container_round_trip():
    rng = random.Random(31)
    for _ in range(10):
        X, XL, psi, lam = random_pair(rng)
        S = stratified_from_pair(X, psi, lam)
        text = format_stratified(S)
        S2 = parse_stratified(text)
        assert format_stratified(S2) == text
        assert S2.check_boundary()
