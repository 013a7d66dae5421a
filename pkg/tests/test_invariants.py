import copy
import random

import pytest

from gammachain.chains import (BasedFreeChainComplex, ChainMap, Mat, SimpleMove, apply_moves,
                               apply_simple_move, block_diag, identity_map)
from gammachain.foxcover import fox_complex, presentation
from gammachain.grouprings import AbelianGroup, GroupHom, GroupRingElem, parse_elem, trivial_group
from gammachain.invariants import (EXIT_DIFFERENT, EXIT_TRIVIAL, EXIT_UNDECIDED, ScObject,
                                   ThetaError, cohn_invertibility, complex_torsion, factor_class,
                                   identity_invariant, laurent_det, mapping_cone,
                                   simpleness_certificate, tau_invariant, tau_is_trivial, theta_map,
                                   tower_compare, verify_certificate)
from gammachain.moves import apply_move, deformation_level, level_chains
from gammachain.selftest import standard_records

from _gen import random_certificate, random_record

Z = AbelianGroup(1, (), ("t",))


def P(text, group=Z):
    return parse_elem(text, group)


def two_term(a: GroupRingElem) -> BasedFreeChainComplex:
    G = a.group
    return BasedFreeChainComplex.build(G, [["p"], ["e"]], [Mat.from_rows(G, [[a]])])


def _rand_poly(rng):
    return GroupRingElem(Z, {(e,): rng.randint(-3, 3) for e in range(0, 3)}) + GroupRingElem.monomial(Z, (3,))


# -- torsion -------------------------------------------------------------------------------------

def test_torsion_of_a_two_term_complex():
    tau = complex_torsion(two_term(P("t^2 - t + 1")))
    assert tau.describe() == "(t^2 - t + 1)"
    assert complex_torsion(two_term(P("-t^3"))).is_trivial


def test_factor_class_cancels_and_normalizes():
    tau = factor_class([P("t^2 - 1"), P("t^2 - t + 1")], [P("1 - t")])
    assert tau.same_class(factor_class([P("t + 1"), P("t^2 - t + 1")]))


def test_torsion_is_multiplicative_on_sums():
    rng = random.Random(3)
    for _ in range(10):
        a, b = _rand_poly(rng), _rand_poly(rng)
        A, B = two_term(a), two_term(b)
        S = BasedFreeChainComplex.build(Z, [["p", "q"], ["e", "f"]], [block_diag(A.d[1], B.d[1])])
        assert complex_torsion(S).same_class(complex_torsion(A) * complex_torsion(B))


def test_torsion_is_invariant_under_simple_moves():
    C = two_term(P("t^2 - t + 1"))
    moves = [SimpleMove("stabilize", 1), SimpleMove("slide", 1, 0, 1, P("t - 3")),
             SimpleMove("slide", 0, 1, 0, P("2*t")), SimpleMove("unit", 1, 1, coeff=P("-t^2"))]
    C2, f, _ = apply_moves(C, moves)
    assert complex_torsion(C2).same_class(complex_torsion(C))
    assert simpleness_certificate(f).simple


def test_laurent_det_and_cohn_invertibility():
    V = Mat.from_rows(Z, [[P("t^2 - t + 1"), P("t")], [P("0"), P("1")]])
    assert laurent_det(V) == P("t^2 - t + 1")
    triv = GroupHom(Z, trivial_group(), ((),))
    assert cohn_invertibility(V, triv)
    assert not cohn_invertibility(Mat.from_rows(Z, [[P("t - 1")]]), triv)


def test_non_equivalence_is_reported():
    C = two_term(P("t - 1"))
    f = ChainMap(C, C, (Mat.from_rows(Z, [[P("2")]]), Mat.from_rows(Z, [[P("2")]])))
    v = simpleness_certificate(f)
    assert v.status == "not-equivalence"


def test_mapping_cone_of_identity_is_acyclic():
    C = fox_complex(presentation(["x", "y"], ["x*y*x*y^-1*x^-1*y^-1"], [(1,), (1,)], Z))
    cone = mapping_cone(identity_map(C))
    assert complex_torsion(cone).is_trivial


# -- theta --------------------------------------------------------------------------------------

def test_theta_twist_multiplies_torsion_by_det():
    E = BasedFreeChainComplex.build(Z, [["p"], ["e"], ["c"]], [Mat.zeros(Z, 1, 1), Mat.zeros(Z, 1, 1)])
    D = ScObject(E, identity_map(E))
    V = Mat.from_rows(Z, [[P("t^2 - t + 1")]])
    out = theta_map(V, D, GroupHom(Z, trivial_group(), ((),)))
    assert out.E.boundary(2) == V @ E.boundary(2)
    assert out.q.commutes()
    assert "t^2 - t + 1" in out.note
    with pytest.raises(ThetaError):
        theta_map(Mat.from_rows(Z, [[P("t - 1")]]), D, GroupHom(Z, trivial_group(), ((),)))


# -- tau and verdicts ---------------------------------------------------------------------------

def test_identity_invariant_is_trivial():
    C = fox_complex(presentation(["x", "y"], ["x*y*x*y^-1*x^-1*y^-1"], [(1,), (1,)], Z))
    v = tau_is_trivial(identity_invariant(C), identity_invariant(C))
    assert v.status == "trivial"


def test_euler_obstruction_and_its_certificate():
    A = two_term(P("t^2 - t + 1"))
    B = BasedFreeChainComplex.build(Z, [["p"], ["e", "f"]], [Mat.from_rows(Z, [[P("t - 1")], [P("0")]])])
    inv, ref = tau_invariant(B, A), identity_invariant(A)
    v = tau_is_trivial(inv, ref)
    assert v.status == "obstructed" and v.certificate["kind"] == "euler"
    assert verify_certificate(v, inv, ref)
    forged = copy.deepcopy(v)
    forged.certificate["invariant"] = forged.certificate["reference"]
    assert not verify_certificate(forged, inv, ref)


def test_homology_obstruction_certificate_reverifies():
    A = two_term(P("t^2 - t + 1"))
    B = two_term(P("t^2 - 3*t + 1"))
    inv, ref = tau_invariant(B, A), identity_invariant(A)
    v = tau_is_trivial(inv, ref)
    assert v.status == "obstructed" and v.certificate["scope"] == "invariant"
    assert verify_certificate(v, inv, ref)
    forged = copy.deepcopy(v)
    forged.certificate["invariant"] = ["1"]
    assert not verify_certificate(forged, inv, ref)


def test_stabilized_invariant_is_trivial():
    A = two_term(P("t^2 - t + 1"))
    B, _ = apply_simple_move(A, SimpleMove("stabilize", 1))
    v = tau_is_trivial(tau_invariant(B, A), identity_invariant(A))
    assert v.status == "trivial"


# -- tower comparison ---------------------------------------------------------------------------

def test_standard_pair_separates_at_level_one():
    A, B = standard_records()
    rep = tower_compare(A, B, 1)
    assert rep.summary() == "equivalent at level 0, obstructed at level 1 for the chosen lift"
    assert rep.exit_code == EXIT_DIFFERENT
    cert = rep.levels[-1].certificate
    assert cert["kind"] == "lift" and cert["scope"] == "chosen-lift"
    assert rep.caveats
    # the certificate recomputes from the level-1 chains
    from gammachain.tower import lift_identification
    L = lift_identification(A.base(), B.base(), 0).source
    FA, FB = level_chains(A, 1, L), level_chains(B, 1, L)
    inv, ref = tau_invariant(FB, FA), identity_invariant(FA)
    v = tau_is_trivial(inv, ref)
    assert v.certificate == cert and verify_certificate(v, inv, ref)


def test_self_comparison_is_trivial():
    A, _ = standard_records()
    rep = tower_compare(A, A, 1)
    assert rep.outcome == "trivial" and rep.exit_code == EXIT_TRIVIAL


def test_mismatched_records_are_undecided():
    A, _ = standard_records()
    from gammachain.grouprings import FreeGroup, Word
    F = FreeGroup(2, ("a", "b"))
    C = type(A)(F, GroupHom(F, A.group, A.phi.images), (), (), (("A", Word.gen(1)),))
    rep = tower_compare(A, C, 1)
    assert rep.exit_code == EXIT_UNDECIDED


def test_certified_moves_are_never_called_different():
    rng = random.Random(77)
    seen = set()
    for _ in range(25):
        R = random_record(rng)
        cert = random_certificate(rng, R, max_height=1)
        R2, _ = apply_move(R, cert)
        rep = tower_compare(R, R2, 1)
        seen.add(rep.outcome)
        assert all(v.status != "different" for v in rep.levels)
        assert rep.levels[0].status == "equivalent"
        j, _ = deformation_level(R, cert, cap=1)
        if j >= 1:
            assert rep.outcome in ("trivial", "undecided")
    assert "trivial" in seen
