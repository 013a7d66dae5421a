import itertools
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from gammachain.chains import (BasedFreeChainComplex, ChainError, ChainHomotopy, FormatError, Mat,
                               SimpleMove, apply_moves, apply_simple_move, determinant,
                               format_chain_map, format_complex, homology_presentation,
                               identity_map, kernel_generators, laurent_gcd, normalize_generator,
                               parse_chain_map, parse_complex, reduce_complex, tensor_reduce,
                               validate_complex)
from gammachain.foxcover import fox_complex, presentation
from gammachain.grouprings import AbelianGroup, GroupHom, GroupRingElem, parse_elem
from gammachain.laurent import LaurentSubmodule, lift, syzygies

from _gen import random_presentation

Z = AbelianGroup(1, (), ("t",))
Z2 = AbelianGroup(2, (), ("s", "t"))


def P(text, group=Z):
    return parse_elem(text, group)


def trefoil():
    return fox_complex(presentation(["x", "y"], ["x*y*x*y^-1*x^-1*y^-1"], [(1,), (1,)], Z))


def figure_eight():
    # <x, y | y x^-1 y x y^-1 x y x^-1 y^-1 x^-1 ... > via the standard Wirtinger-type relator
    rel = "x^-1*y*x*y^-1*x*y*x^-1*y^-1*x*y^-1"
    return fox_complex(presentation(["x", "y"], [rel], [(1,), (1,)], Z))


def to_poly(a: GroupRingElem, t):
    """One-variable Laurent polynomial as a sympy expression, shifted to lowest degree 0."""
    if not a.terms:
        return sympy.Integer(0)
    low = min(g[0] for g, _ in a.terms)
    return sum(c * t ** (g[0] - low) for g, c in a.terms)


# -- complexes and moves ------------------------------------------------------------------------

def test_fox_complexes_validate():
    rng = random.Random(5)
    for _ in range(40):
        C = fox_complex(random_presentation(rng))
        rep = validate_complex(C)
        assert rep.valid, rep.messages


def test_validation_pinpoints_failure():
    C = trefoil()
    bad = C.with_boundary(1, C.boundary(1).with_entry(0, 0, P("t")))
    # d2 d1 no longer vanishes
    rep = validate_complex(bad)
    assert not rep.valid
    assert rep.failing_degree == 2


def test_shape_mismatch_rejected():
    with pytest.raises(ChainError):
        BasedFreeChainComplex.build(Z, [["p"], ["a", "b"]], [Mat.zeros(Z, 1, 1)])


def _random_moves(rng, C, n):
    moves = []
    cur = C
    for _ in range(n):
        k = rng.randint(0, cur.top)
        roll = rng.random()
        if roll < 0.5 and cur.rank(k) >= 2:
            i, j = rng.sample(range(cur.rank(k)), 2)
            m = SimpleMove("slide", k, i, j, GroupRingElem.monomial(Z, (rng.randint(-2, 2),),
                                                                     rng.choice((1, -1, 2))))
        elif roll < 0.7 and cur.rank(k):
            m = SimpleMove("unit", k, rng.randrange(cur.rank(k)),
                           coeff=GroupRingElem.monomial(Z, (rng.randint(-2, 2),), rng.choice((1, -1))))
        else:
            m = SimpleMove("stabilize", max(k, 1))
        cur, _ = apply_simple_move(cur, m)
        moves.append(m)
    return moves


def test_move_witnesses_verify():
    rng = random.Random(8)
    C = trefoil()
    for m in _random_moves(rng, C, 30):
        C2, wit = apply_simple_move(C, m)
        assert validate_complex(C2).valid
        assert wit.verify(), m
        C = C2


def test_reduction_preserves_the_alexander_ideal():
    rng = random.Random(3)
    C = trefoil()
    C2, comp, wits = apply_moves(C, _random_moves(rng, C, 12))
    assert comp.commutes()
    R, moves, f = reduce_complex(C2)
    assert f.commutes()
    assert R.rank(0) + R.rank(1) + R.rank(2) < C2.rank(0) + C2.rank(1) + C2.rank(2)
    for D in (C2, R):
        assert homology_presentation(D, 1).first_elementary_ideal.describe() == "(t^2 - t + 1)"


def test_chain_homotopy_identity():
    C = trefoil()
    C2, w = apply_simple_move(C, SimpleMove("slide", 1, 0, 1, P("t - 2")))
    h = w.source_homotopy
    assert isinstance(h, ChainHomotopy) and h.holds()
    assert identity_map(C).commutes()


def test_tensor_reduce_to_trivial_group():
    lam = GroupHom(Z, AbelianGroup(0), ((),))
    R = tensor_reduce(trefoil(), lam)
    assert validate_complex(R).valid
    # over Z the relator row is its exponent-sum vector
    triv = AbelianGroup(0)
    assert list(R.boundary(2).rows[0]) == [GroupRingElem.integer(triv, 1), GroupRingElem.integer(triv, -1)]


# -- homology ------------------------------------------------------------------------------------

def test_trefoil_and_figure_eight_ideals():
    assert homology_presentation(trefoil(), 1).first_elementary_ideal.describe() == "(t^2 - t + 1)"
    assert homology_presentation(figure_eight(), 1).first_elementary_ideal.describe() == "(t^2 - 3*t + 1)"


def test_torus_cover_has_no_first_homology():
    X = presentation(["x", "y"], ["x*y*x^-1*y^-1"], [(1, 0), (0, 1)], Z2)
    H = homology_presentation(fox_complex(X), 1)
    assert H.is_zero_module


def test_kernel_generators_lie_in_kernel():
    rng = random.Random(21)
    for _ in range(15):
        C = fox_complex(random_presentation(rng, max_gens=3, max_rels=3, max_len=8))
        if C.group.torsion or C.top < 2:
            continue
        for v in kernel_generators(C.boundary(2)):
            row = Mat.from_rows(C.group, [v], C.rank(2)) @ C.boundary(2)
            assert row.is_zero()


def test_normalize_and_gcd():
    # lowest exponent shifted to 0, lowest term positive
    assert normalize_generator(P("-t^3 + t^4")) == P("1 - t")
    assert laurent_gcd([P("t^2 - 1"), P("t^3 - t^2")]) == P("1 - t")


def test_determinant_of_triangular():
    M = Mat.from_rows(Z, [[P("t"), P("3")], [P("0"), P("1 - t")]])
    assert determinant(M) == P("t - t^2")


# -- Gröbner membership against independent oracles ---------------------------------------------

def _rand_laurent(rng, deg=3, low=-1):
    return GroupRingElem(Z, {(e,): rng.randint(-3, 3) for e in range(low, low + deg + 1)})


def test_principal_membership_matches_polynomial_division():
    t = sympy.symbols("t")
    rng = random.Random(2)
    for _ in range(60):
        g = _rand_laurent(rng)
        if not g.terms:
            continue
        f = _rand_laurent(rng, 5) if rng.random() < 0.5 else g * _rand_laurent(rng, 2)
        M = LaurentSubmodule(Z, 1, [[g]])
        gp, fp = to_poly(g, t), to_poly(f, t)
        # Laurent units are +-t^k: strip powers of t from g before comparing
        g0 = sympy.Poly(gp, t)
        while g0.eval(0) == 0:
            g0 = sympy.Poly(sympy.cancel(g0.as_expr() / t), t)
        q, r = sympy.div(sympy.Poly(fp, t, domain="QQ"), g0.set_domain("QQ"))
        oracle = r.is_zero and all(c.is_integer for c in q.all_coeffs())
        assert M.contains([f]) == oracle


@pytest.mark.parametrize("p", [2, 3, 5])
def test_membership_in_prime_plus_polynomial_ideal(p):
    """(p, g) with g monic: f is a member iff g divides f modulo p."""
    t = sympy.symbols("t")
    rng = random.Random(p)
    for _ in range(40):
        g = _rand_laurent(rng, 2, 0) + GroupRingElem.monomial(Z, (3,))
        f = _rand_laurent(rng, 5, 0)
        if rng.random() < 0.4:
            f = g * _rand_laurent(rng, 2, 0) + GroupRingElem.integer(Z, p) * _rand_laurent(rng, 2, 0)
        M = LaurentSubmodule(Z, 1, [[GroupRingElem.integer(Z, p)], [g]])
        gp = sympy.Poly(to_poly(g, t), t, modulus=p)
        while gp.eval(0) == 0:  # t is a unit in the Laurent ring
            gp = sympy.Poly(sympy.cancel(gp.as_expr() / t), t, modulus=p)
        fp = sympy.Poly(to_poly(f, t) if f.terms else 0, t, modulus=p)
        oracle = fp.rem(gp).is_zero
        assert M.contains([f]) == oracle


def test_brute_force_combinations_are_members():
    rng = random.Random(9)
    for _ in range(25):
        gens = [[_rand_laurent(rng, 2), _rand_laurent(rng, 2)] for _ in range(2)]
        coeffs = [_rand_laurent(rng, 1) for _ in gens]
        target = [sum((c * g[i] for c, g in zip(coeffs, gens)), GroupRingElem.zero(Z))
                  for i in range(2)]
        M = LaurentSubmodule(Z, 2, gens)
        assert M.contains(target)
        sol = lift(Z, 2, gens, target)
        assert sol is not None
        got = [sum((c * g[i] for c, g in zip(sol, gens)), GroupRingElem.zero(Z)) for i in range(2)]
        assert got == target


def test_small_search_agrees_on_non_members():
    """Exhaustive search over tiny multipliers never finds a witness the basis rejects."""
    g = [P("2"), P("t + 1")]
    M = LaurentSubmodule(Z, 1, [[a] for a in g])
    small = [GroupRingElem(Z, {(0,): a, (1,): b}) for a, b in itertools.product(range(-2, 3), repeat=2)]
    reachable = {(a * g[0] + b * g[1]).terms for a in small for b in small}
    for terms in reachable:
        assert M.contains([GroupRingElem(Z, dict(terms))])
    assert not M.contains([P("1")])
    assert not M.contains([P("t")])


def test_syzygies_are_relations():
    vecs = [[P("t - 1"), P("1")], [P("t^2 - 1"), P("t + 1")], [P("2"), P("0")]]
    for c in syzygies(Z, 2, vecs):
        for i in range(2):
            assert sum((a * v[i] for a, v in zip(c, vecs)), GroupRingElem.zero(Z)) == GroupRingElem.zero(Z)


# -- file formats -------------------------------------------------------------------------------

def test_complex_file_round_trip():
    rng = random.Random(4)
    for _ in range(20):
        C = fox_complex(random_presentation(rng))
        text = format_complex(C)
        assert parse_complex(text) == C
        assert format_complex(parse_complex(text)) == text


def test_chain_map_file_round_trip():
    from gammachain.chains import random_instance
    f = random_instance(random.Random(1))
    text = format_chain_map(f)
    g = parse_chain_map(text)
    assert format_chain_map(g) == text
    assert g.commutes()


@pytest.mark.parametrize("text,line", [
    ("ring: abelian r=1 torsion=[] names=t\ndeg 0: p\ndeg 1: a\nd1[0,0] = t - \n", 4),
    ("ring: abelian r=1 torsion=[] names=t\ndeg 0: p\ndeg 1: a\nd1[3,0] = 1\n", 4),
    ("deg 0: p\nring: nonsense\n", 2),
])
def test_complex_parse_errors_have_positions(text, line):
    with pytest.raises(FormatError) as info:
        parse_complex(text)
    assert info.value.line == line
    assert info.value.col >= 1
