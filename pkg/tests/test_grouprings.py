import random

import pytest
from hypothesis import given, settings, strategies as st

from gammachain.grouprings import (AbelianGroup, FreeGroup, GroupHom, GroupRingElem, RingTagError,
                                   Word, WordError, augmentation, cap_count, commutator,
                                   coefficient_change, derived_membership, format_canonical,
                                   format_elem, format_word, fox_derivative, fox_identity_holds,
                                   free_reduce, grope_boundary_word, parse_elem, parse_word,
                                   shape_height, simplest_shape, subgropes_at_depth)
from gammachain.grouprings.derived import FreeSolvableQuotient
from gammachain.grouprings.groups import hom_apply
from gammachain.invariants import grope_move_degree

from _gen import random_hom, random_word

Z = AbelianGroup(1, (), ("t",))
Z2 = AbelianGroup(2, (), ("s", "t"))
ZT = AbelianGroup(1, (3,), ("t", "u"))

letters = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=20)
words = letters.map(lambda ls: free_reduce(ls))


def elems(group):
    keys = st.tuples(*[st.integers(-3, 3)] * group.ngens).map(group.normalize)
    return st.dictionaries(keys, st.integers(-4, 4), max_size=4).map(lambda d: GroupRingElem(group, d))


# -- words --------------------------------------------------------------------------------------

@given(words, words, words)
def test_word_product_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(words)
def test_word_inverse(a):
    assert (a * a.inverse()).is_identity()
    assert (a.inverse() * a).is_identity()


@given(letters)
def test_free_reduce_is_idempotent(ls):
    w = free_reduce(ls)
    assert free_reduce(w.letters) == w
    assert all(a[0] != b[0] for a, b in zip(w.letters, w.letters[1:]))


@given(words)
def test_word_text_round_trip(w):
    names = ("x", "y", "z")
    assert parse_word(format_word(w, names), names) == w


def test_parse_word_syntax():
    names = ("x", "y")
    x, y = Word.gen(0), Word.gen(1)
    assert parse_word("[x, y]", names) == commutator(x, y)
    assert parse_word("(x*y)^-2", names) == (x * y) ** -2
    assert parse_word("1", names).is_identity()


@pytest.mark.parametrize("text,col", [("x*q", 3), ("x*", 3), ("x y", 3), ("x % y", 3)])
def test_parse_word_errors_carry_column(text, col):
    with pytest.raises(WordError) as info:
        parse_word(text, ("x", "y"))
    assert info.value.column == col


# -- groups and rings ---------------------------------------------------------------------------

def test_abelian_torsion_normalizes():
    assert ZT.mul((1, 2), (0, 2)) == (1, 1)
    assert ZT.inv((2, 1)) == (-2, 2)


@pytest.mark.parametrize("group", [Z, Z2, ZT])
def test_ring_axioms(group):
    @settings(max_examples=40, deadline=None)
    @given(elems(group), elems(group), elems(group))
    def check(a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert a - a == GroupRingElem.zero(group)
        assert augmentation(a * b) == augmentation(a) * augmentation(b)
    check()


@given(elems(Z2))
def test_elem_text_round_trips(a):
    assert parse_elem(format_canonical(a), Z2) == a
    assert parse_elem(format_elem(a), Z2) == a


def test_format_elem_reads_naturally():
    e = parse_elem("t^2 - t + 1", Z)
    assert format_elem(e) == "t^2 - t + 1"
    assert format_canonical(e) == "1*t^2 + -1*t^1 + 1"


def test_ring_tags_do_not_mix():
    with pytest.raises(RingTagError):
        GroupRingElem.one(Z) + GroupRingElem.one(Z2)


@given(elems(Z2), elems(Z2))
def test_coefficient_change_is_a_ring_map(a, b):
    lam = GroupHom(Z2, Z, ((1,), (1,)))
    assert coefficient_change(a * b, lam) == coefficient_change(a, lam) * coefficient_change(b, lam)
    assert coefficient_change(a + b, lam) == coefficient_change(a, lam) + coefficient_change(b, lam)


# -- Fox calculus -------------------------------------------------------------------------------

def test_fox_identity_on_random_words():
    rng = random.Random(11)
    F = FreeGroup(3, ("x", "y", "z"))
    for G in (Z, Z2, ZT, AbelianGroup(0)):
        for _ in range(50):
            phi = random_hom(rng, F, G)
            assert fox_identity_holds(random_word(rng, 3), phi)


def test_fox_derivative_examples():
    F = FreeGroup(2, ("x", "y"))
    phi = GroupHom(F, Z, ((1,), (0,)))
    x, y = Word.gen(0), Word.gen(1)
    one, t = GroupRingElem.one(Z), GroupRingElem.monomial(Z, (1,))
    assert fox_derivative(x * x, 0, phi) == one + t
    assert fox_derivative(x.inverse(), 0, phi) == -GroupRingElem.monomial(Z, (-1,))
    # d[x, y]/dx = 1 - x y x^-1 with y -> 1
    assert fox_derivative(commutator(x, y), 0, phi) == GroupRingElem.zero(Z)
    assert fox_derivative(commutator(x, y), 1, phi) == t - one


@given(words, words)
def test_fox_product_rule(u, v):
    F = FreeGroup(3, ("x", "y", "z"))
    phi = GroupHom(F, Z2, ((1, 0), (0, 1), (1, -1)))
    pu = GroupRingElem.monomial(Z2, hom_apply(phi, u))
    for i in range(3):
        assert fox_derivative(u * v, i, phi) == fox_derivative(u, i, phi) + pu * fox_derivative(v, i, phi)


# -- derived series and gropes ------------------------------------------------------------------

def test_derived_membership_basics():
    x, y = Word.gen(0), Word.gen(1)
    c = commutator(x, y)
    assert derived_membership(c, 1, 2) is True
    assert derived_membership(c, 2, 2) is False
    assert derived_membership(commutator(c, commutator(x, y * x)), 2, 2) is True
    assert derived_membership(x, 1, 2) is False
    assert derived_membership(Word(), 3, 2) is True


@given(words, words)
@settings(max_examples=50, deadline=None)
def test_metabelian_quotient_is_a_homomorphism(u, v):
    Q = FreeSolvableQuotient(3, 2)
    assert Q.image(u * v) == Q.mul(Q.image(u), Q.image(v))
    assert Q.mul(Q.image(u), Q.inv(Q.image(u))) == Q.identity()


@given(words, words, words, words)
@settings(max_examples=30, deadline=None)
def test_commutators_of_commutators_are_second_derived(a, b, c, d):
    w = commutator(commutator(a, b), commutator(c, d))
    assert derived_membership(w, 2, 3) is True


@pytest.mark.parametrize("n", [1, 2])
def test_simplest_grope_boundary_levels(n):
    shape = simplest_shape(n)
    assert shape_height(shape) == n
    assert cap_count(shape) == 2 ** n
    rng = random.Random(n)
    names = ("x", "y")
    for _ in range(20):
        leaves = [random_word(rng, 2, 4) for _ in range(cap_count(shape))]
        assert derived_membership(grope_boundary_word(shape, leaves), n, 2) is True
    # random leaves often commute, so exactness is checked on fixed leaves
    fixed = {1: ["x", "y"], 2: ["x", "y", "x*y", "y*x^2"]}[n]
    w = grope_boundary_word(shape, [parse_word(s, names) for s in fixed])
    assert derived_membership(w, n + 1, 2) is False


def test_subgropes_at_depth():
    shape = simplest_shape(2)
    leaves = [Word.gen(i % 2, 1 + i) for i in range(4)]
    top = subgropes_at_depth(shape, leaves, 0)
    assert top == [grope_boundary_word(shape, leaves)]
    assert subgropes_at_depth(shape, leaves, 2) == leaves


@pytest.mark.parametrize("n", [1, 2, 3])
def test_grope_move_degree(n):
    assert grope_move_degree(n) == 2 ** n
