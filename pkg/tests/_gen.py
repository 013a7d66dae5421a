"""Random objects shared by the test suites."""

from __future__ import annotations

import random

from gammachain.foxcover import RelativeTwoComplex
from gammachain.grouprings.groups import AbelianGroup, FreeGroup, GroupHom, hom_apply
from gammachain.grouprings.words import Word, free_reduce

NAMES = ("x", "y", "z", "w")

TARGETS = [
    AbelianGroup(0),
    AbelianGroup(1, (), ("t",)),
    AbelianGroup(2, (), ("s", "t")),
    AbelianGroup(1, (2,), ("t", "u")),
]


def random_word(rng: random.Random, rank: int, max_len: int = 16) -> Word:
    n = rng.randint(0, max_len)
    return free_reduce([(rng.randrange(rank), rng.choice((1, -1))) for _ in range(n)])


def random_hom(rng: random.Random, F: FreeGroup, G: AbelianGroup) -> GroupHom:
    """Generator i < G.ngens hits the i-th basis element; the rest go anywhere small."""
    images = []
    for i in range(F.rank):
        if i < G.ngens:
            images.append(G.generator(i))
        else:
            images.append(G.normalize([rng.randint(-2, 2) for _ in range(G.ngens)]))
    return GroupHom(F, G, tuple(images))


def kill_image(w: Word, phi: GroupHom) -> Word:
    """Append powers of the basis-hitting generators so that w maps to the identity."""
    v = hom_apply(phi, w)
    for i, e in enumerate(v):
        if e:
            w = w * Word.gen(i, -e)
    return w


def random_presentation(rng: random.Random, max_gens: int = 4, max_rels: int = 4,
                        max_len: int = 16) -> RelativeTwoComplex:
    while True:
        G = rng.choice(TARGETS)
        n = rng.randint(max(1, G.ngens), max_gens)
        F = FreeGroup(n, NAMES[:n])
        phi = random_hom(rng, F, G)
        rels = []
        for _ in range(rng.randint(0, max_rels)):
            r = kill_image(random_word(rng, n, max_len), phi)
            if len(r) <= max_len:
                rels.append(r)
        return RelativeTwoComplex(F, tuple(rels), phi)


def kernel_word(rng: random.Random, phi: GroupHom, length: int, tries: int = 6) -> Word:
    """A random word in ker phi, nontrivial when a few attempts allow it."""
    n = phi.source.rank
    w = Word()
    for _ in range(tries):
        w = kill_image(random_word(rng, n, length), phi)
        if not w.is_identity():
            break
    return w


def random_record(rng: random.Random):
    """A decomposition record over Z or Z^2 with 1-2 handles and possibly a boundary generator."""
    from gammachain.moves import DecompositionRecord

    G = rng.choice(TARGETS[1:3])
    n = rng.randint(max(2, G.ngens), 3)
    F = FreeGroup(n, NAMES[:n])
    images = list(random_hom(rng, F, G).images)
    bgens, mduals = frozenset(), ()
    last = n - 1
    if last >= G.ngens and rng.random() < 0.6:
        bgens = frozenset({last})
        if rng.random() < 0.6:
            images[last] = G.identity()
            mduals = (("m1", Word.gen(last, rng.choice((1, 2)))),)
    phi = GroupHom(F, G, tuple(images))
    rels = tuple(kernel_word(rng, phi, 8) for _ in range(rng.randint(0, 1)))
    handles = tuple((f"A{i + 1}", kernel_word(rng, phi, 8)) for i in range(rng.randint(1, 2)))
    return DecompositionRecord(F, phi, rels, (), handles, mduals, bgens)


def random_certificate(rng: random.Random, R, max_height: int = 2):
    from gammachain.grouprings.grope import cap_count, simplest_shape
    from gammachain.moves import DualFactor, GropeFactor, MoveCertificate, PairFactor

    n = R.F.rank
    factors = []
    for _ in range(rng.randint(1, 2)):
        roll = rng.random()
        if roll < 0.45:
            factors.append(PairFactor(kernel_word(rng, R.phi, 5), kernel_word(rng, R.phi, 5)))
        elif roll < 0.65 and R.mduals:
            factors.append(DualFactor(random_word(rng, n, 4), rng.choice(R.mduals)[0],
                                      rng.choice((1, -1))))
        else:
            shape = simplest_shape(rng.randint(1, max_height))
            leaves = tuple(kernel_word(rng, R.phi, 3) for _ in range(cap_count(shape)))
            factors.append(GropeFactor(shape, leaves))
    return MoveCertificate(rng.choice(R.handles)[0], tuple(factors))
