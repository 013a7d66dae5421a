import copy
import random

import pytest

from gammachain.chains import (AlignError, ChainMap, Mat, align_one_skeleton, identity_map,
                               is_basis_preserving, random_instance, replay_check)
from gammachain.foxcover import fox_complex, presentation
from gammachain.grouprings import AbelianGroup, GroupRingElem

Z = AbelianGroup(1, (), ("t",))


def _aligned(seed, steps=4):
    rng = random.Random(seed)
    f = random_instance(rng, steps)
    return f, align_one_skeleton(f)


def test_random_instances_align_and_replay():
    done = 0
    for seed in range(12):
        f, res = _aligned(seed)
        assert f.commutes()
        if res.aligned:
            done += 1
            ok, why = replay_check(res)
            assert ok, why
            assert is_basis_preserving(res.map)
            assert res.source.ranks()[3:] == f.source.ranks()[3:]
    assert done >= 9


def test_replay_catches_tampering():
    f, res = next((f, r) for f, r in (_aligned(s) for s in range(30))
                  if r.aligned and r.source_moves and r.homotopy)
    assert replay_check(res)[0]

    bad = copy.copy(res)
    bad.source_moves = res.source_moves[:-1]
    assert not replay_check(bad)[0]

    bad = copy.copy(res)
    k = next(k for k, h in enumerate(res.homotopy) if h.nrows and h.ncols)
    h = res.homotopy[k]
    bump = h.with_entry(0, 0, h[0, 0] + GroupRingElem.one(Z))
    bad.homotopy = res.homotopy[:k] + (bump,) + res.homotopy[k + 1:]
    assert not replay_check(bad)[0]

    bad = copy.copy(res)
    m1 = res.map.at(1)
    j = next(j for j in range(m1.ncols) if not m1[0, j].is_zero())
    wrong = m1.with_entry(0, j, m1[0, j] * 2)
    bad.map = ChainMap(res.map.source, res.map.target,
                       (res.map.at(0), wrong) + tuple(res.map.at(k) for k in range(2, res.source.top + 1)))
    assert not replay_check(bad)[0]


def test_basis_preserving_input_is_left_alone():
    C = fox_complex(presentation(["x", "y"], ["x*y*x*y^-1*x^-1*y^-1"], [(1,), (1,)], Z))
    res = align_one_skeleton(identity_map(C))
    assert res.aligned and not res.source_moves and not res.target_moves
    assert replay_check(res)[0]


def test_hypothesis_failures_are_rejected():
    C = fox_complex(presentation(["x", "y"], [], [(1,), (0,)], Z))
    zero = ChainMap(C, C, tuple(Mat.zeros(Z, C.rank(k), C.rank(k)) for k in range(C.top + 1)))
    with pytest.raises(AlignError):
        align_one_skeleton(zero)
    f = identity_map(C)
    broken = ChainMap(C, C, (f.at(0).scale(2),) + tuple(f.at(k) for k in range(1, C.top + 1)))
    with pytest.raises(AlignError):
        align_one_skeleton(broken)
