import random

import pytest

from gammachain.chains import FormatError
from gammachain.grouprings import AbelianGroup, FreeGroup, GroupHom, Word, commutator, conjugate
from gammachain.grouprings.grope import simplest_shape
from gammachain.invariants import simpleness_certificate
from gammachain.moves import (CertificateError, DecompositionRecord, DualFactor, GropeFactor,
                              MoveCertificate, PairFactor, RecordError, apply_move, check_grope_lift,
                              deformation_level, format_record, level_chains, move_trace,
                              parse_record, validate_certificate)
from gammachain.selftest import standard_records
from gammachain.tower import gamma_n_descriptor

from _gen import random_certificate, random_record

Z = AbelianGroup(1, (), ("t",))
F2 = FreeGroup(2, ("x", "y"))
x, y = Word.gen(0), Word.gen(1)


def test_certified_moves_keep_the_gamma_boundary():
    rng = random.Random(40)
    for _ in range(60):
        R = random_record(rng)
        cert = random_certificate(rng, R)
        R2, f = apply_move(R, cert)
        assert level_chains(R2, 0).boundary(2) == level_chains(R, 0).boundary(2)
        assert f.commutes()


def test_move_trace_composite_is_simple():
    rng = random.Random(41)
    for _ in range(15):
        R = random_record(rng)
        certs, cur = [], R
        for _ in range(3):
            c = random_certificate(rng, cur)
            certs.append(c)
            cur, _ = apply_move(cur, c)
        trace = move_trace(R, certs)
        assert trace.end == cur
        assert len(trace.log) == 3
        v = simpleness_certificate(trace.composite)
        assert v.simple


def test_inverse_certificate_undoes_the_move():
    rng = random.Random(42)
    for _ in range(25):
        R = random_record(rng)
        cert = random_certificate(rng, R)
        assert cert.inverse().word(R) == cert.word(R).inverse()
        R2, _ = apply_move(R, cert)
        R3, _ = apply_move(R2, cert.inverse())
        assert R3.handle(cert.target) == R.handle(cert.target)


def test_record_rejects_words_outside_the_kernel():
    phi = GroupHom(F2, Z, ((1,), (0,)))
    with pytest.raises(RecordError):
        DecompositionRecord(F2, phi, (), (), (("A", x),))
    with pytest.raises(RecordError):
        DecompositionRecord(F2, phi, (), (), (("A", y),), (("m", y),), frozenset())


def test_certificate_validation():
    A, _ = standard_records()
    validate_certificate(A, MoveCertificate("A", (PairFactor(y, x * y * x.inverse()),)))
    with pytest.raises(CertificateError):
        validate_certificate(A, MoveCertificate("A", (PairFactor(x, y),)))
    with pytest.raises(CertificateError):
        validate_certificate(A, MoveCertificate("A", (DualFactor(x, "nope"),)))
    with pytest.raises(CertificateError):
        validate_certificate(A, MoveCertificate("A", (GropeFactor(simplest_shape(1), (x, y)),)))
    with pytest.raises(RecordError):
        validate_certificate(A, MoveCertificate("B", ()))


def test_deformation_level_of_the_standard_move():
    A, B = standard_records()
    cert = MoveCertificate("A", (PairFactor(y, x * y * x.inverse()),))
    level, note = deformation_level(A, cert)
    assert level == 0 and note == ""
    R2, _ = apply_move(A, cert)
    assert R2.handle("A") == B.handle("A")


def test_deformation_level_rises_with_commutator_factors():
    A, _ = standard_records()
    c1 = commutator(y, x * y * x.inverse())
    c2 = commutator(y, x * x * y * x.inverse() * x.inverse())
    level, _ = deformation_level(A, MoveCertificate("A", (PairFactor(c1, c2),)))
    assert level >= 1


def test_dual_factor_is_invisible_at_level_zero_only():
    F = FreeGroup(3, ("x", "y", "b"))
    phi = GroupHom(F, Z, ((1,), (0,), (0,)))
    b = Word.gen(2)
    R = DecompositionRecord(F, phi, (), (), (("A", y),), (("m1", b),), frozenset({2}))
    cert = MoveCertificate("A", (DualFactor(x * y, "m1", -1),))
    R2, f = apply_move(R, cert)
    assert R2.handle("A") == y * (x * y) * b.inverse() * (x * y).inverse()
    assert level_chains(R2, 0).boundary(2) == level_chains(R, 0).boundary(2)
    # b is in the kernel but not in its commutator subgroup, so level 1 sees the conjugating word
    assert level_chains(R2, 1).boundary(2) != level_chains(R, 1).boundary(2)
    assert deformation_level(R, cert) == (0, "")


def test_check_grope_lift():
    A, _ = standard_records()
    L = gamma_n_descriptor(A.base(), 1)
    leaves = (y, x * y * x.inverse(), y * y, x * y * y * x.inverse())
    g = GropeFactor(simplest_shape(2), leaves)
    # depth-2 sub-gropes are caps: trivial at level 0; depth-1 are commutators: trivial at level 1
    assert check_grope_lift(g, 1, L) is True
    # caps in the kernel always lift; a cap outside it fails already at level 0
    assert check_grope_lift(GropeFactor(simplest_shape(1), (y, x * y * x.inverse())), 1, L) is True
    assert check_grope_lift(GropeFactor(simplest_shape(1), (x, y)), 1, L) is False


def test_record_file_round_trip():
    rng = random.Random(43)
    for _ in range(20):
        R = random_record(rng)
        certs = [random_certificate(rng, R) for _ in range(2)]
        text = format_record(R, certs)
        R2, certs2 = parse_record(text)
        assert format_record(R2, certs2) == text
        assert [c.word(R) for c in certs] == [c.word(R2) for c in certs2]


def test_record_parse_error_position():
    text = ("[group]\ngenerators: x, y\n[hom]\ntarget: abelian r=1 torsion=[] names=t\n"
            "x -> t\ny -> 1\n[whandles]\nA = y*q\n")
    with pytest.raises(FormatError) as info:
        parse_record(text)
    assert (info.value.line, info.value.col) == (8, 7)

