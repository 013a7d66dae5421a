"""Chain invariants over the level ring with three-valued comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..chains.complex import BasedFreeChainComplex, ChainMap, describe_move, identity_map, zero_map
from ..chains.homology import UnsupportedRing, homology_presentation, require_laurent
from ..chains.matrix import Mat
from ..chains.reduction import reduce_complex
from ..grouprings.groups import AbelianGroup, GroupHom
from ..grouprings.ring import GroupRingElem, format_elem
from ..verdicts import CapExceeded
from .torsion import cohn_invertibility, is_monomial_matrix, laurent_det, simpleness_certificate


class ThetaError(ValueError):
    pass


@dataclass(frozen=True)
class ScObject:
    """A complex E with a map q into a reference complex."""

    E: BasedFreeChainComplex
    q: ChainMap
    note: str = ""

    def __post_init__(self):
        if self.q.source != self.E:
            raise ValueError("q must start at E")

    @property
    def reference(self) -> BasedFreeChainComplex:
        return self.q.target


@dataclass
class ChainInvariantClass:
    rep: ScObject
    label: str = ""
    cache: dict = field(default_factory=dict)

    @property
    def E(self):
        return self.rep.E


def identity_invariant(C: BasedFreeChainComplex, label: str = "identity") -> ChainInvariantClass:
    return ChainInvariantClass(ScObject(C, identity_map(C)), label)


def basis_bijection(E: BasedFreeChainComplex, C: BasedFreeChainComplex) -> ChainMap:
    """The evident map matching basis elements by position; ranks must agree."""
    if E.ranks() != C.ranks():
        raise ValueError("basis counts differ; no evident bijection")
    return ChainMap(E, C, tuple(Mat.identity(E.group, E.rank(k)) for k in range(E.top + 1)))


def tau_invariant(E_B: BasedFreeChainComplex, E_A: BasedFreeChainComplex,
                  label: str = "") -> ChainInvariantClass:
    """Package B's level chains with the evident basis map into A's reference chains."""
    if E_B.group != E_A.group:
        raise ValueError("level chains are over different rings; identify the levels first")
    top = max(E_A.top, E_B.top)
    E_A, E_B = E_A.extended(top), E_B.extended(top)
    if E_A.ranks() != E_B.ranks():
        # no evident basis map; only invariant-level comparisons apply
        return ChainInvariantClass(ScObject(E_B, zero_map(E_B, E_A), "no basis bijection"), label)
    q = basis_bijection(E_B, E_A)
    return ChainInvariantClass(ScObject(E_B, q), label)


# -- verdicts -----------------------------------------------------------------------------------


@dataclass
class TauVerdict:
    status: str  # "trivial", "obstructed", "undecided"
    certificate: dict | None = None
    witness: dict | None = None
    reason: str = ""

    def as_json(self):
        return {"status": self.status, "reason": self.reason,
                "certificate": self.certificate, "witness": self.witness}


def _fmt_row(M: Mat, i: int) -> list[str]:
    return [_fmt(a) for a in M.rows[i]]


def _fmt(a: GroupRingElem) -> str:
    if isinstance(a.group, AbelianGroup):
        return format_elem(a)
    return " + ".join(f"{c}*{a.group.format_element(g)}" for g, c in a.terms) or "0"


def _lift_defect(q: ChainMap):
    """First (degree, row) where q fails to commute, with both sides."""
    S, T = q.source, q.target
    for k in range(1, max(S.top, T.top) + 1):
        lhs = S.boundary(k) @ q.at(k - 1)
        rhs = q.at(k) @ T.boundary(k)
        for i in range(lhs.nrows):
            if lhs.rows[i] != rhs.rows[i]:
                return {"degree": k, "row": i, "cell": S.labels[k][i],
                        "source_boundary": _fmt_row(lhs, i), "mapped_reference_boundary": _fmt_row(rhs, i)}
    return None


def _fitting_signature(C: BasedFreeChainComplex):
    """Per degree, the normalized Fitting ideals (list of generator strings) or None on cap."""
    sig = []
    for k in range(C.top + 1):
        try:
            H = homology_presentation(C, k)
        except CapExceeded:
            return None
        row = []
        for F in H.fitting:
            if F.undecided is not None:
                return None
            row.append(sorted(format_elem(g) for g in F.generators))
        sig.append(row)
    return sig


def _homology_difference(E: BasedFreeChainComplex, C: BasedFreeChainComplex):
    top = max(E.top, C.top)
    a, b = _fitting_signature(E.extended(top)), _fitting_signature(C.extended(top))
    if a is None or b is None:
        return None
    for k, (x, y) in enumerate(zip(a, b)):
        n = max(len(x), len(y))
        x = x + [["1"]] * (n - len(x))
        y = y + [["1"]] * (n - len(y))
        for j, (ix, iy) in enumerate(zip(x, y)):
            if ix != iy:
                return {"degree": k, "index": j, "invariant": ix, "reference": iy}
    return None


def _reduced_equal(E: BasedFreeChainComplex, C: BasedFreeChainComplex):
    rE, mE, _ = reduce_complex(E)
    rC, mC, _ = reduce_complex(C)
    top = max(rE.top, rC.top)
    rE, rC = rE.extended(top).trimmed(), rC.extended(top).trimmed()
    if rE.ranks() == rC.ranks() and all(rE.d[k] == rC.d[k] for k in range(1, rE.top + 1)):
        return {"kind": "stabilization", "moves_invariant": [describe_move(m) for m in mE],
                "moves_reference": [describe_move(m) for m in mC], "reduced_ranks": rE.ranks()}
    return None


def tau_is_trivial(inv: ChainInvariantClass, reference: ChainInvariantClass, seed: int = 0) -> TauVerdict:
    E, q = inv.rep.E, inv.rep.q
    C = reference.E
    if q.target != C:
        return TauVerdict("undecided", reason="invariant does not map into the reference chains")
    abelian = isinstance(E.group, AbelianGroup)
    if E.euler_characteristic() != C.euler_characteristic():
        cert = {"kind": "euler", "scope": "invariant",
                "invariant": E.euler_characteristic(), "reference": C.euler_characteristic()}
        return TauVerdict("obstructed", cert, reason="Euler characteristics differ")
    commutes = q.commutes()
    has_bijection = inv.rep.note != "no basis bijection"
    if commutes and has_bijection:
        if abelian:
            try:
                v = simpleness_certificate(q, seed)
            except UnsupportedRing as exc:
                v = None
                reason = str(exc)
            if v is not None and v.simple:
                return TauVerdict("trivial", witness={"kind": "equivalence", "map": "q",
                                                      "torsion": v.torsion.describe()},
                                  reason="q is a simple equivalence")
        elif all(is_monomial_matrix(q.at(k)) for k in range(max(E.top, C.top) + 1)):
            return TauVerdict("trivial", witness={"kind": "equivalence", "map": "q",
                                                  "torsion": "monomial isomorphism"},
                              reason="q is a based isomorphism with monomial matrices")
    red = _reduced_equal(E, C)
    if red is not None:
        return TauVerdict("trivial", witness=red, reason="equal after cancelling unit entries")
    if abelian:
        try:
            require_laurent(E.group)
            diff = _homology_difference(E, C)
        except UnsupportedRing:
            diff = None
        if diff is not None:
            cert = dict(diff, kind="homology", scope="invariant")
            return TauVerdict("obstructed", cert, reason="homology modules differ")
    if not commutes and not getattr(E.group, "exact", True):
        return TauVerdict("undecided", reason="the chosen lift does not commute on keys, but key "
                                              "inequality is not conclusive at this level")
    if not commutes:
        defect = _lift_defect(q)
        cert = dict(defect, kind="lift", scope="chosen-lift")
        return TauVerdict("obstructed", cert,
                          reason="the chosen lift does not carry the boundary of "
                                 f"{defect['cell']} to the reference boundary")
    return TauVerdict("undecided", reason="no equivalence certified and no obstruction found at cap")


def verify_certificate(verdict: TauVerdict, inv: ChainInvariantClass,
                       reference: ChainInvariantClass) -> bool:
    """Recompute an obstruction certificate from scratch."""
    cert = verdict.certificate
    if verdict.status != "obstructed" or not cert:
        return False
    E, C, q = inv.rep.E, reference.E, inv.rep.q
    kind = cert.get("kind")
    if kind == "euler":
        return (E.euler_characteristic() == cert["invariant"]
                and C.euler_characteristic() == cert["reference"]
                and cert["invariant"] != cert["reference"])
    if kind == "homology":
        again = _homology_difference(E, C)
        return again is not None and again["degree"] == cert["degree"] \
            and again["invariant"] == cert["invariant"] and again["reference"] == cert["reference"]
    if kind == "lift":
        k, i = cert["degree"], cert["row"]
        lhs = (E.boundary(k) @ q.at(k - 1))
        rhs = (q.at(k) @ C.boundary(k))
        return (lhs.rows[i] != rhs.rows[i] and _fmt_row(lhs, i) == cert["source_boundary"]
                and _fmt_row(rhs, i) == cert["mapped_reference_boundary"])
    return False


# -- theta ----------------------------------------------------------------------------------------


def theta_map(V: Mat, D: ScObject, lam: GroupHom) -> ScObject:
    """Twist degree 2 by V: d2 becomes V d2 and q2 becomes V q2 (row convention)."""
    E = D.E
    if V.shape != (E.rank(2), E.rank(2)):
        raise ThetaError("V must be square of size rank E_2")
    if E.rank(3):
        raise ThetaError("theta_map needs chains concentrated in degrees <= 2")
    if not cohn_invertibility(V, lam):
        raise ThetaError("V is not invertible over the localization")
    E2 = E.with_boundary(2, V @ E.boundary(2))
    maps = list(D.q.maps)
    maps[2] = V @ D.q.at(2)
    q2 = ChainMap(E2, D.q.target, tuple(maps))
    det = laurent_det(V)
    return ScObject(E2, q2, note=f"theta twist by det {format_elem(det)}")
