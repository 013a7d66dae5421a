"""Exact integral group-ring arithmetic."""

from __future__ import annotations

import re
from typing import Any, Iterable, Mapping

from .groups import AbelianGroup, GroupError, GroupHom, group_pow, hom_apply


class RingTagError(ValueError):
    pass


class GroupRingElem:
    """A finite integer combination of group elements.

    ``group`` doubles as the ring tag.  Terms are kept sorted by element key
    with zero coefficients dropped, so ``==`` is exact equality.
    """

    __slots__ = ("group", "terms", "_hash")

    def __init__(self, group, terms: Mapping | Iterable = ()):
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for g, c in items:
            if c:
                acc[g] = acc.get(g, 0) + int(c)
        self.group = group
        self.terms = tuple(sorted((g, c) for g, c in acc.items() if c))
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, group) -> "GroupRingElem":
        return cls(group)

    @classmethod
    def one(cls, group) -> "GroupRingElem":
        return cls(group, {group.identity(): 1})

    @classmethod
    def monomial(cls, group, g, c: int = 1) -> "GroupRingElem":
        return cls(group, {g: c})

    @classmethod
    def integer(cls, group, c: int) -> "GroupRingElem":
        return cls(group, {group.identity(): c})

    def _check(self, other: "GroupRingElem"):
        if not isinstance(other, GroupRingElem):
            raise TypeError(f"cannot combine GroupRingElem with {type(other).__name__}")
        if other.group != self.group:
            raise RingTagError(f"ring tag mismatch: {self.group!r} vs {other.group!r}")

    def _coerce(self, other):
        if isinstance(other, int):
            return GroupRingElem.integer(self.group, other)
        self._check(other)
        return other

    def __add__(self, other):
        other = self._coerce(other)
        acc = dict(self.terms)
        for g, c in other.terms:
            acc[g] = acc.get(g, 0) + c
        return GroupRingElem(self.group, acc)

    __radd__ = __add__

    def __neg__(self):
        return GroupRingElem(self.group, {g: -c for g, c in self.terms})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElem(self.group, {g: c * other for g, c in self.terms})
        self._check(other)
        mul = self.group.mul
        acc: dict = {}
        for g, c in self.terms:
            for h, d in other.terms:
                k = mul(g, h)
                acc[k] = acc.get(k, 0) + c * d
        return GroupRingElem(self.group, acc)

    def __rmul__(self, other):
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            u = self.unit_part()
            if u is None:
                raise ValueError("only units ±g may be raised to negative powers")
            s, g = u
            return GroupRingElem.monomial(self.group, group_pow(self.group, g, n), s ** (-n))
        out = GroupRingElem.one(self.group)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = GroupRingElem.integer(self.group, other)
        if not isinstance(other, GroupRingElem):
            return NotImplemented
        return self.group == other.group and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.group, self.terms))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def unit_part(self):
        """Return ``(sign, g)`` when the element is ±g, else None."""
        if len(self.terms) == 1 and abs(self.terms[0][1]) == 1:
            g, c = self.terms[0]
            return c, g
        return None

    def is_trivial_unit(self) -> bool:
        return self.unit_part() is not None

    def coefficient(self, g) -> int:
        for h, c in self.terms:
            if h == g:
                return c
        return 0

    def support(self):
        return [g for g, _ in self.terms]

    def conjugate_involution(self) -> "GroupRingElem":
        """The standard involution g -> g^-1."""
        return GroupRingElem(self.group, {self.group.inv(g): c for g, c in self.terms})

    def left_translate(self, g) -> "GroupRingElem":
        mul = self.group.mul
        return GroupRingElem(self.group, {mul(g, h): c for h, c in self.terms})

    def __repr__(self):
        return f"GroupRingElem({format_elem(self)})"

    def __str__(self):
        return format_elem(self)


def ring_add(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    return a + b


def ring_mul(a: GroupRingElem, b: GroupRingElem) -> GroupRingElem:
    return a * b


def augmentation(a: GroupRingElem) -> int:
    return sum(c for _, c in a.terms)


def coefficient_change(a: GroupRingElem, lam: GroupHom) -> GroupRingElem:
    """Linear extension of ``lam`` on group elements."""
    if a.group != lam.source:
        raise RingTagError("coefficient_change: element ring does not match hom source")
    acc: dict = {}
    for g, c in a.terms:
        k = hom_apply(lam, g)
        acc[k] = acc.get(k, 0) + c
    return GroupRingElem(lam.target, acc)


# -- formatting and parsing --------------------------------------------------------


def format_elem(a: GroupRingElem) -> str:
    """Human-readable form, highest term first, e.g. ``t^2 - t + 1``."""
    if not a.terms:
        return "0"
    out = []
    for g, c in reversed(a.terms):
        mon = a.group.format_element(g)
        if mon == "1":
            body = str(abs(c))
        elif abs(c) == 1:
            body = mon
        else:
            body = f"{abs(c)}*{mon}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append(("- " if c < 0 else "+ ") + body)
    return " ".join(out)


def format_canonical(a: GroupRingElem) -> str:
    """Canonical file syntax ``<int>*t1^<e1>*...`` joined by `` + ``.

    Terms are ordered by descending element key; every nonzero exponent is
    written explicitly; the constant term is the bare integer.
    """
    if not a.terms:
        return "0"
    grp = a.group
    parts = []
    for g, c in reversed(a.terms):
        factors = [f"{n}^{e}" for n, e in zip(grp.names, g) if e]
        parts.append("*".join([str(c)] + factors))
    return " + ".join(parts)


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")


def parse_elem(text: str, group: AbelianGroup) -> GroupRingElem:
    """Parse a Laurent-polynomial expression over an abelian group.

    Accepts both the canonical syntax (``1*t1^2 + -1*t1^1 + 1``) and the
    informal one (``t^2 - t + 1``, ``2*u*v^-1``).
    """
    if not isinstance(group, AbelianGroup):
        raise GroupError("text syntax is only defined for abelian coefficient groups")
    s = text.strip()
    if not s:
        raise ValueError("empty ring element")
    if s[-1] in "+-*^":
        raise ValueError(f"dangling {s[-1]!r} at the end of {text!r}")
    index = {n: i for i, n in enumerate(group.names)}
    # split into signed terms, keeping exponent minus signs attached
    terms: list[tuple[int, str]] = []
    sign, buf, i = 1, "", 0
    while i < len(s):
        ch = s[i]
        if ch in "+-" and (not buf.strip() or buf.rstrip()[-1] not in "^*"):
            if buf.strip():
                terms.append((sign, buf.strip()))
                buf = ""
                sign = 1
            sign *= -1 if ch == "-" else 1
        else:
            buf += ch
        i += 1
    if buf.strip():
        terms.append((sign, buf.strip()))
    acc: dict = {}
    for sgn, body in terms:
        coeff = sgn
        exps = [0] * group.ngens
        for factor in body.split("*"):
            factor = factor.strip()
            if not factor:
                raise ValueError(f"malformed term {body!r}")
            if re.fullmatch(r"-?\d+", factor):
                coeff *= int(factor)
                continue
            m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?", factor)
            if not m or m.group(1) not in index:
                raise ValueError(f"unknown factor {factor!r} in {text!r}")
            exps[index[m.group(1)]] += int(m.group(2) or 1)
        key = group.normalize(exps)
        acc[key] = acc.get(key, 0) + coeff
    return GroupRingElem(group, acc)
