"""Matrices over group rings.

Convention throughout the package: modules are left modules and matrices act
on row vectors from the right.  A map A -> B has one row per basis element of
A and one column per basis element of B; composition ``g o f`` is ``F @ G``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from ..grouprings.ring import GroupRingElem, RingTagError


@dataclass(frozen=True)
class Mat:
    group: object
    nrows: int
    ncols: int
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        if len(rows) != self.nrows or any(len(r) != self.ncols for r in rows):
            raise ValueError(f"matrix shape mismatch: expected {self.nrows}x{self.ncols}")
        for r in rows:
            for a in r:
                if a.group != self.group:
                    raise RingTagError("matrix entry has the wrong ring tag")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def zeros(cls, group, n: int, m: int) -> "Mat":
        z = GroupRingElem.zero(group)
        return cls(group, n, m, tuple((z,) * m for _ in range(n)))

    @classmethod
    def identity(cls, group, n: int) -> "Mat":
        z, o = GroupRingElem.zero(group), GroupRingElem.one(group)
        return cls(group, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def from_rows(cls, group, rows: Sequence[Sequence[GroupRingElem]], ncols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        return cls(group, len(rows), ncols, rows)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def col(self, j: int):
        return [r[j] for r in self.rows]

    def transpose(self) -> "Mat":
        return Mat(self.group, self.ncols, self.nrows, [self.col(j) for j in range(self.ncols)])

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.group != other.group:
            raise RingTagError("matrix ring mismatch")
        z = GroupRingElem.zero(self.group)
        out = []
        cols = [other.col(j) for j in range(other.ncols)]
        for r in self.rows:
            row = []
            for c in cols:
                acc = z
                for a, b in zip(r, c):
                    if a.terms and b.terms:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return Mat(self.group, self.nrows, other.ncols, out)

    def __add__(self, other: "Mat") -> "Mat":
        self._same_shape(other)
        return Mat(self.group, self.nrows, self.ncols,
                   [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._same_shape(other)
        return Mat(self.group, self.nrows, self.ncols,
                   [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat(self.group, self.nrows, self.ncols, [[-a for a in r] for r in self.rows])

    def scale(self, c: int) -> "Mat":
        return Mat(self.group, self.nrows, self.ncols, [[a * c for a in r] for r in self.rows])

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.group != other.group:
            raise RingTagError("matrix ring mismatch")

    def is_zero(self) -> bool:
        return all(not a.terms for r in self.rows for a in r)

    def map_entries(self, fn: Callable[[GroupRingElem], GroupRingElem], group=None) -> "Mat":
        group = self.group if group is None else group
        return Mat(group, self.nrows, self.ncols, [[fn(a) for a in r] for r in self.rows])

    def first_nonzero(self):
        for i, r in enumerate(self.rows):
            for j, a in enumerate(r):
                if a.terms:
                    return i, j, a
        return None

    def block(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Mat":
        return Mat(self.group, len(row_idx), len(col_idx),
                   [[self.rows[i][j] for j in col_idx] for i in row_idx])

    def with_entry(self, i: int, j: int, value: GroupRingElem) -> "Mat":
        rows = [list(r) for r in self.rows]
        rows[i][j] = value
        return Mat(self.group, self.nrows, self.ncols, rows)


def hstack(mats: Sequence[Mat], group, nrows: int) -> Mat:
    rows = [[] for _ in range(nrows)]
    ncols = 0
    for M in mats:
        if M.nrows != nrows:
            raise ValueError("hstack row mismatch")
        ncols += M.ncols
        for i in range(nrows):
            rows[i].extend(M.rows[i])
    return Mat(group, nrows, ncols, rows)


def vstack(mats: Sequence[Mat], group, ncols: int) -> Mat:
    rows = []
    for M in mats:
        if M.ncols != ncols:
            raise ValueError("vstack column mismatch")
        rows.extend(M.rows)
    return Mat(group, len(rows), ncols, rows)


def block_diag(A: Mat, B: Mat) -> Mat:
    g = A.group
    top = hstack([A, Mat.zeros(g, A.nrows, B.ncols)], g, A.nrows)
    bot = hstack([Mat.zeros(g, B.nrows, A.ncols), B], g, B.nrows)
    return vstack([top, bot], g, A.ncols + B.ncols)


def determinant(M: Mat) -> GroupRingElem:
    """Division-free determinant (commutative rings only), by Laplace/Berkowitz-free recursion."""
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    if not getattr(M.group, "is_commutative", False):
        raise ValueError("determinant needs a commutative coefficient ring")
    return _det([list(r) for r in M.rows], M.group)


def _det(rows, group) -> GroupRingElem:
    n = len(rows)
    if n == 0:
        return GroupRingElem.one(group)
    if n == 1:
        return rows[0][0]
    # expand along the sparsest row
    i = min(range(n), key=lambda k: sum(1 for a in rows[k] if a.terms))
    acc = GroupRingElem.zero(group)
    rest = rows[:i] + rows[i + 1:]
    for j, a in enumerate(rows[i]):
        if not a.terms:
            continue
        minor = [r[:j] + r[j + 1:] for r in rest]
        term = a * _det(minor, group)
        acc = acc + term if (i + j) % 2 == 0 else acc - term
    return acc
