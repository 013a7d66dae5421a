"""Free group words, free reduction, and the textual word syntax.

Words are stored as tuples of ``(generator_index, exponent)`` pairs in freely
reduced form: adjacent pairs never share a generator and exponents are never
zero.  The empty tuple is the identity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class WordError(ValueError):
    """Parse failure; ``column`` is 1-based within the parsed text when known."""

    def __init__(self, reason: str, column: int | None = None):
        self.reason, self.column = reason, column
        super().__init__(f"{reason} at column {column}" if column else reason)


def free_reduce(letters: Iterable[tuple[int, int]], rank: int | None = None) -> "Word":
    """Freely reduce a raw letter sequence.

    Uses a stack, so the result does not depend on cancellation order.
    """
    stack: list[list[int]] = []
    for gen, exp in letters:
        gen, exp = int(gen), int(exp)
        if gen < 0 or (rank is not None and gen >= rank):
            raise WordError(f"generator index {gen} out of range for rank {rank}")
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            stack[-1][1] += exp
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([gen, exp])
    return Word(tuple((g, e) for g, e in stack))


@dataclass(frozen=True, order=True)
class Word:
    letters: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def gen(i: int, exp: int = 1) -> "Word":
        return free_reduce([(i, exp)])

    def __mul__(self, other: "Word") -> "Word":
        return free_reduce(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inverse() ** (-n)
        out = Word()
        for _ in range(n):
            out = out * self
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def syllables(self) -> list[tuple[int, int]]:
        """Expand to unit-exponent letters ``(gen, +-1)``."""
        out = []
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def exponent_sums(self, rank: int) -> tuple[int, ...]:
        v = [0] * rank
        for g, e in self.letters:
            v[g] += e
        return tuple(v)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def substitute(self, images: Sequence["Word"]) -> "Word":
        """Apply the endomorphism sending generator i to ``images[i]``."""
        out = Word()
        for g, e in self.letters:
            out = out * (images[g] ** e)
        return out


def commutator(a: Word, b: Word) -> Word:
    """``[a, b] = a b a^-1 b^-1``."""
    return a * b * a.inverse() * b.inverse()


def conjugate(w: Word, by: Word) -> Word:
    """``by * w * by^-1``."""
    return by * w * by.inverse()


# -- text syntax ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(-?\d+)|(\^)|(\*)|(\[)|(\])|(\()|(\))|(,))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = len(text[:pos]) + len(text[pos:]) - len(text[pos:].lstrip())
            raise WordError(f"unexpected character {text[bad]!r}", bad + 1)
        kinds = ("name", "int", "^", "*", "[", "]", "(", ")", ",")
        for kind, val in zip(kinds, m.groups()):
            if val is not None:
                out.append((kind, val, m.start(m.lastindex) + 1))
                break
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.index = {n: k for k, n in enumerate(names)}
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text) + 1)

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise WordError(f"expected {kind!r}, got {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def product(self) -> Word:
        w = self.power()
        while self.peek()[0] == "*":
            self.i += 1
            w = w * self.power()
        return w

    def power(self) -> Word:
        w = self.atom()
        while self.peek()[0] == "^":
            self.i += 1
            w = w ** int(self.take("int")[1])
        return w

    def atom(self) -> Word:
        kind, val, col = self.peek()
        if kind == "name":
            self.i += 1
            if val not in self.index:
                raise WordError(f"unknown generator {val!r}", col)
            return Word.gen(self.index[val])
        if kind == "int":
            self.i += 1
            if val != "1":
                raise WordError("only '1' may appear as a bare integer", col)
            return Word()
        if kind == "(":
            self.i += 1
            w = self.product()
            self.take(")")
            return w
        if kind == "[":
            self.i += 1
            a = self.product()
            self.take(",")
            b = self.product()
            self.take("]")
            return commutator(a, b)
        raise WordError(f"unexpected token {val!r}", col)


def parse_word(text: str, names: Sequence[str]) -> Word:
    p = _Parser(text, names)
    w = p.product()
    if p.i != len(p.toks):
        raise WordError("trailing input", p.peek()[2])
    return w


def format_word(w: Word, names: Sequence[str]) -> str:
    if not w.letters:
        return "1"
    parts = []
    for g, e in w.letters:
        parts.append(names[g] if e == 1 else f"{names[g]}^{e}")
    return "*".join(parts)
