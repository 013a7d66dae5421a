"""Reader for the sectioned text files used by presentations and records."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .chains.fileformat import FormatError

_HEADER = re.compile(r"^\[([A-Za-z_]+)((?:\s+[A-Za-z_]+=\S+)*)\s*\]$")


@dataclass
class Line:
    number: int
    column: int
    key: str
    value: str
    value_column: int


@dataclass
class Section:
    name: str
    attrs: dict
    number: int
    lines: list = field(default_factory=list)

    def values(self, key: str) -> list[Line]:
        return [ln for ln in self.lines if ln.key == key]

    def first(self, key: str) -> Line | None:
        got = self.values(key)
        return got[0] if got else None


def read_sections(text: str, separators=(":", "->", "=")) -> list[Section]:
    sections: list[Section] = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        s = line.strip()
        if s.startswith("["):
            m = _HEADER.match(s)
            if not m:
                raise FormatError(f"bad section header {s!r}", n, col)
            attrs = dict(kv.split("=", 1) for kv in m.group(2).split())
            sections.append(Section(m.group(1), attrs, n))
            continue
        if not sections:
            raise FormatError("content before the first [section]", n, col)
        best = None
        for sep in separators:
            i = s.find(sep)
            if i >= 0 and (best is None or i < best[0]):
                best = (i, sep)
        if best is None:
            raise FormatError(f"expected 'key{separators[0]} value' in {s!r}", n, col)
        i, sep = best
        key = s[:i].strip()
        value = s[i + len(sep):]
        vcol = col + i + len(sep) + (len(value) - len(value.lstrip()))
        sections[-1].lines.append(Line(n, col, key, value.strip(), vcol))
    return sections


def split_list(value: str, sep: str = ",") -> list[str]:
    """Split on ``sep`` outside brackets and parentheses."""
    out, depth, buf = [], 0, ""
    for ch in value:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == sep and depth == 0:
            out.append(buf.strip())
            buf = ""
        else:
            buf += ch
    if buf.strip():
        out.append(buf.strip())
    return out


def word_format_error(exc, ln: Line, fragment: str | None = None) -> FormatError:
    """Turn a word parse error inside ``fragment`` of a line's value into a positioned FormatError."""
    col = ln.value_column
    if fragment is not None:
        at = ln.value.find(fragment)
        col += max(at, 0)
    column = getattr(exc, "column", None)
    if column:
        col += column - 1
    return FormatError(getattr(exc, "reason", str(exc)), ln.number, col)
