"""Text format for based chain complexes over abelian group rings.

    ring: abelian r=1 torsion=[] names=t
    deg 0: p
    deg 1: x,y
    deg 2: r
    d1[0,0] = 1*t^1 + -1
    d2[0,0] = 1*t^2 + -1*t^1 + 1

``names=`` is omitted when the default names t1, t2, ... are used.  Entries
not listed are zero.  Printing is canonical: entries in (degree, row, col)
order, terms in descending exponent order.
"""

from __future__ import annotations

import re

from ..grouprings.groups import AbelianGroup, default_names
from ..grouprings.ring import GroupRingElem, format_canonical, parse_elem
from .complex import BasedFreeChainComplex
from .matrix import Mat


class FormatError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line, self.col = line, col
        super().__init__(f"line {line}, column {col}: {msg}" if line else msg)


_LABEL = re.compile(r"^[A-Za-z0-9_.'*-]+$")
_RING = re.compile(r"^abelian\s+r=(\d+)\s+torsion=\[([0-9,\s]*)\](?:\s+names=(\S+))?\s*$")
_ENTRY = re.compile(r"^d(\d+)\[(\d+),(\d+)\]\s*=\s*(.+)$")


def format_ring(G: AbelianGroup) -> str:
    s = f"abelian r={G.free_rank} torsion=[{','.join(map(str, G.torsion))}]"
    if G.names != default_names(G.ngens) and G.ngens:
        s += " names=" + ",".join(G.names)
    return s


def parse_ring(text: str, line: int = 0) -> AbelianGroup:
    text = text.strip()
    if text.startswith("tower"):
        raise FormatError("tower-level rings are produced in memory only and cannot be read "
                          "from a file", line, 1)
    m = _RING.match(text)
    if not m:
        raise FormatError(f"bad ring description {text!r}", line, 1)
    r = int(m.group(1))
    tors = tuple(int(x) for x in m.group(2).replace(" ", "").split(",") if x)
    names = tuple(m.group(3).split(",")) if m.group(3) else ()
    try:
        return AbelianGroup(r, tors, names)
    except ValueError as exc:
        raise FormatError(str(exc), line, 1) from None


def format_complex(C: BasedFreeChainComplex) -> str:
    if not isinstance(C.group, AbelianGroup):
        raise FormatError("only complexes over abelian group rings can be written to a file")
    out = [f"ring: {format_ring(C.group)}"]
    for k, ls in enumerate(C.labels):
        out.append(f"deg {k}:" + (" " + ",".join(ls) if ls else ""))
    for k in range(1, C.top + 1):
        M = C.d[k]
        for i in range(M.nrows):
            for j in range(M.ncols):
                a = M[i, j]
                if a.terms:
                    out.append(f"d{k}[{i},{j}] = {format_canonical(a)}")
    return "\n".join(out) + "\n"


def parse_complex(text: str) -> BasedFreeChainComplex:
    return parse_complex_lines(text.splitlines(), 0)


def parse_complex_lines(lines, offset: int = 0) -> BasedFreeChainComplex:
    group = None
    labels: dict[int, list[str]] = {}
    entries: list = []
    for n, raw in enumerate(lines, start=offset + 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        s = line.strip()
        col = len(line) - len(line.lstrip()) + 1
        if s.startswith("ring:"):
            group = parse_ring(s[5:], n)
        elif s.startswith("deg "):
            head, _, body = s[4:].partition(":")
            if not head.strip().isdigit():
                raise FormatError("degree must be a nonnegative integer", n, col + 4)
            k = int(head)
            if k in labels:
                raise FormatError(f"degree {k} declared twice", n, col)
            names = [x.strip() for x in body.split(",") if x.strip()]
            for x in names:
                if not _LABEL.match(x):
                    raise FormatError(f"bad basis label {x!r}", n, col + s.index(x))
            if len(set(names)) != len(names):
                raise FormatError("duplicate basis label", n, col)
            labels[k] = names
        else:
            m = _ENTRY.match(s)
            if not m:
                raise FormatError(f"cannot parse {s!r}", n, col)
            entries.append((n, col + m.start(4), int(m.group(1)), int(m.group(2)), int(m.group(3)),
                            m.group(4)))
    if group is None:
        raise FormatError("missing 'ring:' line")
    if not labels:
        labels[0] = []
    top = max(labels)
    for k in range(top + 1):
        labels.setdefault(k, [])
    mats = [[[None] * len(labels[k - 1]) for _ in labels[k]] for k in range(1, top + 1)]
    for n, col, k, i, j, body in entries:
        if not 1 <= k <= top or i >= len(labels[k]) or j >= len(labels[k - 1]):
            raise FormatError(f"entry d{k}[{i},{j}] is out of range", n, col)
        if mats[k - 1][i][j] is not None:
            raise FormatError(f"entry d{k}[{i},{j}] given twice", n, col)
        try:
            mats[k - 1][i][j] = parse_elem(body, group)
        except ValueError as exc:
            raise FormatError(str(exc), n, col) from None
    zero = GroupRingElem.zero(group)
    M = [Mat(group, len(labels[k]), len(labels[k - 1]),
             [[a if a is not None else zero for a in row] for row in mats[k - 1]])
         for k in range(1, top + 1)]
    return BasedFreeChainComplex.build(group, [labels[k] for k in range(top + 1)], M)


# -- chain maps ------------------------------------------------------------------------------
#
#   [source]  a complex as above
#   [target]  a complex as above (same ring line)
#   [map]     f<k>[<row>,<col>] = <element>


_MAP_ENTRY = re.compile(r"^f(\d+)\[(\d+),(\d+)\]\s*=\s*(.+)$")


def split_blocks(text: str) -> dict:
    """Split ``[name]`` blocks; returns name -> (header line number, raw lines)."""
    blocks: dict = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        s = raw.split("#", 1)[0].strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip()
            if current in blocks:
                raise FormatError(f"section [{current}] given twice", n, 1)
            blocks[current] = (n, [])
        elif current is not None:
            blocks[current][1].append(raw)
        elif s:
            raise FormatError("text before the first section", n, 1)
    return blocks


def format_chain_map(f) -> str:
    out = ["[source]", format_complex(f.source).rstrip("\n"),
           "[target]", format_complex(f.target).rstrip("\n"), "[map]"]
    for k in range(len(f.maps)):
        M = f.at(k)
        for i in range(M.nrows):
            for j in range(M.ncols):
                if M[i, j].terms:
                    out.append(f"f{k}[{i},{j}] = {format_canonical(M[i, j])}")
    return "\n".join(out) + "\n"


def parse_chain_map(text: str):
    from .complex import ChainMap

    blocks = split_blocks(text)
    for need in ("source", "target", "map"):
        if need not in blocks:
            raise FormatError(f"missing [{need}] section")
    S = parse_complex_lines(blocks["source"][1], blocks["source"][0])
    T = parse_complex_lines(blocks["target"][1], blocks["target"][0])
    if S.group != T.group:
        raise FormatError("source and target rings differ", blocks["target"][0] + 1, 1)
    G = S.group
    top = max(S.top, T.top)
    data = [[[GroupRingElem.zero(G)] * T.rank(k) for _ in range(S.rank(k))] for k in range(top + 1)]
    start, lines = blocks["map"]
    for n, raw in enumerate(lines, start=start + 1):
        line = raw.split("#", 1)[0].rstrip()
        s = line.strip()
        if not s:
            continue
        col = len(line) - len(line.lstrip()) + 1
        m = _MAP_ENTRY.match(s)
        if not m:
            raise FormatError(f"expected f<k>[i,j] = element, got {s!r}", n, col)
        k, i, j = (int(m.group(t)) for t in (1, 2, 3))
        if k > top or i >= S.rank(k) or j >= T.rank(k):
            raise FormatError(f"entry f{k}[{i},{j}] is out of range", n, col)
        try:
            data[k][i][j] = parse_elem(m.group(4), G)
        except ValueError as exc:
            raise FormatError(str(exc), n, col + m.start(4)) from None
    return ChainMap(S, T, tuple(Mat(G, S.rank(k), T.rank(k), data[k]) for k in range(top + 1)))
