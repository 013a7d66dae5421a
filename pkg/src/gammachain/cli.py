"""Command-line front end.

Exit codes: 0 success or trivial, 1 usage or parse error, 2 obstructed or
different (a certificate is printed), 3 undecided.  Every report records the
seed and the caps in force (as a trailing ``#`` comment in text mode, so
printed files stay parseable).  Caps can be set by flags or by the environment
variables GAMMACHAIN_MAX_BASIS and GAMMACHAIN_MAX_MINORS; flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from dataclasses import dataclass, field

from . import laurent
from .chains import homology as _homology
from .chains.align import AlignError, align_one_skeleton, random_instance, replay_check
from .chains.complex import ChainError, describe_move, validate_complex
from .chains.fileformat import (FormatError, format_chain_map, format_complex, parse_chain_map,
                                parse_complex)
from .chains.homology import UnsupportedRing, homology_presentation
from .foxcover import (PresentationError, RelativeTwoComplex, fox_complex, format_presentation,
                       kernel_h1_class, parse_group_sections, parse_hom_section, parse_presentation)
from .grouprings.groups import GroupHom, hom_apply, identity_hom
from .grouprings.ring import format_elem, parse_elem
from .grouprings.words import format_word, parse_word, WordError
from .invariants.compare import EXIT_DIFFERENT, EXIT_TRIVIAL, EXIT_UNDECIDED, EXIT_USAGE, tower_compare
from .invariants.tau import identity_invariant, tau_invariant, tau_is_trivial, verify_certificate
from .moves import (CertificateError, RecordError, apply_move, deformation_level, format_record,
                    parse_record, validate_certificate)
from .stratified import (StratifiedError, boundary_subcomplex, format_stratified, parse_stratified,
                         reduce_stratified, stratified_from_pair)
from .textio import read_sections, word_format_error
from .tower import MAX_TOWER_LEVEL, TowerCapError, gamma_n_descriptor
from .verdicts import CapExceeded, is_undecided

SUBCOMMANDS = ("validate", "fox", "homology", "stratify", "tower", "tau", "compare", "move",
               "align", "selftest")
ENV_CAPS = {"max_basis": "GAMMACHAIN_MAX_BASIS", "max_minors": "GAMMACHAIN_MAX_MINORS"}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: list
    max_level: int
    max_basis: int
    max_minors: int
    output: str  # "text" or "json"
    seed: int
    options: dict = field(default_factory=dict)

    def caps(self) -> dict:
        return {"max_level": self.max_level, "max_basis": self.max_basis,
                "max_minors": self.max_minors}


@dataclass
class Report:
    code: int
    status: str
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)


# -- helpers -------------------------------------------------------------------------------------


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def detect_kind(text: str) -> str:
    for raw in text.splitlines():
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        if s.startswith("ring:"):
            return "complex"
        if s == "[source]":
            return "map"
        if s == "[gamma]":
            return "stratified"
        if s.startswith("["):
            if any(tag in text for tag in ("[whandles]", "[mduals]", "[move")):
                return "record"
            return "presentation"
        break
    raise UsageError("cannot tell what kind of file this is")


def _load_complex(text: str):
    kind = detect_kind(text)
    if kind == "complex":
        return parse_complex(text)
    if kind == "presentation":
        return fox_complex(parse_presentation(text))
    raise UsageError(f"expected a complex or presentation file, got a {kind} file")


def _cap_env(name: str, flag):
    if flag is not None:
        return flag
    raw = os.environ.get(ENV_CAPS[name])
    if raw is None:
        return {"max_basis": laurent.DEFAULT_MAX_BASIS,
                "max_minors": _homology.DEFAULT_MAX_MINORS}[name]
    try:
        v = int(raw)
    except ValueError:
        raise UsageError(f"{ENV_CAPS[name]} must be a positive integer") from None
    return v


# -- subcommands ---------------------------------------------------------------------------------


def cmd_validate(cfg: RunConfig) -> Report:
    text = _read(cfg.inputs[0])
    kind = cfg.options.get("kind") or detect_kind(text)
    data = {"kind": kind}
    if kind == "complex":
        C = parse_complex(text)
        rep = validate_complex(C)
        canon = format_complex(C)
        ok, msg = rep.valid, "; ".join(rep.messages)
        data["ranks"] = C.ranks()
    elif kind == "presentation":
        X = parse_presentation(text)
        rep = validate_complex(fox_complex(X))
        canon = format_presentation(X)
        ok, msg = rep.valid, "; ".join(rep.messages)
    elif kind == "record":
        R, certs = parse_record(text)
        canon = format_record(R, certs)
        ok, msg = True, f"{len(R.handles)} handle(s), {len(certs)} move certificate(s)"
        for i, c in enumerate(certs):
            try:
                validate_certificate(R, c)
            except (CertificateError, RecordError) as exc:
                ok, msg = False, f"move {i + 1}: {exc}"
                break
    elif kind == "stratified":
        S = parse_stratified(text)
        canon = format_stratified(S)
        ok = S.check_boundary() and S.squares_to_zero()
        msg = "boundary consistent" if ok else "boundary check failed"
    elif kind == "map":
        f = parse_chain_map(text)
        canon = format_chain_map(f)
        k = f.first_defect()
        ok = k is None
        msg = "chain map" if ok else f"does not commute with the boundary in degree {k}"
    else:
        raise UsageError(f"unknown kind {kind!r}")
    data.update(valid=ok, message=msg)
    lines = [f"{kind}: {'valid' if ok else 'invalid'} ({msg})"]
    if cfg.options.get("print"):
        data["canonical"] = canon
        lines.append(canon.rstrip("\n"))
    return Report(0 if ok else EXIT_DIFFERENT, "valid" if ok else "invalid", lines, data)


def cmd_fox(cfg: RunConfig) -> Report:
    X = parse_presentation(_read(cfg.inputs[0]))
    C = fox_complex(X)
    text = format_complex(C)
    return Report(0, "ok", [text.rstrip("\n")], {"complex": text, "ranks": C.ranks()})


def cmd_homology(cfg: RunConfig) -> Report:
    C = _load_complex(_read(cfg.inputs[0]))
    k = cfg.options.get("degree", 1)
    H = homology_presentation(C, k, cfg.max_minors)
    first = H.first_elementary_ideal
    undecided = [F for F in H.fitting if F.undecided is not None]
    data = {"degree": k, "generators": H.reduced_ngens,
            "relations": [[format_elem(a) for a in r] for r in H.reduced.rows],
            "elementary_ideals": [{"index": F.index, "ideal": F.describe()} for F in H.fitting],
            "first_elementary_ideal": first.describe()}
    lines = [H.describe(), f"first elementary ideal: {first.describe()}"]
    if undecided:
        return Report(EXIT_UNDECIDED, "undecided", lines, data)
    return Report(0, "ok", lines, data)


def _stratify_inputs(text: str):
    X = parse_presentation(text)
    sections = read_sections(text)
    by = {}
    for s in sections:
        by.setdefault(s.name, []).append(s)
    Y = boundary_subcomplex(X)
    if "boundary_hom" in by:
        psi = parse_hom_section(by["boundary_hom"][0], Y.F)
    else:
        psi = Y.phi
    Lam = psi.target
    if "lambda" in by:
        sec = by["lambda"][0]
        images = [None] * Lam.ngens
        for ln in sec.lines:
            if ln.key not in Lam.names:
                raise FormatError(f"unknown generator {ln.key!r} of Lambda", ln.number, ln.column)
            try:
                e = parse_elem(ln.value, X.group)
            except ValueError as exc:
                raise FormatError(str(exc), ln.number, ln.value_column) from None
            if len(e.terms) != 1 or e.terms[0][1] != 1:
                raise FormatError("a Lambda generator must map to a group element", ln.number,
                                  ln.value_column)
            images[Lam.names.index(ln.key)] = e.terms[0][0]
        missing = [Lam.names[i] for i, im in enumerate(images) if im is None]
        if missing:
            raise FormatError(f"[lambda] gives no image for {', '.join(missing)}", sec.number, 1)
        lam = GroupHom(Lam, X.group, tuple(images))
    else:
        if Lam != X.group:
            raise FormatError("a [lambda] section is needed when [boundary_hom] has its own target")
        lam = identity_hom(X.group)
    return X, psi, lam


def cmd_stratify(cfg: RunConfig) -> Report:
    X, psi, lam = _stratify_inputs(_read(cfg.inputs[0]))
    S = stratified_from_pair(X, psi, lam)
    ok = S.check_boundary() and S.squares_to_zero()
    if cfg.options.get("reduce"):
        text = format_complex(reduce_stratified(S))
    else:
        text = format_stratified(S)
    data = {"container" if not cfg.options.get("reduce") else "reduced": text, "checks": ok}
    if not ok:
        return Report(EXIT_DIFFERENT, "inconsistent", ["boundary check failed"], data)
    return Report(0, "ok", [text.rstrip("\n")], data)


def _word_file(text: str):
    sections = read_sections(text)
    F, rels, rel_names, bgens, brels, basepoint, phi, by = parse_group_sections(sections)
    X = RelativeTwoComplex(F, tuple(rels), phi, tuple(rel_names))
    words = []
    for sec in by.get("words", []):
        for ln in sec.lines:
            try:
                words.append((ln.key, parse_word(ln.value, F.names)))
            except WordError as exc:
                raise word_format_error(exc, ln) from None
    if not words:
        raise FormatError("no [words] section with 'name = word' lines")
    level = None
    for sec in by.get("tower", []):
        ln = sec.first("level")
        if ln is not None:
            if not ln.value.isdigit():
                raise FormatError("level must be a nonnegative integer", ln.number, ln.value_column)
            level = int(ln.value)
    return X, words, level


def cmd_tower(cfg: RunConfig) -> Report:
    X, words, file_level = _word_file(_read(cfg.inputs[0]))
    n = cfg.options.get("level")
    if n is None:
        n = file_level if file_level is not None else 1
    if n > cfg.max_level:
        raise TowerCapError(f"level {n} is above the cap {cfg.max_level}")
    L = gamma_n_descriptor(X, n) if n else None
    results, lines = [], [L.describe() if L else f"level 0: Gamma = {X.group.describe()}"]
    for name, w in words:
        img = hom_apply(X.phi, w)
        entry = {"name": name, "word": format_word(w, X.F.names)}
        if img != X.group.identity():
            entry.update(status="nontrivial", reason=f"image {X.group.format_element(img)} in Gamma")
        elif n == 0:
            entry.update(status="trivial", reason="in the kernel of phi")
        else:
            v = L.is_trivial(w)
            cls = kernel_h1_class(w, X)
            if is_undecided(v):
                entry.update(status="undecided", reason=v.reason)
            elif v:
                entry.update(status="trivial", reason=f"class {cls.describe()}")
            else:
                why = f"class {cls.describe()}" if not cls.is_zero else f"class {cls.describe()} " \
                      f"but nontrivial at level {n}"
                entry.update(status="nontrivial", reason=why)
        results.append(entry)
        lines.append(f"{name} = {entry['word']}: {entry['status']}, {entry['reason']}")
    statuses = {e["status"] for e in results}
    if "nontrivial" in statuses:
        code, status = EXIT_DIFFERENT, "nontrivial"
    elif "undecided" in statuses:
        code, status = EXIT_UNDECIDED, "undecided"
    else:
        code, status = EXIT_TRIVIAL, "trivial"
    for w in (L.warnings if L else ()):
        lines.append(f"warning: {w}")
    return Report(code, status, lines, {"level": n, "words": results})


def cmd_tau(cfg: RunConfig) -> Report:
    ref = _load_complex(_read(cfg.inputs[0]))
    other = _load_complex(_read(cfg.inputs[1]))
    if ref.group != other.group:
        raise UsageError("the two complexes are over different rings")
    inv = tau_invariant(other, ref)
    reference = identity_invariant(inv.rep.q.target)
    v = tau_is_trivial(inv, reference, cfg.seed)
    data = v.as_json()
    lines = [f"tau: {v.status}" + (f" - {v.reason}" if v.reason else "")]
    if v.certificate:
        again = verify_certificate(v, inv, reference)
        data["certificate_reverified"] = again
        lines.append("certificate: " + json.dumps(v.certificate, sort_keys=True))
        lines.append(f"certificate re-verified: {'yes' if again else 'no'}")
    if v.witness:
        lines.append("witness: " + json.dumps(v.witness, sort_keys=True))
    code = {"trivial": EXIT_TRIVIAL, "obstructed": EXIT_DIFFERENT}.get(v.status, EXIT_UNDECIDED)
    return Report(code, v.status, lines, data)


def cmd_compare(cfg: RunConfig) -> Report:
    A, _ = parse_record(_read(cfg.inputs[0]))
    B, _ = parse_record(_read(cfg.inputs[1]))
    level = cfg.options.get("max_level", 1)
    if level > cfg.max_level:
        raise TowerCapError(f"level {level} is above the cap {cfg.max_level}")
    rep = tower_compare(A, B, level, cfg.seed)
    return Report(rep.exit_code, rep.outcome, rep.text().rstrip("\n").splitlines(), rep.as_json())


def cmd_move(cfg: RunConfig) -> Report:
    R, certs = parse_record(_read(cfg.inputs[0]))
    level = cfg.options.get("level", 0)
    if level > cfg.max_level:
        raise TowerCapError(f"level {level} is above the cap {cfg.max_level}")
    lines, moves = [], []
    undecided = False
    for i, c in enumerate(certs):
        j, note = deformation_level(R, c, min(cfg.max_level, MAX_TOWER_LEVEL))
        R2, f = apply_move(R, c, level)
        same = f.commutes()
        entry = {"move": i + 1, "target": c.target, "factor_word": format_word(c.word(R), R.F.names),
                 "deformation_level": j, "note": note, "level": level, "chains_unchanged": same}
        moves.append(entry)
        line = (f"move {i + 1} on {c.target}: deformation level {j}; "
                f"level-{level} chains {'unchanged' if same else 'changed'}")
        if note:
            line += f" (stopped: {note})"
            undecided = True
        lines.append(line)
        R = R2
    final = format_record(R)
    out = cfg.options.get("out")
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(final)
        lines.append(f"wrote {out}")
    else:
        lines += ["final record:", final.rstrip("\n")]
    data = {"moves": moves, "record": final}
    return Report(EXIT_UNDECIDED if undecided else 0, "undecided" if undecided else "ok", lines, data)


def _align_one(f) -> tuple[int, str, list, dict]:
    res = align_one_skeleton(f)
    if not res.aligned:
        return EXIT_UNDECIDED, "undecided", [f"alignment: undecided - {res.reason}"], \
            {"status": "undecided", "reason": res.reason}
    ok, why = replay_check(res)
    if not ok:
        return EXIT_UNDECIDED, "undecided", [f"alignment: undecided - replay failed: {why}"], \
            {"status": "undecided", "reason": f"replay failed: {why}"}
    data = {"status": "aligned", "source_moves": [describe_move(m) for m in res.source_moves],
            "target_moves": [describe_move(m) for m in res.target_moves],
            "map": format_chain_map(res.map),
            "homotopy": [[[format_elem(a) for a in r] for r in H.rows] for H in res.homotopy],
            "replay": why}
    lines = [f"alignment: {res.describe()}", f"replay check: {why}"]
    lines += [f"source move: {m}" for m in data["source_moves"]]
    lines += [f"target move: {m}" for m in data["target_moves"]]
    lines.append(data["map"].rstrip("\n"))
    return 0, "aligned", lines, data


def cmd_align(cfg: RunConfig) -> Report:
    count = cfg.options.get("random")
    if count is None:
        if not cfg.inputs:
            raise UsageError("align needs a chain-map file or --random N")
        f = parse_chain_map(_read(cfg.inputs[0]))
        code, status, lines, data = _align_one(f)
        return Report(code, status, lines, data)
    rng = random.Random(cfg.seed)
    tally = {"aligned": 0, "undecided": 0}
    for _ in range(count):
        code, status, _, _ = _align_one(random_instance(rng))
        tally[status] += 1
    lines = [f"random instances: {count}", f"aligned and replayed: {tally['aligned']}",
             f"undecided: {tally['undecided']}"]
    code = 0 if tally["undecided"] == 0 else EXIT_UNDECIDED
    return Report(code, "aligned" if code == 0 else "undecided", lines, {"counts": tally})


def cmd_selftest(cfg: RunConfig) -> Report:
    from .selftest import run_selftest

    results = run_selftest(cfg.seed)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
    ok = all(r[1] for r in results)
    data = {"checks": [{"name": n, "passed": p, "detail": d} for n, p, d in results]}
    return Report(0 if ok else EXIT_DIFFERENT, "pass" if ok else "fail", lines, data)


COMMANDS = {"validate": cmd_validate, "fox": cmd_fox, "homology": cmd_homology,
            "stratify": cmd_stratify, "tower": cmd_tower, "tau": cmd_tau, "compare": cmd_compare,
            "move": cmd_move, "align": cmd_align, "selftest": cmd_selftest}


# -- argument handling -----------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    common.add_argument("--max-basis", type=int, help="Groebner basis size cap")
    common.add_argument("--max-minors", type=int, help="Fitting ideal minor count cap")
    p = _Parser(prog="gammachain", description="Exact chain-level invariants of Gamma decompositions.")
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    s = sub.add_parser("validate", parents=[common], help="check a file")
    s.add_argument("file")
    s.add_argument("--kind", choices=("complex", "presentation", "record", "stratified", "map"))
    s.add_argument("--print", action="store_true", help="also print the canonical form")
    s = sub.add_parser("fox", parents=[common], help="Fox complex of a presentation")
    s.add_argument("file")
    s = sub.add_parser("homology", parents=[common], help="homology module and elementary ideals")
    s.add_argument("file")
    s.add_argument("--degree", type=int, default=1)
    s = sub.add_parser("stratify", parents=[common], help="stratified chains of a pair")
    s.add_argument("file")
    s.add_argument("--reduce", action="store_true", help="print the reduction to Z[Gamma]")
    s = sub.add_parser("tower", parents=[common], help="word problem in the solvable tower")
    s.add_argument("file")
    s.add_argument("--level", type=int)
    s = sub.add_parser("tau", parents=[common], help="compare a complex against a reference")
    s.add_argument("reference")
    s.add_argument("other")
    s = sub.add_parser("compare", parents=[common], help="level-by-level record comparison")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--max-level", type=int, default=1)
    s = sub.add_parser("move", parents=[common], help="apply the move certificates of a record")
    s.add_argument("file")
    s.add_argument("--level", type=int, default=0)
    s.add_argument("--out", help="write the resulting record here")
    s = sub.add_parser("align", parents=[common], help="align a chain map on 0- and 1-chains")
    s.add_argument("file", nargs="?")
    s.add_argument("--random", type=int, help="run on N random instances instead")
    sub.add_parser("selftest", parents=[common], help="run the built-in checks")
    return p


def make_config(ns: argparse.Namespace) -> RunConfig:
    inputs = [getattr(ns, k) for k in ("file", "reference", "other", "a", "b")
              if getattr(ns, k, None) is not None]
    opts = {}
    for k in ("kind", "print", "degree", "reduce", "level", "max_level", "out", "random"):
        if hasattr(ns, k) and getattr(ns, k) is not None:
            opts[k] = getattr(ns, k)
    cfg = RunConfig(ns.subcommand, inputs, MAX_TOWER_LEVEL, _cap_env("max_basis", ns.max_basis),
                    _cap_env("max_minors", ns.max_minors), "json" if ns.json else "text", ns.seed, opts)
    for name, v in cfg.caps().items():
        if v <= 0:
            raise UsageError(f"{name} must be positive")
    for name in ("level", "max_level", "degree", "random"):
        if name in opts and opts[name] < 0:
            raise UsageError(f"--{name.replace('_', '-')} must be nonnegative")
    return cfg


def run(argv) -> tuple[int, str]:
    """Run one command; returns (exit code, report text)."""
    try:
        ns = build_parser().parse_args(argv)
        cfg = make_config(ns)
    except UsageError as exc:
        return EXIT_USAGE, f"error: {exc}\n"
    saved = laurent.DEFAULT_MAX_BASIS, _homology.DEFAULT_MAX_MINORS
    laurent.DEFAULT_MAX_BASIS, _homology.DEFAULT_MAX_MINORS = cfg.max_basis, cfg.max_minors
    try:
        rep = COMMANDS[cfg.subcommand](cfg)
    except (FormatError, UsageError, RecordError, CertificateError, PresentationError, WordError,
            StratifiedError, AlignError, UnsupportedRing, ChainError) as exc:
        rep = Report(EXIT_USAGE, "error", [f"error: {exc}"], {"error": str(exc)})
    except TowerCapError as exc:
        rep = Report(EXIT_UNDECIDED, "undecided", [f"undecided: {exc}"], {"reason": str(exc)})
    except CapExceeded as exc:
        rep = Report(EXIT_UNDECIDED, "undecided", [f"undecided: cap reached: {exc}"],
                     {"reason": str(exc)})
    finally:
        laurent.DEFAULT_MAX_BASIS, _homology.DEFAULT_MAX_MINORS = saved
    if cfg.output == "json":
        body = {"command": cfg.subcommand, "inputs": cfg.inputs, "seed": cfg.seed,
                "caps": cfg.caps(), "status": rep.status, "exit_code": rep.code, "result": rep.data}
        return rep.code, json.dumps(body, sort_keys=True, indent=2) + "\n"
    text = "\n".join(rep.lines + [f"# seed: {cfg.seed}; caps: " + ", ".join(
        f"{k}={v}" for k, v in cfg.caps().items())]) + "\n"
    return rep.code, text


def main(argv=None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    (sys.stderr if code == EXIT_USAGE else sys.stdout).write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
