"""Level-by-level comparison of two decomposition records up the derived tower."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..moves import DecompositionRecord, level_chains
from ..tower import KernelMismatch, TowerCapError, gamma_n_descriptor, lift_identification
from ..grouprings.words import format_word
from .tau import identity_invariant, tau_invariant, tau_is_trivial

EXIT_TRIVIAL, EXIT_USAGE, EXIT_DIFFERENT, EXIT_UNDECIDED = 0, 1, 2, 3

LIFT_CAVEATS = (
    "caveat: the level comparison uses one particular lift of the lower-level equivalence "
    "(the identity on the shared 1-skeleton); another lift could make the invariant trivial.",
    "caveat: the invariant sets have no known group structure, so an obstruction for this lift "
    "is not a proof that no deformation exists.",
)


@dataclass
class LevelVerdict:
    level: int
    status: str  # "equivalent", "different", "obstructed", "undecided"
    reason: str = ""
    certificate: dict | None = None
    witness: dict | None = None
    lift: str = ""

    def as_json(self):
        return {"level": self.level, "status": self.status, "reason": self.reason,
                "certificate": self.certificate, "witness": self.witness, "lift": self.lift}


@dataclass
class CompareReport:
    max_level: int
    seed: int
    levels: list = field(default_factory=list)
    log: list = field(default_factory=list)
    caveats: list = field(default_factory=list)

    @property
    def outcome(self) -> str:
        last = self.levels[-1] if self.levels else None
        if last is None:
            return "undecided"
        if last.status == "equivalent" and last.level == self.max_level:
            return "trivial"
        return last.status

    @property
    def exit_code(self) -> int:
        return {"trivial": EXIT_TRIVIAL, "different": EXIT_DIFFERENT,
                "obstructed": EXIT_DIFFERENT}.get(self.outcome, EXIT_UNDECIDED)

    def summary(self) -> str:
        parts = []
        for v in self.levels:
            if v.status == "obstructed":
                parts.append(f"obstructed at level {v.level} for the chosen lift")
            else:
                parts.append(f"{v.status} at level {v.level}")
        if self.outcome == "trivial":
            return f"trivial through level {self.max_level}"
        return ", ".join(parts)

    def as_json(self) -> dict:
        return {"outcome": self.outcome, "summary": self.summary(), "max_level": self.max_level,
                "seed": self.seed, "levels": [v.as_json() for v in self.levels],
                "log": list(self.log), "caveats": list(self.caveats)}

    def text(self) -> str:
        out = [f"comparison up to level {self.max_level} (seed {self.seed})"]
        for v in self.levels:
            out.append(f"level {v.level}: {v.status}" + (f" - {v.reason}" if v.reason else ""))
            if v.lift:
                out.append(f"  lift: {v.lift}")
            if v.certificate:
                out.append("  certificate: " + json.dumps(v.certificate, sort_keys=True))
            if v.witness:
                out.append("  witness: " + json.dumps(v.witness, sort_keys=True))
        out += [f"log: {x}" for x in self.log]
        out += list(self.caveats)
        out.append(f"result: {self.summary()}")
        return "\n".join(out) + "\n"


def _shared_structure(A: DecompositionRecord, B: DecompositionRecord):
    if A.F.names != B.F.names:
        return "the records do not share 1-skeleton labels; align them first"
    if A.phi != B.phi:
        return "the records use different maps to Gamma"
    if A.boundary_generators != B.boundary_generators:
        return "the records mark different boundary generators"
    return None


def tower_compare(A: DecompositionRecord, B: DecompositionRecord, max_level: int = 1,
                  seed: int = 0) -> CompareReport:
    rep = CompareReport(max_level, seed)
    if max_level < 0:
        raise ValueError("max_level must be >= 0")
    problem = _shared_structure(A, B)
    if problem:
        rep.levels.append(LevelVerdict(0, "undecided", problem))
        return rep
    cells_a = [a for a, _ in A.two_cells()]
    cells_b = [a for a, _ in B.two_cells()]
    EA, EB = level_chains(A, 0), level_chains(B, 0)
    rep.log.append(f"level 0: 2-cells matched by position ({len(cells_a)} vs {len(cells_b)})")
    verdict = tau_is_trivial(tau_invariant(EB, EA), identity_invariant(EA), seed)
    if verdict.status == "trivial":
        rep.levels.append(LevelVerdict(0, "equivalent", verdict.reason, witness=verdict.witness))
    elif verdict.status == "obstructed" and verdict.certificate.get("scope") == "invariant":
        rep.levels.append(LevelVerdict(0, "different", verdict.reason, verdict.certificate))
        return rep
    else:
        rep.levels.append(LevelVerdict(0, "undecided", "no level-0 equivalence found"
                                       + (f" ({verdict.reason})" if verdict.reason else "")))
        return rep
    for n in range(max_level):
        try:
            ident = lift_identification(A.base(), B.base(), n)
        except KernelMismatch as exc:
            w = format_word(exc.witness, A.F.names) if exc.witness is not None else None
            rep.levels.append(LevelVerdict(n + 1, "undecided", f"cannot identify level {n + 1}: {exc}",
                                           witness={"kind": "kernel", "word": w, "side": exc.side}))
            return rep
        except TowerCapError as exc:
            rep.levels.append(LevelVerdict(n + 1, "undecided", f"beyond level cap: {exc}"))
            return rep
        lift = ident.describe()
        rep.log.append(f"level {n + 1}: {lift}")
        rep.log.extend(f"level {n + 1}: {x}" for x in ident.notes)
        L = ident.source
        rep.log.extend(f"level {n + 1}: warning: {x}" for x in L.warnings)
        FA = level_chains(A, n + 1, L)
        FB = level_chains(B, n + 1, L)
        verdict = tau_is_trivial(tau_invariant(FB, FA), identity_invariant(FA), seed)
        if verdict.status == "trivial":
            rep.levels.append(LevelVerdict(n + 1, "equivalent", verdict.reason, witness=verdict.witness,
                                           lift=lift))
            continue
        if verdict.status == "obstructed":
            scope = verdict.certificate.get("scope")
            status = "different" if scope == "invariant" else "obstructed"
            rep.levels.append(LevelVerdict(n + 1, status, verdict.reason, verdict.certificate, lift=lift))
            if status == "obstructed":
                rep.caveats.extend(LIFT_CAVEATS)
            return rep
        rep.levels.append(LevelVerdict(n + 1, "undecided", verdict.reason, lift=lift))
        return rep
    return rep
