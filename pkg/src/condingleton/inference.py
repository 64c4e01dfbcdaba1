"""Coverage of CI structures by known conditional Ingleton inequalities.

A CI structure containing the assumptions of a valid conditional Ingleton
inequality implies ◻(XY|ZU) >= 0. A structure contained in the CI structure
of a distribution violating the inequality is refuted. Anything else is
uncovered. Structures are 24-bit masks, so coverage is two bitwise tests
and the whole lattice of 2^24 structures can be scanned directly.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ci import ALL_MASK, L, L0, L1, L2, CIStructure, ci_structure
from .dist import JointTable, paper_example, table_from_dict
from .entropy import exact_sign
from .ingleton import INGLETON, SYMMETRY_GROUP


class InconsistentDB(ValueError):
    pass


class InvalidRecord(ValueError):
    pass


class Verdict(str, enum.Enum):
    IMPLIES = "IMPLIES"
    REFUTED = "REFUTED"
    UNKNOWN = "UNKNOWN"


# minimal assumption sets of the ten conditional Ingleton inequalities
CONDITIONAL_INGLETON = (
    ("1.1", ("Z⊥U|",)),
    ("1.2", ("X⊥Z|",)),
    ("1.3", ("X⊥Z|Y",)),
    ("1.4", ("X⊥Y|ZU",)),
    ("1.5", ("X⊥Z|YU",)),
    ("2.1", ("X⊥Y|", "X⊥Y|Z")),
    ("2.2", ("X⊥Y|Z", "Y⊥U|Z")),
    ("2.3", ("X⊥Z|U", "X⊥U|Z")),
    ("2.4", ("X⊥Z|U", "Z⊥U|X")),
    ("2.5", ("X⊥Z|U", "Y⊥Z|U")),
)

NAMED_SETS = {"L0": L0, "L1": L1, "L2": L2, "L": L}


def symmetry_orbit(s: CIStructure) -> set[CIStructure]:
    return {s.relabel(g) for g in SYMMETRY_GROUP}


def expand_orbits(structures: Iterable[CIStructure]) -> list[CIStructure]:
    out = set()
    for s in structures:
        out |= symmetry_orbit(s)
    return sorted(out, key=lambda s: s.mask)


def theorem_antecedents(expand: bool = True) -> list[CIStructure]:
    base = [CIStructure.of(stmts) for _, stmts in CONDITIONAL_INGLETON]
    return expand_orbits(base) if expand else base


@dataclass(frozen=True)
class CounterexampleRecord:
    ci_set: CIStructure
    source: str
    table: JointTable | None = None
    external: bool = False
    new: bool = False

    def verify(self) -> None:
        """Check a tabulated record: exact CI structure and negative Ingleton sign."""
        if self.table is None:
            return
        actual = ci_structure(self.table)
        if actual != self.ci_set:
            raise InvalidRecord(f"{self.source}: CI structure is {actual}, record says {self.ci_set}")
        if exact_sign(INGLETON, self.table).sign != -1:
            raise InvalidRecord(f"{self.source}: table does not violate the Ingleton inequality")

    def relabel(self, perm) -> "CounterexampleRecord":
        # the table is not permuted; it only witnesses the original orientation
        return CounterexampleRecord(self.ci_set.relabel(perm), self.source, None, self.external, self.new)


@dataclass
class AntecedentDB:
    antecedents: list[CIStructure] = field(default_factory=list)
    counterexamples: list[CounterexampleRecord] = field(default_factory=list)
    placeholders: list[str] = field(default_factory=list)

    def expanded(self) -> "AntecedentDB":
        """Close antecedents and counterexample sets under the symmetry group."""
        recs: dict[int, CounterexampleRecord] = {}
        for rec in self.counterexamples:
            for g in SYMMETRY_GROUP:
                image = rec if g == SYMMETRY_GROUP[0] else rec.relabel(g)
                recs.setdefault(image.ci_set.mask, image)
        return AntecedentDB(expand_orbits(self.antecedents),
                            sorted(recs.values(), key=lambda r: r.ci_set.mask),
                            list(self.placeholders))

    def without_new(self) -> "AntecedentDB":
        return AntecedentDB(list(self.antecedents), [r for r in self.counterexamples if not r.new],
                            list(self.placeholders))

    def relabel(self, perm) -> "AntecedentDB":
        return AntecedentDB([a.relabel(perm) for a in self.antecedents],
                            [r.relabel(perm) for r in self.counterexamples], list(self.placeholders))

    def verify(self) -> None:
        for rec in self.counterexamples:
            rec.verify()
        check_consistent(self)

    def antecedent_masks(self) -> list[int]:
        return [a.mask for a in self.antecedents]

    def refuting_masks(self) -> list[int]:
        return [r.ci_set.mask for r in self.counterexamples]

    def to_dict(self) -> dict:
        recs = []
        for r in self.counterexamples:
            item = {"ci_set": r.ci_set.to_strings(), "source": r.source}
            if r.table is not None:
                item["atoms"] = r.table.to_dict()["atoms"]
            if r.external:
                item["external"] = True
            if r.new:
                item["new"] = True
            recs.append(item)
        for text in self.placeholders:
            recs.append({"ci_set": None, "source": text, "placeholder": True})
        return {"antecedents": [a.to_strings() for a in self.antecedents], "counterexamples": recs}

    @classmethod
    def from_dict(cls, data: Mapping, verify: bool = True) -> "AntecedentDB":
        antecedents = [CIStructure.of(item["ci_set"] if isinstance(item, Mapping) else item)
                       for item in data.get("antecedents", [])]
        recs, placeholders = [], []
        for item in data.get("counterexamples", []):
            if item.get("placeholder") or item.get("ci_set") is None:
                placeholders.append(item.get("source", ""))
                continue
            table = table_from_dict({"atoms": item["atoms"]}) if "atoms" in item else None
            recs.append(CounterexampleRecord(CIStructure.of(item["ci_set"]), item.get("source", ""),
                                             table, bool(item.get("external", table is None)),
                                             bool(item.get("new", False))))
        db = cls(antecedents, recs, placeholders)
        if verify:
            db.verify()
        return db

    @classmethod
    def load(cls, path, verify: bool = True) -> "AntecedentDB":
        with open(path) as fh:
            return cls.from_dict(json.load(fh), verify)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, ensure_ascii=False)
            fh.write("\n")


def new_counterexample() -> CounterexampleRecord:
    t = paper_example()
    return CounterexampleRecord(ci_structure(t), "rational non-Ingleton distribution satisfying L",
                                t, external=False, new=True)


def default_db(include_new: bool = True) -> AntecedentDB:
    """Antecedents of the ten inequalities, the known refutation of L0 and the new distribution.

    The five earlier counterexamples are not reproduced here; they are listed
    as placeholders until their CI sets are supplied.
    """
    recs = [CounterexampleRecord(L0, "known distribution refuting L0", external=True)]
    if include_new:
        recs.append(new_counterexample())
    placeholders = [f"earlier counterexample #{k} (CI set to be transcribed)" for k in range(1, 6)]
    return AntecedentDB([CIStructure.of(s) for _, s in CONDITIONAL_INGLETON], recs, placeholders)


def check_consistent(db: AntecedentDB) -> None:
    # s is both implied and refuted iff some antecedent lies inside some refuting set
    for a in db.expanded().antecedents:
        for r in db.expanded().counterexamples:
            if a <= r.ci_set:
                raise InconsistentDB(f"antecedent {a} is contained in counterexample set {r.ci_set}")


def covered(s: CIStructure, db: AntecedentDB) -> Verdict:
    """Coverage verdict against the database as given (no symmetry expansion)."""
    implies = any(a.mask & ~s.mask == 0 for a in db.antecedents)
    refuted = any(s.mask & ~r.ci_set.mask == 0 for r in db.counterexamples)
    if implies and refuted:
        raise InconsistentDB(f"{s} is both implied and refuted")
    if implies:
        return Verdict.IMPLIES
    if refuted:
        return Verdict.REFUTED
    return Verdict.UNKNOWN


def _interval_masks(lo: int, hi: int) -> np.ndarray:
    if lo & ~hi:
        return np.zeros(0, dtype=np.uint32)
    free = [1 << b for b in range(24) if (hi & ~lo) >> b & 1]
    masks = np.full(1, lo, dtype=np.uint32)
    for bit in free:
        masks = np.concatenate([masks, masks | np.uint32(bit)])
    masks.sort()
    return masks


def _unknown(masks: np.ndarray, antecedents: Sequence[int], refuting: Sequence[int]) -> np.ndarray:
    implied = np.zeros(masks.shape, dtype=bool)
    for a in antecedents:
        implied |= (masks & np.uint32(a)) == np.uint32(a)
    refuted = np.zeros(masks.shape, dtype=bool)
    for r in refuting:
        refuted |= (masks & np.uint32(~r & ALL_MASK)) == 0
    if np.any(implied & refuted):
        raise InconsistentDB("some structure is both implied and refuted")
    return masks[~implied & ~refuted]


def _orbit_minimal(mask: int) -> bool:
    s = CIStructure(mask)
    return all(mask <= s.relabel(g).mask for g in SYMMETRY_GROUP)


def enumerate_uncovered(db: AntecedentDB, restrict: tuple[CIStructure, CIStructure] | None = None,
                        up_to_symmetry: bool = False, chunk: int = 1 << 20) -> list[CIStructure]:
    """All structures with verdict UNKNOWN, sorted by mask.

    ``restrict=(lo, hi)`` scans only the interval lo ⊆ s ⊆ hi; otherwise all
    2^24 structures are scanned in contiguous chunks.
    """
    antecedents, refuting = db.antecedent_masks(), db.refuting_masks()
    if restrict is not None:
        lo, hi = restrict
        found = _unknown(_interval_masks(lo.mask, hi.mask), antecedents, refuting)
    else:
        parts = []
        for start in range(0, 1 << 24, chunk):
            masks = np.arange(start, min(start + chunk, 1 << 24), dtype=np.uint32)
            parts.append(_unknown(masks, antecedents, refuting))
        found = np.concatenate(parts)
    result = [int(m) for m in found]
    if up_to_symmetry:
        result = [m for m in result if _orbit_minimal(m)]
    return [CIStructure(m) for m in result]


def parse_structure(text: str) -> CIStructure:
    """A named set (L0, L1, L2, L) or comma/semicolon separated statements."""
    if text in NAMED_SETS:
        return NAMED_SETS[text]
    items = [t for t in text.replace(";", ",").split(",") if t.strip()]
    return CIStructure.of(items)


@dataclass(frozen=True)
class ClosureReport:
    before: list[CIStructure]
    after: list[CIStructure]
    interval: tuple[CIStructure, CIStructure] | None
    placeholders: int

    def to_dict(self) -> dict:
        out = {
            "before": len(self.before),
            "after": len(self.after),
            "uncovered_before": [s.to_strings() for s in self.before[:1000]],
            "uncovered_after": [s.to_strings() for s in self.after[:1000]],
            "missing_records": self.placeholders,
        }
        if self.interval:
            out["interval"] = [s.to_strings() for s in self.interval]
        return out


def closure(db: AntecedentDB, interval: tuple[CIStructure, CIStructure] | None = None) -> ClosureReport:
    """Uncovered structures before and after adding the records flagged ``new``."""
    full = db.expanded()
    old = db.without_new().expanded()
    return ClosureReport(enumerate_uncovered(old, interval), enumerate_uncovered(full, interval),
                         interval, len(db.placeholders))
