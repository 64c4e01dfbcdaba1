"""Ingleton expressions, masks and circuits of the functional matrix.

A mask writes the Ingleton expression ◻(XY|ZU) as a signed integer
combination of difference expressions △(i,j|K). The shortest ones are the
circuits of the 16 x 25 matrix whose columns are the 24 elementary △ and
◻(XY|ZU) itself.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .ci import CIStatement, delta_functional, enumerate_elementary
from .dist import VARIABLES, subset_name
from .entropy import LinFunctional

Perm = tuple[int, int, int, int]

# permutations of (X, Y, Z, U) fixing ◻(XY|ZU): id, X<->Y, Z<->U, both
SYMMETRY_GROUP: tuple[Perm, ...] = ((0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2))


class NoIngletonColumn(ValueError):
    pass


@dataclass(frozen=True)
class IngletonLabels:
    """◻(AB|CD) for a permutation (A, B, C, D) of the variable numbers."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if sorted((self.a, self.b, self.c, self.d)) != [0, 1, 2, 3]:
            raise ValueError("Ingleton labels must be a permutation of X, Y, Z, U")

    @classmethod
    def parse(cls, text: str) -> "IngletonLabels":
        """``"XY|ZU"`` -> ◻(XY|ZU)."""
        left, _, right = text.replace(" ", "").partition("|")
        if len(left) != 2 or len(right) != 2:
            raise ValueError(f"cannot parse Ingleton labels {text!r}")
        return cls(*(VARIABLES.index(ch) for ch in left + right))

    def canonical(self) -> "IngletonLabels":
        a, b = sorted((self.a, self.b))
        c, d = sorted((self.c, self.d))
        return IngletonLabels(a, b, c, d)

    def __str__(self) -> str:
        return "".join(VARIABLES[v] for v in (self.a, self.b)) + "|" + \
            "".join(VARIABLES[v] for v in (self.c, self.d))


def ingleton_functional(labels: IngletonLabels | str = "XY|ZU") -> LinFunctional:
    if isinstance(labels, str):
        labels = IngletonLabels.parse(labels)
    A, B, C, D = (1 << v for v in (labels.a, labels.b, labels.c, labels.d))
    plus = [A | C, A | D, B | C, B | D, C | D]
    minus = [A | B, C, D, A | C | D, B | C | D]
    return LinFunctional.from_terms([(m, 1) for m in plus] + [(m, -1) for m in minus])


def all_ingleton_labels() -> list[IngletonLabels]:
    """The six distinct Ingleton expressions, one canonical label each."""
    seen = {}
    for perm in itertools.permutations(range(4)):
        lab = IngletonLabels(*perm).canonical()
        seen.setdefault(ingleton_functional(lab), lab)
    return sorted(seen.values(), key=lambda lab: (lab.a, lab.b, lab.c, lab.d))


INGLETON = ingleton_functional("XY|ZU")

# a signed combination of difference expressions
Combination = Sequence[tuple[int, CIStatement]]


def expand(rhs: Combination) -> LinFunctional:
    f = LinFunctional.zero()
    for coef, s in rhs:
        f = f + coef * delta_functional(s)
    return f


def verify_identity(lhs: LinFunctional, rhs: Combination) -> bool:
    return lhs == expand(rhs)


def format_combination(rhs: Combination) -> str:
    parts = []
    for coef, s in rhs:
        sign = "+" if coef > 0 else "-"
        k = "" if abs(coef) == 1 else f"{abs(coef)}·"
        K = subset_name(s.K)
        args = f"{VARIABLES[s.i]},{VARIABLES[s.j]}" + (f"|{K}" if K else "")
        parts.append(f"{sign} {k}△({args})")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


@dataclass(frozen=True)
class MaskIdentity:
    left: LinFunctional
    right: tuple[tuple[int, CIStatement], ...]
    name: str = ""

    def verify(self) -> bool:
        return verify_identity(self.left, self.right)

    def relabel(self, perm: Perm) -> "MaskIdentity":
        return MaskIdentity(self.left, tuple((c, s.relabel(perm)) for c, s in self.right), self.name)

    def key(self) -> frozenset:
        return frozenset(self.right)

    def __str__(self) -> str:
        return f"◻(XY|ZU) = {format_combination(self.right)}"


def _mask(name: str, *terms: tuple[int, str]) -> MaskIdentity:
    return MaskIdentity(INGLETON, tuple((c, CIStatement.parse(s)) for c, s in terms), name)


MASKS = (
    _mask("M.1", (1, "Z⊥U|X"), (1, "Z⊥U|Y"), (1, "X⊥Y|"), (-1, "Z⊥U|")),
    _mask("M.2", (1, "Z⊥U|Y"), (1, "X⊥Z|U"), (1, "X⊥Y|"), (-1, "X⊥Z|")),
    _mask("M.3", (1, "X⊥Y|Z"), (1, "X⊥Z|U"), (1, "Z⊥U|Y"), (-1, "X⊥Z|Y")),
    _mask("M.4", (1, "X⊥Y|Z"), (1, "X⊥Y|U"), (1, "Z⊥U|XY"), (-1, "X⊥Y|ZU")),
    _mask("M.5", (1, "X⊥Y|Z"), (1, "X⊥Z|U"), (1, "Z⊥U|XY"), (-1, "X⊥Z|YU")),
)

DAGGER_1 = _mask("†1", (1, "X⊥Y|ZU"), (1, "X⊥Z|U"), (-1, "X⊥Z|YU"), (1, "Y⊥U|Z"),
                 (-1, "Y⊥U|XZ"), (1, "Z⊥U|XY"))
DAGGER_2 = _mask("†2", (1, "X⊥Y|"), (-1, "X⊥Z|"), (1, "X⊥Z|U"), (-1, "Y⊥U|"),
                 (1, "Y⊥U|Z"), (1, "Z⊥U|"))


def score_identities() -> list[tuple[str, LinFunctional, Combination, Combination]]:
    """The rearranged masks behind the two non-Ingleton scores.

    Each entry is ``(name, lhs, added, rhs)`` meaning
    ``lhs + expand(added) == expand(rhs)``: the terms moved to the left are
    the ones that vanish under the corresponding CI model.
    """
    p = CIStatement.parse
    return [
        ("‡1", INGLETON,
         [(1, p("X⊥Z|YU")), (1, p("Y⊥U|XZ")), (-1, p("X⊥Y|ZU"))],
         [(1, p("X⊥Z|U")), (1, p("Y⊥U|Z")), (1, p("Z⊥U|XY"))]),
        ("‡2", INGLETON,
         [(1, p("X⊥Z|")), (1, p("Y⊥U|")), (-1, p("Z⊥U|"))],
         [(1, p("X⊥Y|")), (1, p("X⊥Z|U")), (1, p("Y⊥U|Z"))]),
    ]


def verify_score_identity(lhs: LinFunctional, added: Combination, rhs: Combination) -> bool:
    return lhs + expand(added) == expand(rhs)


# ---------------------------------------------------------------------------
# functional matrix and circuits

def column_names() -> list[str]:
    return [str(s) for s in enumerate_elementary()] + ["◻(XY|ZU)"]


@lru_cache(maxsize=None)
def functional_matrix() -> tuple[tuple[int, ...], ...]:
    """16 x 25 integer matrix; rows are subsets, columns the 24 △ then ◻."""
    columns = [delta_functional(s) for s in enumerate_elementary()] + [INGLETON]
    return tuple(tuple(col[row] for col in columns) for row in range(16))


@dataclass(frozen=True, order=True)
class Circuit:
    coefficients: tuple[int, ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, c in enumerate(self.coefficients) if c)

    def __len__(self) -> int:
        return len(self.support)

    def __getitem__(self, col: int) -> int:
        return self.coefficients[col]

    def to_csv_line(self, names: Sequence[str] | None = None) -> str:
        names = names or [str(k) for k in range(len(self.coefficients))]
        return ",".join(f"{names[k]}:{self.coefficients[k]}" for k in self.support)


def _normalize(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    first = next(x for x in v if x)
    if first < 0:
        g = -g
    return tuple(x // g for x in v)


def matrix_rank(m: Sequence[Sequence[int]]) -> int:
    """Rank over Q by fraction-free Gaussian elimination."""
    rows = [list(r) for r in m]
    if not rows:
        return 0
    rank, ncols = 0, len(rows[0])
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        a = rows[rank][col]
        for r in range(rank + 1, len(rows)):
            b = rows[r][col]
            if b:
                rows[r] = [a * x - b * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _reduce_against(w, combo, later):
    p = next(k for k, x in enumerate(w) if x)
    a = w[p]
    reduced = []
    for wd, cd in later:
        b = wd[p]
        if b:
            wd = [a * x - b * y for x, y in zip(wd, w)]
            cd = [a * x - b * y for x, y in zip(cd, combo)]
            g = 0
            for x in cd:
                if x:
                    g = math.gcd(g, x)
            if g > 1:
                wd = [x // g for x in wd]
                cd = [x // g for x in cd]
        reduced.append((wd, cd))
    return reduced


def _search(start, residuals, size, rank, ncols, found, only=None):
    if size > rank:
        raise AssertionError("independent set larger than the rank")
    for c in range(start, ncols):
        if only is not None and c != only:
            continue
        w, combo = residuals[c - start]
        if not any(w):
            if sum(1 for x in combo if x) == size + 1:
                found.append(_normalize(combo))
            continue
        _search(c + 1, _reduce_against(w, combo, residuals[c - start + 1:]), size + 1, rank, ncols, found)


def _circuits_with_first(args) -> list[tuple[int, ...]]:
    m, first, rank = args
    nrows, ncols = len(m), len(m[0])
    start = [([m[r][c] for r in range(nrows)], [int(k == c) for k in range(ncols)])
             for c in range(ncols)]
    found: list[tuple[int, ...]] = []
    _search(0, start, 0, rank, ncols, found, only=first)
    return found


def circuits(m: Sequence[Sequence[int]], workers: int = 1) -> list[Circuit]:
    """All circuits of the column matroid of an integer matrix.

    Depth-first search over independent column sets S in increasing column
    order. Every later column is kept reduced modulo span(S) together with the
    integer combination that produced it, so a column whose residual vanishes
    carries a kernel vector of S + {c}; that vector is a circuit iff its
    support is all of S + {c}. Every circuit arises exactly once, from its
    elements below the largest one.

    With ``workers > 1`` the subtrees for each smallest column run in a
    process pool; the result is identical.
    """
    m = [list(r) for r in m]
    if not m or not m[0]:
        return []
    rank = matrix_rank(m)
    jobs = [(m, first, rank) for first in range(len(m[0]))]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_circuits_with_first, jobs))
    else:
        parts = [_circuits_with_first(job) for job in jobs]
    return sorted(Circuit(v) for v in {v for part in parts for v in part})


def circuit_census(cs: Iterable[Circuit], ingleton_col: int = 24) -> dict[str, int]:
    cs = list(cs)
    through = [c for c in cs if c[ingleton_col]]
    shortest = min((len(c) for c in through), default=0)
    return {
        "total": len(cs),
        "ingleton": len(through),
        "shortest": sum(1 for c in through if len(c) == shortest),
        "shortest_support": shortest,
    }


def circuit_to_identity(c: Circuit, ingleton_col: int = 24) -> MaskIdentity:
    """Solve a circuit through ◻ for ◻ = sum of ±△ (integral when possible)."""
    k = c[ingleton_col]
    if not k:
        raise NoIngletonColumn("circuit does not involve the Ingleton column")
    stmts = enumerate_elementary()
    right = []
    for col in c.support:
        if col == ingleton_col:
            continue
        if c[col] % k:
            raise ValueError("circuit does not give an integral mask")
        right.append((-c[col] // k, stmts[col]))
    return MaskIdentity(INGLETON, tuple(right))


def shortest_masks(cs: Iterable[Circuit], ingleton_col: int = 24) -> list[MaskIdentity]:
    through = [c for c in cs if c[ingleton_col]]
    if not through:
        raise NoIngletonColumn("no circuit involves the Ingleton column")
    shortest = min(len(c) for c in through)
    masks = []
    for c in through:
        if len(c) == shortest:
            ident = circuit_to_identity(c, ingleton_col)
            if not ident.verify():
                raise AssertionError(f"circuit does not verify: {c}")
            masks.append(ident)
    return sorted(masks, key=lambda mk: sorted((s, co) for co, s in mk.right))


def mask_orbits(masks: Iterable[MaskIdentity]) -> list[list[MaskIdentity]]:
    """Group masks into orbits under :data:`SYMMETRY_GROUP`."""
    remaining = {mk.key(): mk for mk in masks}
    orbits = []
    while remaining:
        key = next(iter(remaining))
        seed = remaining[key]
        keys = {seed.relabel(g).key() for g in SYMMETRY_GROUP}
        orbits.append([remaining.pop(k) for k in list(keys) if k in remaining])
    return orbits


def name_orbits(masks: Iterable[MaskIdentity]) -> dict[str, list[MaskIdentity]]:
    """Match orbits of shortest masks to the named masks (M.1)-(M.5)."""
    named = {}
    for orbit in mask_orbits(masks):
        keys = {mk.key() for mk in orbit}
        for ref in MASKS:
            if ref.key() in keys:
                named[ref.name] = orbit
    return named
