"""Exact joint distributions of four binary random variables X, Y, Z, U.

Atoms are keyed by the bit-string ``ijkl`` of the states of (X, Y, Z, U),
so X is the leftmost character. Internally the 16 atoms are stored in a
tuple at index ``int("ijkl", 2)``.

Subsets of the variables are 4-bit masks with X = bit 0, Y = bit 1,
Z = bit 2 and U = bit 3, e.g. ``ZU == 0b1100 == 12``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

VARIABLES = "XYZU"
X, Y, Z, U = 1, 2, 4, 8
FULL = 0b1111

Number = Union[int, Fraction, str]


class DistributionError(ValueError):
    pass


class NegativeAtom(DistributionError):
    pass


class NotNormalized(DistributionError):
    pass


def atom_key(index: int) -> str:
    """Bit-string name of atom ``index`` (X leftmost)."""
    return format(index, "04b")


def atom_state(index: int, var: int) -> int:
    """State (0 or 1) of variable number ``var`` (0 = X, ..., 3 = U) in an atom."""
    return (index >> (3 - var)) & 1


def subset_vars(mask: int) -> list[int]:
    return [v for v in range(4) if mask >> v & 1]


def subset_name(mask: int) -> str:
    """``subset_name(0b0101) == "XZ"``; the empty set is ``""``."""
    return "".join(VARIABLES[v] for v in subset_vars(mask))


def parse_subset(name: str) -> int:
    mask = 0
    for ch in name.strip():
        if ch not in VARIABLES:
            raise ValueError(f"unknown variable {ch!r} in {name!r}")
        mask |= 1 << VARIABLES.index(ch)
    return mask


def project(index: int, mask: int) -> int:
    """Index of the marginal cell an atom falls into.

    Cells of a marginal over ``mask`` are ordered like atoms: the states of the
    variables in ``mask`` read left to right in X, Y, Z, U order form a binary
    number.
    """
    cell = 0
    for v in subset_vars(mask):
        cell = (cell << 1) | atom_state(index, v)
    return cell


def to_fraction(value: Number | float) -> Fraction:
    if isinstance(value, float):
        raise TypeError("atoms must be exact; got a float")
    return Fraction(value)


@dataclass(frozen=True)
class MarginalTable:
    variables: int
    cells: tuple[Fraction, ...]

    def __getitem__(self, cell: int) -> Fraction:
        return self.cells[cell]

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.cells)


@dataclass(frozen=True)
class JointTable:
    atoms: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.atoms) != 16:
            raise ValueError(f"expected 16 atoms, got {len(self.atoms)}")

    def __getitem__(self, key: int | str) -> Fraction:
        if isinstance(key, str):
            key = int(key, 2)
        return self.atoms[key]

    @property
    def support(self) -> list[int]:
        return [i for i, p in enumerate(self.atoms) if p]

    def common_denominator(self) -> int:
        return math.lcm(*(p.denominator for p in self.atoms))

    def to_dict(self) -> dict:
        return {"atoms": {atom_key(i): f"{p.numerator}/{p.denominator}"
                          for i, p in enumerate(self.atoms) if p}}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def make_table(atoms: Sequence[Number] | Mapping[str, Number]) -> JointTable:
    """Validate 16 exact atoms and build a :class:`JointTable`.

    ``atoms`` is either a sequence of 16 values in atom-index order or a
    mapping from bit-strings to values, where missing keys are zero.
    Strings like ``"40/154"`` are accepted and normalized.
    """
    if isinstance(atoms, Mapping):
        values = [Fraction(0)] * 16
        for key, value in atoms.items():
            if len(key) != 4 or set(key) - {"0", "1"}:
                raise ValueError(f"bad atom key {key!r}")
            values[int(key, 2)] = to_fraction(value)
    else:
        values = [to_fraction(v) for v in atoms]
        if len(values) != 16:
            raise ValueError(f"expected 16 atoms, got {len(values)}")
    for i, p in enumerate(values):
        if p < 0:
            raise NegativeAtom(f"atom {atom_key(i)} is negative: {p}")
    total = sum(values, Fraction(0))
    if total != 1:
        raise NotNormalized(f"atoms sum to {total}, not 1")
    return JointTable(tuple(values))


def marginal(t: JointTable, mask: int) -> MarginalTable:
    cells = [Fraction(0)] * (1 << bin(mask).count("1"))
    for i, p in enumerate(t.atoms):
        if p:
            cells[project(i, mask)] += p
    return MarginalTable(mask, tuple(cells))


def marginal_of(m: MarginalTable, mask: int) -> MarginalTable:
    """Marginalize an existing marginal further down to ``mask``."""
    if mask & ~m.variables:
        raise ValueError("target variables are not contained in the marginal")
    own = subset_vars(m.variables)
    cells = [Fraction(0)] * (1 << bin(mask).count("1"))
    for cell, p in enumerate(m.cells):
        # spread the cell's states back onto a full atom index, then project
        index = 0
        for pos, v in enumerate(own):
            bit = (cell >> (len(own) - 1 - pos)) & 1
            index |= bit << (3 - v)
        cells[project(index, mask)] += p
    return MarginalTable(mask, tuple(cells))


def uniform() -> JointTable:
    return make_table([Fraction(1, 16)] * 16)


def paper_example() -> JointTable:
    """The rational distribution satisfying exactly X⊥Y, X⊥Z|U, Y⊥U|Z, Z⊥U|XY
    while violating the Ingleton inequality."""
    return make_table({
        "0000": "20/77",
        "0100": "20/693", "0101": "4/99", "0110": "10/693", "0111": "2/99",
        "1000": "20/693", "1001": "40/99", "1010": "1/693", "1011": "2/99",
        "1111": "2/11",
    })


def load_table(path) -> JointTable:
    with open(path) as fh:
        return table_from_dict(json.load(fh))


def table_from_dict(data: Mapping) -> JointTable:
    if "atoms" not in data:
        raise ValueError("distribution object needs an 'atoms' key")
    return make_table(data["atoms"])


def product_table(marginals: Iterable[Sequence[Number]]) -> JointTable:
    """Joint table of four independent binary variables.

    ``marginals`` gives (P(V=0), P(V=1)) for X, Y, Z, U in order.
    """
    margs = [tuple(to_fraction(p) for p in m) for m in marginals]
    atoms = []
    for i in range(16):
        p = Fraction(1)
        for v in range(4):
            p *= margs[v][atom_state(i, v)]
        atoms.append(p)
    return make_table(atoms)
