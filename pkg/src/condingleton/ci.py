"""Elementary conditional independence statements on X, Y, Z, U."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .dist import VARIABLES, JointTable, marginal, parse_subset, subset_name, subset_vars
from .entropy import LinFunctional


@dataclass(frozen=True, order=True)
class CIStatement:
    """``i ⊥ j | K`` with variable numbers ``i < j`` and ``K`` a subset mask."""

    i: int
    j: int
    K: int = 0

    def __post_init__(self):
        if not 0 <= self.i < self.j <= 3:
            raise ValueError(f"need 0 <= i < j <= 3, got i={self.i}, j={self.j}")
        if self.K & ((1 << self.i) | (1 << self.j)) or not 0 <= self.K < 16:
            raise ValueError("conditioning set must avoid i and j")

    @classmethod
    def make(cls, i: int, j: int, K: int = 0) -> "CIStatement":
        """Like the constructor but accepts ``i > j``."""
        return cls(min(i, j), max(i, j), K)

    @classmethod
    def parse(cls, text: str) -> "CIStatement":
        """Parse ``"X⊥Z|U"``, ``"X⊥Y|"``, ``"XY"``, ``"XZ|U"`` or ``"X,Z|U"``."""
        m = re.fullmatch(r"\s*([XYZU])\s*(?:⊥|_\|_|,)?\s*([XYZU])\s*(?:\|\s*([XYZU]*))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse CI statement {text!r}")
        i, j = VARIABLES.index(m.group(1)), VARIABLES.index(m.group(2))
        return cls.make(i, j, parse_subset(m.group(3) or ""))

    def __str__(self) -> str:
        return f"{VARIABLES[self.i]}⊥{VARIABLES[self.j]}|{subset_name(self.K)}"

    @property
    def index(self) -> int:
        return _INDEX[self]

    @property
    def bit(self) -> int:
        return 1 << _INDEX[self]

    def relabel(self, perm: tuple[int, int, int, int]) -> "CIStatement":
        """Image under the variable permutation ``v -> perm[v]``."""
        K = 0
        for v in subset_vars(self.K):
            K |= 1 << perm[v]
        return CIStatement.make(perm[self.i], perm[self.j], K)


@lru_cache(maxsize=None)
def enumerate_elementary() -> tuple[CIStatement, ...]:
    """The 24 elementary statements sorted by (i, j, K-mask).

    Position in this tuple is the bit index used by :class:`CIStructure`.
    """
    out = []
    for i in range(4):
        for j in range(i + 1, 4):
            for K in range(16):
                if not K & ((1 << i) | (1 << j)):
                    out.append(CIStatement(i, j, K))
    return tuple(sorted(out))


_INDEX = {s: n for n, s in enumerate(enumerate_elementary())}
ALL_MASK = (1 << 24) - 1


def delta_functional(s: CIStatement) -> LinFunctional:
    """h(iK) + h(jK) - h(ijK) - h(K)."""
    i, j, K = 1 << s.i, 1 << s.j, s.K
    return LinFunctional.from_terms([(i | K, 1), (j | K, 1), (i | j | K, -1), (K, -1)])


def _slices(t: JointTable, s: CIStatement) -> Iterator[tuple[Fraction, Fraction, Fraction, Fraction]]:
    """Per assignment of K, the 2x2 table of P(x_i, x_j, K=k)."""
    mask = (1 << s.i) | (1 << s.j) | s.K
    m = marginal(t, mask)
    order = subset_vars(mask)
    pos_i, pos_j = order.index(s.i), order.index(s.j)
    width = len(order)
    k_positions = [p for p in range(width) if p not in (pos_i, pos_j)]
    for k in range(1 << len(k_positions)):
        base = 0
        for n, p in enumerate(k_positions):
            if k >> (len(k_positions) - 1 - n) & 1:
                base |= 1 << (width - 1 - p)
        bi, bj = 1 << (width - 1 - pos_i), 1 << (width - 1 - pos_j)
        yield m[base], m[base | bj], m[base | bi], m[base | bi | bj]


def holds_exact(t: JointTable, s: CIStatement) -> bool:
    """True iff every K-slice of the (i, j) table has vanishing determinant."""
    return all(p00 * p11 == p01 * p10 for p00, p01, p10, p11 in _slices(t, s))


@dataclass(frozen=True)
class CIStructure:
    """A set of elementary CI statements stored as a 24-bit mask."""

    mask: int = 0

    @classmethod
    def of(cls, statements: Iterable[CIStatement | str]) -> "CIStructure":
        mask = 0
        for s in statements:
            if isinstance(s, str):
                s = CIStatement.parse(s)
            mask |= s.bit
        return cls(mask)

    @classmethod
    def full(cls) -> "CIStructure":
        return cls(ALL_MASK)

    def statements(self) -> list[CIStatement]:
        return [s for n, s in enumerate(enumerate_elementary()) if self.mask >> n & 1]

    def __iter__(self) -> Iterator[CIStatement]:
        return iter(self.statements())

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, s: CIStatement) -> bool:
        return bool(self.mask & s.bit)

    def __or__(self, other: "CIStructure") -> "CIStructure":
        return CIStructure(self.mask | other.mask)

    def __and__(self, other: "CIStructure") -> "CIStructure":
        return CIStructure(self.mask & other.mask)

    def __le__(self, other: "CIStructure") -> bool:
        return self.mask & ~other.mask == 0

    def __ge__(self, other: "CIStructure") -> bool:
        return other <= self

    def __lt__(self, other: "CIStructure") -> bool:
        return self <= other and self != other

    def __gt__(self, other: "CIStructure") -> bool:
        return other < self

    def add(self, s: CIStatement) -> "CIStructure":
        return CIStructure(self.mask | s.bit)

    def relabel(self, perm: tuple[int, int, int, int]) -> "CIStructure":
        return CIStructure.of(s.relabel(perm) for s in self.statements())

    def to_strings(self) -> list[str]:
        return sorted(str(s) for s in self.statements())

    def __str__(self) -> str:
        return "{" + ", ".join(self.to_strings()) + "}"

    @classmethod
    def from_strings(cls, items: Iterable[str]) -> "CIStructure":
        return cls.of(items)


def ci_structure(t: JointTable) -> CIStructure:
    return CIStructure.of(s for s in enumerate_elementary() if holds_exact(t, s))


# the CI assumption sets bracketing the three formerly open cases
L0 = CIStructure.of(["X⊥Z|U", "Y⊥U|Z"])
L1 = L0 | CIStructure.of(["Z⊥U|XY"])
L2 = L0 | CIStructure.of(["X⊥Y|"])
L = L1 | L2
