"""Entropy vectors, linear functionals on them, and exact sign certificates."""

from __future__ import annotations

import math
import sys
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .dist import JointTable, marginal, project, subset_name

SUBSETS = range(16)

# certificates for realistic tables run to thousands of decimal digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


@dataclass(frozen=True)
class LinFunctional:
    """Integer linear functional on R^16, indexed by subset masks.

    The coefficient of the empty set is kept; difference expressions with
    an empty conditioning set put -1 there.
    """

    coefficients: tuple[int, ...]

    def __post_init__(self):
        if len(self.coefficients) != 16:
            raise ValueError("a functional needs 16 coefficients")

    @classmethod
    def zero(cls) -> "LinFunctional":
        return cls((0,) * 16)

    @classmethod
    def from_terms(cls, terms: Mapping[int, int] | Iterable[tuple[int, int]]) -> "LinFunctional":
        """Build from ``{subset_mask: coefficient}`` pairs; repeated masks add up."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        coef = [0] * 16
        for mask, c in items:
            coef[mask] += c
        return cls(tuple(coef))

    def __getitem__(self, mask: int) -> int:
        return self.coefficients[mask]

    def __iter__(self) -> Iterator[int]:
        return iter(self.coefficients)

    def __add__(self, other: "LinFunctional") -> "LinFunctional":
        return LinFunctional(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: "LinFunctional") -> "LinFunctional":
        return LinFunctional(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self) -> "LinFunctional":
        return LinFunctional(tuple(-a for a in self))

    def __mul__(self, k: int) -> "LinFunctional":
        return LinFunctional(tuple(k * a for a in self))

    __rmul__ = __mul__

    def terms(self) -> list[tuple[int, int]]:
        return [(m, c) for m, c in enumerate(self.coefficients) if c]

    def __str__(self) -> str:
        if not any(self.coefficients):
            return "0"
        parts = []
        for mask, c in self.terms():
            sign = "+" if c > 0 else "-"
            k = "" if abs(c) == 1 else f"{abs(c)}·"
            parts.append(f"{sign}{k}h({subset_name(mask) or '∅'})")
        return " ".join(parts)


@dataclass(frozen=True)
class EntropyVector:
    """Joint entropies h(I) in nats, indexed by subset mask."""

    h: tuple[float, ...]

    def __getitem__(self, mask: int) -> float:
        return self.h[mask]

    def __iter__(self) -> Iterator[float]:
        return iter(self.h)


def _plogp(p: float) -> float:
    return p * math.log(p) if p > 0 else 0.0


def entropy_of_atoms(atoms: Sequence[float]) -> EntropyVector:
    """Entropy vector of 16 float atoms (not validated; used on float paths)."""
    h = []
    for mask in SUBSETS:
        cells = [0.0] * (1 << bin(mask).count("1"))
        for i, p in enumerate(atoms):
            if p:
                cells[project(i, mask)] += float(p)
        h.append(-sum(_plogp(c) for c in cells) if mask else 0.0)
    return EntropyVector(tuple(h))


def entropy_vector(t: JointTable) -> EntropyVector:
    return entropy_of_atoms([float(p) for p in t.atoms])


def evaluate(f: LinFunctional, v: EntropyVector | Sequence[float]) -> float:
    return math.fsum(c * x for c, x in zip(f, v) if c)


def is_polymatroid(v: EntropyVector | Sequence[float], tol: float = 0.0) -> bool:
    h = list(v)
    if h[0] != 0:
        return False
    for i in SUBSETS:
        for j in SUBSETS:
            if i & j == i and h[i] > h[j] + tol:
                return False
            if h[i] + h[j] < h[i | j] + h[i & j] - tol:
                return False
    return True


@dataclass(frozen=True)
class SignCertificate:
    """Witness that ``exp(scale * f(h)) == numerator / denominator``.

    ``sign`` is the sign of ``f(h)`` and follows from comparing the two
    integers.
    """

    sign: int
    scale: int
    numerator: int
    denominator: int

    def to_dict(self) -> dict:
        num, den = str(self.numerator), str(self.denominator)
        return {
            "sign": self.sign,
            "scale": self.scale,
            "num_digits": len(num),
            "den_digits": len(den),
            "num": num,
            "den": den,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SignCertificate":
        return cls(int(data["sign"]), int(data["scale"]), int(data["num"]), int(data["den"]))


def power_exponents(f: LinFunctional, t: JointTable) -> tuple[int, Counter]:
    """Integer bases and exponents of ``exp(D * f(h))``.

    With D the common denominator of the atoms, each marginal cell is m/D and
    D*h(I) = D*log D - sum(m*log m). Returns D and a counter mapping each base
    to its (signed) total exponent; bases 0 and 1 are dropped.
    """
    D = t.common_denominator()
    powers: Counter = Counter()
    total = sum(f)
    for mask, c in f.terms():
        if mask == 0:
            continue
        for cell in marginal(t, mask):
            m = int(cell * D)
            if m > 1:
                powers[m] -= c * m
    # the D*log D parts only survive through the coefficient sum (h(∅) = 0)
    total -= f[0]
    if total and D > 1:
        powers[D] += total * D
    return D, powers


def exact_sign(f: LinFunctional, t: JointTable) -> SignCertificate:
    D, powers = power_exponents(f, t)
    num = den = 1
    for base, e in powers.items():
        if e > 0:
            num *= base**e
        elif e < 0:
            den *= base**-e
    g = math.gcd(num, den)
    num, den = num // g, den // g
    sign = (num > den) - (num < den)
    return SignCertificate(sign, D, num, den)
