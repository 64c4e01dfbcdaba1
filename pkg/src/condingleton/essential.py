"""Curves of distributions and series expansions of entropy functionals.

Atoms of a curve family are affine in a small parameter eps. Every marginal
cell is then affine too, and its entropy contribution -m log m expands into
terms (c_k + d_k log eps) eps^k where c_k is a rational combination of 1 and
logarithms of primes. Comparing leading orders of the Ingleton expression
and of the assumed difference expressions proves that no multiplier can
make an unconditional version of a conditional inequality valid.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import mpmath
from sympy import factorint

from .ci import CIStatement, delta_functional, holds_exact
from .dist import JointTable, atom_key, make_table, project
from .entropy import LinFunctional
from .ingleton import INGLETON


class BadPartition(ValueError):
    pass


class NonAffineAtom(ValueError):
    pass


class LimitViolatesAssumptions(ValueError):
    pass


class Inconclusive(Exception):
    pass


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class LogLin:
    """``constant + sum(q_p * log p)`` over primes p, with exact rationals."""

    constant: Fraction = Fraction(0)
    logs: tuple[tuple[int, Fraction], ...] = ()

    @classmethod
    def make(cls, constant=0, logs: Mapping[int, Fraction] | None = None) -> "LogLin":
        merged: dict[int, Fraction] = {}
        for p, q in (logs or {}).items():
            merged[p] = merged.get(p, Fraction(0)) + _q(q)
        return cls(_q(constant), tuple(sorted((p, q) for p, q in merged.items() if q)))

    @classmethod
    def log(cls, r) -> "LogLin":
        """log of a positive rational, split over its prime factors."""
        return _log_rational(_q(r))

    def __add__(self, other: "LogLin") -> "LogLin":
        logs = dict(self.logs)
        for p, q in other.logs:
            logs[p] = logs.get(p, Fraction(0)) + q
        return LogLin.make(self.constant + other.constant, logs)

    def __neg__(self) -> "LogLin":
        return LogLin(-self.constant, tuple((p, -q) for p, q in self.logs))

    def __sub__(self, other: "LogLin") -> "LogLin":
        return self + (-other)

    def scale(self, k) -> "LogLin":
        k = _q(k)
        if not k:
            return LogLin()
        return LogLin(self.constant * k, tuple((p, q * k) for p, q in self.logs))

    def __bool__(self) -> bool:
        return bool(self.constant) or bool(self.logs)

    def mp(self):
        return mpmath.mpf(self.constant.numerator) / self.constant.denominator + mpmath.fsum(
            mpmath.mpf(q.numerator) / q.denominator * mpmath.log(p) for p, q in self.logs)

    def __float__(self) -> float:
        with mpmath.workdps(30):
            return float(self.mp())

    def to_dict(self) -> dict:
        return {"const": str(self.constant), "logs": {str(p): str(q) for p, q in self.logs}}

    @classmethod
    def from_dict(cls, data: Mapping) -> "LogLin":
        return cls.make(Fraction(data.get("const", "0")),
                        {int(p): Fraction(q) for p, q in data.get("logs", {}).items()})

    def __str__(self) -> str:
        parts = []
        if self.constant:
            parts.append(str(self.constant))
        for p, q in self.logs:
            k = "" if q == 1 else ("-" if q == -1 else f"{q}·")
            parts.append(f"{k}log({p})")
        return " + ".join(parts).replace("+ -", "- ") or "0"


@lru_cache(maxsize=4096)
def _log_rational(r: Fraction) -> LogLin:
    if r <= 0:
        raise ValueError("log of a non-positive number")
    logs: dict[int, Fraction] = {}
    for p, e in factorint(r.numerator).items():
        logs[p] = logs.get(p, Fraction(0)) + e
    for p, e in factorint(r.denominator).items():
        logs[p] = logs.get(p, Fraction(0)) - e
    return LogLin.make(0, logs)


def loglin_sign(x: LogLin, start_bits: int = 64, max_bits: int = 1 << 16) -> int:
    """Exact sign of a LogLin.

    Zero iff the canonical form is empty, since 1 and the logarithms of
    distinct primes are linearly independent over the rationals. A pure
    log combination is compared as a product of prime powers against 1;
    otherwise interval arithmetic is refined until it excludes zero.
    """
    if not x:
        return 0
    if not x.constant:
        lcm = 1
        for _, q in x.logs:
            lcm = math.lcm(lcm, q.denominator)
        up = down = 1
        for p, q in x.logs:
            e = int(q * lcm)
            if e > 0:
                up *= p**e
            else:
                down *= p**-e
        return 1 if up > down else -1
    bits = start_bits
    iv = mpmath.iv
    while bits <= max_bits:
        iv.prec = bits
        total = iv.mpf(x.constant.numerator) / x.constant.denominator
        for p, q in x.logs:
            total += iv.mpf(q.numerator) / q.denominator * iv.log(p)
        if total.a > 0:
            return 1
        if total.b < 0:
            return -1
        bits *= 2
    raise ArithmeticError("interval refinement did not separate the value from zero")


@dataclass(frozen=True)
class EpsSeries:
    """Truncated expansion sum over k <= order of (c[k] + d[k] log eps) eps^k."""

    order: int
    c: tuple[LogLin, ...]
    d: tuple[Fraction, ...]

    @classmethod
    def zero(cls, order: int) -> "EpsSeries":
        return cls(order, (LogLin(),) * (order + 1), (Fraction(0),) * (order + 1))

    def __add__(self, other: "EpsSeries") -> "EpsSeries":
        if other.order != self.order:
            raise ValueError("series orders differ")
        return EpsSeries(self.order, tuple(a + b for a, b in zip(self.c, other.c)),
                         tuple(a + b for a, b in zip(self.d, other.d)))

    def scale(self, k) -> "EpsSeries":
        return EpsSeries(self.order, tuple(a.scale(k) for a in self.c), tuple(a * k for a in self.d))

    def is_zero_at(self, k: int) -> bool:
        return not self.c[k] and not self.d[k]

    def leading_order(self) -> int | None:
        return next((k for k in range(self.order + 1) if not self.is_zero_at(k)), None)

    def value(self, eps: float) -> float:
        with mpmath.workdps(30):
            e = mpmath.mpf(eps)
            total = mpmath.fsum((c.mp() + mpmath.mpf(d.numerator) / d.denominator * mpmath.log(e)) * e**k
                                for k, (c, d) in enumerate(zip(self.c, self.d)))
            return float(total)

    def to_dict(self) -> dict:
        return {"order": self.order,
                "terms": [{"k": k, "c": c.to_dict(), "d": str(d)}
                          for k, (c, d) in enumerate(zip(self.c, self.d)) if c or d]}


# ---------------------------------------------------------------------------
# curve families

Affine = tuple[Fraction, Fraction]  # alpha + beta * eps


@dataclass(frozen=True)
class CurveFamily:
    """Partition of the 16 atoms: A -> 1/n, B -> 1/n - eps, C -> |B|/|C| eps, D -> 0,
    where n = |A| + |B|."""

    A: frozenset[int]
    B: frozenset[int]
    C: frozenset[int]
    D: frozenset[int] = field(default=frozenset())

    def __post_init__(self):
        parts = (self.A, self.B, self.C, self.D)
        if sorted(i for p in parts for i in p) != list(range(16)):
            raise BadPartition("A, B, C, D must partition the 16 atoms")
        if not self.A | self.B:
            raise BadPartition("A and B are both empty")
        if not self.C:
            raise BadPartition("C is empty")

    @classmethod
    def make(cls, A: Iterable, B: Iterable, C: Iterable, D: Iterable | None = None) -> "CurveFamily":
        """Build from atom indices or bit-strings; ``D`` defaults to the rest."""
        conv = lambda xs: frozenset(int(x, 2) if isinstance(x, str) else int(x) for x in xs)  # noqa: E731
        a, b, c = conv(A), conv(B), conv(C)
        d = conv(D) if D is not None else frozenset(range(16)) - a - b - c
        return cls(a, b, c, d)

    def to_dict(self) -> dict:
        return {name: sorted(atom_key(i) for i in part)
                for name, part in zip("ABCD", (self.A, self.B, self.C, self.D))}

    @classmethod
    def from_dict(cls, data: Mapping) -> "CurveFamily":
        return cls.make(data.get("A", []), data.get("B", []), data.get("C", []), data.get("D"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def family_table(fam: CurveFamily) -> list[Affine]:
    n = len(fam.A) + len(fam.B)
    top = Fraction(1, n)
    slope = Fraction(len(fam.B), len(fam.C))
    atoms = []
    for i in range(16):
        if i in fam.A:
            atoms.append((top, Fraction(0)))
        elif i in fam.B:
            atoms.append((top, Fraction(-1)))
        elif i in fam.C:
            atoms.append((Fraction(0), slope))
        else:
            atoms.append((Fraction(0), Fraction(0)))
    return atoms


def limit_table(atoms: CurveFamily | Sequence[Affine]) -> JointTable:
    if isinstance(atoms, CurveFamily):
        atoms = family_table(atoms)
    return make_table([alpha for alpha, _ in atoms])


def table_at(atoms: CurveFamily | Sequence[Affine], eps) -> list:
    if isinstance(atoms, CurveFamily):
        atoms = family_table(atoms)
    return [alpha + beta * eps for alpha, beta in atoms]


def _check_affine(atoms: Sequence) -> list[Affine]:
    out = []
    for item in atoms:
        coeffs = list(item)
        if any(coeffs[2:]):
            raise NonAffineAtom(f"atom {item!r} is not affine in eps")
        coeffs += [0] * (2 - len(coeffs))
        out.append((_q(coeffs[0]), _q(coeffs[1])))
    if len(out) != 16:
        raise ValueError("need 16 atoms")
    return out


@lru_cache(maxsize=4096)
def plogp_series(alpha: Fraction, beta: Fraction, order: int) -> EpsSeries:
    """Series of -m log m for m = alpha + beta*eps, eps -> 0+."""
    c = [LogLin()] * (order + 1)
    d = [Fraction(0)] * (order + 1)
    if alpha > 0:
        log_alpha = LogLin.log(alpha)
        r = beta / alpha
        c[0] = log_alpha.scale(-alpha)
        for k in range(1, order + 1):
            # -(alpha + beta eps) * (log alpha + sum_n (-1)^(n+1) r^n eps^n / n)
            term = -alpha * (-1) ** (k + 1) * r**k / k
            if k >= 2:
                term -= beta * (-1) ** k * r ** (k - 1) / (k - 1)
            c[k] = LogLin.make(term) + (log_alpha.scale(-beta) if k == 1 else LogLin())
    elif alpha == 0 and beta > 0:
        if order >= 1:
            c[1] = LogLin.log(beta).scale(-beta)
            d[1] = -beta
    elif alpha == 0 and beta < 0:
        raise ValueError("cell becomes negative for eps > 0")
    elif alpha < 0:
        raise ValueError("negative limit probability")
    return EpsSeries(order, tuple(c), tuple(d))


def marginal_affine(atoms: Sequence[Affine], mask: int) -> list[Affine]:
    cells = [(Fraction(0), Fraction(0))] * (1 << bin(mask).count("1"))
    for i, (alpha, beta) in enumerate(atoms):
        k = project(i, mask)
        a0, b0 = cells[k]
        cells[k] = (a0 + alpha, b0 + beta)
    return cells


def entropy_series(atoms: Sequence[Affine], mask: int, order: int) -> EpsSeries:
    total = EpsSeries.zero(order)
    if mask == 0:
        return total
    for alpha, beta in marginal_affine(atoms, mask):
        total = total + plogp_series(alpha, beta, order)
    return total


def functional_series(f: LinFunctional, fam: CurveFamily | Sequence, order: int = 4) -> EpsSeries:
    if order < 1:
        raise ValueError("order must be at least 1")
    atoms = family_table(fam) if isinstance(fam, CurveFamily) else _check_affine(fam)
    total = EpsSeries.zero(order)
    for mask, coef in f.terms():
        total = total + entropy_series(atoms, mask, order).scale(coef)
    return total


# ---------------------------------------------------------------------------
# essential conditionality

@dataclass(frozen=True)
class EssentialCertificate:
    order: int
    conclusion_d: Fraction
    assumptions: tuple[tuple[CIStatement, LogLin], ...]
    conclusion_c: LogLin = LogLin()
    family: CurveFamily | None = None

    def to_dict(self) -> dict:
        out = {
            "order": self.order,
            "conclusion": {"d": str(self.conclusion_d), "c": self.conclusion_c.to_dict()},
            "assumptions": [{"statement": str(s), "c": c.to_dict()} for s, c in self.assumptions],
        }
        if self.family is not None:
            out["family"] = self.family.to_dict()
        return out


def prove_essential(assumptions: Sequence[CIStatement], fam: CurveFamily | Sequence,
                    order: int = 4, conclusion: LinFunctional = INGLETON) -> EssentialCertificate:
    """Certify that ``conclusion + sum(lambda * △) >= 0`` fails on the curve for every lambda.

    With k the leading order of the conclusion series: every series vanishes
    below k, the conclusion has a positive eps^k log eps coefficient and no
    assumption has one. Then the eps^k log eps term dominates and is negative
    as eps -> 0, whatever the multipliers.
    """
    atoms = family_table(fam) if isinstance(fam, CurveFamily) else _check_affine(fam)
    limit = limit_table(atoms)
    for s in assumptions:
        if not holds_exact(limit, s):
            raise LimitViolatesAssumptions(f"limit distribution violates {s}")
    # most candidates are decided at order 1; expand further only if needed
    concl = functional_series(conclusion, atoms, 1)
    if concl.leading_order() is None and order > 1:
        concl = functional_series(conclusion, atoms, order)
    asm = [functional_series(delta_functional(s), atoms, concl.order) for s in assumptions]
    k = concl.leading_order()
    if k is None:
        raise Inconclusive(f"conclusion series vanishes up to order {concl.order}")
    for s, series in zip(assumptions, asm):
        low = series.leading_order()
        if low is not None and low < k:
            raise Inconclusive(f"{s} contributes at order {low} < {k}")
        if series.d[k]:
            raise Inconclusive(f"{s} has an eps^{k} log eps term")
    if concl.d[k] <= 0:
        raise Inconclusive(f"no positive eps^{k} log eps term in the conclusion")
    return EssentialCertificate(
        k, concl.d[k], tuple((s, series.c[k]) for s, series in zip(assumptions, asm)),
        concl.c[k], fam if isinstance(fam, CurveFamily) else None)


DEFAULT_WEIGHTS = (0.20, 0.05, 0.05, 0.70)


def sample_families(seed: int = 0, count: int = 1, weights: Sequence[float] = DEFAULT_WEIGHTS) -> list[CurveFamily]:
    """Reproducible stream of valid random partitions.

    Each atom independently goes to A, B, C or D with the given weights; the
    default favours D so that limits have small supports, like the known
    curves.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        labels = rng.choices("ABCD", weights=weights, k=16)
        parts = {name: [i for i, lab in enumerate(labels) if lab == name] for name in "ABCD"}
        try:
            out.append(CurveFamily.make(parts["A"], parts["B"], parts["C"], parts["D"]))
        except BadPartition:
            continue
    return out


def search_essential(assumptions: Sequence[CIStatement], seed: int = 0, count: int = 10000,
                     order: int = 4, weights: Sequence[float] = DEFAULT_WEIGHTS
                     ) -> tuple[EssentialCertificate | None, int]:
    """Try sampled families until one certifies; returns (certificate, tried)."""
    for n, fam in enumerate(sample_families(seed, count, weights), 1):
        try:
            return prove_essential(assumptions, fam, order), n
        except (LimitViolatesAssumptions, Inconclusive):
            continue
    return None, count


# the sparse curve refuting every unconditional version of X⊥Z|U ∧ Y⊥Z|U => ◻ >= 0
SPARSE_FAMILY = CurveFamily.make(A=["0110", "1010", "1101", "1111"], B=["0010"], C=["1100"])
ASSUMPTIONS_2_5 = (CIStatement.parse("X⊥Z|U"), CIStatement.parse("Y⊥Z|U"))
