"""The support-constrained parametrization of the CI model
{X⊥Z|U, Y⊥U|Z, Z⊥U|XY} and the search for rational non-Ingleton points.

Six atoms are fixed to zero (0001, 0010, 0011, 1100, 1101, 1110). The other
ten are rational functions of the three free parameters p0110, p1011 and
p1111. Adding X⊥Y gives one polynomial equation, quadratic in p0110.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence, Union

from .ci import CIStatement, holds_exact
from .dist import JointTable, atom_key, make_table
from .entropy import LinFunctional, SignCertificate, entropy_of_atoms, entropy_vector, evaluate, exact_sign
from .ingleton import INGLETON

Scalar = Union[Fraction, float]

ZERO_ATOMS = ("0001", "0010", "0011", "1100", "1101", "1110")
SUPPORT = ("0000", "0100", "0101", "0110", "0111", "1000", "1001", "1010", "1011", "1111")

# h(XYZ) - h(XZ) + h(XYU) - h(YU) - h(XYZU) + h(ZU)  =  H(Y|XZ) + H(X|YU) - H(XY|ZU)
RHO1 = LinFunctional.from_terms({0b0111: 1, 0b0101: -1, 0b1011: 1, 0b1010: -1, 0b1111: -1, 0b1100: 1})
# h(ZU) - h(XZ) + h(X) - h(YU) + h(Y)  =  H(ZU) - H(Z|X) - H(U|Y)
RHO2 = LinFunctional.from_terms({0b1100: 1, 0b0101: -1, 0b0001: 1, 0b1010: -1, 0b0010: 1})
SCORES = {"rho1": RHO1, "rho2": RHO2}

XY = CIStatement.parse("X⊥Y|")


class OutsideModel(ValueError):
    pass


class NegativeDiscriminant(ValueError):
    pass


class DegenerateQuadratic(ValueError):
    pass


class StartOutsideRegion(ValueError):
    pass


@dataclass(frozen=True)
class ParamPoint:
    p0110: Scalar
    p1011: Scalar
    p1111: Scalar

    @property
    def exact(self) -> bool:
        return all(isinstance(v, (Fraction, int)) for v in self)

    def __iter__(self):
        return iter((self.p0110, self.p1011, self.p1111))

    def as_floats(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in self)


def param_atoms(x: Scalar, y: Scalar, z: Scalar) -> dict[str, Scalar]:
    """Atoms of the parametrized table for p0110=x, p1011=y, p1111=z.

    Works for Fractions and floats alike. Raises ZeroDivisionError when a
    denominator vanishes.
    """
    p1001 = (y * y * (1 - 2 * x - 2 * y) + y * z * (1 - x - 3 * y - z)) / ((x + y) * (2 * y + z))
    p0101 = p1001 * y / (y + z)
    p1010 = x * y / (y + z)
    p0000 = x * p1001 * z / (y * (y + z))
    # from X⊥Z|U at U=1: p0101 (p1011 + p1111) = p0111 p1001
    p0111 = p0101 * (y + z) / p1001
    p0100 = p0101 * x / p0111
    p1000 = p1001 * p1010 / y
    atoms = dict.fromkeys(ZERO_ATOMS, 0 * x)
    atoms.update({"0000": p0000, "0100": p0100, "0101": p0101, "0110": x, "0111": p0111,
                  "1000": p1000, "1001": p1001, "1010": p1010, "1011": y, "1111": z})
    return atoms


def _atoms_or_none(pt: ParamPoint) -> dict[str, Scalar] | None:
    if not all(0 < v < 1 for v in pt):
        return None
    try:
        atoms = param_atoms(*pt)
    except ZeroDivisionError:
        return None
    if not all(atoms[k] > 0 for k in SUPPORT):
        return None
    return atoms


def param_to_table(pt: ParamPoint) -> JointTable:
    if not pt.exact:
        raise TypeError("param_to_table needs exact parameters; use param_atoms for floats")
    atoms = _atoms_or_none(ParamPoint(*(Fraction(v) for v in pt)))
    if atoms is None:
        raise OutsideModel(f"{pt} does not give ten positive atoms")
    if sum(atoms.values()) != 1:
        raise OutsideModel(f"{pt} does not give a normalized table")
    return make_table(atoms)


def membership_T1(pt: ParamPoint, tol: float = 0.0) -> bool:
    """Whether ``pt`` lies in the semialgebraic parameter set of the model.

    Exact points are checked exactly; float points need every atom > ``tol``.
    """
    atoms = _atoms_or_none(pt)
    if atoms is None:
        return False
    if pt.exact:
        return sum(atoms.values()) == 1
    return all(atoms[k] > tol for k in SUPPORT)


def float_atoms(pt: ParamPoint) -> list[float]:
    atoms = param_atoms(*pt.as_floats())
    return [float(atoms[atom_key(i)]) for i in range(16)]


# ---------------------------------------------------------------------------
# the X⊥Y constraint as a polynomial in (p0110, p1011, p1111)

def xy_constraint_sides(x: Scalar, y: Scalar, z: Scalar) -> tuple[Scalar, Scalar]:
    lhs = (y**2 * (y + z) ** 3
           + x**2 * z * (2 * y**3 + z**4 + y * z**2 * (1 + 4 * z) + y**2 * z * (3 + 4 * z))
           + x * (y**4 + 5 * y * z**5 + z**6 + 2 * y**3 * (z + 2 * z**3) + y**2 * (z**2 + 8 * z**4)))
    rhs = z * (2 * y**2 + 3 * y * z + z**2) * (y**3 + y**2 * z + x * z**2)
    return lhs, rhs


def xy_constraint_residual(pt: ParamPoint) -> Scalar:
    lhs, rhs = xy_constraint_sides(*pt)
    return lhs - rhs


Terms = tuple[tuple[int, tuple[int, ...]], ...]


def _poly_terms(expr, gens) -> Terms:
    import sympy as sp

    poly = sp.Poly(sp.expand(expr), *gens)
    return tuple((int(c), tuple(int(e) for e in m)) for m, c in sorted(poly.terms()))


@lru_cache(maxsize=None)
def quadratic_terms() -> tuple[Terms, Terms, Terms]:
    """Coefficients of p0110^2, p0110, 1 in the constraint, as polynomials in (p1011, p1111)."""
    import sympy as sp

    x, y, z = sp.symbols("x y z")
    lhs, rhs = xy_constraint_sides(x, y, z)
    poly = sp.Poly(sp.expand(lhs - rhs), x)
    coeffs = poly.all_coeffs()
    if len(coeffs) != 3:
        raise AssertionError("constraint is expected to be quadratic in p0110")
    return tuple(_poly_terms(c, (y, z)) for c in coeffs)


@lru_cache(maxsize=None)
def discriminant_terms() -> Terms:
    """Integer polynomial in (a, b, c, d) equal to b^8 d^12 times the discriminant
    at p1011 = a/b, p1111 = c/d."""
    import sympy as sp

    y, z, a, b, c, d = sp.symbols("y z a b c d")
    A, B, C = (sum(k * y**i * z**j for k, (i, j) in terms) for terms in quadratic_terms())
    disc = sp.expand(B**2 - 4 * A * C)
    scaled = sp.expand(disc.subs({y: a / b, z: c / d}) * b**8 * d**12)
    num, den = sp.fraction(sp.together(scaled))
    if den != 1:
        raise AssertionError("b^8 d^12 does not clear the discriminant's denominator")
    return _poly_terms(num, (a, b, c, d))


def _eval_terms(terms: Terms, values: Sequence) -> object:
    total = 0
    for k, exps in terms:
        term = k
        for v, e in zip(values, exps):
            if e:
                term = term * v**e
        total = total + term
    return total


def quadratic_coefficients(p1011: Scalar, p1111: Scalar) -> tuple[Scalar, Scalar, Scalar]:
    return tuple(_eval_terms(t, (p1011, p1111)) for t in quadratic_terms())


def discriminant_numerator(a: int, b: int, c: int, d: int) -> int:
    return _eval_terms(discriminant_terms(), (a, b, c, d))


def is_square(n: int) -> bool:
    return n >= 0 and math.isqrt(n) ** 2 == n


def rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    if is_square(q.numerator) and is_square(q.denominator):
        return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))
    return None


@dataclass(frozen=True)
class QuadraticSurd:
    """``rational + coefficient * sqrt(radicand)``."""

    rational: Fraction
    coefficient: Fraction
    radicand: Fraction

    @property
    def exact_value(self) -> Fraction | None:
        root = rational_sqrt(self.radicand)
        return None if root is None else self.rational + self.coefficient * root

    def __float__(self) -> float:
        return float(self.rational) + float(self.coefficient) * math.sqrt(self.radicand)


@dataclass(frozen=True)
class Roots:
    discriminant: Fraction
    roots: tuple[QuadraticSurd, ...]
    branch: int | None = None

    @property
    def rational(self) -> bool:
        return rational_sqrt(self.discriminant) is not None

    def values(self) -> list[Scalar]:
        return [r.exact_value if r.exact_value is not None else float(r) for r in self.roots]

    @property
    def f(self) -> Scalar | None:
        """The root chosen as p0110 = f(p1011, p1111), if any lands in the model."""
        return None if self.branch is None else self.values()[self.branch]


def solve_p0110(p1011: Scalar, p1111: Scalar) -> Roots:
    """Solve the X⊥Y constraint for p0110.

    The chosen branch is the root that lands in the model; if both do, the
    smaller one.
    """
    y, z = Fraction(p1011), Fraction(p1111)
    A, B, C = quadratic_coefficients(y, z)
    if A == 0:
        raise DegenerateQuadratic(f"leading coefficient vanishes at ({y}, {z})")
    disc = B * B - 4 * A * C
    if disc < 0:
        raise NegativeDiscriminant(f"no real root at ({y}, {z})")
    half = Fraction(1) / (2 * A)
    roots = [QuadraticSurd(-B * half, s * half, disc) for s in (-1, 1)]
    roots.sort(key=float)
    result = Roots(disc, tuple(roots))
    inside = [k for k, v in enumerate(result.values())
              if membership_T1(ParamPoint(v, y, z) if isinstance(v, Fraction)
                               else ParamPoint(v, float(y), float(z)))]
    return Roots(disc, tuple(roots), inside[0] if inside else None)


# ---------------------------------------------------------------------------
# scores

def score(target: ParamPoint | JointTable | Sequence[float], which: str | LinFunctional = "rho2") -> float:
    f = SCORES[which] if isinstance(which, str) else which
    if isinstance(target, JointTable):
        return evaluate(f, entropy_vector(target))
    if isinstance(target, ParamPoint):
        return evaluate(f, entropy_of_atoms(float_atoms(target)))
    return evaluate(f, entropy_of_atoms(target))


# ---------------------------------------------------------------------------
# rational point search

@dataclass(frozen=True)
class SearchBounds:
    p0110: tuple[Fraction, Fraction]
    p1011: tuple[Fraction, Fraction]
    p1111: tuple[Fraction, Fraction]
    max_b: int = 99
    max_d: int = 11

    def __post_init__(self):
        for lo, hi in (self.p0110, self.p1011, self.p1111):
            if not lo < hi:
                raise ValueError("search bounds need lo < hi")
        if self.max_b < 1 or self.max_d < 1:
            raise ValueError("denominator bounds must be positive")

    def inflated(self, fraction: Fraction | float | str) -> "SearchBounds":
        """Scale each lower bound by (1 - fraction) and each upper bound by (1 + fraction)."""
        q = Fraction(fraction)
        widen = lambda r: (r[0] * (1 - q), r[1] * (1 + q))  # noqa: E731
        return SearchBounds(widen(self.p0110), widen(self.p1011), widen(self.p1111),
                            self.max_b, self.max_d)


# the box around the numerical local maximum of rho1
RHO1_BOX = SearchBounds(
    (Fraction(1, 6), Fraction(3, 6)),
    (Fraction(1, 160), Fraction(3, 160)),
    (Fraction(1, 8), Fraction(3, 8)),
)


def default_bounds(max_b: int = 99, max_d: int = 11, inflate: Fraction | float | str = "1/10") -> SearchBounds:
    box = RHO1_BOX.inflated(inflate)
    return SearchBounds(box.p0110, box.p1011, box.p1111, max_b, max_d)


@dataclass(frozen=True)
class Counterexample:
    a: int
    b: int
    c: int
    d: int
    p0110: Fraction
    table: JointTable = field(repr=False)
    certificate: SignCertificate = field(repr=False)
    in_box: bool = False

    @property
    def point(self) -> ParamPoint:
        return ParamPoint(self.p0110, Fraction(self.a, self.b), Fraction(self.c, self.d))

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d,
                "p0110": f"{self.p0110.numerator}/{self.p0110.denominator}",
                "p0110_in_box": self.in_box,
                "certificate": self.certificate.to_dict()}


def _numerators(den: int, lo: Fraction, hi: Fraction) -> range:
    return range(max(1, math.ceil(lo * den)), min(den - 1, math.floor(hi * den)) + 1)


def perfect_square_pairs(bounds: SearchBounds):
    """Yield (a, b, c, d, sqrt) for reduced fractions a/b, c/d inside the
    rectangles whose discriminant numerator is a perfect square."""
    for b in range(1, bounds.max_b + 1):
        for d in range(1, bounds.max_d + 1):
            for a in _numerators(b, *bounds.p1011):
                if math.gcd(a, b) != 1:
                    continue
                for c in _numerators(d, *bounds.p1111):
                    if math.gcd(c, d) != 1:
                        continue
                    n = discriminant_numerator(a, b, c, d)
                    if is_square(n):
                        yield a, b, c, d, math.isqrt(n)


def search_rational(bounds: SearchBounds | None = None) -> list[Counterexample]:
    """Exhaustive search for rational non-Ingleton points of the model.

    Every returned point is exactly verified: ten positive atoms, X⊥Y holds,
    and the Ingleton expression has a negative exact sign. The p0110 box is
    only recorded, not enforced.
    """
    bounds = bounds or default_bounds()
    found = []
    for a, b, c, d, root in perfect_square_pairs(bounds):
        y, z = Fraction(a, b), Fraction(c, d)
        A, B, C = quadratic_coefficients(y, z)
        if A == 0:
            continue
        sq = Fraction(root, b**4 * d**6)
        for x in sorted({(-B - sq) / (2 * A), (-B + sq) / (2 * A)}):
            pt = ParamPoint(x, y, z)
            if not membership_T1(pt) or xy_constraint_residual(pt) != 0:
                continue
            table = param_to_table(pt)
            if not holds_exact(table, XY):
                continue
            cert = exact_sign(INGLETON, table)
            if cert.sign == -1:
                lo, hi = bounds.p0110
                found.append(Counterexample(a, b, c, d, x, table, cert, lo <= x <= hi))
    found.sort(key=lambda r: (r.b, r.d, r.a, r.c, r.p0110))
    return found


# ---------------------------------------------------------------------------
# grid classification over (p1111, p1011)

INVALID, NEG, POS = "INVALID", "NEG", "POS"


@dataclass(frozen=True)
class HeatCell:
    p1111: float
    p1011: float
    status: str
    score: float | None = None


def classify_point(p1111: float, p1011: float) -> HeatCell:
    A, B, C = quadratic_coefficients(p1011, p1111)
    if abs(A) < 1e-14:
        return HeatCell(p1111, p1011, INVALID)
    disc = B * B - 4 * A * C
    if disc < 0:
        return HeatCell(p1111, p1011, INVALID)
    sq = math.sqrt(disc)
    for x in sorted(((-B - sq) / (2 * A), (-B + sq) / (2 * A))):
        pt = ParamPoint(x, p1011, p1111)
        if membership_T1(pt):
            value = score(pt, "rho2")
            return HeatCell(p1111, p1011, POS if value > 0 else NEG, value)
    return HeatCell(p1111, p1011, INVALID)


def grid_axis(lo: float, hi: float, resolution: int) -> list[float]:
    step = (hi - lo) / resolution
    return [lo + (k + 0.5) * step for k in range(resolution)]


def heatmap(xrange: tuple[float, float] = (0.0, 1.0), yrange: tuple[float, float] = (0.0, 0.1),
            resolution: int = 100, workers: int = 1) -> list[HeatCell]:
    """Classify cell centres of a grid; x is p1111 and y is p1011.

    Rows run over p1011 from low to high, each row over p1111.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    xs = grid_axis(*xrange, resolution)
    ys = grid_axis(*yrange, resolution)
    jobs = [(xs, y) for y in ys]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_heat_row, jobs))
    else:
        rows = [_heat_row(job) for job in jobs]
    return [cell for row in rows for cell in row]


def _heat_row(job) -> list[HeatCell]:
    xs, y = job
    return [classify_point(x, y) for x in xs]


def heatmap_csv(cells: Sequence[HeatCell]) -> str:
    lines = ["p1111,p1011,status,score"]
    for cell in cells:
        value = "" if cell.score is None else repr(cell.score)
        lines.append(f"{cell.p1111!r},{cell.p1011!r},{cell.status},{value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# local optimization

Region = Union[str, SearchBounds, Callable[[ParamPoint], bool]]


def _region_test(region: Region) -> Callable[[ParamPoint], bool]:
    if callable(region):
        return region
    if region == "T1":
        return membership_T1
    if region == "box":
        region = RHO1_BOX
    if isinstance(region, SearchBounds):
        box = [(float(lo), float(hi)) for lo, hi in (region.p0110, region.p1011, region.p1111)]
        return lambda pt: membership_T1(pt) and all(lo <= v <= hi for v, (lo, hi) in zip(pt, box))
    raise ValueError(f"unknown region {region!r}")


def optimize_score(start: ParamPoint, which: str | LinFunctional | Callable = "rho1",
                   mode: str = "max", region: Region = "T1",
                   xatol: float = 1e-10, maxiter: int = 20000) -> tuple[ParamPoint, float]:
    """Nelder-Mead local search for a max or min of a score over a region.

    Leaving the region is penalized by returning a large objective value, so
    the simplex contracts back inside. Stops once the simplex is smaller than
    ``xatol``.
    """
    from scipy.optimize import minimize

    if mode not in ("max", "min"):
        raise ValueError("mode must be 'max' or 'min'")
    inside = _region_test(region)
    start = ParamPoint(*start.as_floats())
    if not inside(start):
        raise StartOutsideRegion(f"{start} is outside the region")
    if callable(which) and not isinstance(which, LinFunctional):
        fn = which
    else:
        fn = lambda pt: score(pt, which)  # noqa: E731
    sign = -1.0 if mode == "max" else 1.0

    def objective(v) -> float:
        pt = ParamPoint(*(float(t) for t in v))
        if not inside(pt):
            return 1e6
        return sign * fn(pt)

    res = minimize(objective, list(start), method="Nelder-Mead",
                   options={"xatol": xatol, "fatol": math.inf, "maxiter": maxiter,
                            "maxfev": 10 * maxiter, "adaptive": False})
    best = ParamPoint(*(float(t) for t in res.x))
    if not inside(best):
        best = start
    return best, fn(best)
