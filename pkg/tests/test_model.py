import math
import random
from fractions import Fraction

import pytest
import sympy as sp

from condingleton.ci import CIStatement, CIStructure, ci_structure, holds_exact
from condingleton.dist import marginal, paper_example, X, Y
from condingleton.entropy import entropy_vector, evaluate, exact_sign
from condingleton.ingleton import INGLETON
from condingleton.model import (RHO1, RHO2, RHO1_BOX, XY, DegenerateQuadratic, NegativeDiscriminant,
                                OutsideModel, ParamPoint, SearchBounds, StartOutsideRegion, classify_point,
                                default_bounds, discriminant_numerator, discriminant_terms, heatmap,
                                heatmap_csv, is_square, membership_T1, optimize_score, param_atoms,
                                param_to_table, quadratic_coefficients, rational_sqrt, score, search_rational,
                                solve_p0110, xy_constraint_residual, xy_constraint_sides)

a, b, c, d = sp.symbols("a b c d")

# the 36-term discriminant numerator as printed, transcribed by hand
PRINTED = (
    "b**8*c**12 + 10*a*b**7*c**11*d - 2*b**8*c**11*d + 41*a**2*b**6*c**10*d**2 - 16*a*b**7*c**10*d**2"
    " + b**8*c**10*d**2 + 88*a**3*b**5*c**9*d**3 - 46*a**2*b**6*c**9*d**3 + 6*a*b**7*c**9*d**3"
    " + 104*a**4*b**4*c**8*d**4 - 44*a**3*b**5*c**8*d**4 + 11*a**2*b**6*c**8*d**4 + 64*a**5*b**3*c**7*d**5"
    " + 44*a**4*b**4*c**7*d**5 + 2*a**3*b**5*c**7*d**5 - 2*a**2*b**6*c**7*d**5 + 16*a**6*b**2*c**6*d**6"
    " + 136*a**5*b**3*c**6*d**6 - 6*a**4*b**4*c**6*d**6 - 14*a**3*b**5*c**6*d**6 + 112*a**6*b**2*c**5*d**7"
    " + 26*a**5*b**3*c**5*d**7 - 42*a**4*b**4*c**5*d**7 + 32*a**7*b*c**4*d**8 + 68*a**6*b**2*c**4*d**8"
    " - 70*a**5*b**3*c**4*d**8 + a**4*b**4*c**4*d**8 + 56*a**7*b*c**3*d**9 - 68*a**6*b**2*c**3*d**9"
    " + 4*a**5*b**3*c**3*d**9 + 16*a**8*c**2*d**10 - 36*a**7*b*c**2*d**10 + 6*a**6*b**2*c**2*d**10"
    " - 8*a**8*c*d**11 + 4*a**7*b*c*d**11 + a**8*d**12"
)

EXAMPLE_POINT = ParamPoint(Fraction(10, 693), Fraction(2, 99), Fraction(2, 11))


def xy_determinant(pt):
    m = marginal(param_to_table(pt), X | Y)
    return m[0] * m[3] - m[1] * m[2]


def random_model_points(n, seed=3):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        pt = ParamPoint(Fraction(rng.randint(1, 400), 1000), Fraction(rng.randint(1, 80), 1000),
                        Fraction(rng.randint(1, 900), 1000))
        if membership_T1(pt):
            out.append(pt)
    return out


def test_parametrization_reproduces_example():
    assert param_to_table(EXAMPLE_POINT) == paper_example()


def test_parametrized_tables_satisfy_model():
    for pt in random_model_points(30):
        t = param_to_table(pt)
        for s in ("X⊥Z|U", "Y⊥U|Z", "Z⊥U|XY"):
            assert holds_exact(t, CIStatement.parse(s))
        assert all(t[k] == 0 for k in ("0001", "0010", "0011", "1100", "1101", "1110"))


def test_constraint_polynomial_divides_determinant():
    x, y, z = sp.symbols("x y z", positive=True)
    atoms = param_atoms(x, y, z)
    cell = lambda k: sum(v for key, v in atoms.items() if key[:2] == k)  # noqa: E731
    det = sp.together(cell("00") * cell("11") - cell("01") * cell("10"))
    lhs, rhs = xy_constraint_sides(x, y, z)
    ratio = sp.factor(det * (x + y) * (y + z) ** 2 * (2 * y + z) ** 2 / (lhs - rhs))
    assert ratio == -1


def test_residual_matches_determinant_on_model_points():
    for pt in random_model_points(50):
        x, y, z = pt
        det = xy_determinant(pt)
        assert xy_constraint_residual(pt) == -det * (x + y) * (y + z) ** 2 * (2 * y + z) ** 2
        assert (xy_constraint_residual(pt) == 0) == holds_exact(param_to_table(pt), XY)


def test_residual_vanishes_at_example():
    assert xy_constraint_residual(EXAMPLE_POINT) == 0


def test_discriminant_equals_printed_polynomial():
    ours = sum(coef * a**i * b**j * c**k * d**l for coef, (i, j, k, l) in discriminant_terms())
    printed = sp.sympify(PRINTED, locals={"a": a, "b": b, "c": c, "d": d})
    assert len(sp.Add.make_args(printed)) == 36
    assert sp.expand(ours - printed) == 0


def test_discriminant_matches_quadratic():
    for y, z in [(Fraction(2, 99), Fraction(2, 11)), (Fraction(1, 50), Fraction(1, 4)), (Fraction(3, 7), Fraction(5, 9))]:
        A, B, C = quadratic_coefficients(y, z)
        scaled = (B * B - 4 * A * C) * y.denominator**8 * z.denominator**12
        assert scaled == discriminant_numerator(y.numerator, y.denominator, z.numerator, z.denominator)


def test_discriminant_value_is_square():
    n = discriminant_numerator(2, 99, 2, 11)
    assert n == 937_129_691_803_487_846_400
    assert math.isqrt(n) == 30_612_574_080 and is_square(n)
    assert not is_square(n + 1) and not is_square(-4)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(Fraction(2)) is None
    assert rational_sqrt(Fraction(-1)) is None


def test_solve_for_example():
    roots = solve_p0110(Fraction(2, 99), Fraction(2, 11))
    assert roots.rational
    assert roots.values() == [Fraction(10, 693), Fraction(40, 99)]
    assert roots.f == Fraction(10, 693)


def test_both_roots_violate_ingleton():
    for x in (Fraction(10, 693), Fraction(40, 99)):
        t = param_to_table(ParamPoint(x, Fraction(2, 99), Fraction(2, 11)))
        assert holds_exact(t, XY)
        assert exact_sign(INGLETON, t).sign == -1


def test_irrational_roots_are_floats():
    roots = solve_p0110(Fraction(1, 60), Fraction(1, 4))
    assert not roots.rational
    for r in roots.values():
        assert isinstance(r, float)
        A, B, C = (float(v) for v in quadratic_coefficients(Fraction(1, 60), Fraction(1, 4)))
        assert A * r * r + B * r + C == pytest.approx(0, abs=1e-12)


def test_quadratic_errors():
    with pytest.raises((NegativeDiscriminant, DegenerateQuadratic)):
        for y in range(1, 40):
            for z in range(1, 40):
                solve_p0110(Fraction(y, 40), Fraction(z, 40))


def test_outside_model():
    with pytest.raises(OutsideModel):
        param_to_table(ParamPoint(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)))
    with pytest.raises(TypeError):
        param_to_table(ParamPoint(0.1, 0.1, 0.1))
    assert not membership_T1(ParamPoint(0.0, 0.01, 0.2))


def test_scores_on_example():
    t = paper_example()
    ing = evaluate(INGLETON, entropy_vector(t))
    assert score(t, "rho1") == pytest.approx(-ing, abs=1e-12)
    assert score(t, "rho2") == pytest.approx(-ing, abs=1e-12)
    assert score(t, "rho2") == pytest.approx(0.0075788643809, abs=1e-11)
    assert exact_sign(RHO2, t).sign == 1 and exact_sign(RHO1, t).sign == 1


def test_score_equals_negative_ingleton_on_l1_model():
    for pt in random_model_points(10):
        t = param_to_table(pt)
        h = entropy_vector(t)
        assert evaluate(RHO1, h) == pytest.approx(-evaluate(INGLETON, h), abs=1e-12)


def test_search_finds_example():
    found = search_rational(default_bounds())
    hits = {(r.a, r.b, r.c, r.d, r.p0110) for r in found}
    assert (2, 99, 2, 11, Fraction(10, 693)) in hits
    for r in found:
        assert r.certificate.sign == -1
        assert ci_structure(r.table) >= CIStructure.of(["X⊥Y|"])


def test_uninflated_box_misses_example():
    # 2/99 lies above the upper bound 3/160 of the raw rectangle
    assert not any(r.b == 99 for r in search_rational(default_bounds(inflate=0)))


def test_search_bounds_validation():
    with pytest.raises(ValueError):
        SearchBounds((Fraction(1), Fraction(0)), (0, 1), (0, 1))
    box = RHO1_BOX.inflated("1/10")
    assert box.p1011[1] == Fraction(3, 160) * Fraction(11, 10)


def test_heatmap_grid_and_csv():
    cells = heatmap(resolution=20)
    assert len(cells) == 400
    assert {cell.status for cell in cells} == {"INVALID", "NEG", "POS"}
    csv = heatmap_csv(cells).splitlines()
    assert csv[0] == "p1111,p1011,status,score" and len(csv) == 401
    assert classify_point(2 / 11, 2 / 99).status == "POS"
    with pytest.raises(ValueError):
        heatmap(resolution=1)


def test_heatmap_parallel_is_identical():
    assert heatmap(resolution=12) == heatmap(resolution=12, workers=2)


def test_optimizer_finds_local_maximum():
    best, value = optimize_score(ParamPoint(1 / 16, 1 / 16, 1 / 16), "rho1", "max")
    assert value == pytest.approx(0.0198, abs=0.002) and value >= 0.019
    assert membership_T1(best)


def test_minimum_over_box_is_positive():
    box_center = ParamPoint(1 / 3, 1 / 80, 1 / 4)
    _, value = optimize_score(box_center, "rho1", "min", region="box")
    assert value > 0


def test_optimizer_rejects_outside_start():
    with pytest.raises(StartOutsideRegion):
        optimize_score(ParamPoint(0.9, 0.9, 0.9))
    with pytest.raises(ValueError):
        optimize_score(ParamPoint(1 / 16, 1 / 16, 1 / 16), mode="sideways")
