import random

import numpy as np
import pytest

from condingleton.ci import CIStatement, delta_functional, enumerate_elementary
from condingleton.entropy import LinFunctional, evaluate
from condingleton.ingleton import (DAGGER_1, DAGGER_2, INGLETON, MASKS, SYMMETRY_GROUP, Circuit,
                                   IngletonLabels, MaskIdentity, NoIngletonColumn, all_ingleton_labels,
                                   circuit_census, circuit_to_identity, circuits, column_names,
                                   functional_matrix, ingleton_functional, mask_orbits, matrix_rank,
                                   name_orbits, score_identities, shortest_masks, verify_score_identity)


def random_vectors(n=20, seed=1):
    rng = random.Random(seed)
    return [[0.0] + [rng.uniform(-5, 5) for _ in range(15)] for _ in range(n)]


def identity_holds_numerically(lhs, rhs):
    # a linear identity in 16 unknowns holds iff it holds on generic vectors
    for v in random_vectors():
        right = sum(c * evaluate(delta_functional(s), v) for c, s in rhs)
        if abs(evaluate(lhs, v) - right) > 1e-9:
            return False
    return True


def test_ingleton_terms():
    expected = {0b0101: 1, 0b1001: 1, 0b0110: 1, 0b1010: 1, 0b1100: 1,
                0b0011: -1, 0b0100: -1, 0b1000: -1, 0b1101: -1, 0b1110: -1}
    assert dict(INGLETON.terms()) == expected
    assert sum(INGLETON) == 0


def test_six_ingleton_expressions():
    labels = all_ingleton_labels()
    assert len(labels) == 6
    assert len({ingleton_functional(lab) for lab in labels}) == 6
    assert IngletonLabels.parse("YX|UZ").canonical() == IngletonLabels.parse("XY|ZU")
    assert ingleton_functional("YX|UZ") == INGLETON


def test_symmetry_group_fixes_ingleton():
    for g in SYMMETRY_GROUP:
        lab = IngletonLabels(*(g[v] for v in (0, 1, 2, 3)))
        assert ingleton_functional(lab) == INGLETON
    assert len(set(SYMMETRY_GROUP)) == 4


@pytest.mark.parametrize("mask", list(MASKS) + [DAGGER_1, DAGGER_2], ids=lambda m: m.name)
def test_mask_identities(mask):
    assert mask.verify()
    assert identity_holds_numerically(mask.left, mask.right)


@pytest.mark.parametrize("entry", score_identities(), ids=lambda e: e[0])
def test_score_identities(entry):
    _, lhs, added, rhs = entry
    assert verify_score_identity(lhs, added, rhs)
    moved = [(-c, s) for c, s in added] + list(rhs)
    assert identity_holds_numerically(lhs, moved)


def test_broken_identity_is_rejected():
    bad = MaskIdentity(INGLETON, MASKS[0].right[:-1])
    assert not bad.verify()


def test_mask_images_under_symmetry_still_verify():
    for mk in MASKS:
        for g in SYMMETRY_GROUP:
            assert mk.relabel(g).verify()


def test_functional_matrix_shape_and_rank():
    m = functional_matrix()
    assert len(m) == 16 and all(len(r) == 25 for r in m)
    assert matrix_rank(m) == 11
    assert np.linalg.matrix_rank(np.array(m, dtype=float)) == 11
    assert column_names()[-1] == "◻(XY|ZU)"


def test_circuits_of_small_matrix():
    # columns e1, e2, e1+e2, 2*e1: circuits {0,1,2}, {0,3}, {1,2,3}
    m = [[1, 0, 1, 2], [0, 1, 1, 0]]
    got = {c.coefficients for c in circuits(m)}
    assert got == {(1, 1, -1, 0), (2, 0, 0, -1), (0, 2, -2, 1)}


def test_zero_column_is_a_loop():
    assert [c.coefficients for c in circuits([[0, 1], [0, 1]])] == [(1, 0)]


def test_parallel_matches_serial():
    m = [[1, 0, 1, 2, 0], [0, 1, 1, 0, 3], [1, 1, 0, 1, 1]]
    assert circuits(m) == circuits(m, workers=2)


def test_circuit_census(all_circuits):
    census = circuit_census(all_circuits)
    assert census == {"total": 10481, "ingleton": 6814, "shortest": 14, "shortest_support": 5}


def test_circuits_are_minimal_kernel_vectors(all_circuits):
    m = np.array(functional_matrix(), dtype=float)
    rng = random.Random(7)
    for c in rng.sample(all_circuits, 300):
        v = np.array(c.coefficients, dtype=float)
        assert not np.any(m @ v)
        sub = m[:, list(c.support)]
        assert np.linalg.matrix_rank(sub) == len(c.support) - 1
        nonzero = [x for x in c.coefficients if x]
        assert nonzero[0] > 0
        assert np.gcd.reduce(np.abs(nonzero)) == 1


def test_shortest_masks_reconstruct_orbits(all_circuits):
    masks = shortest_masks(all_circuits)
    assert len(masks) == 14
    assert all(mk.verify() for mk in masks)
    sizes = {name: len(group) for name, group in name_orbits(masks).items()}
    assert sizes == {"M.1": 1, "M.2": 4, "M.3": 4, "M.4": 1, "M.5": 4}
    assert sorted(len(o) for o in mask_orbits(masks)) == [1, 1, 4, 4, 4]


def test_circuit_without_ingleton_column():
    c = Circuit((1, -1) + (0,) * 23)
    with pytest.raises(NoIngletonColumn):
        circuit_to_identity(c)
    with pytest.raises(NoIngletonColumn):
        shortest_masks([c])


def test_circuit_csv_line():
    c = Circuit((1, 0, -2))
    assert c.to_csv_line(["a", "b", "c"]) == "a:1,c:-2"
    assert c.support == (0, 2) and len(c) == 2
