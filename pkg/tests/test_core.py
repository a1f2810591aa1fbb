import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from permcoh.core import (
    CapacityError,
    DimensionError,
    OccupationVector,
    Permutation,
    ValidationError,
    count_with_moved,
    derangement_count,
    enumerate_permutations,
    matrix_from_json,
    matrix_to_json,
    permutations_with_moved,
    submatrix_for_transition,
    validate_unitary,
)
from permcoh.generators import haar_unitary


def test_validate_unitary_examples():
    assert validate_unitary(np.eye(4), 1e-12)
    assert validate_unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2), 1e-12)
    assert not validate_unitary(np.array([[1, 1], [1, 1]]) / np.sqrt(2), 1e-12)


def test_validate_unitary_rejects_rectangular():
    with pytest.raises(DimensionError):
        validate_unitary(np.ones((2, 3)))


def test_nan_rejected():
    with pytest.raises(ValidationError):
        validate_unitary(np.array([[np.nan, 0], [0, 1]]))


@given(st.integers(1, 8), st.integers(0, 10_000))
def test_unistochastic_rows_and_columns(M, seed):
    P = np.abs(haar_unitary(M, seed)) ** 2
    tol = 1e-10
    assert np.allclose(P.sum(axis=0), 1, atol=M * tol)
    assert np.allclose(P.sum(axis=1), 1, atol=M * tol)


def test_submatrix_identity_case():
    V = submatrix_for_transition(np.eye(3), (1, 1, 0), (1, 1, 0))
    assert np.array_equal(V, np.eye(2))


def test_submatrix_picks_rows_and_columns():
    # rows {1,3} x cols {2,3} of I_3 (1-based): only (3,3) survives
    V = submatrix_for_transition(np.eye(3), (1, 0, 1), (0, 1, 1))
    assert np.array_equal(V, np.array([[0, 0], [0, 1]]))


def test_submatrix_repeats_rows():
    U = haar_unitary(2, 5)
    V = submatrix_for_transition(U, (2, 0), (1, 1))
    assert np.array_equal(V[0], U[0]) and np.array_equal(V[1], U[0])


def test_submatrix_all_ones_is_full_matrix():
    U = haar_unitary(4, 1)
    assert np.array_equal(submatrix_for_transition(U, (1,) * 4, (1,) * 4), U)


def test_submatrix_errors():
    with pytest.raises(DimensionError):
        submatrix_for_transition(np.eye(3), (1, 1, 0), (1, 0, 0))
    with pytest.raises(DimensionError):
        submatrix_for_transition(np.eye(3), (1, 1), (1, 1))


def test_occupation_vector():
    n = OccupationVector((1, 0, 2))
    assert n.photons == 3 and not n.collision_free
    assert n.repeated_indices() == [0, 2, 2]
    with pytest.raises(ValidationError):
        OccupationVector((0, 0))
    with pytest.raises(ValidationError):
        OccupationVector((1, -1))


def test_enumerate_small():
    assert [p.image for p in enumerate_permutations(1)] == [(0,)]
    assert len(list(enumerate_permutations(3))) == 6


def test_enumerate_four_derangements():
    perms = list(enumerate_permutations(4))
    assert len(perms) == 24
    # brute-force derangement count, independent of fixed_point_count
    brute = sum(1 for p in itertools.permutations(range(4)) if all(p[i] != i for i in range(4)))
    assert brute == 9
    assert sum(1 for p in perms if p.fixed_point_count == 0) == brute


def test_enumerate_is_lexicographic():
    images = [p.image for p in enumerate_permutations(4)]
    assert images == sorted(images)


def test_enumerate_cutoff():
    with pytest.raises(CapacityError, match="10"):
        next(enumerate_permutations(11))


@pytest.mark.parametrize("N", range(1, 8))
def test_grouping_by_fixed_points(N):
    total = sum(math.comb(N, a) * derangement_count(a) for a in range(N + 1))
    assert total == math.factorial(N)
    for a in range(N + 1):
        moved = list(permutations_with_moved(N, a))
        assert len(moved) == count_with_moved(N, a)
        assert all(p.moved == a for p in moved)


def test_permutation_invariants():
    with pytest.raises(ValidationError):
        Permutation((0, 0, 1))
    p = Permutation((1, 2, 0))
    assert p.fixed_point_count == 0
    assert p.compose(p.inverse()) == Permutation.identity(3)


def test_matrix_json_round_trip():
    A = haar_unitary(3, 2)[:, :2]
    obj = matrix_to_json(A)
    assert obj["rows"] == 3 and obj["cols"] == 2
    assert np.array_equal(matrix_from_json(obj), A)


def test_matrix_json_schema_errors():
    with pytest.raises(ValidationError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[[1, 0]]]})
    with pytest.raises(ValidationError):
        matrix_from_json({"rows": 1})
