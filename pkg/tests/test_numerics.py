import numpy as np
import pytest

from hhsynth.numerics import (
    SparseIsometry,
    apply_permutations,
    matrix_from_dict,
    matrix_to_dict,
    validate_isometry,
)

from helpers import random_sparse_isometry


def test_validate_identity_ok():
    assert validate_isometry(np.eye(4), 1e-10).ok


def test_validate_identity_columns_ok():
    assert validate_isometry(np.eye(4)[:, :2], 1e-10).ok


def test_validate_reports_worst_entry():
    rep = validate_isometry(np.array([[1.0, 0.0], [1.0, 0.0]]), 1e-10)
    assert not rep.ok
    assert rep.worst == (0, 0)
    assert rep.max_deviation == pytest.approx(1.0)


def test_validate_rejects_bad_dimensions():
    with pytest.raises(ValueError):
        validate_isometry(np.eye(3))
    with pytest.raises(ValueError):
        validate_isometry(np.ones((2, 4)) / 2.0)


def test_sparse_update_set_and_clear():
    w = SparseIsometry(1, 0)
    w.set(0, 0, 1.0)
    assert w.nnz == 1
    assert w.rows[0] == {0: 1.0}
    assert w.cols[0] == {0: 1.0}
    w.set(0, 0, 0.0)
    assert w.nnz == 0
    assert not w.rows[0] and not w.cols[0]


def test_sparse_update_bounds():
    w = SparseIsometry(1, 0)
    with pytest.raises(IndexError):
        w.set(2, 0, 1.0)


def test_dual_index_consistency_random_updates():
    rng = np.random.default_rng(0)
    w = SparseIsometry(4, 3)
    for _ in range(10_000):
        i = int(rng.integers(16))
        j = int(rng.integers(8))
        a = complex(rng.normal(), rng.normal()) if rng.uniform() > 0.3 else 0.0
        w.set(i, j, a)
    w.check_consistent()


def test_apply_permutations_identity():
    w = random_sparse_isometry(3, 2, 3, np.random.default_rng(1))
    out = apply_permutations(w, np.arange(8), np.arange(4))
    assert out.pattern() == w.pattern()
    np.testing.assert_allclose(out.to_dense(), w.to_dense())


def test_apply_permutations_swap_rows():
    w = SparseIsometry(1, 0, [(0, 0, 1.0)])
    out = apply_permutations(w, [1, 0], [0])
    assert out.pattern() == {(1, 0)}


def test_apply_permutations_dense_oracle():
    rng = np.random.default_rng(2)
    for _ in range(20):
        w = random_sparse_isometry(3, 2, int(rng.integers(0, 6)), rng)
        rho = rng.permutation(8)
        sigma = rng.permutation(4)
        out = apply_permutations(w, rho, sigma)
        p = np.zeros((8, 8))
        p[rho, np.arange(8)] = 1.0
        q = np.zeros((4, 4))
        q[np.arange(4), sigma] = 1.0
        np.testing.assert_allclose(out.to_dense(), p @ w.to_dense() @ q, atol=1e-12)
        assert out.nnz == w.nnz


def test_apply_permutations_rejects_non_bijection():
    w = SparseIsometry(1, 0, [(0, 0, 1.0)])
    with pytest.raises(ValueError):
        apply_permutations(w, [0, 0], [0])


def test_permutation_preserves_isometry():
    rng = np.random.default_rng(3)
    w = random_sparse_isometry(3, 2, 4, rng)
    assert validate_isometry(w).ok
    out = apply_permutations(w, rng.permutation(8), rng.permutation(4))
    assert validate_isometry(out).ok


def test_dense_sparse_round_trip_exact():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(8, 4)) + 1j * rng.normal(size=(8, 4))
    a[np.abs(a) < 1.0] = 0.0
    w = SparseIsometry.from_dense(a)
    np.testing.assert_array_equal(w.to_dense(), a)


def test_matrix_dict_round_trip():
    rng = np.random.default_rng(5)
    w = random_sparse_isometry(3, 1, 3, rng)
    again = matrix_from_dict(matrix_to_dict(w))
    np.testing.assert_allclose(again.to_dense(), w.to_dense(), atol=1e-15)


def test_matrix_dict_dense_form():
    d = {"n": 1, "m": 1, "dense": [[1, 0], [0, [0, 1]]]}
    w = matrix_from_dict(d)
    np.testing.assert_allclose(w.to_dense(), np.diag([1.0, 1j]))


def test_matrix_dict_rejects_garbage():
    with pytest.raises(ValueError):
        matrix_from_dict({"n": 1, "m": 0})
    with pytest.raises(ValueError):
        matrix_from_dict({"n": 1, "m": 1, "dense": [[1, 0]]})
