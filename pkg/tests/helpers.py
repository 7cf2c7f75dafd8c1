"""Shared generators and oracles for the test suite."""

import numpy as np

from hhsynth.numerics import SparseIsometry


def random_u2(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_unitary(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_isometry(n, m, rng):
    a = rng.normal(size=(1 << n, 1 << m)) + 1j * rng.normal(size=(1 << n, 1 << m))
    q, _ = np.linalg.qr(a)
    return q


def random_sparse_isometry(n, m, rotations, rng):
    """Exact sparse isometry: a phased partial permutation stirred by
    ``rotations`` random two-row rotations (each can roughly double nnz)."""
    rows = rng.choice(1 << n, size=1 << m, replace=False)
    a = np.zeros((1 << n, 1 << m), dtype=complex)
    for j, r in enumerate(rows):
        a[r, j] = np.exp(2j * np.pi * rng.uniform())
    for _ in range(rotations):
        r1, r2 = rng.choice(1 << n, size=2, replace=False)
        a[[r1, r2], :] = random_u2(rng) @ a[[r1, r2], :]
    return SparseIsometry.from_dense(a)


def random_state_dict(n, nnz, rng):
    pos = rng.choice(1 << n, size=nnz, replace=False)
    amps = rng.normal(size=nnz) + 1j * rng.normal(size=nnz)
    amps /= np.linalg.norm(amps)
    return {int(p): complex(a) for p, a in zip(pos, amps)}


def dense_reflection(u_dict, n):
    """I - 2|u><u| from a sparse unit vector."""
    u = np.zeros(1 << n, dtype=complex)
    for k, a in u_dict.items():
        u[k] = a
    return np.eye(1 << n, dtype=complex) - 2.0 * np.outer(u, u.conj())


# The worked 4x4 sparsity pattern used across the envelope examples, as
# (row, col) pairs, plus its row-reordered form (fullest row first).
PATTERN_4X4 = {
    (0, 3),
    (1, 0), (1, 1), (1, 2), (1, 3),
    (2, 1), (2, 2),
    (3, 0), (3, 2),
}
ROW_ORDER_4X4 = {1: 0, 3: 1, 2: 2, 0: 3}  # original row -> new position
PATTERN_4X4_ORDERED = {(ROW_ORDER_4X4[i], j) for (i, j) in PATTERN_4X4}
