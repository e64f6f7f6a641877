"""Shared test helpers: independent linear-algebra oracles and problem builders."""

from __future__ import annotations

import numpy as np
import pytest

from seqzap import GramInverse, ProblemSpec, SparseProblem, ZapConfig


def gauss_jordan_inverse(mat: np.ndarray) -> np.ndarray:
    """Invert by explicit Gauss-Jordan elimination with partial pivoting.

    Deliberately independent of both the incremental update path and LAPACK,
    so it can arbitrate between them.
    """
    mat = np.array(mat, dtype=np.float64)
    n = mat.shape[0]
    if mat.shape != (n, n):
        raise ValueError("square matrix required")
    aug = np.hstack([mat, np.eye(n)])
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[pivot, col]) == 0.0:
            raise np.linalg.LinAlgError("singular matrix")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] /= aug[col, col]
        for row in range(n):
            if row != col:
                aug[row] -= aug[row, col] * aug[col]
    return aug[:, n:]


def build_gram(rows: np.ndarray) -> GramInverse:
    """GramInverse loaded with the given rows (one per matrix row)."""
    gram = GramInverse(rows.shape[1])
    for row in rows:
        gram.append_row(row)
    return gram


def measured_problem(n: int, k: int, seed: int, m: int):
    """Generate a problem and draw m measurements; returns (problem, A, y)."""
    problem = SparseProblem.generate(ProblemSpec(n=n, k=k, seed=seed))
    pairs = [problem.next_measurement() for _ in range(m)]
    A = np.vstack([a for a, _ in pairs])
    y = np.array([v for _, v in pairs])
    return problem, A, y


@pytest.fixture
def gj_inverse():
    return gauss_jordan_inverse


@pytest.fixture
def reference_config() -> ZapConfig:
    """Default benchmark parameter set used across integration tests."""
    return ZapConfig()
