"""Incrementally maintained inverse Gram matrix for row-streamed measurements.

`GramInverse` keeps gamma = inv(A @ A.T) up to date as measurement rows are
appended one at a time.  With alpha_vec = A @ a, beta = a @ a, u = gamma @
alpha_vec and theta = 1/(beta - alpha_vec @ u), the enlarged inverse is the
block matrix

    [[gamma + theta * outer(u, u),  -theta * u],
     [-theta * u.T,                  theta]]

an O(m^2) update (plus O(m*N) for alpha_vec) instead of an O(m^3)
re-inversion.  Projections onto the affine set {x : A x = y} are applied as
x - A.T @ (gamma @ (A x - y)), never materializing an N x N projector.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateRowError, GramCapacityError
from .validation import as_float_vector

# A row whose Schur complement falls below this fraction of its squared norm
# adds no numerically usable information.
SCHUR_GUARD = 1e-12


class GramInverse:
    """Rows of a measurement matrix together with the inverse of their Gram matrix.

    Parameters
    ----------
    n_dim : int
        Signal dimension N.  At most N rows can be appended; beyond that the
        Gram matrix A @ A.T is singular by construction.

    Mutation happens only through `append_row`; reads are safe between
    mutations and callers serialize writes.
    """

    def __init__(self, n_dim: int):
        n_dim = int(n_dim)
        if n_dim < 1:
            raise ValueError(f"n_dim must be >= 1, got {n_dim}")
        self.n_dim = n_dim
        self.m = 0
        self._rows = np.empty((4, n_dim))  # grown geometrically
        self._gamma = np.empty((0, 0))

    @property
    def rows(self) -> np.ndarray:
        """The m appended rows, in append order (read-only view)."""
        view = self._rows[: self.m]
        view.flags.writeable = False
        return view

    @property
    def gamma(self) -> np.ndarray:
        """Current inverse Gram matrix, shape (m, m)."""
        view = self._gamma.view()
        view.flags.writeable = False
        return view

    def append_row(self, a) -> None:
        """Append one measurement row and update the inverse Gram matrix.

        Raises
        ------
        GramCapacityError
            If m == n_dim already.
        DegenerateRowError
            If the row is numerically dependent on the existing rows (or zero).
        """
        a = as_float_vector(a, "a", length=self.n_dim)
        m = self.m
        if m >= self.n_dim:
            raise GramCapacityError(
                f"cannot append row {m + 1}: capacity is n_dim = {self.n_dim}"
            )
        beta = float(a @ a)
        alpha_vec = self._rows[:m] @ a
        u = self._gamma @ alpha_vec
        schur = beta - float(alpha_vec @ u)
        if schur <= SCHUR_GUARD * beta:
            raise DegenerateRowError(
                f"row {m + 1} is numerically dependent on existing rows "
                f"(schur complement {schur:.3e} vs norm^2 {beta:.3e})"
            )
        theta = 1.0 / schur
        g = np.empty((m + 1, m + 1))
        g[:m, :m] = self._gamma + theta * np.outer(u, u)
        g[:m, m] = -theta * u
        g[m, :m] = -theta * u
        g[m, m] = theta
        # round-off symmetrization; keeps drift from compounding over appends
        self._gamma = 0.5 * (g + g.T)
        if m == self._rows.shape[0]:
            grown = np.empty((2 * m, self.n_dim))
            grown[:m] = self._rows[:m]
            self._rows = grown
        self._rows[m] = a
        self.m = m + 1

    def apply_projection(self, x, y) -> np.ndarray:
        """Project x onto the affine solution set {v : A v = y}.

        Computes x - A.T @ (gamma @ (A x - y)).  With no rows yet (m = 0) the
        constraint set is vacuous and x is returned unchanged.
        """
        x = as_float_vector(x, "x", length=self.n_dim)
        if self.m == 0:
            return x.copy()
        y = as_float_vector(y, "y", length=self.m)
        rows = self._rows[: self.m]
        return x - rows.T @ (self._gamma @ (rows @ x - y))

    def least_squares_solution(self, y) -> np.ndarray:
        """Minimum-norm solution A.T @ (gamma @ y) of A v = y; requires m >= 1."""
        if self.m == 0:
            raise ValueError("least_squares_solution is undefined with no rows")
        y = as_float_vector(y, "y", length=self.m)
        return self._rows[: self.m].T @ (self._gamma @ y)
