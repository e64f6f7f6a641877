"""Scikit-learn style estimators wrapping the batch and online solvers.

Both estimators treat the measurement matrix as the design matrix X and the
observations as y, expose the recovered sparse signal as `coef_`, and predict
with X @ coef_, so they compose with pipelines, `clone`, and grid search.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin

from .errors import DegenerateRowError
from .gram import GramInverse
from .online import OnlineState
from .validation import as_float_matrix, as_float_vector
from .zap import ZapConfig, batch_solve


class _ZapParamsMixin:
    def __init__(
        self,
        alpha: float = 1.0,
        kappa0: float = 0.02,
        eta1: float = 0.99,
        eta2: float = 0.8,
        t_max: int = 50,
        q_divisor: float = 2000.0,
        epsilon: float = 1e-4,
    ):
        self.alpha = alpha
        self.kappa0 = kappa0
        self.eta1 = eta1
        self.eta2 = eta2
        self.t_max = t_max
        self.q_divisor = q_divisor
        self.epsilon = epsilon

    def _config(self) -> ZapConfig:
        return ZapConfig(
            alpha=self.alpha,
            kappa0=self.kappa0,
            eta1=self.eta1,
            eta2=self.eta2,
            t_max=self.t_max,
            q_divisor=self.q_divisor,
            epsilon=self.epsilon,
        )

    def _validate(self, X, y, n_features: int | None = None):
        X = as_float_matrix(X, "X", n_cols=n_features)
        y = as_float_vector(y, "y", length=X.shape[0])
        if X.shape[0] > X.shape[1]:
            raise ValueError(
                f"more measurements ({X.shape[0]}) than signal dimensions "
                f"({X.shape[1]}); the underdetermined solver does not apply"
            )
        return X, y

    def predict(self, X) -> np.ndarray:
        """Predicted observations X @ coef_ for new measurement rows."""
        if not hasattr(self, "coef_"):
            raise AttributeError("estimator is not fitted yet")
        X = as_float_matrix(X, "X", n_cols=self.n_features_in_)
        return X @ self.coef_


class ZapRecovery(_ZapParamsMixin, RegressorMixin, BaseEstimator):
    """Batch sparse recovery: one cold solve from the least-squares start.

    Attributes after fit
    --------------------
    coef_            : recovered signal, shape (n_features,)
    n_iter_          : inner iterations reported by the solve
    stop_cause_      : which inner stop rule fired
    n_features_in_   : signal dimension
    """

    def fit(self, X, y):
        X, y = self._validate(X, y)
        gram = GramInverse(X.shape[1])
        for row in X:
            gram.append_row(row)
        result = batch_solve(gram, y, self._config())
        self.coef_ = result.x
        self.n_iter_ = result.iterations
        self.stop_cause_ = result.stop_cause
        self.n_features_in_ = X.shape[1]
        return self


class OnlineZapRecovery(_ZapParamsMixin, RegressorMixin, BaseEstimator):
    """Sequential sparse recovery: rows are ingested one at a time, warm-started.

    `partial_fit` may be called repeatedly with additional measurement blocks;
    numerically degenerate rows are skipped and counted in `n_skipped_` rather
    than raising, matching streaming-sensor behavior.

    Attributes after (partial_)fit
    ------------------------------
    coef_            : current recovered signal
    n_measurements_  : rows accepted so far
    n_iter_          : total inner iterations across ingested rows
    n_skipped_       : degenerate rows discarded
    n_features_in_   : signal dimension
    """

    def fit(self, X, y):
        self._state = None
        return self.partial_fit(X, y)

    def partial_fit(self, X, y):
        state: OnlineState | None = getattr(self, "_state", None)
        X, y = self._validate(X, y, None if state is None else state.n_dim)
        if state is None:
            state = OnlineState(X.shape[1], self._config())
            self._state = state
            self.n_skipped_ = 0
        if state.m + X.shape[0] > state.n_dim:
            raise ValueError(
                f"accepting {X.shape[0]} more rows would exceed the "
                f"{state.n_dim}-row capacity"
            )
        for row, y_val in zip(X, y):
            try:
                state.ingest(row, y_val)
            except DegenerateRowError:
                self.n_skipped_ += 1
        self.coef_ = state.x
        self.n_measurements_ = state.m
        self.n_iter_ = sum(rec.iterations for rec in state.history)
        self.n_features_in_ = state.n_dim
        return self
