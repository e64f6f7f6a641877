"""Outer recursion: ingest measurements one at a time and refine the estimate.

Per sample: update the inverse Gram matrix, decay the outer step size by eta1,
then run the inner solver warm-started from the previous estimate.  Sensing
stops when the configured stop rule fires or a measurement cap is reached.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRowError
from .gram import GramInverse
from .validation import as_float_vector, check_positive
from .zap import InnerResult, StopCause, ZapConfig, inner_solve


def msd(x_hat, x_true, normalized: bool = True) -> float:
    """Mean square deviation ||x_hat - x_true||_2^2, divided by N when normalized."""
    x_hat = np.asarray(x_hat, dtype=np.float64)
    x_true = np.asarray(x_true, dtype=np.float64)
    if x_hat.shape != x_true.shape:
        raise ValueError(f"shape mismatch: {x_hat.shape} vs {x_true.shape}")
    dev = float(((x_hat - x_true) ** 2).sum())
    return dev / x_hat.size if normalized else dev


class StopRule(enum.Enum):
    """How the outer recursion decides that sensing can stop."""

    ORACLE_MSD = "oracle"  # normalized MSD against a known signal below threshold
    PROXY_CHANGE = "proxy"  # relative estimate change small for two consecutive steps


@dataclass(frozen=True)
class StopMode:
    mode: StopRule
    threshold: float

    def __post_init__(self):
        check_positive(self.threshold, "threshold")


@dataclass
class StepRecord:
    """Per-sample summary kept in OnlineState.history."""

    m: int
    iterations: int
    stop_cause: StopCause | None
    msd: float | None = None
    skipped: bool = False  # degenerate row discarded without consuming a slot


class OnlineState:
    """Evolving solver state over a measurement stream.

    Single writer: `ingest` mutates sequentially.  Independent runs on
    separate instances can proceed fully in parallel.
    """

    def __init__(self, n_dim: int, cfg: ZapConfig):
        self.cfg = cfg
        self.gram = GramInverse(n_dim)
        self._y: list[float] = []
        self.x = np.zeros(self.gram.n_dim)
        self.kappa_m = cfg.kappa0
        self.m = 0
        self.history: list[StepRecord] = []
        self.converged = False

    @property
    def n_dim(self) -> int:
        return self.gram.n_dim

    @property
    def y(self) -> np.ndarray:
        """Observations collected so far, length m."""
        return np.asarray(self._y, dtype=np.float64)

    def ingest(self, a, y_new: float) -> InnerResult:
        """Consume one measurement (a, y_new) and refine the estimate.

        Appends the row, decays the outer step size (kappa_m = kappa0 *
        eta1**m after m samples), then warm-starts the inner solver from the
        current estimate.  On DegenerateRowError the state is unchanged; on
        DivergenceError the row is consumed but the previous estimate is kept.
        """
        a = as_float_vector(a, "a", length=self.n_dim)
        y_new = float(y_new)
        if not np.isfinite(y_new):
            raise ValueError("y_new must be finite")
        self.gram.append_row(a)  # raises before any state changes
        self._y.append(y_new)
        self.m += 1
        self.kappa_m = self.cfg.kappa0 * self.cfg.eta1**self.m
        result = inner_solve(self.gram, self.y, self.x, self.kappa_m, self.cfg)
        self.x = result.x
        self.history.append(
            StepRecord(m=self.m, iterations=result.iterations, stop_cause=result.stop_cause)
        )
        return result


def run_online(
    stream,
    n_dim: int,
    cfg: ZapConfig,
    stop: StopMode,
    m_cap: int | None = None,
    oracle_x=None,
) -> OnlineState:
    """Drive an OnlineState over a stream of (a, y) pairs until sensing stops.

    stop rule ORACLE_MSD requires oracle_x and fires when the normalized MSD
    drops below stop.threshold; PROXY_CHANGE fires when the relative estimate
    change is below stop.threshold for two consecutive steps.  Degenerate rows
    are skipped (recorded in history) rather than fatal: a live sensor should
    not crash on one bad sample.  The returned state has converged=False when
    the stream ran out or m_cap was reached before the rule fired.
    """
    m_cap = n_dim if m_cap is None else int(m_cap)
    if not 1 <= m_cap <= n_dim:
        raise ValueError(f"m_cap must be in [1, {n_dim}], got {m_cap}")
    if stop.mode is StopRule.ORACLE_MSD and oracle_x is None:
        raise ValueError("oracle stop rule requires oracle_x")
    if oracle_x is not None:
        oracle_x = as_float_vector(oracle_x, "oracle_x", length=n_dim)

    state = OnlineState(n_dim, cfg)
    quiet_steps = 0
    for a, y_new in stream:
        prev_x = state.x
        try:
            state.ingest(a, y_new)
        except DegenerateRowError:
            state.history.append(
                StepRecord(m=state.m, iterations=0, stop_cause=None, skipped=True)
            )
            continue
        record = state.history[-1]
        if oracle_x is not None:
            record.msd = msd(state.x, oracle_x)
        if stop.mode is StopRule.ORACLE_MSD:
            hit = record.msd < stop.threshold
        else:
            change = float(np.linalg.norm(state.x - prev_x))
            scale = max(float(np.linalg.norm(state.x)), 1e-12)
            quiet_steps = quiet_steps + 1 if change / scale < stop.threshold else 0
            hit = quiet_steps >= 2
        if hit:
            state.converged = True
            break
        if state.m >= m_cap:
            break
    return state
