"""Inner ZAP recursion: zero-attraction step, projection, and step-size control.

Each iteration moves the estimate down the sparsity-penalty gradient, projects
back onto the affine solution set, and shrinks the step size kappa by eta2
whenever the l1 norm of the iterate rose (a stall signal) while kappa is still
above its floor kappa_m / q_divisor.  The recursion exits once the iteration
counter passes t_max or kappa drops below the floor.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError
from .gram import GramInverse
from .penalty import l1_norm, penalty_gradient
from .validation import as_float_vector, check_open_unit, check_positive


class StopCause(enum.Enum):
    """Which inner stop rule fired."""

    ITERATION_BOUND = "iteration_bound"
    STEP_FLOOR = "step_floor"


@dataclass(frozen=True)
class ZapConfig:
    """Tuning parameters of the solver.

    Defaults are the reference benchmark values for Gaussian problems.

    alpha      : attraction-band parameter of the sparsity penalty (> 0)
    kappa0     : initial step size (> 0)
    eta1       : per-measurement (outer) step-size decay, in (0, 1)
    eta2       : within-solve (inner) step-size decay, in (0, 1)
    t_max      : inner iteration bound (>= 1)
    q_divisor  : step-size floor divisor; the floor is kappa_m / q_divisor (> 1)
    epsilon    : stop-sensing tolerance used by online drivers (> 0)
    """

    alpha: float = 1.0
    kappa0: float = 0.02
    eta1: float = 0.99
    eta2: float = 0.8
    t_max: int = 50
    q_divisor: float = 2000.0
    epsilon: float = 1e-4

    def __post_init__(self):
        check_positive(self.alpha, "alpha")
        check_positive(self.kappa0, "kappa0")
        check_open_unit(self.eta1, "eta1")
        check_open_unit(self.eta2, "eta2")
        if int(self.t_max) != self.t_max or self.t_max < 1:
            raise ValueError(f"t_max must be an integer >= 1, got {self.t_max!r}")
        if not self.q_divisor > 1:
            raise ValueError(f"q_divisor must be > 1, got {self.q_divisor!r}")
        check_positive(self.epsilon, "epsilon")


@dataclass
class InnerResult:
    """Outcome of one inner solve.

    x            : final iterate (satisfies the constraints to projection accuracy)
    iterations   : reported iteration count n_m (one less than iterates computed)
    final_kappa  : step size at exit
    stop_cause   : which stop rule fired
    l1_trace     : l1 norm of the computed iterates, capped at the first t_max
    """

    x: np.ndarray
    iterations: int
    final_kappa: float
    stop_cause: StopCause
    l1_trace: list[float] = field(default_factory=list)


def inner_solve(gram: GramInverse, y, x0, kappa_m: float, cfg: ZapConfig) -> InnerResult:
    """Run the inner recursion from x0 with step size initialized to kappa_m.

    Loop body (counter n starting at 0): take the zero-attraction step
    x - kappa * penalty_gradient(x), project onto {v : A v = y}, shrink kappa
    by eta2 if the l1 norm rose and kappa is still above kappa_m / q_divisor,
    then increment n.  Exits when n > t_max or kappa < kappa_m / q_divisor
    (strict comparisons; the final shrink may cross the floor once).

    Raises DivergenceError if an iterate goes non-finite.
    """
    if gram.m < 1:
        raise ValueError("inner_solve requires at least one measurement row")
    kappa = check_positive(kappa_m, "kappa_m")
    y = as_float_vector(y, "y", length=gram.m)
    x = as_float_vector(x0, "x0", length=gram.n_dim).copy()
    floor = kappa / cfg.q_divisor
    prev_l1 = l1_norm(x)
    trace: list[float] = []
    n = 0
    while True:
        with np.errstate(over="ignore", invalid="ignore"):
            stepped = x - kappa * penalty_gradient(x, cfg.alpha)
            if not np.all(np.isfinite(stepped)):
                raise DivergenceError(
                    f"iterate {n + 1} diverged in the zero-attraction step "
                    f"(kappa={kappa:.3e})",
                    iteration=n + 1,
                )
            x = gram.apply_projection(stepped, y)
        if not np.all(np.isfinite(x)):
            raise DivergenceError(
                f"iterate {n + 1} is non-finite after projection (kappa={kappa:.3e})",
                iteration=n + 1,
            )
        cur_l1 = l1_norm(x)
        if len(trace) < cfg.t_max:
            trace.append(cur_l1)
        if cur_l1 > prev_l1 and kappa > floor:
            kappa *= cfg.eta2
        prev_l1 = cur_l1
        n += 1
        if n > cfg.t_max:
            cause = StopCause.ITERATION_BOUND
            break
        if kappa < floor:
            cause = StopCause.STEP_FLOOR
            break
    return InnerResult(
        x=x,
        iterations=n - 1,
        final_kappa=kappa,
        stop_cause=cause,
        l1_trace=trace,
    )


def batch_solve(gram: GramInverse, y, cfg: ZapConfig) -> InnerResult:
    """Cold-start solve: inner recursion from the minimum-norm least-squares point.

    Used as the no-warm-start baseline; the step size starts at cfg.kappa0.
    """
    y = as_float_vector(y, "y", length=gram.m)
    x0 = gram.least_squares_solution(y)
    return inner_solve(gram, y, x0, cfg.kappa0, cfg)
