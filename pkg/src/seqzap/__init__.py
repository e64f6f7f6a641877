"""Sequential compressive sensing via online zero-point attracting projection.

Recovers a k-sparse length-n signal from streaming linear measurements,
refining the estimate after every sample instead of re-solving from scratch:
an incrementally updated inverse Gram matrix keeps projections cheap, the
previous estimate warm-starts each refinement, and step sizes decay across
and within samples.
"""

from .bench import (
    Algorithm,
    SummaryRow,
    SweepConfig,
    TrialRecord,
    aggregate,
    emit_csv,
    emit_svg,
    run_sweep,
)
from .errors import DegenerateRowError, DivergenceError, GramCapacityError
from .estimators import OnlineZapRecovery, ZapRecovery
from .gram import GramInverse
from .online import OnlineState, StepRecord, StopMode, StopRule, msd, run_online
from .penalty import l1_norm, penalty_gradient, penalty_value
from .probgen import ProblemSpec, SparseProblem, generate_problem
from .zap import InnerResult, StopCause, ZapConfig, batch_solve, inner_solve

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "DegenerateRowError",
    "DivergenceError",
    "GramCapacityError",
    "GramInverse",
    "InnerResult",
    "OnlineState",
    "OnlineZapRecovery",
    "ProblemSpec",
    "SparseProblem",
    "StepRecord",
    "StopCause",
    "StopMode",
    "StopRule",
    "SummaryRow",
    "SweepConfig",
    "TrialRecord",
    "ZapConfig",
    "ZapRecovery",
    "aggregate",
    "batch_solve",
    "emit_csv",
    "emit_svg",
    "generate_problem",
    "inner_solve",
    "l1_norm",
    "msd",
    "penalty_gradient",
    "penalty_value",
    "run_online",
    "run_sweep",
    "__version__",
]
