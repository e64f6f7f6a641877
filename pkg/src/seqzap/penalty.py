"""Approximate l0 sparsity penalty, its gradient, and the l1 convergence monitor.

The penalty acts entrywise with a controlling parameter ``alpha``: inside the
attraction band |t| <= 1/alpha it behaves like a smoothed absolute value,
alpha*|t| - alpha^2*t^2/2, and saturates at the constant 1/2 outside.  Summed
over entries it approaches the l0 norm as alpha grows.  Its gradient is
alpha*sgn(t) - alpha^2*t inside the band and exactly zero outside, so entries
larger than 1/alpha feel no attraction toward zero.
"""

from __future__ import annotations

import numpy as np

from .validation import as_float_vector, check_positive


def penalty_gradient(x, alpha: float) -> np.ndarray:
    """Entrywise gradient of the approximate-l0 penalty.

    sgn(0) is taken as 0, which makes the origin stationary and keeps the
    gradient bounded.  At |x_i| = 1/alpha exactly both branches evaluate to 0.
    """
    alpha = check_positive(alpha, "alpha")
    x = as_float_vector(x, "x")
    g = np.zeros_like(x)
    inside = np.abs(x) <= 1.0 / alpha
    xi = x[inside]
    # factored so alpha^2 is never formed: |alpha * xi| <= 1 inside the band
    g[inside] = alpha * (np.sign(xi) - alpha * xi)
    return g


def penalty_value(x, alpha: float) -> float:
    """Penalty evaluated as the entrywise antiderivative of `penalty_gradient`.

    Nonnegative, zero iff x = 0, bounded above by len(x)/2.  Provided for
    diagnostics and gradient checks; the solver's convergence monitor is
    `l1_norm`, not this value.
    """
    alpha = check_positive(alpha, "alpha")
    x = as_float_vector(x, "x")
    scaled = alpha * np.abs(x)
    inside = scaled * (1.0 - 0.5 * scaled)  # alpha|x| - alpha^2 x^2 / 2, factored
    return float(np.where(scaled <= 1.0, inside, 0.5).sum())


def l1_norm(x) -> float:
    """Sum of absolute values, used to detect stalling of the inner recursion."""
    x = as_float_vector(x, "x")
    return float(np.abs(x).sum())
