"""Reproducible synthetic sparse-recovery problems with streaming measurements.

Randomness is pinned to numpy's PCG64 generator: `SeedSequence(seed)` is split
into two independent children, the first drawing the signal (support indices
uniform without replacement, nonzero values standard normal via numpy's
ziggurat sampler) and the second drawing measurement rows (i.i.d. standard
normal entries, unnormalized by default).  Identical seeds therefore give
bit-identical signals and row streams, and a problem reloaded from a fixture
file replays the same rows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .validation import as_float_vector

_FORMAT = "seqzap-problem"
_VERSION = 1


@dataclass(frozen=True)
class ProblemSpec:
    """Problem dimensions and seed: signal length n, sparsity k, 64-bit seed."""

    n: int
    k: int
    seed: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"k must be in [1, n={self.n}], got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def _row_generator(seed: int) -> np.random.Generator:
    # second SeedSequence child; the first is reserved for the signal draw
    _, row_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(row_ss)


class SparseProblem:
    """A k-sparse ground-truth signal plus a deterministic measurement stream.

    The row generator is single-consumer: each call to `next_measurement`
    advances it.  Parallel trials should each own their instance.
    """

    def __init__(self, spec: ProblemSpec, support, values):
        self.spec = spec
        support = np.asarray(support, dtype=np.intp)
        values = as_float_vector(values, "values")
        if support.shape != (spec.k,) or values.shape != (spec.k,):
            raise ValueError(f"support and values must have length k = {spec.k}")
        if len(set(support.tolist())) != spec.k:
            raise ValueError("support indices must be distinct")
        if spec.k and (support.min() < 0 or support.max() >= spec.n):
            raise ValueError(f"support indices must lie in [0, {spec.n})")
        self._support = support
        self._values = values
        self.x_true = np.zeros(spec.n)
        self.x_true[support] = values
        self._row_rng = _row_generator(spec.seed)
        self.rows_drawn = 0

    @classmethod
    def generate(cls, spec: ProblemSpec) -> "SparseProblem":
        """Draw a fresh problem: uniform support, standard-normal nonzeros."""
        signal_ss, _ = np.random.SeedSequence(spec.seed).spawn(2)
        signal_rng = np.random.default_rng(signal_ss)
        support = signal_rng.choice(spec.n, size=spec.k, replace=False)
        values = signal_rng.standard_normal(spec.k)
        return cls(spec, support, values)

    @property
    def support(self) -> np.ndarray:
        """The k designated signal slots, in draw order (values there may be zero)."""
        return self._support.copy()

    def next_measurement(self, unit_norm_rows: bool = False) -> tuple[np.ndarray, float]:
        """Draw the next row a (i.i.d. standard normal) and return (a, a @ x_true).

        Measurements are noiseless.  `unit_norm_rows` rescales rows to unit l2
        norm for experiments; the default matches raw Gaussian sampling.
        """
        a = self._row_rng.standard_normal(self.spec.n)
        if unit_norm_rows:
            a /= np.linalg.norm(a)
        self.rows_drawn += 1
        return a, float(a @ self.x_true)

    def measurements(self, unit_norm_rows: bool = False):
        """Unbounded iterator of (a, y) pairs; callers enforce any row budget."""
        while True:
            yield self.next_measurement(unit_norm_rows=unit_norm_rows)

    def save(self, path) -> None:
        """Write a self-describing JSON fixture (dimensions, seed, support, values)."""
        payload = {
            "format": _FORMAT,
            "version": _VERSION,
            "n": self.spec.n,
            "k": self.spec.k,
            "seed": self.spec.seed,
            "support": self._support.tolist(),
            "values": self._values.tolist(),
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "SparseProblem":
        """Reload a fixture written by `save`; the row stream restarts from the seed."""
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValueError(f"cannot read problem fixture {path}: {exc}") from exc
        if payload.get("format") != _FORMAT:
            raise ValueError(f"{path} is not a {_FORMAT} fixture")
        spec = ProblemSpec(n=int(payload["n"]), k=int(payload["k"]), seed=int(payload["seed"]))
        return cls(spec, payload["support"], payload["values"])


def generate_problem(spec: ProblemSpec) -> SparseProblem:
    """Convenience alias for SparseProblem.generate."""
    return SparseProblem.generate(spec)
