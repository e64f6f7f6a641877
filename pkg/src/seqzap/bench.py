"""Benchmark harness: sweep measurement counts, aggregate MSD/timing, emit CSV/SVG.

Every (m, trial, algorithm) cell is fully independent: its problem seed is
derived deterministically from (master seed, m, trial, algorithm) through a
SeedSequence, so sweeps reproduce exactly (wall times aside) and can be
distributed across processes without coordination.
"""

from __future__ import annotations

import enum
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateRowError, DivergenceError, GramCapacityError
from .gram import GramInverse
from .online import OnlineState, StopMode, StopRule, msd
from .probgen import ProblemSpec, SparseProblem
from .zap import ZapConfig, batch_solve

CSV_HEADER = "algorithm,m,trials,msd_mean,msd_median,time_mean_s,success_rate"


class Algorithm(enum.Enum):
    ONLINE = "online"  # sequential ingestion, warm-started inner solves
    BATCH = "batch"  # one cold solve from the least-squares start

    @property
    def cell_id(self) -> int:
        return 0 if self is Algorithm.ONLINE else 1


@dataclass
class TrialRecord:
    """One benchmark cell: final-estimate quality and cost at m measurements."""

    seed: int
    m: int
    msd_normalized: float
    msd_raw: float
    total_inner_iterations: int
    wall_time: float
    algorithm: Algorithm
    converged: bool
    failed: bool = False


@dataclass(frozen=True)
class SweepConfig:
    """Sweep layout: problem family, measurement grid, trials, solver and stop setup."""

    spec: ProblemSpec  # n, k and the master seed
    m_values: tuple[int, ...]
    trials: int
    zap: ZapConfig
    stop: StopMode
    algorithms: tuple[Algorithm, ...] = (Algorithm.ONLINE, Algorithm.BATCH)
    workers: int = 1

    def __post_init__(self):
        values = tuple(int(v) for v in self.m_values)
        if not values:
            raise ValueError("m_values must be nonempty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("m_values must be strictly increasing")
        if values[0] < 1 or values[-1] > self.spec.n:
            raise ValueError(f"m_values must lie in [1, n={self.spec.n}]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.algorithms:
            raise ValueError("algorithms must be nonempty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        object.__setattr__(self, "m_values", values)


def _cell_seed(master_seed: int, m: int, trial: int, algorithm: Algorithm) -> int:
    ss = np.random.SeedSequence((master_seed, m, trial, algorithm.cell_id))
    return int(ss.generate_state(1, np.uint64)[0])


def _run_cell(args) -> TrialRecord:
    cfg, m, trial, algorithm = args
    seed = _cell_seed(cfg.spec.seed, m, trial, algorithm)
    problem = SparseProblem.generate(replace(cfg.spec, seed=seed))
    n = cfg.spec.n
    start = time.perf_counter()
    try:
        if algorithm is Algorithm.ONLINE:
            state = OnlineState(n, cfg.zap)
            quiet = 0
            for _ in range(m):
                prev_x = state.x
                state.ingest(*problem.next_measurement())
                change = float(np.linalg.norm(state.x - prev_x))
                scale = max(float(np.linalg.norm(state.x)), 1e-12)
                quiet = quiet + 1 if change / scale < cfg.stop.threshold else 0
            x_hat = state.x
            iterations = sum(rec.iterations for rec in state.history)
            proxy_converged = quiet >= 2
        else:
            gram = GramInverse(n)
            ys = []
            for _ in range(m):
                a, y_val = problem.next_measurement()
                gram.append_row(a)
                ys.append(y_val)
            result = batch_solve(gram, np.asarray(ys), cfg.zap)
            x_hat = result.x
            iterations = result.iterations
            proxy_converged = False  # single-shot solve has no step sequence
    except (DegenerateRowError, GramCapacityError, DivergenceError):
        return TrialRecord(
            seed=seed,
            m=m,
            msd_normalized=math.nan,
            msd_raw=math.nan,
            total_inner_iterations=0,
            wall_time=time.perf_counter() - start,
            algorithm=algorithm,
            converged=False,
            failed=True,
        )
    wall = time.perf_counter() - start
    msd_norm = msd(x_hat, problem.x_true)
    if cfg.stop.mode is StopRule.ORACLE_MSD:
        converged = msd_norm < cfg.stop.threshold
    else:
        converged = proxy_converged
    return TrialRecord(
        seed=seed,
        m=m,
        msd_normalized=msd_norm,
        msd_raw=msd(x_hat, problem.x_true, normalized=False),
        total_inner_iterations=iterations,
        wall_time=wall,
        algorithm=algorithm,
        converged=converged,
    )


def run_sweep(cfg: SweepConfig) -> list[TrialRecord]:
    """Run every (m, trial, algorithm) cell; deterministic apart from wall times.

    Solver failures are captured in per-record `failed` flags and the sweep
    continues.  Records follow the cell layout: algorithms in configured
    order, then m, then trial.
    """
    cells = [
        (cfg, m, trial, algorithm)
        for algorithm in cfg.algorithms
        for m in cfg.m_values
        for trial in range(cfg.trials)
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_run_cell, cells, chunksize=4))
    else:
        records = [_run_cell(cell) for cell in cells]
    # pool.map preserves input order, so records follow the cell layout above
    return records


@dataclass(frozen=True)
class SummaryRow:
    """Aggregated cell statistics for one (algorithm, m) pair."""

    algorithm: str
    m: int
    trials: int
    msd_mean: float
    msd_median: float
    time_mean_s: float
    success_rate: float


def aggregate(records: list[TrialRecord], tau: float = 1e-4) -> list[SummaryRow]:
    """Reduce trial records to one row per (algorithm, m).

    success_rate counts records with msd_normalized < tau (failed records count
    against it); MSD and time statistics are over non-failed records.
    """
    if not records:
        raise ValueError("aggregate requires at least one record")
    groups: dict[tuple[str, int], list[TrialRecord]] = {}
    for rec in records:
        groups.setdefault((rec.algorithm.value, rec.m), []).append(rec)
    rows = []
    for (algorithm, m), recs in sorted(groups.items()):
        good = [r.msd_normalized for r in recs if not r.failed]
        times = [r.wall_time for r in recs if not r.failed]
        successes = sum(1 for r in recs if not r.failed and r.msd_normalized < tau)
        rows.append(
            SummaryRow(
                algorithm=algorithm,
                m=m,
                trials=len(recs),
                msd_mean=float(np.mean(good)) if good else math.nan,
                msd_median=float(np.median(good)) if good else math.nan,
                time_mean_s=float(np.mean(times)) if times else math.nan,
                success_rate=successes / len(recs),
            )
        )
    return rows


def _fmt(value: float) -> str:
    # 17 significant digits: round-trips float64 exactly
    return format(value, ".17g")


def emit_csv(summaries: list[SummaryRow], path) -> None:
    """Write summary rows as CSV (17-significant-digit decimal serialization)."""
    lines = [CSV_HEADER]
    for row in summaries:
        lines.append(
            ",".join(
                [
                    row.algorithm,
                    str(row.m),
                    str(row.trials),
                    _fmt(row.msd_mean),
                    _fmt(row.msd_median),
                    _fmt(row.time_mean_s),
                    _fmt(row.success_rate),
                ]
            )
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


_SVG_COLORS = {"online": "#1b6ca8", "batch": "#c0392b"}
_FALLBACK_COLORS = ("#2e8b57", "#8e44ad", "#d35400")


def emit_svg(summaries: list[SummaryRow], path) -> None:
    """Render mean MSD (log10 scale) versus m as one polyline per algorithm."""
    width, height = 640, 420
    left, right, top, bottom = 70, 20, 30, 50
    plot_w, plot_h = width - left - right, height - top - bottom

    by_alg: dict[str, list[tuple[int, float]]] = {}
    for row in summaries:
        if not math.isnan(row.msd_mean):
            by_alg.setdefault(row.algorithm, []).append((row.m, max(row.msd_mean, 1e-20)))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14" '
        f'font-family="sans-serif">reconstruction MSD vs measurements</text>',
    ]
    if by_alg:
        ms = [m for pts in by_alg.values() for m, _ in pts]
        logs = [math.log10(v) for pts in by_alg.values() for _, v in pts]
        m_lo, m_hi = min(ms), max(ms)
        y_lo, y_hi = math.floor(min(logs)), math.ceil(max(logs))
        if m_hi == m_lo:
            m_hi += 1
        if y_hi == y_lo:
            y_hi += 1

        def sx(m):
            return left + plot_w * (m - m_lo) / (m_hi - m_lo)

        def sy(logv):
            return top + plot_h * (y_hi - logv) / (y_hi - y_lo)

        for decade in range(y_lo, y_hi + 1):
            y = sy(decade)
            parts.append(
                f'<line x1="{left}" y1="{y:.1f}" x2="{left + plot_w}" y2="{y:.1f}" '
                f'stroke="#dddddd" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end" font-size="11" '
                f'font-family="sans-serif">1e{decade}</text>'
            )
        n_ticks = min(8, m_hi - m_lo)
        for i in range(n_ticks + 1):
            m_tick = round(m_lo + (m_hi - m_lo) * i / max(n_ticks, 1))
            x = sx(m_tick)
            parts.append(
                f'<line x1="{x:.1f}" y1="{top + plot_h}" x2="{x:.1f}" '
                f'y2="{top + plot_h + 4}" stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{x:.1f}" y="{top + plot_h + 18}" text-anchor="middle" '
                f'font-size="11" font-family="sans-serif">{m_tick}</text>'
            )
        for idx, (alg, pts) in enumerate(sorted(by_alg.items())):
            color = _SVG_COLORS.get(alg, _FALLBACK_COLORS[idx % len(_FALLBACK_COLORS)])
            coords = " ".join(f"{sx(m):.2f},{sy(math.log10(v)):.2f}" for m, v in sorted(pts))
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
            ly = top + 14 + 16 * idx
            parts.append(
                f'<line x1="{left + plot_w - 110}" y1="{ly - 4}" x2="{left + plot_w - 86}" '
                f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{left + plot_w - 80}" y="{ly}" font-size="12" '
                f'font-family="sans-serif">{alg}</text>'
            )
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" text-anchor="middle" '
        f'font-size="12" font-family="sans-serif">measurements m</text>'
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
