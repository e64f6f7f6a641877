"""Command-line interface: problem fixtures, single solves, and benchmark sweeps."""

from __future__ import annotations

import argparse
import sys
import time

from .bench import Algorithm, SweepConfig, aggregate, emit_csv, emit_svg, run_sweep
from .errors import DivergenceError
from .online import StopMode, StopRule, msd, run_online
from .probgen import ProblemSpec, SparseProblem
from .zap import ZapConfig


def _add_zap_args(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("solver parameters")
    group.add_argument("--alpha", type=float, default=1.0, help="penalty band parameter")
    group.add_argument("--kappa0", type=float, default=0.02, help="initial step size")
    group.add_argument("--eta1", type=float, default=0.99, help="outer step-size decay")
    group.add_argument("--eta2", type=float, default=0.8, help="inner step-size decay")
    group.add_argument("--t-max", type=int, default=50, help="inner iteration bound")
    group.add_argument("--q-divisor", type=float, default=2000.0, help="step-size floor divisor")
    group.add_argument("--epsilon", type=float, default=1e-4, help="stop-sensing tolerance")


def _zap_config(args: argparse.Namespace) -> ZapConfig:
    return ZapConfig(
        alpha=args.alpha,
        kappa0=args.kappa0,
        eta1=args.eta1,
        eta2=args.eta2,
        t_max=args.t_max,
        q_divisor=args.q_divisor,
        epsilon=args.epsilon,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqzap",
        description="Sequential compressive sensing with online zero-point "
        "attracting projection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="write a reproducible problem fixture")
    gen.add_argument("--n", type=int, default=256, help="signal length")
    gen.add_argument("--k", type=int, default=20, help="sparsity")
    gen.add_argument("--seed", type=int, default=0, help="64-bit problem seed")
    gen.add_argument("--out", required=True, help="fixture path (JSON)")

    solve = sub.add_parser("solve", help="run the online solver on a fixture")
    solve.add_argument("--fixture", required=True, help="problem fixture from 'gen'")
    solve.add_argument("--m-cap", type=int, default=None, help="measurement cap (default n)")
    solve.add_argument(
        "--stop",
        choices=["oracle", "proxy"],
        default="oracle",
        help="stop rule: oracle = normalized MSD below epsilon; "
        "proxy = relative estimate change below epsilon twice in a row",
    )
    _add_zap_args(solve)

    bench = sub.add_parser("bench", help="sweep measurement counts and emit CSV/SVG")
    bench.add_argument("--n", type=int, default=256, help="signal length")
    bench.add_argument("--k", type=int, default=20, help="sparsity")
    bench.add_argument("--m-max", type=int, default=120, help="largest measurement count")
    bench.add_argument("--m-min", type=int, default=1, help="smallest measurement count")
    bench.add_argument("--m-step", type=int, default=1, help="measurement grid step")
    bench.add_argument("--trials", type=int, default=10, help="trials per grid cell")
    bench.add_argument(
        "--stop", choices=["oracle", "proxy"], default="oracle", help="converged-flag rule"
    )
    bench.add_argument(
        "--tau", type=float, default=1e-4, help="success threshold on normalized MSD"
    )
    bench.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    bench.add_argument(
        "--algorithms",
        default="online,batch",
        help="comma-separated subset of: online, batch",
    )
    bench.add_argument("--out-csv", required=True, help="summary CSV path")
    bench.add_argument("--out-svg", default=None, help="optional MSD-vs-m plot path")
    bench.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    _add_zap_args(bench)

    return parser


def _cmd_gen(args) -> int:
    problem = SparseProblem.generate(ProblemSpec(n=args.n, k=args.k, seed=args.seed))
    problem.save(args.out)
    print(f"wrote fixture n={args.n} k={args.k} seed={args.seed} -> {args.out}")
    return 0


def _cmd_solve(args) -> int:
    problem = SparseProblem.load(args.fixture)
    cfg = _zap_config(args)
    stop = StopMode(
        mode=StopRule.ORACLE_MSD if args.stop == "oracle" else StopRule.PROXY_CHANGE,
        threshold=cfg.epsilon,
    )
    start = time.perf_counter()
    state = run_online(
        problem.measurements(),
        n_dim=problem.spec.n,
        cfg=cfg,
        stop=stop,
        m_cap=args.m_cap,
        oracle_x=problem.x_true,
    )
    wall = time.perf_counter() - start
    print(f"m_used={state.m}")
    print(f"converged={str(state.converged).lower()}")
    print(f"msd_normalized={msd(state.x, problem.x_true):.17g}")
    print(f"msd_raw={msd(state.x, problem.x_true, normalized=False):.17g}")
    print(f"total_inner_iterations={sum(r.iterations for r in state.history)}")
    print(f"skipped_rows={sum(1 for r in state.history if r.skipped)}")
    print(f"wall_time_s={wall:.6f}")
    return 0


def _cmd_bench(args) -> int:
    try:
        algorithms = tuple(Algorithm(name) for name in args.algorithms.split(","))
    except ValueError:
        print(f"error: unknown algorithm in {args.algorithms!r}", file=sys.stderr)
        return 2
    cfg = SweepConfig(
        spec=ProblemSpec(n=args.n, k=args.k, seed=args.seed),
        m_values=tuple(range(args.m_min, args.m_max + 1, args.m_step)),
        trials=args.trials,
        zap=_zap_config(args),
        stop=StopMode(
            mode=StopRule.ORACLE_MSD if args.stop == "oracle" else StopRule.PROXY_CHANGE,
            threshold=args.epsilon,
        ),
        algorithms=algorithms,
        workers=args.workers,
    )
    records = run_sweep(cfg)
    summaries = aggregate(records, tau=args.tau)
    emit_csv(summaries, args.out_csv)
    print(f"wrote {len(summaries)} summary rows -> {args.out_csv}")
    if args.out_svg:
        emit_svg(summaries, args.out_svg)
        print(f"wrote plot -> {args.out_svg}")
    failures = sum(1 for r in records if r.failed)
    if failures:
        print(f"error: {failures} of {len(records)} cells failed", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_bench(args)
    except DivergenceError as exc:
        print(f"error: solver diverged: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
