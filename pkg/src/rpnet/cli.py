"""Command-line interface: validate, simulate, antenna-experiment.

Exit codes: 0 ok, 1 validation failure, 2 parse error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
import time

from .errors import NetParseError, RPNError, ValidationFailed
from .netfile import format_history, format_marking, load, place_entry, write_trace
from .semantics import Direction, FixedSequence, ForwardFirst, RandomUniform, run

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_RUNTIME = 0, 1, 2, 3


def parse_policy(text: str, seed: int):
    """``random``, ``forward-first`` or ``fixed:t1:fwd,t2:rev``."""
    if text == "random":
        return RandomUniform(seed)
    if text == "forward-first":
        return ForwardFirst(seed)
    if text.startswith("fixed:"):
        steps = []
        for item in text[len("fixed:"):].split(","):
            tid, sep, d = item.strip().rpartition(":")
            if not sep or not tid:
                raise ValueError(f"bad fixed step {item!r}, expected transition:fwd|rev")
            steps.append((tid, Direction.parse(d)))
        return FixedSequence(tuple(steps))
    raise ValueError(f"unknown policy {text!r}")


def cmd_validate(args) -> int:
    load(args.file)
    print(f"{args.file}: ok")
    return EXIT_OK


def cmd_simulate(args) -> int:
    net = load(args.file)
    try:
        policy = parse_policy(args.policy, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for t, _ in getattr(policy, "steps", ()):
        if t not in net.transitions:
            print(f"error: unknown transition {t}", file=sys.stderr)
            return EXIT_RUNTIME
    t0 = time.perf_counter()
    res = run(net, net.initial_state(), policy, args.max_steps)
    elapsed = time.perf_counter() - t0
    if args.trace:
        write_trace(res.trace, args.trace)
    for p in sorted(res.state.marking):
        print(place_entry(net, res.state, p))
    print(f"history: {format_history(res.state) or '-'}")
    print(f"steps: {len(res.trace)}  halted: {res.halted}  wall: {elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_antenna(args) -> int:
    from .antenna.experiment import ExperimentConfig, db_to_linear, run_experiment, summarize, write_rows

    rows = []
    for nts in args.nts:
        cfg = ExperimentConfig(
            n_t=args.nt, n_r=args.nr, n_ts=nts, rho=db_to_linear(args.rho_db),
            channel_seed=args.channel_seed, sched_seed=args.sched_seed, runs=args.runs,
            realizations=args.realizations, max_steps=args.max_steps,
            hood_size=args.hood_size, hood_stride=args.hood_stride, policy=args.policy,
        )
        rows += run_experiment(cfg, trace_dir=args.trace_dir)
    write_rows(rows, args.out)
    summary = summarize(rows)
    for nts, s in summary.items():
        print(
            f"nts={nts}: best={s['best']:.4f} single={s['single']:.4f} "
            f"greedy={s['greedy']:.4f} exhaustive={s['exhaustive']:.4f} wins={s['wins']:.2f}"
        )
    if args.figure:
        from .antenna.plots import plot_capacity_sweep

        plot_capacity_sweep(summary, args.figure, title=f"{args.nt} antennas, {args.nr} users")
    return EXIT_OK


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rpnet", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a net file for well-formedness")
    v.add_argument("file")
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("simulate", help="run a net file and print the final marking")
    s.add_argument("file")
    s.add_argument("--policy", default="random", help="random | forward-first | fixed:t:fwd,t:rev")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-steps", type=int, default=100)
    s.add_argument("--trace", help="write the step trace CSV here")
    s.set_defaults(func=cmd_simulate)

    a = sub.add_parser("antenna-experiment", help="net-driven antenna selection vs greedy")
    a.add_argument("--nt", type=int, default=64)
    a.add_argument("--nr", type=int, default=16)
    a.add_argument("--nts", type=_int_list, default=[16], help="one value or a comma list")
    a.add_argument("--rho-db", type=float, default=10.0)
    a.add_argument("--realizations", type=int, default=10)
    a.add_argument("--runs", type=int, default=5)
    a.add_argument("--channel-seed", type=int, default=0)
    a.add_argument("--sched-seed", type=int, default=0)
    a.add_argument("--max-steps", type=int, default=None)
    a.add_argument("--hood-size", type=int, default=8)
    a.add_argument("--hood-stride", type=int, default=4)
    a.add_argument("--policy", choices=("random", "forward-first"), default="random")
    a.add_argument("--trace-dir", help="write one trace CSV per run here")
    a.add_argument("--figure", help="render capacity vs nts to this image file")
    a.add_argument("--out", required=True, help="experiment CSV path")
    a.set_defaults(func=cmd_antenna)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailed as exc:
        for v in exc.violations:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_INVALID
    except NetParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (RPNError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
