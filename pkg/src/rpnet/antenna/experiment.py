"""Monte-Carlo comparison of net-driven selection against centralized baselines."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from ..netfile import write_trace
from ..semantics import ForwardFirst, RandomUniform, run
from .capacity import capacity, exhaustive_feasible, exhaustive_selection, greedy_selection, rayleigh_channel
from .network import Topology, build_net, ring_hoods, selected, selection_state

CSV_COLUMNS = (
    "realization", "nts", "run_index", "run_capacity", "best_capacity",
    "greedy_capacity", "exhaustive_capacity_or_blank", "steps", "converged",
)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ExperimentConfig:
    n_t: int = 64
    n_r: int = 16
    n_ts: int = 16
    rho: float = 10.0  # linear SNR
    channel_seed: int = 0
    sched_seed: int = 0
    runs: int = 5
    realizations: int = 1
    max_steps: int | None = None  # default 50 * n_t
    hood_size: int = 8
    hood_stride: int = 4
    policy: str = "random"
    P: tuple | None = None
    exhaustive_limit: int = 100_000

    def __post_init__(self):
        if not 1 <= self.n_ts <= self.n_t:
            raise ValueError("need 1 <= n_ts <= n_t")
        if self.realizations < 1 or self.runs < 1:
            raise ValueError("realizations and runs must be positive")
        if self.policy not in ("random", "forward-first"):
            raise ValueError(f"unknown policy {self.policy!r}")

    @property
    def step_limit(self) -> int:
        return 50 * self.n_t if self.max_steps is None else self.max_steps

    @property
    def power(self):
        return None if self.P is None else np.diag(self.P)


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple
    capacity: float
    steps: int
    converged: bool
    trace: list = field(default_factory=list, compare=False, repr=False)


def channel(cfg: ExperimentConfig, realization: int) -> np.ndarray:
    return rayleigh_channel(cfg.n_t, cfg.n_r, np.random.default_rng([cfg.channel_seed, realization]))


def start(cfg: ExperimentConfig, realization: int, run_index: int) -> tuple[Topology, int]:
    """Random starting selection, neighbourhood placement and scheduler seed of one run."""
    rng = np.random.default_rng([cfg.sched_seed, realization, run_index, cfg.n_ts])
    hoods = ring_hoods(cfg.n_t, cfg.hood_size, cfg.hood_stride)
    on = sorted(int(i) for i in rng.choice(cfg.n_t, size=cfg.n_ts, replace=False))
    home = {}
    for i in on:
        options = [k for k, h in enumerate(hoods) if i in h]
        home[i] = options[int(rng.integers(len(options)))]
    seed = int(rng.integers(2**31 - 1))
    return Topology(cfg.n_t, hoods, frozenset(on), tuple(sorted(home.items()))), seed


def realization_net(cfg: ExperimentConfig, H, top: Topology):
    return build_net(top, H, cfg.rho, cfg.n_ts, cfg.n_r, cfg.power)


def run_selection(cfg: ExperimentConfig, net, H, top: Topology, seed: int) -> SelectionResult:
    policy = RandomUniform(seed) if cfg.policy == "random" else ForwardFirst(seed)
    res = run(net, selection_state(net, top), policy, cfg.step_limit)
    sel = selected(res.state, cfg.n_t)
    cap = capacity(H[list(sel)], cfg.rho, cfg.n_ts, cfg.n_r, cfg.power)
    return SelectionResult(sel, cap, len(res.trace), res.converged, res.trace)


def run_experiment(cfg: ExperimentConfig, trace_dir=None) -> list[dict]:
    """One row per (realization, run).  Best/greedy/exhaustive repeat on each row."""
    rows = []
    if trace_dir is not None:
        Path(trace_dir).mkdir(parents=True, exist_ok=True)
    for r in range(cfg.realizations):
        H = channel(cfg, r)
        starts = [start(cfg, r, i) for i in range(cfg.runs)]
        net = realization_net(cfg, H, starts[0][0])
        results = []
        for i, (top, seed) in enumerate(starts):
            res = run_selection(cfg, net, H, top, seed)
            results.append(res)
            if trace_dir is not None:
                write_trace(res.trace, Path(trace_dir) / trace_name(r, cfg.n_ts, i))
        best = max(res.capacity for res in results)
        _, greedy = greedy_selection(H, cfg.rho, cfg.n_ts, cfg.power)
        exhaustive = None
        if exhaustive_feasible(cfg.n_t, cfg.n_ts, cfg.exhaustive_limit):
            _, exhaustive = exhaustive_selection(H, cfg.rho, cfg.n_ts, cfg.power)
        for i, res in enumerate(results):
            rows.append({
                "realization": r,
                "nts": cfg.n_ts,
                "run_index": i,
                "run_capacity": res.capacity,
                "best_capacity": best,
                "greedy_capacity": greedy,
                "exhaustive_capacity_or_blank": exhaustive,
                "steps": res.steps,
                "converged": res.converged,
            })
    return rows


def trace_name(realization: int, n_ts: int, run_index: int) -> str:
    return f"trace_r{realization}_nts{n_ts}_run{run_index}.csv"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def write_rows(rows: Iterable[dict], dest) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_rows(rows, fh)
        return
    w = csv.writer(dest, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_cell(row[c]) for c in CSV_COLUMNS])


def summarize(rows: Iterable[dict]) -> dict[int, dict[str, float]]:
    """Per n_ts means: best-of-runs, single run, greedy, exhaustive, win rate."""
    by: dict[int, dict[int, list[dict]]] = {}
    for row in rows:
        by.setdefault(row["nts"], {}).setdefault(row["realization"], []).append(row)
    out = {}
    for nts, reals in sorted(by.items()):
        firsts = [rs[0] for rs in reals.values()]
        ex = [f["exhaustive_capacity_or_blank"] for f in firsts]
        out[nts] = {
            "best": float(np.mean([f["best_capacity"] for f in firsts])),
            "single": float(np.mean([r["run_capacity"] for rs in reals.values() for r in rs])),
            "greedy": float(np.mean([f["greedy_capacity"] for f in firsts])),
            "exhaustive": float(np.mean(ex)) if all(e is not None for e in ex) else float("nan"),
            "wins": float(np.mean([f["best_capacity"] > f["greedy_capacity"] for f in firsts])),
            "realizations": len(firsts),
        }
    return out
