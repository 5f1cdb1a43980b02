"""Benchmark harness: grid sweeps, Table-style option sweeps, CSV emission.

Every (instance, algorithm) run becomes one BenchmarkRecord. Timing uses the
monotonic clock; everything else (iteration counts, LP counts, result
digests) is deterministic for a given seed, so re-running a sweep reproduces
all non-timing columns exactly. The digest encodes the algorithm kind and
the chosen index set, letting agreement between variants be checked from the
CSV alone.
"""
from __future__ import annotations

import csv
import hashlib
import io
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .core import GambleSet, LowerPrevision
from .criteria import ALGORITHMS, CriterionResult, kind_of_label
from .errors import ContractViolation, LpdecError
from .generators import GenConfig, gen_controlled_set, gen_gamble_set, gen_lower_prevision
from .instances import instance_digest, instance_text
from .linprog import DEFAULT_EPS

CSV_HEADER = ("instance_id,algorithm,n_omega,dom_size,k,option,wall_ns,"
              "setup_ns,cum_ipm_iterations,lp_count,result_digest")

FAILED_DIGEST = "failed"


def result_digest(kind_label: str, chosen: Iterable[int]) -> str:
    """Stable 16-hex digest of (criterion kind, chosen index set)."""
    text = f"{kind_label}:{','.join(str(i) for i in sorted(chosen))}"
    return hashlib.sha256(text.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class BenchmarkRecord:
    instance_id: str
    algorithm: str
    n_omega: int
    dom_size: int
    k: int
    option: str
    wall_ns: int
    setup_ns: int
    cum_ipm_iterations: int
    lp_count: int
    result_digest: str

    def to_row(self) -> str:
        return (f"{self.instance_id},{self.algorithm},{self.n_omega},"
                f"{self.dom_size},{self.k},{self.option},{self.wall_ns},"
                f"{self.setup_ns},{self.cum_ipm_iterations},{self.lp_count},"
                f"{self.result_digest}")


def write_records(path, records: Sequence[BenchmarkRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(CSV_HEADER + "\n")
        for rec in records:
            fh.write(rec.to_row() + "\n")


def read_records(path) -> list[BenchmarkRecord]:
    out = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(BenchmarkRecord(
                instance_id=row["instance_id"], algorithm=row["algorithm"],
                n_omega=int(row["n_omega"]), dom_size=int(row["dom_size"]),
                k=int(row["k"]), option=row["option"],
                wall_ns=int(row["wall_ns"]), setup_ns=int(row["setup_ns"]),
                cum_ipm_iterations=int(row["cum_ipm_iterations"]),
                lp_count=int(row["lp_count"]), result_digest=row["result_digest"]))
    return out


def child_seed(seed: int, *branch) -> int:
    """64-bit per-instance seed derived from (seed, branch...)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(branch))
    return int(ss.generate_state(2, np.uint64)[0])


def run_one(prevision: LowerPrevision, gambles: GambleSet, algorithm: str,
            instance_id: str, option: str = "-",
            eps: float = DEFAULT_EPS) -> BenchmarkRecord:
    """Run one algorithm on one instance with fresh warm-start state.

    Solver failures become a row with the ``failed`` digest instead of
    aborting the sweep.
    """
    if algorithm not in ALGORITHMS:
        raise ContractViolation(
            f"unknown algorithm {algorithm!r}; valid: {','.join(ALGORITHMS)}")
    fn = ALGORITHMS[algorithm]
    t0 = time.perf_counter_ns()
    try:
        result: Optional[CriterionResult] = fn(prevision, gambles, eps)
    except LpdecError:
        result = None
    wall_ns = time.perf_counter_ns() - t0
    if result is None:
        return BenchmarkRecord(
            instance_id=instance_id, algorithm=algorithm,
            n_omega=prevision.space.size, dom_size=prevision.dom_size,
            k=gambles.k, option=option, wall_ns=wall_ns, setup_ns=0,
            cum_ipm_iterations=0, lp_count=0, result_digest=FAILED_DIGEST)
    return BenchmarkRecord(
        instance_id=instance_id, algorithm=algorithm,
        n_omega=prevision.space.size, dom_size=prevision.dom_size,
        k=gambles.k, option=option, wall_ns=wall_ns, setup_ns=result.setup_ns,
        cum_ipm_iterations=result.iterations, lp_count=result.lp_solves,
        result_digest=result_digest(kind_of_label(algorithm).value, result.chosen))


def _grid_task(args):
    seed, cell_index, rep, cell, algorithms, eps = args
    n_omega, dom_size, k = cell
    cfg = GenConfig(seed=child_seed(seed, cell_index, rep),
                    n_omega=n_omega, dom_size=dom_size, k=k)
    prevision = gen_lower_prevision(cfg)
    gambles = gen_gamble_set(cfg)
    instance_id = instance_digest(instance_text(prevision, gambles))
    return [run_one(prevision, gambles, alg, instance_id, eps=eps)
            for alg in algorithms]


def run_grid(cells: Sequence[tuple[int, int, int]], repetitions: int, seed: int,
             algorithms: Sequence[str], eps: float = DEFAULT_EPS,
             jobs: int = 1) -> list[BenchmarkRecord]:
    """One record per (grid cell, repetition, algorithm).

    Every algorithm sees the same instance of a repetition; warm-start state
    is rebuilt per run so setup costs are included in each wall time.
    """
    for label in algorithms:
        if label not in ALGORITHMS:
            raise ContractViolation(f"unknown algorithm {label!r}")
    tasks = [(seed, ci, rep, cell, tuple(algorithms), eps)
             for ci, cell in enumerate(cells) for rep in range(repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            grouped = list(pool.map(_grid_task, tasks))
    else:
        grouped = [_grid_task(t) for t in tasks]
    return [rec for group in grouped for rec in group]


def _options_task(args):
    seed, oi, rep, option, sizes, algorithms, eps = args
    n_omega, dom_size, k = sizes
    cfg = GenConfig(seed=child_seed(seed, oi, rep), n_omega=n_omega,
                    dom_size=dom_size, k=k, option=option)
    prevision = gen_lower_prevision(cfg)
    gambles = gen_controlled_set(cfg, prevision)
    instance_id = instance_digest(instance_text(prevision, gambles))
    return [run_one(prevision, gambles, alg, instance_id, option=option, eps=eps)
            for alg in algorithms]


def run_options(k: int, options: Sequence[str], repetitions: int, seed: int,
                algorithms: Sequence[str] = ("id1", "id2", "id3", "id4"),
                n_omega: int = 16, dom_size: int = 16,
                eps: float = DEFAULT_EPS, jobs: int = 1) -> list[BenchmarkRecord]:
    """Controlled-instance sweep over the (l, n) option grid."""
    from .generators import option_grid
    grid = option_grid(k)
    for option in options:
        if option not in grid:
            raise ContractViolation(f"invalid option {option!r} for k={k}")
    tasks = [(seed, oi, rep, option, (n_omega, dom_size, k), tuple(algorithms), eps)
             for oi, option in enumerate(options) for rep in range(repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            grouped = list(pool.map(_options_task, tasks))
    else:
        grouped = [_options_task(t) for t in tasks]
    return [rec for group in grouped for rec in group]


@dataclass(frozen=True)
class Summary:
    n_omega: int
    dom_size: int
    k: int
    option: str
    algorithm: str
    n_runs: int
    median_wall_ns: float
    mean_wall_ns: float
    ci95_half_ns: Optional[float]
    median_cum_ipm_iterations: float


def summarize(records: Sequence[BenchmarkRecord]) -> list[Summary]:
    """One row per (sizes, option, algorithm) group.

    The 95% CI half-width uses the normal approximation 1.96*sd/sqrt(n) and
    is reported only for groups with at least 10 runs.
    """
    groups: dict[tuple, list[BenchmarkRecord]] = {}
    for rec in records:
        key = (rec.n_omega, rec.dom_size, rec.k, rec.option, rec.algorithm)
        groups.setdefault(key, []).append(rec)
    out = []
    for key in sorted(groups):
        rows = groups[key]
        walls = [r.wall_ns for r in rows]
        iters = [r.cum_ipm_iterations for r in rows]
        n = len(rows)
        ci = None
        if n >= 10:
            ci = 1.96 * statistics.stdev(walls) / (n ** 0.5)
        out.append(Summary(
            n_omega=key[0], dom_size=key[1], k=key[2], option=key[3],
            algorithm=key[4], n_runs=n, median_wall_ns=statistics.median(walls),
            mean_wall_ns=statistics.fmean(walls), ci95_half_ns=ci,
            median_cum_ipm_iterations=statistics.median(iters)))
    return out


SUMMARY_HEADER = ("n_omega,dom_size,k,option,algorithm,n_runs,median_wall_ns,"
                  "mean_wall_ns,ci95_half_ns,median_cum_ipm_iterations")


def write_summaries(path, summaries: Sequence[Summary]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for s in summaries:
            ci = "" if s.ci95_half_ns is None else f"{s.ci95_half_ns:.1f}"
            fh.write(f"{s.n_omega},{s.dom_size},{s.k},{s.option},{s.algorithm},"
                     f"{s.n_runs},{s.median_wall_ns:.1f},{s.mean_wall_ns:.1f},"
                     f"{ci},{s.median_cum_ipm_iterations:.1f}\n")


_AXES = ("n_omega", "dom_size", "k", "option")


def emit_plot_data(records: Sequence[BenchmarkRecord], x_axis: str) -> str:
    """Plot-ready CSV: one series per algorithm along the swept axis.

    Columns: x, algorithm, n_runs, mean_wall_ns, ci95_half_ns (empty for
    groups under 10 runs).
    """
    if x_axis not in _AXES:
        raise ContractViolation(f"x axis must be one of {_AXES}")
    groups: dict[tuple, list[int]] = {}
    for rec in records:
        key = (getattr(rec, x_axis), rec.algorithm)
        groups.setdefault(key, []).append(rec.wall_ns)
    buf = io.StringIO()
    buf.write(f"{x_axis},algorithm,n_runs,mean_wall_ns,ci95_half_ns\n")
    for key in sorted(groups, key=lambda kv: (str(kv[0]), kv[1])):
        walls = groups[key]
        n = len(walls)
        ci = f"{1.96 * statistics.stdev(walls) / (n ** 0.5):.1f}" if n >= 10 else ""
        buf.write(f"{key[0]},{key[1]},{n},{statistics.fmean(walls):.1f},{ci}\n")
    return buf.getvalue()
