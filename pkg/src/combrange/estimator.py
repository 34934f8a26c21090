"""Deterministic, parallel Monte Carlo driver.

Reproducibility contract: replicate i of a run is seeded by
``replicate_seed(master_seed, i)`` and depends on nothing else, so any
replicate can be re-run in isolation.  Replicates are grouped into blocks
whose size is a fixed function of (walk length, replicate count) -- never
of the worker count -- and block summaries are merged in block order.
Hence results are bit-identical for a fixed config no matter how many
threads execute the blocks (the kernels release the GIL, so plain threads
give real parallelism with zero serialization cost).

Aggregation is a single-pass mean/M2 (Welford) recurrence per block,
merged associatively across blocks (Chan et al.).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .comb import Site
from .errors import CapacityError
from .rng import GOLDEN, mix64
from .simulator import StopRule, class_bounds

_MASK64 = (1 << 64) - 1

STATISTICS = _kernels.STAT_COLUMNS
_COL = {name: i for i, name in enumerate(STATISTICS)}

# target ~1e8 walk steps per block so long walks still split across workers
_BLOCK_STEP_BUDGET = 10**8
_BLOCK_CAP = 4096


@dataclass(frozen=True)
class Diagnostics:
    """Optional per-replicate extras: a reach target to record."""

    target: Site | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    replicates: int
    rule: StopRule
    diagnostics: Diagnostics = field(default_factory=Diagnostics)

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo summary of one statistic."""

    mean: float
    stderr: float
    replicates: int
    min: float
    max: float


def replicate_seed(master_seed: int, index: int) -> int:
    """Per-replicate seed: splitmix64 finalizer over
    ``master_seed XOR index * golden-ratio constant``.

    The spread constant is odd, so index -> seed is a bijection for a
    fixed master seed: distinct indices can never collide.
    """
    return mix64((master_seed ^ ((index * GOLDEN) & _MASK64)) & _MASK64)


def block_size(limit: int, replicates: int) -> int:
    """Fixed block partition; deliberately independent of worker count."""
    per_block = max(1, min(_BLOCK_CAP, _BLOCK_STEP_BUDGET // max(1, limit)))
    return min(per_block, replicates)


def resolve_threads(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("COMB_RANGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class _Summary:
    count: int
    mean: float
    m2: float
    min: float
    max: float


def merge_summaries(a: _Summary, b: _Summary) -> _Summary:
    """Associative merge of two single-pass mean/M2 summaries."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    n = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * (b.count / n)
    m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / n)
    return _Summary(n, mean, m2, min(a.min, b.min), max(a.max, b.max))


def summarize(values) -> _Summary:
    arr = np.asarray(values, dtype=np.float64)
    n, mean, m2, mn, mx = _kernels.welford_summary(arr)
    return _Summary(int(n), float(mean), float(m2), float(mn), float(mx))


def _estimate(s: _Summary) -> Estimate:
    if s.count > 1:
        sd = math.sqrt(s.m2 / (s.count - 1))
        stderr = sd / math.sqrt(s.count)
    else:
        stderr = 0.0
    return Estimate(mean=s.mean, stderr=stderr, replicates=s.count,
                    min=s.min, max=s.max)


def _run_blocks(cfg: ExperimentConfig, columns: tuple[str, ...],
                threads: int | None) -> dict[str, Estimate]:
    rule = cfg.rule
    limit = rule.limit
    cl, fl = class_bounds(limit)
    target = cfg.diagnostics.target
    use_target = target is not None
    tx = target.x if use_target else 0
    ty = target.y if use_target else 0
    master = np.uint64(cfg.master_seed & _MASK64)
    bsize = block_size(limit, cfg.replicates)
    starts = list(range(0, cfg.replicates, bsize))
    col_idx = [_COL[c] for c in columns]

    def run_block(start: int) -> list[_Summary]:
        count = min(bsize, cfg.replicates - start)
        out = np.empty((count, _kernels.N_STATS), np.int64)
        try:
            _kernels.walk_block(master, start, count, rule.mode_code, limit,
                                cl, fl, use_target, tx, ty, out)
        except MemoryError as exc:  # pragma: no cover - depends on host
            raise CapacityError(f"out of memory in replicate block at {start}",
                                replicate_index=start) from exc
        return [summarize(out[:, k].astype(np.float64)) for k in col_idx]

    nworkers = resolve_threads(threads)
    if nworkers == 1 or len(starts) == 1:
        block_results = [run_block(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            block_results = list(pool.map(run_block, starts))

    merged = [_Summary(0, 0.0, 0.0, math.inf, -math.inf) for _ in columns]
    for summaries in block_results:  # fixed block order => deterministic floats
        for k, s in enumerate(summaries):
            merged[k] = merge_summaries(merged[k], s)
    return {c: _estimate(s) for c, s in zip(columns, merged)}


def run_summaries(cfg: ExperimentConfig, statistics, threads: int | None = None) -> dict[str, Estimate]:
    """Estimates for several WalkStats statistics out of a single run."""
    columns = tuple(statistics)
    for c in columns:
        if c not in _COL:
            raise ValueError(f"unknown statistic {c!r}; choose from {STATISTICS}")
    return _run_blocks(cfg, columns, threads)


def run_experiment(cfg: ExperimentConfig, statistic: str,
                   threads: int | None = None) -> Estimate:
    """Monte Carlo estimate of one named WalkStats statistic."""
    return run_summaries(cfg, (statistic,), threads)[statistic]


def estimate_u_j(n: int, j: int, cfg: ExperimentConfig,
                 threads: int | None = None) -> Estimate:
    """Empirical probability that the walk of n vertical moves reaches (0, j).

    The standard error uses the binomial formula sqrt(p(1-p)/R).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = replace(
        cfg,
        rule=StopRule.after_vertical_moves(n),
        diagnostics=Diagnostics(target=Site(0, j)),
    )
    est = run_experiment(cfg, "reached", threads)
    p = est.mean
    stderr = math.sqrt(max(0.0, p * (1.0 - p)) / est.replicates)
    return Estimate(mean=p, stderr=stderr, replicates=est.replicates,
                    min=est.min, max=est.max)


def _binomial_estimate(out: np.ndarray) -> Estimate:
    r = out.shape[0]
    p = float(out.sum()) / r
    stderr = math.sqrt(max(0.0, p * (1.0 - p)) / r)
    return Estimate(mean=p, stderr=stderr, replicates=r,
                    min=float(out.min()), max=float(out.max()))


def estimate_ruin_frequency(j: int, cfg: ExperimentConfig,
                            threads: int | None = None) -> Estimate:
    """Empirical frequency of reaching j before returning to 0 (1-D walk)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    out = np.empty(cfg.replicates, np.uint8)
    master = np.uint64(cfg.master_seed & _MASK64)
    bsize = block_size(2 * j, cfg.replicates)
    starts = list(range(0, cfg.replicates, bsize))

    def run_block(start: int) -> None:
        count = min(bsize, cfg.replicates - start)
        _kernels.ruin_block(master, start, count, j, out[start:start + count])

    nworkers = resolve_threads(threads)
    if nworkers == 1 or len(starts) == 1:
        for s in starts:
            run_block(s)
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            list(pool.map(run_block, starts))
    return _binomial_estimate(out)


def estimate_range_1d(n: int, cfg: ExperimentConfig,
                      threads: int | None = None) -> Estimate:
    """Monte Carlo estimate of the n-step 1-D walk range."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    master = np.uint64(cfg.master_seed & _MASK64)
    bsize = block_size(n, cfg.replicates)
    starts = list(range(0, cfg.replicates, bsize))

    def run_block(start: int) -> _Summary:
        count = min(bsize, cfg.replicates - start)
        out = np.empty(count, np.int64)
        _kernels.range1d_block(master, start, count, n, out)
        return summarize(out.astype(np.float64))

    nworkers = resolve_threads(threads)
    if nworkers == 1 or len(starts) == 1:
        blocks = [run_block(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            blocks = list(pool.map(run_block, starts))
    merged = _Summary(0, 0.0, 0.0, math.inf, -math.inf)
    for s in blocks:
        merged = merge_summaries(merged, s)
    return _estimate(merged)
