"""Scaling analysis: turns sweeps of estimated means into verdicts.

The target law is mean ~ K * sqrt(n) * log n with K = 1/(2 sqrt(2 pi)).
Its fingerprint at finite n is a local log-log slope drifting like
0.5 + 1/log n, which is why slopes are taken between consecutive sweep
points rather than by a single global fit (a global fit would smear the
drift that distinguishes sqrt(n) log n from a pure power law).  The
competing hypothesis is a clean n^(3/4) power law.  All logs natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .estimator import Estimate, ExperimentConfig, run_summaries
from .simulator import StopRule
from .walk1d import expected_visits_origin

TARGET_CONSTANT = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))  # ~0.19947114

SLOPE_REJECT_THRESHOLD = 0.70   # between the law's max desk-scale slope (~0.61) and 0.75
SLOPE_FLOOR = 0.50
RATIO_STABILITY_FACTOR = 1.5    # allowed ratio spread over the top two decades


@dataclass(frozen=True)
class SweepPoint:
    n: int
    estimate: Estimate

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("sweep points need n >= 2")
        if self.estimate.mean < 1.0:
            raise ValueError("mean visited-site count cannot be below 1")


@dataclass(frozen=True)
class ScalingFit:
    points: tuple[SweepPoint, ...]
    slopes: tuple[tuple[float, float], ...]          # (geometric-mean n, slope)
    ratios: tuple[tuple[int, float, float], ...]     # (n, mean/(sqrt n log n), stderr scaled)
    ratio75: tuple[tuple[int, float], ...]           # (n, mean/n^0.75)


def local_slopes(points) -> list[tuple[float, float]]:
    """Two-point slopes of log(mean) against log(n); x is the geometric mean."""
    pts = list(points)
    if len(pts) < 2:
        raise ValueError("need at least 2 points")
    for a, b in zip(pts, pts[1:]):
        if b.n <= a.n:
            raise ValueError("sweep points must have strictly increasing n")
    out = []
    for a, b in zip(pts, pts[1:]):
        slope = (math.log(b.estimate.mean) - math.log(a.estimate.mean)) / (
            math.log(b.n) - math.log(a.n)
        )
        out.append((math.sqrt(a.n * b.n), slope))
    return out


def constant_ratio(points) -> list[tuple[int, float, float]]:
    """mean/(sqrt(n) log n) per point, with the stderr scaled the same way."""
    out = []
    for p in points:
        norm = math.sqrt(p.n) * math.log(p.n)
        out.append((p.n, p.estimate.mean / norm, p.estimate.stderr / norm))
    return out


def build_fit(points) -> ScalingFit:
    pts = tuple(points)
    return ScalingFit(
        points=pts,
        slopes=tuple(local_slopes(pts)),
        ratios=tuple(constant_ratio(pts)),
        ratio75=tuple((p.n, p.estimate.mean / p.n**0.75) for p in pts),
    )


@dataclass(frozen=True)
class HypothesisReport:
    """Four-way verdict on a measured sweep.

    supported requires: every slope above 0.50, every slope below 0.70
    (rejecting the n^(3/4) claim with margin), mean/n^(3/4) strictly
    decreasing, and mean/(sqrt n log n) stable within a factor 1.5 across
    the top two decades of the sweep.
    """

    slope_min: float
    slope_max: float
    slopes_above_floor: bool
    slopes_below_threshold: bool
    ratio75_decreasing: bool
    ratio_stability_factor: float
    ratios_stable: bool
    ratio_last: float
    supported: bool


def hypothesis_report(fit: ScalingFit) -> HypothesisReport:
    if len(fit.points) < 3:
        raise ValueError("need at least 3 sweep points")
    n_min, n_max = fit.points[0].n, fit.points[-1].n
    if n_max < 100 * n_min:
        raise ValueError("sweep must span at least two decades")
    slopes = [s for _, s in fit.slopes]
    slope_min, slope_max = min(slopes), max(slopes)
    above = slope_min > SLOPE_FLOOR
    below = slope_max < SLOPE_REJECT_THRESHOLD
    r75 = [r for _, r in fit.ratio75]
    decreasing = all(b < a for a, b in zip(r75, r75[1:]))
    top = [r for n, r, _ in fit.ratios if n * 100 >= n_max]
    factor = max(top) / min(top)
    stable = factor < RATIO_STABILITY_FACTOR
    return HypothesisReport(
        slope_min=slope_min,
        slope_max=slope_max,
        slopes_above_floor=above,
        slopes_below_threshold=below,
        ratio75_decreasing=decreasing,
        ratio_stability_factor=factor,
        ratios_stable=stable,
        ratio_last=fit.ratios[-1][1],
        supported=above and below and decreasing and stable,
    )


@dataclass(frozen=True)
class LemmaOneRow:
    """One horizon of the horizontal-move / backbone-site check.

    The horizontal-move count of the walk stopped at its n-th vertical
    move has the exact mean expected_visits_origin(n-1); the backbone-site
    count should scale like n^(1/4).
    """

    n: int
    a_mean: float
    a_stderr: float
    a_target: float
    a_zscore: float
    c_mean: float
    c_stderr: float
    c_normalized: float


def lemma1_report(n_list, cfg: ExperimentConfig,
                  threads: int | None = None) -> list[LemmaOneRow]:
    """Horizontal-move and backbone-site diagnostics over a sweep of horizons.

    ``cfg`` supplies the seed and replicate count; its rule is replaced by
    the n-vertical-moves rule for each horizon in ``n_list``.
    """
    rows = []
    for n in n_list:
        if n < 2:
            raise ValueError("lemma horizons need n >= 2")
        run_cfg = replace(cfg, rule=StopRule.after_vertical_moves(n))
        res = run_summaries(run_cfg, ("horizontal_moves", "backbone_sites"), threads)
        a = res["horizontal_moves"]
        c = res["backbone_sites"]
        target = expected_visits_origin(n - 1)
        z = (a.mean - target) / a.stderr if a.stderr > 0 else math.inf
        rows.append(LemmaOneRow(
            n=n,
            a_mean=a.mean,
            a_stderr=a.stderr,
            a_target=target,
            a_zscore=z,
            c_mean=c.mean,
            c_stderr=c.stderr,
            c_normalized=c.mean / n**0.25,
        ))
    return rows


@dataclass(frozen=True)
class LemmaTwoRow:
    j: int
    u_mean: float
    u_stderr: float
    normalized: float  # u_j * (|j|+1) / (n^(1/4) log n)


def lemma2_report(n: int, j_list, cfg: ExperimentConfig,
                  threads: int | None = None) -> list[LemmaTwoRow]:
    """Empirical reach probabilities u_j of the sites (0, j), normalized by
    the n^(1/4) log n / (|j|+1) envelope.  The envelope constant is whatever
    the data says (max of the normalized column); nothing is assumed."""
    from .estimator import estimate_u_j

    envelope = n**0.25 * math.log(n)
    rows = []
    for j in j_list:
        est = estimate_u_j(n, j, cfg, threads)
        rows.append(LemmaTwoRow(
            j=j,
            u_mean=est.mean,
            u_stderr=est.stderr,
            normalized=est.mean * (abs(j) + 1) / envelope,
        ))
    return rows
