"""Instrumented random walks on the comb.

Two stopping rules are supported: after a fixed number of total steps,
and after a fixed number of vertical moves (in the latter case the walk
length is ``limit`` plus however many horizontal moves happened along the
way).  Each walk records, besides the distinct-site count, the horizontal
move count, the number of distinct backbone sites reached, and the number
of arrivals onto the backbone (start included, final position excluded --
the convention under which that count is distributed like the origin
visits of a 1-D walk).

The visited set is kept compressed (`VisitedRange`): a backbone interval
plus per-column tooth spans.  Sub-walks along any line are connected, so
intervals are lossless; this is what makes n = 1e8 walks fit in kilobytes.

The fast path lives in `_kernels`; `run_walk_reference` is a pure-Python
twin used for differential tests and trajectory audits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from . import _kernels
from .comb import Axis, Site, step
from .rng import RandomSource


class StopKind(enum.Enum):
    AFTER_STEPS = "steps"
    AFTER_VERTICAL_MOVES = "vertical"


@dataclass(frozen=True)
class StopRule:
    kind: StopKind
    limit: int

    def __post_init__(self):
        if self.limit < 1:
            raise ValueError("stop rule limit must be >= 1")

    @staticmethod
    def after_steps(limit: int) -> "StopRule":
        return StopRule(StopKind.AFTER_STEPS, limit)

    @staticmethod
    def after_vertical_moves(limit: int) -> "StopRule":
        return StopRule(StopKind.AFTER_VERTICAL_MOVES, limit)

    @property
    def mode_code(self) -> int:
        return (
            _kernels.MODE_STEPS
            if self.kind is StopKind.AFTER_STEPS
            else _kernels.MODE_VERTICAL
        )


class SiteClass(enum.Enum):
    CLOSE = "close"
    INTERMEDIATE = "intermediate"
    FAR = "far"


def classify_site(n: int, j: int) -> SiteClass:
    """Class of a site at tooth height j for horizon n (natural logs)."""
    if n < 2:
        raise ValueError("classification needs n >= 2")
    aj = abs(j)
    if aj < n**0.25:
        return SiteClass.CLOSE
    if aj > 2.0 * math.sqrt(n * math.log(n)):
        return SiteClass.FAR
    return SiteClass.INTERMEDIATE


def class_bounds(n: int) -> tuple[int, int]:
    """Integer thresholds matching `classify_site`: a height j is close iff
    j <= cl and far iff j > fl.  For n < 2 everything counts as close."""
    if n < 2:
        big = 1 << 62
        return big, big
    cl = math.ceil(n**0.25) - 1
    fl = math.floor(2.0 * math.sqrt(n * math.log(n)))
    return cl, fl


@dataclass
class VisitedRange:
    """Compressed visited set: backbone interval plus per-column tooth spans.

    ``teeth[x] = (neg_min, pos_max)`` means the visited tooth sites in
    column x are exactly {(x, y) : neg_min <= y <= -1 or 1 <= y <= pos_max}.
    """

    backbone_min: int = 0
    backbone_max: int = 0
    teeth: dict[int, tuple[int, int]] = field(default_factory=dict)

    def visit(self, site: Site) -> None:
        if site.y == 0:
            if site.x < self.backbone_min:
                self.backbone_min = site.x
            elif site.x > self.backbone_max:
                self.backbone_max = site.x
            return
        neg, pos = self.teeth.get(site.x, (0, 0))
        if site.y > pos:
            pos = site.y
        elif site.y < neg:
            neg = site.y
        self.teeth[site.x] = (neg, pos)

    def __contains__(self, site: Site) -> bool:
        if site.y == 0:
            return self.backbone_min <= site.x <= self.backbone_max
        neg, pos = self.teeth.get(site.x, (0, 0))
        return neg <= site.y <= -1 or 1 <= site.y <= pos


def visited_count(v: VisitedRange) -> int:
    """Number of distinct sites represented by the tracker."""
    total = v.backbone_max - v.backbone_min + 1
    for neg, pos in v.teeth.values():
        total += pos - neg
    return total


@dataclass(frozen=True)
class WalkStats:
    """Outcome of one instrumented walk."""

    steps_total: int
    vertical_moves: int
    horizontal_moves: int
    visited_sites: int
    backbone_sites: int
    backbone_entries: int
    final_site: Site
    far_sites: int = 0
    close_sites: int = 0
    intermediate_sites: int = 0
    intermediate_final_tooth: int = 0

    @property
    def final_y(self) -> int:
        return self.final_site.y


def _stats_from_kernel(fields) -> WalkStats:
    (v, h, ve, steps, c, d, far, close, inter, ift, fx, fy) = fields
    return WalkStats(
        steps_total=int(steps),
        vertical_moves=int(ve),
        horizontal_moves=int(h),
        visited_sites=int(v),
        backbone_sites=int(c),
        backbone_entries=int(d),
        final_site=Site(int(fx), int(fy)),
        far_sites=int(far),
        close_sites=int(close),
        intermediate_sites=int(inter),
        intermediate_final_tooth=int(ift),
    )


def _run_kernel(rule: StopRule, rng: RandomSource, use_target: bool,
                tx: int, ty: int) -> tuple[WalkStats, bool]:
    cl, fl = class_bounds(rule.limit)
    s0, s1, s2, s3, buf, nb = rng.state
    res = _kernels.walk_single(
        np.uint64(s0), np.uint64(s1), np.uint64(s2), np.uint64(s3),
        np.uint64(buf), nb,
        rule.mode_code, rule.limit, cl, fl, use_target, tx, ty,
    )
    (v, h, ve, steps, c, d, far, close, inter, ift, fx, fy,
     reached, ns0, ns1, ns2, ns3, nbuf, nnb) = res
    rng.state = (int(ns0), int(ns1), int(ns2), int(ns3), int(nbuf), int(nnb))
    stats = _stats_from_kernel((v, h, ve, steps, c, d, far, close, inter, ift, fx, fy))
    return stats, bool(reached)


def run_walk(rule: StopRule, rng: RandomSource) -> WalkStats:
    """Simulate one walk from the origin under ``rule``."""
    stats, _ = _run_kernel(rule, rng, False, 0, 0)
    return stats


def run_walk_with_target(rule: StopRule, target: Site,
                         rng: RandomSource) -> tuple[WalkStats, bool]:
    """As `run_walk`, additionally reporting whether ``target`` was visited."""
    stats, reached = _run_kernel(rule, rng, True, target.x, target.y)
    return stats, reached


def _class_counts(v: VisitedRange, n: int) -> tuple[int, int, int]:
    """(close, intermediate, far) distinct-site counts from a tracker."""
    cl, fl = class_bounds(n)
    close = v.backbone_max - v.backbone_min + 1
    far = 0
    for neg, pos in v.teeth.values():
        for span in (pos, -neg):
            if span > 0:
                close += min(span, cl)
                if span > fl:
                    far += span - fl
    inter = visited_count(v) - close - far
    return close, inter, far


def run_walk_reference(
    rule: StopRule,
    rng: RandomSource,
    audit: IO[str] | None = None,
) -> tuple[WalkStats, VisitedRange]:
    """Pure-Python walk, step by step through `comb.step`.

    Consumes random bits exactly like the kernel, so for an equal-seeded
    `RandomSource` it reproduces the fast path bit for bit.  With ``audit``
    set, writes one tab-separated line per step:
    ``step_index  axis  direction  x  y``.
    """
    here = Site(0, 0)
    tracker = VisitedRange()
    horiz = 0
    vert = 0
    entries = 1
    last_entry = False
    index = 0
    while True:
        if rule.kind is StopKind.AFTER_STEPS:
            if horiz + vert >= rule.limit:
                break
        elif vert >= rule.limit:
            break
        choice = rng.bits(2) if here.y == 0 else rng.bits(1)
        nxt, kind = step(here, choice)
        if kind.axis is Axis.HORIZONTAL:
            assert here.y == 0, "horizontal move off the backbone"
            horiz += 1
            last_entry = False
        else:
            vert += 1
            if nxt.y == 0:
                entries += 1
                last_entry = True
            else:
                last_entry = False
        tracker.visit(nxt)
        if audit is not None:
            axis = "horizontal" if kind.axis is Axis.HORIZONTAL else "vertical"
            audit.write(f"{index}\t{axis}\t{kind.direction:+d}\t{nxt.x}\t{nxt.y}\n")
        here = nxt
        index += 1
    if last_entry:
        entries -= 1

    close, inter, far = _class_counts(tracker, rule.limit)
    ift = 0
    if here.y != 0:
        cl, fl = class_bounds(rule.limit)
        neg, pos = tracker.teeth.get(here.x, (0, 0))
        span = pos if here.y > 0 else -neg
        ift = max(0, min(span, fl) - cl)
    stats = WalkStats(
        steps_total=horiz + vert,
        vertical_moves=vert,
        horizontal_moves=horiz,
        visited_sites=visited_count(tracker),
        backbone_sites=tracker.backbone_max - tracker.backbone_min + 1,
        backbone_entries=entries,
        final_site=here,
        far_sites=far,
        close_sites=close,
        intermediate_sites=inter,
        intermediate_final_tooth=ift,
    )
    return stats, tracker


def dump_trajectory(rule: StopRule, rng: RandomSource, stream: IO[str]) -> WalkStats:
    """Debug audit dump: the trajectory as tab-separated lines."""
    stats, _ = run_walk_reference(rule, rng, audit=stream)
    return stats


def recorded_trajectory(seed: int, rule: StopRule) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Kernel-recorded trajectory (axis, direction, x, y arrays) for a seed.

    Retries with larger buffers until the walk fits; used by tests that
    need bulk trajectories faster than the Python reference walker.
    """
    capacity = rule.limit * 4 + 64
    while True:
        ax = np.empty(capacity, np.int64)
        dr = np.empty(capacity, np.int64)
        xs = np.empty(capacity, np.int64)
        ys = np.empty(capacity, np.int64)
        status, nrec = _kernels.walk_record(
            np.uint64(seed), rule.mode_code, rule.limit, ax, dr, xs, ys
        )
        if status == 0:
            n = int(nrec)
            return ax[:n], dr[:n], xs[:n], ys[:n]
        capacity *= 4
