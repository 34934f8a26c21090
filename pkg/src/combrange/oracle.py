"""Exact expectations for tiny instances, in rational arithmetic.

This module is the anti-drift ground truth for the simulator: everything
here is computed by exhaustive enumeration or exact dynamic programming
over dyadic-rational weights, never by sampling and never in floating
point.

Two walk flavors are covered:

* stop after n total steps (``exact_expected_visited``): a direct DFS over
  all paths.  Path weights are powers of two once scaled by 4^n (each
  backbone step contributes 1/4, each tooth step 1/2), so the DFS
  accumulates a single big integer.

* stop after the n-th vertical move (``exact_expected_visited_W``):
  horizontal runs between vertical moves have unbounded length, so a raw
  DFS cannot terminate.  Instead the walk is factorized into its two
  independent reduced projections: the vertical projection is an n-step
  sign path (2^n of them, enumerated outright), and, conditionally on it,
  the horizontal part is a simple walk whose length is a sum of
  independent geometric run lengths -- one run per backbone sojourn.
  Every quantity needed (backbone range, number of distinct columns
  carrying a tooth excursion of a given height) reduces to small exact
  convolutions and reflection-principle sums over that 1-D walk.  Runs are
  truncated below ``run_cap`` (tail mass 2^-run_cap per run, reported
  exactly), which is the only inexactness; a rigorous bound on the
  resulting expectation error is returned alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .comb import Site
from .errors import SizeLimitError

STEPS_LIMIT = 14
VERTICAL_LIMIT = 6
POSITION_LIMIT = 60
DEFAULT_RUN_CAP = 40

_BACKBONE_MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


def exact_expected_visited(n: int, backbone_order: tuple[int, ...] = (0, 1, 2, 3)) -> Fraction:
    """E[distinct sites visited in the first n steps], exactly.

    Depth-first enumeration of every path, carrying the visited set; the
    integer accumulator holds sum-over-paths of 4^n * weight * |sites|.
    ``backbone_order`` permutes the neighbor enumeration (the result must
    not depend on it; kept as a property-test hook).
    """
    if not 0 <= n <= STEPS_LIMIT:
        raise SizeLimitError(f"step oracle limited to 0 <= n <= {STEPS_LIMIT}")
    if sorted(backbone_order) != [0, 1, 2, 3]:
        raise ValueError("backbone_order must be a permutation of (0, 1, 2, 3)")
    moves = tuple(_BACKBONE_MOVES[i] for i in backbone_order)
    visited = {(0, 0)}
    total = 0

    def go(x: int, y: int, depth: int, e: int) -> None:
        nonlocal total
        if depth == n:
            total += (1 << e) * len(visited)
            return
        if y == 0:
            for dx, dy in moves:
                s = (x + dx, y + dy)
                new = s not in visited
                if new:
                    visited.add(s)
                go(s[0], s[1], depth + 1, e - 2)
                if new:
                    visited.remove(s)
        else:
            for dy in (1, -1):
                s = (x, y + dy)
                new = s not in visited
                if new:
                    visited.add(s)
                go(x, s[1], depth + 1, e - 1)
                if new:
                    visited.remove(s)

    go(0, 0, 0, 2 * n)
    return Fraction(total, 4**n)


def path_weight_total(n: int) -> Fraction:
    """Sum of all length-n path weights; must be exactly 1."""
    if not 0 <= n <= STEPS_LIMIT:
        raise SizeLimitError(f"step oracle limited to 0 <= n <= {STEPS_LIMIT}")
    total = 0

    def go(y: int, depth: int, e: int) -> None:
        nonlocal total
        if depth == n:
            total += 1 << e
            return
        if y == 0:
            for _, dy in _BACKBONE_MOVES:
                go(dy, depth + 1, e - 2)
        else:
            go(y + 1, depth + 1, e - 1)
            go(y - 1, depth + 1, e - 1)

    go(0, 0, 2 * n)
    return Fraction(total, 4**n)


def exact_position_distribution_1d(n: int) -> dict[int, Fraction]:
    """Full n-step distribution of the 1-D walk by Pascal-triangle DP."""
    if not 0 <= n <= POSITION_LIMIT:
        raise SizeLimitError(f"position DP limited to 0 <= n <= {POSITION_LIMIT}")
    dist = {0: Fraction(1)}
    half = Fraction(1, 2)
    for _ in range(n):
        nxt: dict[int, Fraction] = {}
        for i, w in dist.items():
            hw = w * half
            nxt[i + 1] = nxt.get(i + 1, Fraction(0)) + hw
            nxt[i - 1] = nxt.get(i - 1, Fraction(0)) + hw
        dist = nxt
    return dist


# ---------------------------------------------------------------------------
# the walk stopped at its n-th vertical move
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncatedExpectation:
    """Exact value over kept paths, plus the truncation bookkeeping.

    ``value`` sums only paths whose every horizontal run is shorter than
    the run cap.  ``truncated_mass`` is the exact probability of the
    dropped paths; ``error_bound`` rigorously bounds the difference
    between ``value`` and the untruncated expectation.
    """

    value: Fraction
    truncated_mass: Fraction
    error_bound: Fraction

    @property
    def value_float(self) -> float:
        return float(self.value)


def _p_frac(n: int, i: int) -> Fraction:
    if abs(i) > n or (n + i) % 2 != 0:
        return Fraction(0)
    return Fraction(math.comb(n, (n + i) // 2), 2**n)


@lru_cache(maxsize=None)
def _expected_max(a: int) -> Fraction:
    """E[max of an a-step walk] = sum_x P(M_a >= x), by reflection:
    P(M_a >= x) = p_{a,x} + 2 * sum_{k>x} p_{a,k}."""
    total = Fraction(0)
    tail = Fraction(0)  # sum_{k > x} p_{a,k}, built from the top down
    for x in range(a, 0, -1):
        total += _p_frac(a, x) + 2 * tail
        tail += _p_frac(a, x)
    return total


@lru_cache(maxsize=None)
def _run_length_dist(run_cap: int) -> tuple[tuple[int, Fraction], ...]:
    """P(run length = l) = 2^-(l+1) for l < run_cap; defective by 2^-run_cap."""
    return tuple((l, Fraction(1, 2 ** (l + 1))) for l in range(run_cap))


@lru_cache(maxsize=None)
def _total_length_dist(d: int, run_cap: int) -> tuple[tuple[int, Fraction], ...]:
    """Distribution of the total horizontal step count over d kept runs."""
    dist = {0: Fraction(1)}
    for _ in range(d):
        nxt: dict[int, Fraction] = {}
        for a, w in dist.items():
            for l, p in _run_length_dist(run_cap):
                nxt[a + l] = nxt.get(a + l, Fraction(0)) + w * p
        dist = nxt
    return tuple(sorted(dist.items()))


@lru_cache(maxsize=None)
def _expected_backbone_sites(d: int, run_cap: int) -> Fraction:
    """E[backbone sites visited, on kept paths] given d backbone sojourns.

    The horizontal projection is a plain walk of A total steps (A = sum of
    the run lengths), and the visited backbone sites are exactly its range:
    E[range] = 1 + 2 E[max] by symmetry.
    """
    total = Fraction(0)
    for a, w in _total_length_dist(d, run_cap):
        total += w * (1 + 2 * _expected_max(a))
    return total


@lru_cache(maxsize=None)
def _displacement_dist(gap: int, run_cap: int) -> tuple[tuple[int, Fraction], ...]:
    """Signed displacement after the runs of ``gap`` consecutive sojourns."""
    out: dict[int, Fraction] = {}
    for a, w in _total_length_dist(gap, run_cap):
        for s in range(-a, a + 1, 2):
            out[s] = out.get(s, Fraction(0)) + w * _p_frac(a, s)
    return tuple(sorted(out.items()))


@lru_cache(maxsize=None)
def _fresh_probability(gaps_reversed: tuple[int, ...], run_cap: int) -> Fraction:
    """P(a walk built from the given gap displacements never revisits 0).

    Used for the distinct-column count: chance t lands on a fresh column
    iff none of the backward partial sums over earlier selected chances
    vanishes.  The displacement distributions are defective, so the result
    already carries the kept-run mass of the runs involved.
    """
    dist = {0: Fraction(1)}
    for g in gaps_reversed:
        nxt: dict[int, Fraction] = {}
        for v, w in dist.items():
            for s, p in _displacement_dist(g, run_cap):
                nv = v + s
                if nv != 0:
                    nxt[nv] = nxt.get(nv, Fraction(0)) + w * p
        dist = nxt
    return sum(dist.values(), Fraction(0))


def _expected_distinct_columns(chance_indices: tuple[int, ...], d: int, run_cap: int) -> Fraction:
    """E[distinct columns among the selected chances, on kept paths]."""
    kept = 1 - Fraction(1, 2**run_cap)
    total = Fraction(0)
    for t, k_t in enumerate(chance_indices):
        if t == 0:
            total += kept**d
            continue
        window = k_t - chance_indices[0]
        gaps = tuple(
            chance_indices[r] - chance_indices[r - 1] for r in range(t, 0, -1)
        )
        total += _fresh_probability(gaps, run_cap) * kept ** (d - window)
    return total


def _vertical_profiles(n: int):
    """Enumerate the 2^n vertical sign paths.

    Yields (weight, d, excursions) where d is the number of backbone
    sojourns (times m < n with Y_m = 0, the start included) and
    excursions maps each sojourn index to (sign, peak) of the tooth
    excursion that follows it.
    """
    w = Fraction(1, 2**n)
    for signs in product((1, -1), repeat=n):
        y = 0
        prefix = [0]
        for s in signs:
            y += s
            prefix.append(y)
        chances = [m for m in range(n) if prefix[m] == 0]
        d = len(chances)
        excursions = []
        for k, m in enumerate(chances):
            end = n
            for r in range(m + 1, n + 1):
                if prefix[r] == 0:
                    end = r
                    break
            peak = max(abs(prefix[t]) for t in range(m + 1, end + 1))
            excursions.append((signs[m], peak))
        yield w, d, excursions


def _check_vertical_arg(n_vertical: int, run_cap: int) -> None:
    if not 1 <= n_vertical <= VERTICAL_LIMIT:
        raise SizeLimitError(
            f"vertical-move oracle limited to 1 <= n <= {VERTICAL_LIMIT}"
        )
    if run_cap < 2:
        raise ValueError("run_cap must be >= 2")


def exact_expected_visited_W(n_vertical: int, run_cap: int = DEFAULT_RUN_CAP) -> TruncatedExpectation:
    """E[distinct sites visited up to and including the n-th vertical move]."""
    _check_vertical_arg(n_vertical, run_cap)
    n = n_vertical
    q = Fraction(1, 2**run_cap)
    kept = 1 - q

    value = Fraction(0)
    kept_mass = Fraction(0)
    sum_d = Fraction(0)
    sum_d_sq = Fraction(0)
    for w, d, excursions in _vertical_profiles(n):
        kept_mass += w * kept**d
        sum_d += w * d
        sum_d_sq += w * d * d
        contrib = _expected_backbone_sites(d, run_cap)
        for j in range(1, n + 1):
            for sign in (1, -1):
                sel = tuple(
                    k for k, (sg, pk) in enumerate(excursions)
                    if sg == sign and pk >= j
                )
                if sel:
                    contrib += _expected_distinct_columns(sel, d, run_cap)
        value += w * contrib

    drop_mass = 1 - kept_mass
    # E[V' ; dropped] <= (1+n) P(drop) + E[a ; dropped]; per sojourn i,
    # E[l_i ; drop] <= E[l 1(l >= cap)] + E[l] P(another run >= cap)
    #               = (cap+1) 2^-cap + (d-1) 2^-cap.
    err = (1 + n) * drop_mass + q * ((run_cap + 1) * sum_d + (sum_d_sq - sum_d))
    return TruncatedExpectation(value=value, truncated_mass=drop_mass, error_bound=err)


def exact_reach_probability(n_vertical: int, target: Site,
                            run_cap: int = DEFAULT_RUN_CAP) -> TruncatedExpectation:
    """P(the walk visits ``target`` before its n-th vertical move ends).

    Returns the exact probability over kept paths; the untruncated
    probability exceeds it by at most ``truncated_mass``.
    """
    _check_vertical_arg(n_vertical, run_cap)
    n = n_vertical
    q = Fraction(1, 2**run_cap)
    kept = 1 - q
    tx, ty = target.x, target.y
    nu = _displacement_dist(1, run_cap)

    prob = Fraction(0)
    kept_mass = Fraction(0)
    for w, d, excursions in _vertical_profiles(n):
        kept_mass += w * kept**d
        if ty == 0:
            if tx == 0:
                prob += w * kept**d  # the start is the origin
            else:
                hit = Fraction(0)
                for a, wa in _total_length_dist(d, run_cap):
                    x = abs(tx)
                    # P(M_a >= x) by reflection
                    hit += wa * (_p_frac(a, x) + 2 * sum(
                        _p_frac(a, k) for k in range(x + 1, a + 1)
                    ))
                prob += w * hit
            continue
        sign = 1 if ty > 0 else -1
        sel = [
            k for k, (sg, pk) in enumerate(excursions)
            if sg == sign and pk >= abs(ty)
        ]
        if not sel:
            continue
        dist = {0: Fraction(1)}
        hit = Fraction(0)
        selset = set(sel)
        for r in range(max(sel) + 1):
            nxt: dict[int, Fraction] = {}
            for v, wv in dist.items():
                for s, p in nu:
                    nxt[v + s] = nxt.get(v + s, Fraction(0)) + wv * p
            dist = nxt
            if r in selset and tx in dist:
                hit += dist.pop(tx) * kept ** (d - 1 - r)
        prob += w * hit

    drop_mass = 1 - kept_mass
    return TruncatedExpectation(value=prob, truncated_mass=drop_mass, error_bound=drop_mass)
