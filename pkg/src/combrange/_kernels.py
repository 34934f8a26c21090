"""Numba kernels: the hot loops behind the simulator and the estimator.

Everything here is a deterministic function of the seeds passed in.  The
RNG is xoshiro256** seeded through splitmix64; a uniform neighbor choice
consumes exactly 2 bits at a backbone site and 1 bit on a tooth, taken
from a buffered 64-bit word (the buffer is refilled whole when it holds
fewer bits than requested, discarding the leftovers).  `rng.RandomSource`
is the pure-Python twin and must stay bit-compatible.

The visited set is tracked as intervals: a backbone interval
[bbmin, bbmax] plus, per visited column, the highest tooth site above and
the lowest below.  Both spans can only grow by one site at a time, so the
visited counter is O(1) per step.  The span arrays are reused across
replicates of a block and reset column-by-column at the end of each walk
(the same sweep that tallies the close/intermediate/far site classes).

`_walk_core` is deliberately lean -- no trajectory recording, few live
variables -- because the whole project budget hangs on its ns/step.
`walk_record` duplicates the stepping logic with recording for audits and
differential tests; the test suite pins the two (and the pure-Python
reference walker) to bit-identical trajectories.

All uint64 arithmetic keeps both operands uint64: numba silently promotes
mixed signedness to float64, which would corrupt the stream.
"""

import numpy as np
from numba import njit

U64 = np.uint64

GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX_A = U64(0xBF58476D1CE4E5B9)
_MIX_B = U64(0x94D049BB133111EB)

# column layout of the per-replicate stats matrix produced by walk_block
STAT_COLUMNS = (
    "visited_sites",
    "horizontal_moves",
    "vertical_moves",
    "steps_total",
    "backbone_sites",
    "backbone_entries",
    "far_sites",
    "close_sites",
    "intermediate_sites",
    "intermediate_final_tooth",
    "final_x",
    "final_y",
    "reached",
)
N_STATS = len(STAT_COLUMNS)

MODE_STEPS = 0
MODE_VERTICAL = 1


@njit(cache=True, nogil=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * _MIX_A
    z = (z ^ (z >> U64(27))) * _MIX_B
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (U64(64) - k))


@njit(cache=True, nogil=True, inline="always")
def _next64(s0, s1, s2, s3):
    out = _rotl(s1 * U64(5), U64(7)) * U64(9)
    t = s1 << U64(17)
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, U64(45))
    return s0, s1, s2, s3, out


@njit(cache=True, nogil=True, inline="always")
def _seed_state(seed):
    z = seed + GOLDEN
    s0 = _mix64(z)
    z = z + GOLDEN
    s1 = _mix64(z)
    z = z + GOLDEN
    s2 = _mix64(z)
    z = z + GOLDEN
    s3 = _mix64(z)
    if s0 | s1 | s2 | s3 == U64(0):
        s0 = GOLDEN
    return s0, s1, s2, s3


@njit(cache=True, nogil=True, inline="always")
def _replicate_seed(master, index):
    return _mix64(master ^ (index * GOLDEN))


@njit(cache=True, nogil=True)
def replicate_seed_kernel(master, index):
    return _replicate_seed(U64(master), U64(index))


@njit(cache=True, nogil=True)
def replicate_seed_scan(master, start, count, out):
    """Fill ``out`` with per-replicate seeds (for collision/bit scans)."""
    m = U64(master)
    for i in range(count):
        out[i] = _replicate_seed(m, U64(start + i))


@njit(cache=True, nogil=True)
def _walk_core(s0, s1, s2, s3, buf, nb,
               mode, limit, cl, fl,
               use_target, tx, ty,
               pos, neg, cap):
    """One instrumented walk from the origin (the hot loop).

    ``cl``/``fl`` are integer class bounds for the rule's horizon: a tooth
    site at height j is close iff j <= cl and far iff j > fl.  ``pos`` and
    ``neg`` are per-column tooth spans indexed by x + cap; they must be
    all-zero on entry and are reset before returning (the reset shares the
    final sweep that tallies the site classes).
    """
    x = 0
    y = 0
    bbmin = 0
    bbmax = 0
    visited = 1
    horiz = 0
    vert = 0
    entries = 1
    entry_step = 0  # move index of the latest backbone entry; 0 = the start

    while True:
        if mode == MODE_STEPS:
            if horiz + vert >= limit:
                break
        else:
            if vert >= limit:
                break
        if y == 0:
            if nb < 2:
                s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
                nb = 64
            cv = buf & U64(3)
            buf = buf >> U64(2)
            nb -= 2
            if cv < U64(2):
                if cv == U64(0):
                    x += 1
                    if x > bbmax:
                        bbmax = x
                        visited += 1
                else:
                    x -= 1
                    if x < bbmin:
                        bbmin = x
                        visited += 1
                horiz += 1
                if x > cap or -x > cap:
                    ncap = cap * 2
                    if ncap < x:
                        ncap = x
                    if ncap < -x:
                        ncap = -x
                    npos = np.zeros(2 * ncap + 1, np.int64)
                    nneg = np.zeros(2 * ncap + 1, np.int64)
                    base = ncap - cap
                    for i in range(2 * cap + 1):
                        npos[base + i] = pos[i]
                        nneg[base + i] = neg[i]
                    pos = npos
                    neg = nneg
                    cap = ncap
            else:
                idx = x + cap
                if cv == U64(2):
                    y = 1
                    if pos[idx] < 1:
                        pos[idx] = 1
                        visited += 1
                else:
                    y = -1
                    if neg[idx] < 1:
                        neg[idx] = 1
                        visited += 1
                vert += 1
        else:
            if nb < 1:
                s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
                nb = 64
            bv = buf & U64(1)
            buf = buf >> U64(1)
            nb -= 1
            if bv == U64(0):
                y += 1
            else:
                y -= 1
            vert += 1
            if y != 0:
                idx = x + cap
                if y > 0:
                    if y > pos[idx]:
                        pos[idx] = y
                        visited += 1
                else:
                    if -y > neg[idx]:
                        neg[idx] = -y
                        visited += 1
            else:
                entries += 1
                entry_step = horiz + vert

    # the start counts as a backbone entry; the final position never does
    steps = horiz + vert
    if entries > 1 and entry_step == steps:
        entries -= 1
    c = bbmax - bbmin + 1

    ift = 0
    if y != 0:
        idx = x + cap
        span = pos[idx] if y > 0 else neg[idx]
        capped = fl if span > fl else span
        ift = capped - cl
        if ift < 0:
            ift = 0

    reached = 0
    if use_target:
        if bbmin <= tx <= bbmax:
            if ty == 0:
                reached = 1
            else:
                idx = tx + cap
                if ty > 0:
                    if pos[idx] >= ty:
                        reached = 1
                else:
                    if neg[idx] >= -ty:
                        reached = 1

    far = 0
    close = c
    for xx in range(bbmin, bbmax + 1):
        idx = xx + cap
        p = pos[idx]
        if p > 0:
            if p > fl:
                far += p - fl
            close += p if p < cl else cl
            pos[idx] = 0
        q = neg[idx]
        if q > 0:
            if q > fl:
                far += q - fl
            close += q if q < cl else cl
            neg[idx] = 0
    inter = visited - close - far

    return (visited, horiz, vert, steps, c, entries,
            far, close, inter, ift, x, y, reached,
            s0, s1, s2, s3, buf, nb, pos, neg, cap)


@njit(cache=True, nogil=True)
def walk_block(master, start, count, mode, limit, cl, fl, use_target, tx, ty, out):
    """Run ``count`` independent walks for replicate indices start..start+count-1.

    ``out`` is an int64 matrix of shape (count, N_STATS) filled in place.
    """
    cap = limit if limit < 64 else 64
    pos = np.zeros(2 * cap + 1, np.int64)
    neg = np.zeros(2 * cap + 1, np.int64)
    m = U64(master)
    for i in range(count):
        seed = _replicate_seed(m, U64(start + i))
        s0, s1, s2, s3 = _seed_state(seed)
        (v, h, ve, steps, c, d, far, close, inter, ift, fx, fy, rc,
         s0, s1, s2, s3, _buf, _nb, pos, neg, cap) = _walk_core(
            s0, s1, s2, s3, U64(0), 0,
            mode, limit, cl, fl, use_target, tx, ty, pos, neg, cap)
        out[i, 0] = v
        out[i, 1] = h
        out[i, 2] = ve
        out[i, 3] = steps
        out[i, 4] = c
        out[i, 5] = d
        out[i, 6] = far
        out[i, 7] = close
        out[i, 8] = inter
        out[i, 9] = ift
        out[i, 10] = fx
        out[i, 11] = fy
        out[i, 12] = rc


@njit(cache=True, nogil=True)
def walk_single(s0, s1, s2, s3, buf, nb, mode, limit, cl, fl, use_target, tx, ty):
    """One walk driven by an explicit RNG state; returns stats + new state."""
    cap = limit if limit < 64 else 64
    pos = np.zeros(2 * cap + 1, np.int64)
    neg = np.zeros(2 * cap + 1, np.int64)
    res = _walk_core(s0, s1, s2, s3, buf, nb,
                     mode, limit, cl, fl, use_target, tx, ty, pos, neg, cap)
    return res[:19]


@njit(cache=True, nogil=True)
def walk_record(seed, mode, limit, rec_ax, rec_dir, rec_x, rec_y):
    """Recorded walk: one entry per move (axis, direction, x, y after it).

    Stepping logic and bit consumption mirror `_walk_core` exactly (the
    differential tests enforce this).  Returns (status, moves) where
    status 1 means the record arrays were too small.
    """
    capacity = rec_x.shape[0]
    s0, s1, s2, s3 = _seed_state(U64(seed))
    buf = U64(0)
    nb = 0
    x = 0
    y = 0
    horiz = 0
    vert = 0
    nrec = 0
    while True:
        if mode == MODE_STEPS:
            if horiz + vert >= limit:
                break
        else:
            if vert >= limit:
                break
        if nrec >= capacity:
            return 1, nrec
        if y == 0:
            if nb < 2:
                s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
                nb = 64
            cv = buf & U64(3)
            buf = buf >> U64(2)
            nb -= 2
            if cv < U64(2):
                x += 1 if cv == U64(0) else -1
                horiz += 1
                rec_ax[nrec] = 0
                rec_dir[nrec] = 1 if cv == U64(0) else -1
            else:
                y = 1 if cv == U64(2) else -1
                vert += 1
                rec_ax[nrec] = 1
                rec_dir[nrec] = y
        else:
            if nb < 1:
                s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
                nb = 64
            bv = buf & U64(1)
            buf = buf >> U64(1)
            nb -= 1
            d = 1 if bv == U64(0) else -1
            y += d
            vert += 1
            rec_ax[nrec] = 1
            rec_dir[nrec] = d
        rec_x[nrec] = x
        rec_y[nrec] = y
        nrec += 1
    return 0, nrec


@njit(cache=True, nogil=True)
def range1d_block(master, start, count, nsteps, out):
    """Range (distinct sites) of 1-D simple random walks, one per replicate."""
    m = U64(master)
    for i in range(count):
        seed = _replicate_seed(m, U64(start + i))
        s0, s1, s2, s3 = _seed_state(seed)
        buf = U64(0)
        nb = 0
        p = 0
        mn = 0
        mx = 0
        for _ in range(nsteps):
            if nb < 1:
                s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
                nb = 64
            bv = buf & U64(1)
            buf = buf >> U64(1)
            nb -= 1
            if bv == U64(0):
                p += 1
                if p > mx:
                    mx = p
            else:
                p -= 1
                if p < mn:
                    mn = p
        out[i] = mx - mn + 1


@njit(cache=True, nogil=True)
def ruin_block(master, start, count, j, out):
    """Gambler's-ruin trials: does a walk from 0 reach j before returning to 0?

    A first step to -1 decides the trial immediately (the walk would have
    to pass through 0 again before ever reaching j > 0), which bounds every
    trial by the hitting time of {0, j}.
    """
    m = U64(master)
    for i in range(count):
        seed = _replicate_seed(m, U64(start + i))
        s0, s1, s2, s3 = _seed_state(seed)
        buf = U64(0)
        nb = 0
        if nb < 1:
            s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
            nb = 64
        bv = buf & U64(1)
        buf = buf >> U64(1)
        nb -= 1
        if bv != U64(0):
            out[i] = 0
            continue
        p = 1
        success = 1 if j == 1 else -1
        while success < 0:
            if nb < 1:
                s0, s1, s2, s3, buf = _next64(s0, s1, s2, s3)
                nb = 64
            bv = buf & U64(1)
            buf = buf >> U64(1)
            nb -= 1
            p = p + 1 if bv == U64(0) else p - 1
            if p == j:
                success = 1
            elif p == 0:
                success = 0
        out[i] = success


@njit(cache=True)
def range_dp(n):
    """Exact E[number of distinct sites] of an n-step 1-D walk.

    DP over (distance to running min, distance to running max); O(n^3)
    time, O(n^2) space.  Probabilities are dyadic, so float64 is exact for
    small n and drifts only at the 1e-15 level for n ~ 2000.
    """
    size = n + 2
    cur = np.zeros((size, size))
    nxt = np.zeros((size, size))
    cur[0, 0] = 1.0
    for s in range(n):
        for l in range(s + 1):
            for r in range(s - l + 1):
                w = cur[l, r]
                if w == 0.0:
                    continue
                half = 0.5 * w
                r2 = r - 1 if r > 0 else 0
                nxt[l + 1, r2] += half
                l2 = l - 1 if l > 0 else 0
                nxt[l2, r + 1] += half
                cur[l, r] = 0.0
        tmp = cur
        cur = nxt
        nxt = tmp
    total = 0.0
    for l in range(n + 1):
        for r in range(n + 1 - l):
            w = cur[l, r]
            if w != 0.0:
                total += w * (l + r + 1)
    return total


@njit(cache=True, nogil=True)
def welford_summary(arr):
    """Single-pass count/mean/M2/min/max over a float64 vector."""
    n = 0
    mean = 0.0
    m2 = 0.0
    mn = np.inf
    mx = -np.inf
    for i in range(arr.shape[0]):
        v = arr[i]
        n += 1
        d = v - mean
        mean += d / n
        m2 += d * (v - mean)
        if v < mn:
            mn = v
        if v > mx:
            mx = v
    return n, mean, m2, mn, mx
