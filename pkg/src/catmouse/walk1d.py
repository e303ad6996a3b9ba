"""Symmetric walk on Z: exact cycle renewal machinery and scaling samplers.

The pair started together decomposes into i.i.d. cycles: a together phase
of geometric length G (P(G >= k) = 2^{1-k}), during which the mouse makes G
walk steps, then an apart phase distributed as the hitting time of 0 from 2,
T2 = T1 + T1'.  Everything here samples those building blocks exactly, so
horizons of 10^8 steps cost O(sqrt(n)) draws per replica instead of O(n).

T1 (first passage one step down) is sampled by inverting its survival
function P(T1 > 2j-1) = C(2j, j) 4^{-j}: a cumulative-product table covers
j <= 2^20 and a lgamma bisection handles the far tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .pair import CycleRecord

_TABLE_SIZE = 1 << 20
_table: np.ndarray | None = None


def _survival_table() -> np.ndarray:
    """s[j] = P(T1 > 2j - 1) for j = 0.._TABLE_SIZE."""
    global _table
    if _table is None:
        j = np.arange(1, _TABLE_SIZE + 1, dtype=float)
        factors = (2 * j - 1) / (2 * j)
        s = np.empty(_TABLE_SIZE + 1)
        s[0] = 1.0
        np.cumprod(factors, out=s[1:])
        _table = s
    return _table


def _survival(j: np.ndarray) -> np.ndarray:
    """P(T1 > 2j - 1) via lgamma, for indices beyond the table."""
    j = np.asarray(j, dtype=float)
    return np.exp(gammaln(2 * j + 1) - 2 * gammaln(j + 1) - 2 * j * np.log(2.0))


def sample_t1(size: int, rng: np.random.Generator,
              cap: int | None = None) -> np.ndarray:
    """Exact samples of T1; values above ``cap`` come back as cap + 2.

    Capping is distribution-preserving for renewal accumulation up to a
    horizon of ``cap`` steps: any capped value already overshoots it.
    """
    s = _survival_table()
    u = rng.random(size)
    out = np.empty(size, dtype=np.int64)

    if cap is not None:
        jcap = (cap + 1) // 2 + 1
        if jcap <= _TABLE_SIZE:
            capped = u <= s[jcap]
        else:
            capped = u <= _survival(np.array([jcap]))[0]
        out[capped] = cap + 2
    else:
        capped = np.zeros(size, dtype=bool)

    body = ~capped & (u > s[-1])
    # smallest j with s[j] < u  <=>  first index in ascending -s with -s > -u
    jb = np.searchsorted(-s, -u[body], side="right")
    out[body] = 2 * jb - 1

    tail = ~capped & ~body
    if np.any(tail):
        ut = u[tail]
        lo = np.full(ut.size, _TABLE_SIZE, dtype=np.int64)
        hi_bound = (cap + 1) // 2 + 2 if cap is not None else None
        hi = np.ceil(4.0 / (np.pi * ut**2)).astype(np.int64) + 16
        if hi_bound is not None:
            hi = np.minimum(hi, hi_bound)
        while np.any(hi - lo > 1):
            mid = (lo + hi) // 2
            below = _survival(mid) < ut
            hi = np.where(below, mid, hi)
            lo = np.where(below, lo, mid)
        out[tail] = 2 * hi - 1
    return out


def sample_t2(size: int, rng: np.random.Generator,
              cap: int | None = None) -> np.ndarray:
    """Hitting time of 0 from 2: sum of two independent T1 draws."""
    return sample_t1(size, rng, cap) + sample_t1(size, rng, cap)


def hitting_gf_exact(u: float) -> float:
    """E(u^{T1}) = (1 - sqrt(1 - u^2)) / u for u in (0, 1]."""
    if not 0.0 < u <= 1.0:
        raise ValueError("u must lie in (0, 1]")
    return (1.0 - np.sqrt(1.0 - u * u)) / u


def hitting_gf_check(u: float, samples: int, rng: np.random.Generator):
    """Monte Carlo E(u^{T1}) with standard error, plus the closed form."""
    t1 = sample_t1(samples, rng)
    vals = u ** t1.astype(float)
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples)), hitting_gf_exact(u)


def simulate_cycles_z(n_cycles: int, rng: np.random.Generator) -> list[CycleRecord]:
    """Exact i.i.d. cycle records for the pair on Z started together."""
    g = rng.geometric(0.5, n_cycles).astype(np.int64)
    apart = sample_t2(n_cycles, rng)
    disp = 2 * rng.binomial(g, 0.5) - g
    return [CycleRecord(int(gi), int(ai), int(di))
            for gi, ai, di in zip(g, apart, disp)]


# ----------------------------------------------------------------------
# Renewal accumulation to a fixed horizon, vectorized over replicas.

@dataclass
class CycleCrossing:
    """Per-replica cycle state at a fixed step horizon."""

    completed: np.ndarray      # cycles fully before the horizon (nu_n)
    mouse_steps: np.ndarray    # kappa at the horizon
    counter_t2: np.ndarray | None = None  # renewal count of (2 + T2) if tracked


def _topup_row(time_acc, g_acc, horizon, rng):
    """Scalar fallback when a replica overruns the preallocated block."""
    completed = 0
    while True:
        g = int(rng.geometric(0.5))
        t2 = int(sample_t2(1, rng, cap=horizon)[0])
        if time_acc + g + t2 > horizon:
            offset = horizon - time_acc
            kappa = g_acc + min(offset, g)
            return completed, kappa, time_acc, g_acc, g, t2
        time_acc += g + t2
        g_acc += g
        completed += 1


def cycle_crossing(horizon: int, replicas: int, rng: np.random.Generator,
                   block: int | None = None, chunk: int = 512) -> CycleCrossing:
    """Run the (G, T2) renewal to ``horizon`` steps for every replica.

    Returns the number of completed cycles and the exact number of mouse
    steps kappa at the horizon (together phases count toward kappa step by
    step).  The bracketing sum_{l <= nu} G_l <= kappa <= sum_{l <= nu+1} G_l
    is asserted on every replica.
    """
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    est = 0.45 * np.sqrt(max(horizon, 1))
    if block is None:
        block = int(est + 4.0 * est + 64)
    completed = np.empty(replicas, dtype=np.int64)
    kappa = np.empty(replicas, dtype=np.int64)

    for lo in range(0, replicas, chunk):
        m = min(chunk, replicas - lo)
        g = rng.geometric(0.5, (m, block)).astype(np.int64)
        t2 = (sample_t1(m * block, rng, cap=horizon)
              + sample_t1(m * block, rng, cap=horizon)).reshape(m, block)
        cyc = g + t2
        ctime = np.cumsum(cyc, axis=1)
        cg = np.cumsum(g, axis=1)
        # first cycle index that overruns the horizon
        idx = (ctime <= horizon).sum(axis=1)
        for i in range(m):
            k = int(idx[i])
            if k >= block:
                # extremely rare: finish this replica with scalar draws
                time_acc = int(ctime[i, -1])
                g_acc = int(cg[i, -1])
                extra, kap, *_ = _topup_row(time_acc, g_acc, horizon, rng)
                completed[lo + i] = block + extra
                kappa[lo + i] = kap
                continue
            t_before = int(ctime[i, k - 1]) if k > 0 else 0
            g_before = int(cg[i, k - 1]) if k > 0 else 0
            offset = horizon - t_before
            kap = g_before + min(offset, int(g[i, k]))
            completed[lo + i] = k
            kappa[lo + i] = kap
            assert g_before <= kap <= g_before + int(g[i, k])
    return CycleCrossing(completed, kappa)


def renewal_count_t2(horizon_steps: np.ndarray, replicas: int,
                     rng: np.random.Generator, chunk: int = 512) -> np.ndarray:
    """Counts u of completed (2 + T2) renewals below each horizon in a grid.

    ``horizon_steps`` is an increasing integer grid; the result has shape
    (replicas, len(grid)).
    """
    grid = np.asarray(horizon_steps, dtype=np.int64)
    hmax = int(grid[-1])
    est = 0.45 * np.sqrt(max(hmax, 1))
    block = int(5.0 * est + 64)
    out = np.empty((replicas, grid.size), dtype=np.int64)
    for lo in range(0, replicas, chunk):
        m = min(chunk, replicas - lo)
        t2 = (sample_t1(m * block, rng, cap=hmax)
              + sample_t1(m * block, rng, cap=hmax)).reshape(m, block)
        ctime = np.cumsum(2 + t2, axis=1)
        if np.any(ctime[:, -1] < hmax):
            # top up the stragglers one by one (probability ~ 1e-9 per replica)
            for i in np.nonzero(ctime[:, -1] < hmax)[0]:
                acc = int(ctime[i, -1])
                extra = []
                while acc < hmax:
                    v = int(2 + sample_t2(1, rng, cap=hmax)[0])
                    acc += v
                    extra.append(acc)
                ct = np.concatenate([ctime[i], np.asarray(extra, dtype=np.int64)])
                out[lo + i] = np.searchsorted(ct, grid, side="left")
                continue
        out[lo:lo + m] = (ctime[:, :, None] < grid[None, None, :]).sum(axis=1)
    return out


def meeting_counter(n: int, t_grid, replicas: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Scaled meeting counts u_{floor(n t)} / sqrt(n) on a time grid."""
    t = np.asarray(t_grid, dtype=float)
    if np.any(t < 0):
        raise ValueError("time grid must be nonnegative")
    grid = np.floor(n * t).astype(np.int64)
    counts = np.zeros((replicas, t.size), dtype=np.int64)
    pos = grid > 0
    if np.any(pos):
        counts[:, pos] = renewal_count_t2(grid[pos], replicas, rng)
    return counts / np.sqrt(n)


def scaling_1d(n: int, t: float, replicas: int,
               rng: np.random.Generator) -> np.ndarray:
    """Samples of M_{floor(n t)} / n^{1/4} for the pair started at (0, 0).

    The mouse's successive moves form an independent symmetric walk, so its
    position after kappa moves is 2 Binomial(kappa, 1/2) - kappa.
    """
    horizon = int(np.floor(n * t))
    crossing = cycle_crossing(horizon, replicas, rng)
    kappa = crossing.mouse_steps
    m = 2 * rng.binomial(kappa, 0.5) - kappa
    return m / n ** 0.25
