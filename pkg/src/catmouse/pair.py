"""The cat-and-mouse pair chain built from any base kernel.

The cat follows the base kernel; the mouse moves only when the cat stands
on it, and then both move independently by the same row.  When both move,
the cat's draw consumes the stream first, then the mouse's, so trajectories
are reproducible bit-for-bit under a fixed stream.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .chains import FiniteChain, Measure
from .errors import ChainStructureError

PRODUCT_CAP = 64  # base states; the product space is capped at this squared


@dataclass
class CatMouseState:
    cat: object
    mouse: object
    clock: float = 0.0

    @property
    def together(self) -> bool:
        return self.cat == self.mouse


@dataclass(frozen=True)
class CycleRecord:
    """One meeting-to-meeting cycle.

    A cycle starts at a meeting instant, lasts through the together phase
    (``together_duration`` >= 1 steps, the only steps on which the mouse
    moves) and ends at the first meeting after separation
    (``apart_duration`` >= 1 steps).
    """

    together_duration: int
    apart_duration: int
    mouse_displacement: object


@dataclass
class CycleSample:
    records: list[CycleRecord]
    completed: bool
    steps_used: int
    # filled when the budget ran out during a together phase
    partial_together: int = 0


def cm_step(state: CatMouseState, base, rng: np.random.Generator) -> CatMouseState:
    """One transition of the pair chain (discrete time)."""
    if state.together:
        cat = base.step(state.cat, rng)
        mouse = base.step(state.mouse, rng)
        return CatMouseState(cat, mouse, state.clock)
    return CatMouseState(base.step(state.cat, rng), state.mouse, state.clock)


def cm_kernel(base: FiniteChain, cap: int = PRODUCT_CAP) -> FiniteChain:
    """Explicit kernel of the pair chain on the product space.

    Row at (x, y), x != y: the base row at x tensored with the point mass at
    y.  Row at (y, y): outer product of the base row at y with itself.  The
    product chain is generally reducible, so structure checks are recorded
    as flags only.
    """
    n = base.n_states
    if n > cap:
        raise ChainStructureError(
            f"product space {n}x{n} exceeds cap {cap}x{cap}; "
            "use Monte Carlo sampling instead of the explicit kernel")
    P = base.rows
    N = n * n
    Q = np.zeros((N, N))
    for x in range(n):
        for y in range(n):
            row = x * n + y
            if x != y:
                Q[row, np.arange(n) * n + y] = P[x]
            else:
                Q[row] = np.outer(P[y], P[y]).reshape(-1)
    labels = tuple((base.labels[i], base.labels[j]) for i in range(n) for j in range(n))
    return FiniteChain(Q, labels, allow_loops=not base.loop_free, require_ergodic=False)


def reachable_from_diagonal(pair_chain: FiniteChain, n_base: int) -> np.ndarray:
    """Boolean mask of product states reachable from the diagonal.

    For an irreducible aperiodic base every product state leads back to the
    diagonal, so this set is the unique closed (recurrent) class.
    """
    N = pair_chain.n_states
    seen = np.zeros(N, dtype=bool)
    stack = [i * n_base + i for i in range(n_base)]
    for s in stack:
        seen[s] = True
    rows = pair_chain.rows
    while stack:
        x = stack.pop()
        for y in np.nonzero(rows[x] > 0)[0]:
            if not seen[y]:
                seen[y] = True
                stack.append(int(y))
    return seen


def restricted_stationary(pair_chain: FiniteChain, mask: np.ndarray) -> np.ndarray:
    """Stationary vector of the pair chain supported on the masked class."""
    idx = np.where(mask)[0]
    sub = pair_chain.rows[np.ix_(idx, idx)]
    # rows restricted to a closed class remain stochastic
    chain = FiniteChain(sub, tuple(idx.tolist()), allow_loops=True,
                        require_ergodic=False)
    pi_sub = chain.stationary().values
    out = np.zeros(pair_chain.n_states)
    out[idx] = pi_sub
    return out


def simulate_pair(base, start: CatMouseState, steps: int,
                  rng: np.random.Generator):
    """Trajectory of the pair chain: arrays (cat, mouse) of length steps+1.

    Works for finite chains (integer states) and 1-d lattice domains.
    """
    cats = np.empty(steps + 1, dtype=np.int64)
    mice = np.empty(steps + 1, dtype=np.int64)
    c, m = start.cat, start.mouse
    cats[0], mice[0] = c, m
    for k in range(steps):
        if c == m:
            c = base.step(c, rng)
            m = base.step(m, rng)
        else:
            c = base.step(c, rng)
        cats[k + 1], mice[k + 1] = c, m
    return cats, mice


def simulate_cycles(base, start: CatMouseState, n_cycles: int,
                    rng: np.random.Generator,
                    step_budget: int = 10_000_000) -> CycleSample:
    """Record (together, apart, displacement) triples for successive cycles.

    If the step budget runs out before ``n_cycles`` complete, the partial
    result is returned with ``completed=False``.  The caller is responsible
    for the base chain being recurrent.
    """
    c, m = start.cat, start.mouse
    steps = 0
    records: list[CycleRecord] = []

    def sub(a, b):
        if isinstance(a, tuple):
            return tuple(ai - bi for ai, bi in zip(a, b))
        return a - b

    # run up to the first meeting without recording
    while c != m:
        if steps >= step_budget:
            return CycleSample(records, False, steps)
        c = base.step(c, rng)
        steps += 1

    while len(records) < n_cycles:
        m_start = m
        together = 0
        while c == m:
            if steps >= step_budget:
                return CycleSample(records, False, steps, partial_together=together)
            c = base.step(c, rng)
            m = base.step(m, rng)
            steps += 1
            together += 1
        apart = 0
        while c != m:
            if steps >= step_budget:
                return CycleSample(records, False, steps)
            c = base.step(c, rng)
            steps += 1
            apart += 1
        records.append(CycleRecord(together, apart, sub(m, m_start)))
    return CycleSample(records, True, steps)


def pair_occupation(base: FiniteChain, start: CatMouseState, steps: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Visit counts over the product space for a long pair trajectory."""
    n = base.n_states
    counts = np.zeros(n * n, dtype=np.int64)
    cum = np.cumsum(base.rows, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(2 * steps)  # at most two draws per step
    ui = 0
    c, m = int(start.cat), int(start.mouse)
    for _ in range(steps):
        if c == m:
            c = int(np.searchsorted(cum[c], u[ui], side="right"))
            m = int(np.searchsorted(cum[m], u[ui + 1], side="right"))
            ui += 2
        else:
            c = int(np.searchsorted(cum[c], u[ui], side="right"))
            ui += 1
        counts[c * n + m] += 1
    return counts


def mouse_move_instants(cats: np.ndarray, mice: np.ndarray) -> np.ndarray:
    """Indices k at which the mouse moved between k and k+1.

    On every such step the pre-step state had cat == mouse; asserting that
    is the caller's trajectory invariant.
    """
    moved = np.nonzero(mice[1:] != mice[:-1])[0]
    return moved
