"""Finite Markov kernels: construction, stationary solve, reversal, hitting times.

Kernels are stored dense; every state space in scope is small enough
(hundreds of states) that direct solves are simpler and exactly testable.
All objects are immutable after construction and safe to share across
workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ChainStructureError, SolverError

ROW_SUM_TOL = 1e-12
MASS_TOL = 1e-10


@dataclass(frozen=True)
class Measure:
    """Weighted map over the states of a chain, possibly unnormalized."""

    values: np.ndarray
    labels: tuple = ()
    normalized: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if np.any(v < -MASS_TOL):
            raise ValueError("measure weights must be nonnegative")
        if self.normalized and abs(v.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"normalized measure has mass {v.sum()!r}")

    @property
    def total(self) -> float:
        return float(self.values.sum())

    def normalize(self) -> "Measure":
        return Measure(self.values / self.values.sum(), self.labels, normalized=True)

    def as_dict(self) -> dict:
        labels = self.labels if self.labels else range(len(self.values))
        return {k: float(v) for k, v in zip(labels, self.values)}


def _reachable(adj: list[list[int]], start: int) -> np.ndarray:
    n = len(adj)
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    return seen


def _period_through(adj: list[list[int]], start: int) -> int:
    """gcd of cycle lengths through ``start`` via BFS level differences."""
    import math

    n = len(adj)
    level = -np.ones(n, dtype=np.int64)
    level[start] = 0
    queue = [start]
    g = 0
    while queue:
        nxt = []
        for x in queue:
            for y in adj[x]:
                if level[y] < 0:
                    level[y] = level[x] + 1
                    nxt.append(y)
                else:
                    g = math.gcd(g, int(level[x] + 1 - level[y]))
        queue = nxt
    return g if g > 0 else 0


class FiniteChain:
    """Dense row-stochastic kernel over an indexed finite state space.

    Rows must sum to 1 within 1e-12.  The diagonal is required to be exactly
    zero unless ``allow_loops=True``; the boundary-reflected and relative
    kernels are the only in-scope chains that hold mass in place.
    Irreducibility and aperiodicity are checked at construction by graph
    reachability and the gcd of cycle lengths; with ``require_ergodic=True``
    (the default) a violation raises :class:`ChainStructureError`, otherwise
    the outcome is recorded in the ``irreducible``/``aperiodic`` flags.
    """

    def __init__(self, rows: np.ndarray, labels: Sequence | None = None, *,
                 allow_loops: bool = False, require_ergodic: bool = True):
        P = np.array(rows, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ChainStructureError(f"kernel must be square, got shape {P.shape}")
        n = P.shape[0]
        if n < 1:
            raise ChainStructureError("empty state space")
        if np.any(P < 0):
            raise ChainStructureError("negative transition probability")
        bad = np.where(np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise ChainStructureError(
                f"rows {bad.tolist()} do not sum to 1 within {ROW_SUM_TOL}")
        diag = np.abs(np.diag(P))
        if not allow_loops and np.any(diag > 0):
            loops = np.where(diag > 0)[0]
            raise ChainStructureError(
                f"diagonal entries must be exactly 0 (loops at {loops.tolist()}); "
                "pass allow_loops=True for kernels that hold mass in place")
        self.rows = P
        self.rows.setflags(write=False)
        self.n_states = n
        self.labels = tuple(labels) if labels is not None else tuple(range(n))
        if len(self.labels) != n:
            raise ChainStructureError("labels length does not match state count")

        adj = [np.nonzero(P[i] > 0)[0].tolist() for i in range(n)]
        fwd = _reachable(adj, 0)
        radj = [np.nonzero(P[:, j] > 0)[0].tolist() for j in range(n)]
        bwd = _reachable(radj, 0)
        self.irreducible = bool(fwd.all() and bwd.all())
        self.unreachable_states = tuple(np.where(~(fwd & bwd))[0].tolist())
        period = _period_through(adj, 0) if self.irreducible else 0
        self.period = period
        self.aperiodic = self.irreducible and period == 1
        self.loop_free = not np.any(diag > 0)
        if require_ergodic:
            if not self.irreducible:
                names = [self.labels[i] for i in self.unreachable_states]
                raise ChainStructureError(
                    f"chain is reducible; states not communicating with "
                    f"{self.labels[0]!r}: {names!r}")
            if not self.aperiodic:
                raise ChainStructureError(f"chain is periodic with period {period}")

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown state label {label!r}") from None

    # ------------------------------------------------------------------
    def stationary(self) -> Measure:
        """Unique probability vector with pi P = pi.

        Solved directly by replacing one balance equation with the
        normalization constraint; no power iteration, so the residual is at
        solver precision and usable as an oracle downstream.
        """
        if not self.irreducible:
            names = [self.labels[i] for i in self.unreachable_states]
            raise ChainStructureError(
                f"stationary distribution undefined: unreachable states {names!r}")
        n = self.n_states
        A = (self.rows.T - np.eye(n)).copy()
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            pi = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"stationary solve failed: {exc}") from exc
        resid = float(np.max(np.abs(pi @ self.rows - pi)))
        if resid > 1e-12:
            raise SolverError(f"stationary residual {resid:.3e} above 1e-12 "
                              f"(condition ~ {np.linalg.cond(A):.3e})")
        pi = np.maximum(pi, 0.0)
        return Measure(pi / pi.sum(), self.labels, normalized=True)

    def reversed_chain(self, pi: Measure | None = None) -> "FiniteChain":
        """Time reversal p*(x,y) = pi(y) p(y,x) / pi(x)."""
        if pi is None:
            pi = self.stationary()
        w = np.asarray(pi.values, dtype=float)
        if np.any(w <= 0):
            raise ChainStructureError("reversal requires strictly positive stationary mass")
        Pstar = (self.rows.T * w[None, :]) / w[:, None]
        # rescale away float rounding so the result passes construction checks
        Pstar = Pstar / Pstar.sum(axis=1, keepdims=True)
        return FiniteChain(Pstar, self.labels, allow_loops=not self.loop_free,
                           require_ergodic=False)

    def is_reversible(self, pi: Measure | None = None, tol: float = 1e-11) -> bool:
        """Detailed balance pi(x) p(x,y) = pi(y) p(y,x) within ``tol``."""
        if pi is None:
            pi = self.stationary()
        w = pi.values
        flow = w[:, None] * self.rows
        return bool(np.max(np.abs(flow - flow.T)) <= tol)

    def expected_hitting_times(self, target: int) -> np.ndarray:
        """E_x(H_target) for every x, where H is the first time n > 0 at target.

        The entry at ``target`` is the mean return time 1/pi(target).  Solves
        h(x) = 1 + sum_{z != target} p(x,z) h(z) over x != target, then reads
        off the return time from the same relation at x = target.
        """
        if not self.irreducible:
            raise ChainStructureError("hitting times need an irreducible chain")
        n = self.n_states
        keep = np.arange(n) != target
        A = np.eye(n - 1) - self.rows[np.ix_(keep, keep)]
        b = np.ones(n - 1)
        try:
            h_other = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise SolverError(
                f"hitting-time system singular (cond ~ {np.linalg.cond(A):.3e})") from exc
        h = np.empty(n)
        h[keep] = h_other
        h[target] = 1.0 + self.rows[target, keep] @ h_other
        return h

    def sample_path(self, start: int, steps: int, rng: np.random.Generator) -> np.ndarray:
        """Path of length steps+1; deterministic under a fixed stream."""
        cum = np.cumsum(self.rows, axis=1)
        cum[:, -1] = 1.0
        u = rng.random(steps)
        path = np.empty(steps + 1, dtype=np.int64)
        x = int(start)
        if not 0 <= x < self.n_states:
            raise ValueError(f"start state {start} out of range")
        path[0] = x
        for k in range(steps):
            x = int(np.searchsorted(cum[x], u[k], side="right"))
            path[k + 1] = x
        return path

    def step(self, x: int, rng: np.random.Generator) -> int:
        u = rng.random()
        return int(np.searchsorted(np.cumsum(self.rows[x]), u, side="right"))


# ----------------------------------------------------------------------
# File format: first line n, then n whitespace-separated rows.
def load_matrix_file(path: str | Path, labels_path: str | Path | None = None,
                     **kwargs) -> FiniteChain:
    toks = Path(path).read_text().split()
    if not toks:
        raise ChainStructureError(f"empty matrix file {path}")
    n = int(toks[0])
    vals = [float(t) for t in toks[1:]]
    if len(vals) != n * n:
        raise ChainStructureError(
            f"matrix file {path}: expected {n * n} entries, found {len(vals)}")
    rows = np.array(vals, dtype=float).reshape(n, n)
    labels = None
    if labels_path is not None:
        labels = [ln.strip() for ln in Path(labels_path).read_text().splitlines()
                  if ln.strip()]
    return FiniteChain(rows, labels, **kwargs)


def save_matrix_file(chain: FiniteChain, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{chain.n_states}\n")
        for row in chain.rows:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


# ----------------------------------------------------------------------
# Generators for tests and property sweeps.
def random_chain(n: int, rng: np.random.Generator, max_tries: int = 200) -> FiniteChain:
    """Random kernel: rows uniform on the simplex, diagonal zeroed, renormalized.

    Rejection-sampled until irreducible and aperiodic.
    """
    for _ in range(max_tries):
        rows = rng.gamma(1.0, 1.0, (n, n))
        np.fill_diagonal(rows, 0.0)
        rows /= rows.sum(axis=1, keepdims=True)
        try:
            return FiniteChain(rows)
        except ChainStructureError:
            continue
    raise ChainStructureError(f"no ergodic chain found in {max_tries} tries")


def random_reversible_chain(n: int, rng: np.random.Generator,
                            max_tries: int = 200) -> FiniteChain:
    """Reversible kernel from symmetric positive edge weights, zero diagonal."""
    for _ in range(max_tries):
        w = rng.gamma(1.0, 1.0, (n, n))
        w = w + w.T
        np.fill_diagonal(w, 0.0)
        rows = w / w.sum(axis=1, keepdims=True)
        try:
            return FiniteChain(rows)
        except ChainStructureError:
            continue
    raise ChainStructureError(f"no ergodic reversible chain found in {max_tries} tries")


def ring_chain(n: int, p_forward: float = 0.5) -> FiniteChain:
    """n-cycle with clockwise probability p_forward, anticlockwise 1-p_forward."""
    rows = np.zeros((n, n))
    for i in range(n):
        rows[i, (i + 1) % n] = p_forward
        rows[i, (i - 1) % n] = 1.0 - p_forward
    return FiniteChain(rows, require_ergodic=(n % 2 == 1))


def r_cycles_chain(sizes: Sequence[int]) -> FiniteChain:
    """Cycles joined at a hub 0: deterministic walk down each cycle, uniform exit.

    States are ordered 0, (1,1)..(1,m1), (2,1)..(2,m2), ...; the hub jumps to
    cycle entry (k, m_k) with probability 1/r and (k,i) steps to (k,i-1),
    with (k,1) back to the hub.
    """
    r = len(sizes)
    labels: list = [0] + [(k + 1, i + 1) for k in range(r) for i in range(sizes[k])]
    n = len(labels)
    idx = {lab: j for j, lab in enumerate(labels)}
    rows = np.zeros((n, n))
    for k in range(1, r + 1):
        mk = sizes[k - 1]
        rows[0, idx[(k, mk)]] = 1.0 / r
        for i in range(2, mk + 1):
            rows[idx[(k, i)], idx[(k, i - 1)]] = 1.0
        rows[idx[(k, 1)], 0] = 1.0
    return FiniteChain(rows, labels)


def truncated_reflected_chain(p: float, cutoff: int) -> FiniteChain:
    """Reflected walk on {0..cutoff}: mass held at 0 and reflected back at the cutoff.

    Both boundary states hold mass in place, so this kernel has loops.
    """
    if not 0 < p < 0.5:
        raise ValueError("p must lie in (0, 1/2)")
    n = cutoff + 1
    rows = np.zeros((n, n))
    rows[0, 0] = 1.0 - p
    rows[0, 1] = p
    for x in range(1, cutoff):
        rows[x, x + 1] = p
        rows[x, x - 1] = 1.0 - p
    rows[cutoff, cutoff - 1] = 1.0 - p
    rows[cutoff, cutoff] = p
    return FiniteChain(rows, allow_loops=True)
