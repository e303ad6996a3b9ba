"""Exact invariant measure of the pair chain on finite state spaces.

For an irreducible loop-free base with stationary law pi, the pair chain is
fixed by the measure

    nu(x, y) = pi(x) * g_y(x),

where g_y solves, on the reversed kernel p*,

    g_y(x) = sum_z p*(x, z) [ p(z, y) + 1_{z != y} g_y(z) ],

i.e. the expected accumulated one-step mass into y along the reversed chain
up to its first visit to y.  The diagonal reproduces pi, the row sums are
alpha * pi(x) for a constant alpha equal to the total mass of nu, and alpha
is at most N-1 with equality exactly in the reversible case.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import FiniteChain, Measure
from .errors import ChainStructureError, SolverError
from .pair import cm_kernel, reachable_from_diagonal, restricted_stationary


@dataclass(frozen=True)
class NuTable:
    """nu over the product space plus its marginals and total mass."""

    nu: np.ndarray          # (N, N): nu[x, y]
    nu2: np.ndarray         # second-coordinate marginal
    alpha: float            # total mass; also row-sum constant
    pi: np.ndarray
    labels: tuple

    def diag_residual(self) -> float:
        return float(np.max(np.abs(np.diag(self.nu) - self.pi)))

    def rowsum_residual(self) -> float:
        return float(np.max(np.abs(self.nu.sum(axis=1) - self.alpha * self.pi)))


def nu_exact(base: FiniteChain) -> NuTable:
    """Solve for nu target column by target column (N solves of size N)."""
    if not base.loop_free:
        raise ChainStructureError("nu_exact requires a loop-free kernel")
    if not base.irreducible:
        raise ChainStructureError("nu_exact requires an irreducible kernel")
    n = base.n_states
    pi = base.stationary().values
    pstar = base.reversed_chain(Measure(pi, base.labels, normalized=True)).rows
    P = base.rows
    nu = np.empty((n, n))
    eye = np.eye(n)
    for y in range(n):
        A = pstar.copy()
        A[:, y] = 0.0
        b = pstar @ P[:, y]
        try:
            g = np.linalg.solve(eye - A, b)
        except np.linalg.LinAlgError as exc:
            raise SolverError(
                f"nu solve for target {base.labels[y]!r} failed "
                f"(cond ~ {np.linalg.cond(eye - A):.3e})") from exc
        nu[:, y] = pi * g
    nu2 = nu.sum(axis=0)
    alpha = float(nu2.sum())
    return NuTable(nu, nu2, alpha, pi, base.labels)


def nu2_direct(base: FiniteChain) -> Measure:
    """Second marginal by the independent forward route.

    nu2(y) = sum_x pi(x) p(x, y) E_x(H_y), using the hitting-time solver on
    the forward chain; cross-checks the reversed-chain route.
    """
    n = base.n_states
    pi = base.stationary().values
    vals = np.empty(n)
    for y in range(n):
        h = base.expected_hitting_times(y)
        vals[y] = float(np.sum(pi * base.rows[:, y] * h))
    return Measure(vals, base.labels)


def verify_invariance(nu: np.ndarray, base: FiniteChain) -> float:
    """Max residual of the pair-chain balance equations.

    nu(x, y) = sum_{z != y} nu(z, y) p(z, x) + sum_z nu(z, z) p(z, x) p(z, y).
    """
    P = base.rows
    d = np.diag(nu).copy()
    off = nu.copy()
    np.fill_diagonal(off, 0.0)  # kills exactly the z == y term of the first sum
    stay = P.T @ off
    meet = P.T @ (d[:, None] * P)
    resid = np.abs(stay + meet - nu)
    return float(resid.max())


def tetali_bound_check(base: FiniteChain, tol: float = 1e-9):
    """alpha <= N - 1, with equality flagged for reversible kernels."""
    table = nu_exact(base)
    n = base.n_states
    passed = table.alpha <= n - 1 + tol
    reversible = base.is_reversible()
    equality = abs(table.alpha - (n - 1)) <= tol
    return table.alpha, n - 1, passed, reversible, equality


def limit_law_finite(base: FiniteChain, cap: int = 64):
    """Limit law nu/alpha of the pair chain, cross-checked per product space.

    Returns (law, pair_chain, pi_pair) where ``law`` is nu/alpha as an
    (N, N) array and ``pi_pair`` is the stationary vector of the explicit
    product kernel restricted to the class reachable from the diagonal
    (zero elsewhere).
    """
    table = nu_exact(base)
    law = table.nu / table.alpha
    pair = cm_kernel(base, cap)
    mask = reachable_from_diagonal(pair, base.n_states)
    pi_pair = restricted_stationary(pair, mask)
    return law, pair, pi_pair
