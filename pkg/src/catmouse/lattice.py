"""Rule-based kernels over countable lattice domains.

Each domain exposes ``neighbors(x)`` as an explicit (state, weight) list so
tests can assert the transition rule, plus sampling helpers.  Weights are
probabilities for the discrete-time walks and rates for the M/M/infinity
process.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChainStructureError


class ZLine:
    """Symmetric nearest-neighbour walk on the integers."""

    continuous_time = False

    def neighbors(self, x: int) -> list[tuple[int, float]]:
        return [(x - 1, 0.5), (x + 1, 0.5)]

    def step(self, x: int, rng: np.random.Generator) -> int:
        return x + (1 if rng.random() < 0.5 else -1)

    def sample_path(self, start: int, steps: int, rng: np.random.Generator) -> np.ndarray:
        incr = rng.integers(0, 2, steps, dtype=np.int64) * 2 - 1
        path = np.empty(steps + 1, dtype=np.int64)
        path[0] = start
        np.cumsum(incr, out=path[1:])
        path[1:] += start
        return path


class Z2Plane:
    """Symmetric nearest-neighbour walk on the planar lattice."""

    continuous_time = False
    # direction codes 0..3
    DX = np.array([1, -1, 0, 0], dtype=np.int64)
    DY = np.array([0, 0, 1, -1], dtype=np.int64)

    def neighbors(self, x: tuple[int, int]) -> list[tuple[tuple[int, int], float]]:
        a, b = x
        return [((a + 1, b), 0.25), ((a - 1, b), 0.25),
                ((a, b + 1), 0.25), ((a, b - 1), 0.25)]

    def step(self, x: tuple[int, int], rng: np.random.Generator) -> tuple[int, int]:
        d = int(rng.integers(0, 4))
        return (x[0] + int(self.DX[d]), x[1] + int(self.DY[d]))

    def sample_path(self, start: tuple[int, int], steps: int,
                    rng: np.random.Generator) -> np.ndarray:
        d = rng.integers(0, 4, steps)
        path = np.empty((steps + 1, 2), dtype=np.int64)
        path[0] = start
        np.cumsum(self.DX[d], out=path[1:, 0])
        np.cumsum(self.DY[d], out=path[1:, 1])
        path[1:, 0] += start[0]
        path[1:, 1] += start[1]
        return path


@dataclass(frozen=True)
class ReflectedWalk:
    """Walk on N with up-probability p, down 1-p, and mass 1-p held at 0.

    Ergodic for p < 1/2 with geometric stationary law (1-rho) rho^x,
    rho = p/(1-p).
    """

    p: float
    continuous_time = False

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise ChainStructureError("reflected walk requires 0 < p < 1/2")

    @property
    def rho(self) -> float:
        return self.p / (1.0 - self.p)

    def neighbors(self, x: int) -> list[tuple[int, float]]:
        if x == 0:
            return [(0, 1.0 - self.p), (1, self.p)]
        return [(x - 1, 1.0 - self.p), (x + 1, self.p)]

    def step(self, x: int, rng: np.random.Generator) -> int:
        up = rng.random() < self.p
        if x == 0:
            return 1 if up else 0
        return x + 1 if up else x - 1

    def sample_path(self, start: int, steps: int, rng: np.random.Generator) -> np.ndarray:
        """Skorohod representation: X_k = S_k + max(0, -min_{j<=k} S_j).

        Exactly matches the kernel: a down-step attempted at 0 leaves the
        state at 0.
        """
        incr = np.where(rng.random(steps) < self.p, 1, -1).astype(np.int64)
        s = np.empty(steps + 1, dtype=np.int64)
        s[0] = start
        np.cumsum(incr, out=s[1:])
        s[1:] += start
        running_min = np.minimum.accumulate(s)
        return s + np.maximum(0, -running_min)

    def stationary_pmf(self, x: np.ndarray) -> np.ndarray:
        r = self.rho
        return (1.0 - r) * r ** np.asarray(x, dtype=float)


@dataclass(frozen=True)
class MMInfinity:
    """Birth-death rates of the M/M/infinity queue: up rate rho, down rate x.

    The embedded jump chain moves up with probability rho/(rho+x).  The
    stationary law of the continuous-time process is Poisson(rho).
    """

    rho: float
    continuous_time = True

    def __post_init__(self):
        if self.rho <= 0:
            raise ChainStructureError("rho must be positive")

    def neighbors(self, x: int) -> list[tuple[int, float]]:
        if x == 0:
            return [(1, self.rho)]
        return [(x + 1, self.rho), (x - 1, float(x))]

    def total_rate(self, x: int) -> float:
        return self.rho + x

    def up_probability(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.rho / (self.rho + x)

    def embedded_step(self, x: int, rng: np.random.Generator) -> int:
        if x == 0:
            return 1
        return x + 1 if rng.random() < self.rho / (self.rho + x) else x - 1

    def step(self, x: int, rng: np.random.Generator) -> tuple[float, int]:
        """One exact event: (holding time, next state)."""
        q = self.total_rate(x)
        hold = rng.exponential(1.0 / q)
        return hold, self.embedded_step(x, rng)

    def stationary_pmf(self, x: np.ndarray) -> np.ndarray:
        from scipy.stats import poisson

        return poisson.pmf(np.asarray(x), self.rho)
