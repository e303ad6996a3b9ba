"""Exact samplers for the limit laws used as comparison targets.

These are constructed independently of any chain simulation:

* ``half_normal(t)``       -- |N(0, t)|, the law of Brownian local time at 0
                              by time t (Levy's identity).
* ``brownian_at_local_time(t)`` -- B1(L) with L = |sqrt(t) Z2|, X = sqrt(L) Z1,
                              the one-dimensional mouse limit.
* ``bilateral_exponential(alpha0, t)`` -- Laplace density
                              alpha0/(2 sqrt(t)) exp(-alpha0 |y| / sqrt(t)),
                              the planar single-coordinate limit.
"""

from __future__ import annotations

import numpy as np


def half_normal(t: float, size: int, rng: np.random.Generator) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be nonnegative")
    return np.abs(np.sqrt(t) * rng.standard_normal(size))


def half_normal_cdf(t: float):
    from scipy.special import erf

    def cdf(x):
        x = np.asarray(x, dtype=float)
        if t == 0:
            return (x >= 0).astype(float)
        return np.where(x < 0, 0.0, erf(x / np.sqrt(2.0 * t)))

    return cdf


def brownian_at_local_time(t: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Sample B1(L_{B2}(t)): L = |sqrt(t) Z2|, X = sqrt(L) Z1."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    local = np.abs(np.sqrt(t) * rng.standard_normal(size))
    return np.sqrt(local) * rng.standard_normal(size)


def bilateral_exponential(alpha0: float, t: float, size: int,
                          rng: np.random.Generator) -> np.ndarray:
    if alpha0 <= 0 or t < 0:
        raise ValueError("alpha0 must be positive and t nonnegative")
    if t == 0:
        return np.zeros(size)
    return rng.laplace(0.0, np.sqrt(t) / alpha0, size)


def bilateral_exponential_cdf(alpha0: float, t: float):
    scale = np.sqrt(t) / alpha0

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.5 * np.exp(x / scale), 1.0 - 0.5 * np.exp(-x / scale))

    return cdf


def exponential_cdf(mean: float):
    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, 1.0 - np.exp(-x / mean))

    return cdf


def power_cdf(rho: float):
    """CDF x^rho on [0, 1] (multiplicative-jump limit of the mouse level)."""

    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.clip(x, 0.0, 1.0) ** rho

    return cdf
