"""Statistical comparison toolkit used by every experiment.

All checks return a :class:`ComparisonVerdict` carrying the statistic, the
threshold, sample sizes and standard errors, so reports are self-describing
and re-runnable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps


@dataclass(frozen=True)
class ComparisonVerdict:
    """Outcome of one statistical comparison.

    ``passed`` is defined as ``value <= threshold``; callers that want a
    two-sided band encode it in ``value`` (e.g. absolute z-score vs 3).
    """

    name: str
    statistic: str  # one of: ks, chi-square, mean-3sigma, char-function, bound, trend
    value: float
    threshold: float
    sample_sizes: tuple[int, ...] = ()
    standard_error: float = float("nan")
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.threshold)

    def as_dict(self) -> dict:
        d = {
            "name": self.name,
            "statistic": self.statistic,
            "value": self.value,
            "threshold": self.threshold,
            "passed": self.passed,
            "sample_sizes": list(self.sample_sizes),
            "standard_error": self.standard_error,
        }
        d.update({f"detail.{k}": v for k, v in self.detail.items()})
        return d


def ks_distance(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray],
                threshold: float, name: str = "ks") -> ComparisonVerdict:
    """Sup-distance between the empirical CDF of ``samples`` and ``cdf``.

    Handles ties (discrete targets) by evaluating both one-sided gaps at
    every distinct sample value.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("ks_distance requires at least one sample")
    vals, counts = np.unique(x, return_counts=True)
    hi = np.cumsum(counts) / n          # F_n(v)
    lo = hi - counts / n                # F_n(v-)
    f = np.asarray(cdf(vals), dtype=float)
    d = float(np.max(np.maximum(np.abs(hi - f), np.abs(lo - f))))
    return ComparisonVerdict(name, "ks", d, threshold, (n,),
                             standard_error=0.5 / np.sqrt(n))


def ks_two_sample(a: np.ndarray, b: np.ndarray, threshold: float,
                  name: str = "ks2") -> ComparisonVerdict:
    """Two-sample sup-distance, tie-safe."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    allv = np.unique(np.concatenate([a, b]))
    fa = np.searchsorted(a, allv, side="right") / a.size
    fb = np.searchsorted(b, allv, side="right") / b.size
    d = float(np.max(np.abs(fa - fb)))
    se = 0.5 * np.sqrt(1.0 / a.size + 1.0 / b.size)
    return ComparisonVerdict(name, "ks", d, threshold, (a.size, b.size),
                             standard_error=se)


def chi_square_counts(observed: np.ndarray, expected: np.ndarray, level: float = 0.001,
                      name: str = "chi2", min_expected: float = 5.0) -> ComparisonVerdict:
    """Pearson chi-square of observed counts vs expected counts.

    Cells with expected count below ``min_expected`` are pooled into the
    last kept cell.  Passes iff the statistic is below the (1-level)
    quantile of chi2 with (cells-1) degrees of freedom.
    """
    obs = np.asarray(observed, dtype=float)
    exp = np.asarray(expected, dtype=float)
    if obs.shape != exp.shape:
        raise ValueError("observed/expected shape mismatch")
    order = np.argsort(-exp)
    obs, exp = obs[order], exp[order]
    keep = exp >= min_expected
    if keep.sum() < 2:
        raise ValueError("chi-square needs at least two well-populated cells")
    k = int(keep.sum())
    pooled_obs = np.concatenate([obs[:k - 1], [obs[k - 1:].sum()]])
    pooled_exp = np.concatenate([exp[:k - 1], [exp[k - 1:].sum()]])
    stat = float(np.sum((pooled_obs - pooled_exp) ** 2 / pooled_exp))
    dof = pooled_obs.size - 1
    crit = float(sps.chi2.ppf(1.0 - level, dof))
    return ComparisonVerdict(name, "chi-square", stat, crit,
                             (int(obs.sum()),),
                             detail={"dof": dof, "level": level})


def mean_vs_target(samples: np.ndarray, target: float, n_sigma: float = 3.0,
                   name: str = "mean") -> ComparisonVerdict:
    """|sample mean - target| measured in standard errors; passes iff <= n_sigma."""
    x = np.asarray(samples, dtype=float)
    n = x.size
    se = float(x.std(ddof=1) / np.sqrt(n))
    z = abs(float(x.mean()) - target) / se if se > 0 else float("inf")
    if se == 0 and float(x.mean()) == target:
        z = 0.0
    return ComparisonVerdict(name, "mean-3sigma", z, n_sigma, (n,),
                             standard_error=se,
                             detail={"mean": float(x.mean()), "target": target})


def value_vs_target(value: float, target: float, se: float, n_sigma: float = 3.0,
                    name: str = "value", n: int = 0) -> ComparisonVerdict:
    """Same as :func:`mean_vs_target` for a precomputed estimate and SE."""
    z = abs(value - target) / se if se > 0 else (0.0 if value == target else float("inf"))
    return ComparisonVerdict(name, "mean-3sigma", z, n_sigma, (n,) if n else (),
                             standard_error=se,
                             detail={"mean": value, "target": target})


def relative_error(value: float, target: float, tol: float,
                   name: str = "rel") -> ComparisonVerdict:
    """|value/target - 1| vs a relative tolerance."""
    err = abs(value - target) / abs(target)
    return ComparisonVerdict(name, "bound", err, tol,
                             detail={"value": value, "target": target})


def absolute_bound(value: float, bound: float, name: str = "abs") -> ComparisonVerdict:
    return ComparisonVerdict(name, "bound", float(value), float(bound))


def empirical_char_function(samples: np.ndarray, thetas: Sequence[float]):
    """Empirical characteristic function on a theta grid.

    Returns ``(values, se_real, se_imag)``; the standard errors are the
    jackknife errors of the mean, which for a plain mean reduce to the
    classical s/sqrt(n) form.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least two samples")
    th = np.asarray(thetas, dtype=float)
    vals = np.empty(th.size, dtype=complex)
    se_r = np.empty(th.size)
    se_i = np.empty(th.size)
    for j, t in enumerate(th):
        c = np.cos(t * x)
        s = np.sin(t * x)
        vals[j] = c.mean() + 1j * s.mean()
        se_r[j] = c.std(ddof=1) / np.sqrt(n)
        se_i[j] = s.std(ddof=1) / np.sqrt(n)
    return vals, se_r, se_i


def char_function_verdict(samples: np.ndarray, theta: float, target: complex,
                          n_sigma: float = 3.0, name: str = "charfn") -> ComparisonVerdict:
    """Real and imaginary z-scores of the empirical char function vs target."""
    vals, se_r, se_i = empirical_char_function(samples, [theta])
    zr = abs(vals[0].real - target.real) / se_r[0]
    zi = abs(vals[0].imag - target.imag) / se_i[0]
    return ComparisonVerdict(name, "char-function", float(max(zr, zi)), n_sigma,
                             (len(samples),),
                             detail={"theta": theta,
                                     "emp_real": float(vals[0].real),
                                     "emp_imag": float(vals[0].imag),
                                     "target_real": float(target.real),
                                     "target_imag": float(target.imag)})


def wilson_interval(hits: int, n: int, z: float = 1.96) -> tuple[float, float, float]:
    """Wilson score interval for a binomial proportion: (estimate, lo, hi)."""
    if n <= 0:
        raise ValueError("n must be positive")
    phat = hits / n
    denom = 1.0 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * np.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return phat, centre - half, centre + half


def batch_means_se(values: np.ndarray, n_batches: int = 32) -> float:
    """Standard error of the mean of a correlated sequence via batch means."""
    x = np.asarray(values, dtype=float)
    if x.size < 2 * n_batches:
        n_batches = max(2, x.size // 2)
    usable = (x.size // n_batches) * n_batches
    b = x[:usable].reshape(n_batches, -1).mean(axis=1)
    return float(b.std(ddof=1) / np.sqrt(n_batches))
