"""Goodness-of-fit statistics for comparing samples with analytic laws."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats as sps

from ..grids import DensityGrid

KS_ALPHA = 0.01
CHI2_ALPHA = 0.001
CHI2_MIN_EXPECTED = 5.0


@dataclass
class StatReport:
    test: str
    statistic: float
    threshold: float
    n_samples: int
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"test": self.test, "statistic": self.statistic, "threshold": self.threshold,
                "n_samples": self.n_samples, "pass": self.passed, **self.details}


def ks_test(samples, cdf: Callable, *, alpha: float = KS_ALPHA, atoms: bool = False) -> StatReport:
    """One-sample Kolmogorov-Smirnov test against ``cdf``.

    With ``atoms=True`` the law may have jumps; ``cdf(x, left=True)`` must
    then return P{X < x}, and the statistic compares the empirical CDF with
    both one-sided limits. The critical value is the exact finite-n quantile
    for continuous laws, which is conservative when atoms are present.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    if n == 0:
        raise ValueError("no samples")
    right = np.asarray(cdf(x), dtype=float)
    left = np.asarray(cdf(x, left=True), dtype=float) if atoms else right
    i = np.arange(1, n + 1)
    d_plus = float(np.max(i / n - right))
    d_minus = float(np.max(left - (i - 1) / n))
    stat = max(d_plus, d_minus)
    crit = float(sps.kstwo.ppf(1.0 - alpha, n))
    p_value = float(sps.kstwo.sf(stat, n))
    return StatReport("ks", stat, crit, n, stat <= crit, {"p_value": p_value, "alpha": alpha})


def merge_sparse_bins(observed, expected, min_expected: float = CHI2_MIN_EXPECTED):
    """Pool all bins with expected count below ``min_expected`` into one bin."""
    observed = np.asarray(observed, dtype=float).ravel()
    expected = np.asarray(expected, dtype=float).ravel()
    sparse = expected < min_expected
    if not sparse.any():
        return observed, expected
    obs = np.append(observed[~sparse], observed[sparse].sum())
    exp = np.append(expected[~sparse], expected[sparse].sum())
    if exp[-1] < min_expected and len(exp) > 1:
        # a pooled bin that is still sparse joins the smallest regular bin
        j = int(np.argmin(exp[:-1]))
        obs[j] += obs[-1]
        exp[j] += exp[-1]
        obs, exp = obs[:-1], exp[:-1]
    return obs, exp


def chi2_test(observed, expected, *, alpha: float = CHI2_ALPHA, rescale: bool = True,
              ddof: int = 0) -> StatReport:
    """Pearson chi-square; sparse bins are merged first.

    With ``rescale`` the expected counts are scaled to the observed total
    (a test of shape, one degree of freedom fewer).
    """
    obs, exp = merge_sparse_bins(observed, expected)
    if rescale:
        exp = exp * obs.sum() / exp.sum()
    dof = len(obs) - (1 if rescale else 0) - ddof
    if dof < 1:
        raise ValueError("too few bins for a chi-square test")
    stat = float(((obs - exp) ** 2 / exp).sum())
    crit = float(sps.chi2.ppf(1.0 - alpha, dof))
    p_value = float(sps.chi2.sf(stat, dof))
    return StatReport("chi2", stat, crit, int(obs.sum()), stat <= crit,
                      {"p_value": p_value, "dof": dof, "bins": len(obs), "alpha": alpha})


def tv_distance(grid_a: DensityGrid, grid_b: DensityGrid) -> float:
    """Half the L1 distance between the bin probabilities of two aligned grids."""
    if not grid_a.aligned_with(grid_b):
        raise ValueError("grids are not aligned")
    return 0.5 * float(np.abs(grid_a.probabilities - grid_b.probabilities).sum())


def tv_report(grid_a: DensityGrid, grid_b: DensityGrid, threshold: float) -> StatReport:
    tv = tv_distance(grid_a, grid_b)
    sampled = [g.total for g in (grid_a, grid_b) if g.meta.get("sampled", False)]
    n = int(min(sampled)) if sampled else 0
    return StatReport("tv", tv, threshold, n, tv < threshold,
                      {"bins": int(grid_a.values.size), "noise_floor": tv_noise_floor(grid_a, grid_b)})


def tv_noise_floor(grid_a: DensityGrid, grid_b: DensityGrid) -> float:
    """Expected TV from multinomial noise alone (normal approximation), for context."""
    p = 0.5 * (grid_a.probabilities + grid_b.probabilities)
    var = np.zeros_like(p)
    for g in (grid_a, grid_b):
        if g.meta.get("sampled", False) and g.total > 0:
            var = var + p * (1 - p) / g.total
    return 0.5 * float(np.sum(np.sqrt(2.0 * var / math.pi)))


def variance_z_score(samples, target: float) -> tuple[float, float, float]:
    """(sample variance, its standard error from the fourth moment, z-score against target)."""
    x = np.asarray(samples, dtype=float)
    n = len(x)
    centred = x - x.mean()
    var = float(centred @ centred / (n - 1))
    m4 = float(np.mean(centred**4))
    se = math.sqrt(max(m4 - var * var, 0.0) / n)
    return var, se, (var - target) / se
