"""One-dimensional telegraph laws.

Everything here uses the classical parametrisation: the velocity flips at
rate ``lam``. The series and Bessel-integral forms are most naturally written
for the "uniform" telegraph process, where a Poisson clock of rate ``2*lam``
picks a fresh velocity uniformly from {+c, -c}; that process has the same law,
which is why ``exp(-2*lam*t)`` and ``2*lam/c`` show up in those two forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import gammaln

from .events import constant_rate_segments
from .specfun import bessel_ie, gauss_laguerre_sqrt, i1_over_x


class DomainError(ValueError):
    """Point outside the open support of an absolutely continuous component."""


@dataclass(frozen=True)
class TelegraphParams:
    lam: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lam must be positive and finite")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError("c must be positive and finite")


@dataclass(frozen=True)
class TwoSpeedParams:
    """Velocity alternates between 1 (left at rate lambda_move) and 0 (left at rate lambda_still)."""

    lambda_move: float
    lambda_still: float
    p_move0: float

    def __post_init__(self):
        if not (self.lambda_move > 0 and self.lambda_still > 0):
            raise ValueError("rates must be positive")
        if not 0.0 <= self.p_move0 <= 1.0:
            raise ValueError("p_move0 must lie in [0, 1]")


def _check_open_interval(x, half_width: float, what: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= half_width):
        raise DomainError(f"{what} must satisfy |{what}| < {half_width!r}")
    return x


def _out(val: np.ndarray):
    return val if np.ndim(val) else float(val)


# ---------------------------------------------------------------------------
# symmetric telegraph


def sym_density_closed(p: TelegraphParams, t: float, x):
    """Absolutely continuous density of the telegraph position at time t."""
    lam, c = p.lam, p.c
    x = _check_open_interval(x, c * t)
    arg = (lam / c) * np.sqrt((c * t - x) * (c * t + x))
    # exp(-lam t) I0(arg) = ie0(arg) exp(arg - lam t); d/dt I0 expands through I0' = I1
    damp = np.exp(arg - lam * t)
    i0 = bessel_ie(0, arg) * damp
    small = arg < 1.0
    safe = np.where(small, 1.0, arg)
    i1x = np.where(small, i1_over_x(np.minimum(arg, 1.0)) * np.exp(-lam * t),
                   bessel_ie(1, safe) / safe * damp)
    val = lam / (2.0 * c) * (i0 + lam * t * i1x)
    return _out(val)


def sym_density_series(p: TelegraphParams, t: float, x, *, rtol: float = 1e-14, max_shells: int = 5000):
    """Same density as :func:`sym_density_closed`, summed as the double power series."""
    lam, c = p.lam, p.c
    x = _check_open_interval(x, c * t)
    flat = np.atleast_1d(x).astype(float)
    alpha = lam * (c * t - flat) / (2.0 * c)
    beta = lam * (c * t + flat) / (2.0 * c)
    with np.errstate(divide="ignore"):
        la, lb = np.log(alpha), np.log(beta)
    log_pref = -2.0 * lam * t + math.log(lam / (4.0 * c))
    total = np.zeros_like(flat)
    prev = np.full_like(flat, np.nan)
    done = np.zeros(flat.shape, dtype=bool)
    for K in range(max_shells):
        m = np.arange(K + 1)
        n = K - m
        coef = gammaln(K + 3) - gammaln(m + 1) - gammaln(m + 2) - gammaln(n + 1) - gammaln(n + 2)
        with np.errstate(invalid="ignore"):
            logs = (np.where(m > 0, m * la[:, None], 0.0)
                    + np.where(n > 0, n * lb[:, None], 0.0) + coef)
        shell = np.exp(logs + log_pref).sum(axis=1)
        total += np.where(done, 0.0, shell)
        ratio = shell / prev
        # geometric tail bound once shells shrink by at least half
        tail = np.where(ratio < 0.5, shell * ratio / (1.0 - ratio), np.inf)
        done |= (K > 2 * lam * t) & (tail <= rtol * total)
        prev = shell
        if done.all():
            break
    else:
        raise RuntimeError("telegraph series did not converge")
    return _out(total.reshape(np.shape(x)))


def sym_density_integral(p: TelegraphParams, t: float, x, *, nodes: int = 96):
    """Same density evaluated through the Bessel product integral."""
    lam, c = p.lam, p.c
    x = _check_open_interval(x, c * t)
    flat = np.atleast_1d(x).astype(float)
    A = np.sqrt(2.0 * lam / c * (c * t - flat))
    B = np.sqrt(2.0 * lam / c * (c * t + flat))
    w, W = gauss_laguerre_sqrt(nodes)
    aw = A[:, None] * w[None, :]
    bw = B[:, None] * w[None, :]
    # I1(aw) I1(bw) exp(-2 lam t) with the exponential growth folded into the scaled functions
    prod = (bessel_ie(1, aw) * bessel_ie(1, bw)) * np.exp(aw + bw - 2.0 * lam * t)
    integral = (prod * w**3) @ W
    val = integral / np.sqrt((c * t - flat) * (c * t + flat))
    return _out(val.reshape(np.shape(x)))


def sym_singular_mass(p: TelegraphParams, t: float) -> float:
    """Probability of no flip by time t, split evenly between +ct and -ct."""
    return math.exp(-p.lam * t)


def sym_cdf(p: TelegraphParams, t: float, *, cells: int = 2048):
    """CDF of the full telegraph law at time t (atoms included) as a fast callable.

    Cumulative integrals are exact to ~1e-14 at the cell edges (Gauss-Legendre
    per cell); in between, a Hermite spline using the density as slope.
    """
    ct = p.c * t
    edges = ct * np.cos(np.linspace(np.pi, 0.0, cells + 1))  # cluster near +-ct
    edges[0], edges[-1] = -ct, ct
    gx, gw = np.polynomial.legendre.leggauss(12)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * gx[None, :]
    cell_mass = (sym_density_closed(p, t, pts) * gw[None, :]).sum(axis=1) * half
    cum = np.concatenate([[0.0], np.cumsum(cell_mass)])
    inner = sym_density_closed(p, t, edges[1:-1])
    ends = sym_density_closed(p, t, np.array([-ct, ct]) * (1 - 1e-12))
    slope = np.concatenate([[ends[0]], inner, [ends[1]]])
    spline = CubicHermiteSpline(edges, cum, slope)
    atom = 0.5 * sym_singular_mass(p, t)

    def cdf(xs, left: bool = False):
        xs = np.asarray(xs, dtype=float)
        inside = np.clip(xs, -ct, ct)
        val = spline(inside)
        if left:
            val = val + np.where(xs > -ct, atom, 0.0) + np.where(xs > ct, atom, 0.0)
        else:
            val = val + np.where(xs >= -ct, atom, 0.0) + np.where(xs >= ct, atom, 0.0)
        return np.clip(val, 0.0, 1.0)

    return cdf


def sample_telegraph(p: TelegraphParams, t: float, rng: np.random.Generator, size: int | None = None):
    """Exact positions X(t) of the telegraph process (velocity flips at rate lam)."""
    n = 1 if size is None else int(size)
    counts, lengths = constant_rate_segments(rng, p.lam, t, n)
    sign0 = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    alt = np.where(np.arange(lengths.shape[1]) % 2 == 0, 1.0, -1.0)
    x = p.c * sign0 * (lengths * alt[None, :]).sum(axis=1)
    # no flips: exactly at the endpoint
    x = np.where(counts == 0, sign0 * p.c * t, x)
    return float(x[0]) if size is None else x


# ---------------------------------------------------------------------------
# two-speed (velocity 1 or 0) motion


def two_speed_density(p: TwoSpeedParams, t: float, s, *, rtol: float = 1e-13, max_terms: int = 10000):
    """Density of the time spent at velocity 1 up to time t, for 0 < s < t.

    Summed over the number of completed velocity alternations: each family of
    paths (by initial and final velocity) contributes a product of Erlang-type
    factors in s and t - s.
    """
    a, b = p.lambda_move, p.lambda_still
    p1, p0 = p.p_move0, 1.0 - p.p_move0
    s = np.asarray(s, dtype=float)
    if np.any((s <= 0) | (s >= t)):
        raise DomainError("s must lie strictly inside (0, t)")
    flat = np.atleast_1d(s)
    u = t - flat
    ls, lu = np.log(flat), np.log(u)
    la, lb = math.log(a), math.log(b)
    base = -a * flat - b * u
    total = np.zeros_like(flat)
    prev = np.full_like(flat, np.nan)
    done = np.zeros(flat.shape, dtype=bool)
    peak = math.sqrt(a * b) * t
    for m in range(1, max_terms):
        lf_m1 = math.lgamma(m)
        common = (m - 1) * (ls + lu) - 2 * lf_m1
        # start 1 / end 1, start 1 / end 0, start 0 / end 0, start 0 / end 1
        t11 = m * la + m * lb + ls + common - math.log(m)
        t10 = m * la + (m - 1) * lb + common
        t00 = m * la + m * lb + lu + common - math.log(m)
        t01 = (m - 1) * la + m * lb + common
        term = (p1 * (np.exp(t11 + base) + np.exp(t10 + base))
                + p0 * (np.exp(t00 + base) + np.exp(t01 + base)))
        total += np.where(done, 0.0, term)
        ratio = term / prev
        tail = np.where(ratio < 0.5, term * ratio / (1.0 - ratio), np.inf)
        done |= (m > peak) & (tail <= rtol * total)
        prev = term
        if done.all():
            break
    else:
        raise RuntimeError("two-speed series did not converge")
    return _out(total.reshape(s.shape))


def two_speed_masses(p: TwoSpeedParams, t: float) -> tuple[float, float]:
    """(P{never at velocity 1}, P{always at velocity 1}) at time t."""
    return ((1.0 - p.p_move0) * math.exp(-p.lambda_still * t),
            p.p_move0 * math.exp(-p.lambda_move * t))
