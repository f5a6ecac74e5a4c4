"""Modified Bessel functions and the quadrature helpers the densities rely on.

Only integer orders are supported. Small arguments use the power series, large
arguments the Hankel-type asymptotic expansion; the switch happens at
``x = 15 + order**2`` where both branches agree to roughly 1e-13.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy import integrate

SERIES_LIMIT = 15.0
# largest x with I_0(x) representable; I_nu(x) <= I_0(x) for nu >= 0
OVERFLOW_X = 713.98


def _series_scaled(order: int, x: np.ndarray) -> np.ndarray:
    """exp(-x) * I_order(x) from the power series (x >= 0)."""
    half = 0.5 * x
    sq = half * half
    with np.errstate(divide="ignore", invalid="ignore"):
        log_lead = order * np.log(half) - math.lgamma(order + 1) - x
    term = np.where(half > 0, np.exp(log_lead), 1.0 if order == 0 else 0.0)
    total = term.copy()
    k = 0
    while True:
        k += 1
        term = term * sq / (k * (k + order))
        total += term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _asymptotic_scaled(order: int, x: np.ndarray) -> np.ndarray:
    """exp(-x) * I_order(x) from the large-argument expansion, truncated at its smallest term."""
    mu = 4.0 * order * order
    total = np.ones_like(x)
    term = np.ones_like(x)
    best = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        term = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        mag = np.abs(term)
        active &= mag < best
        if not active.any():
            break
        total = np.where(active, total + term, total)
        best = np.where(active, mag, best)
        if np.all(mag < 1e-17):
            break
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_ie(order: int, x) -> np.ndarray | float:
    """Exponentially scaled modified Bessel function exp(-|x|) I_order(x)."""
    if order < 0 or int(order) != order:
        raise ValueError(f"order must be a non-negative integer, got {order!r}")
    order = int(order)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("bessel argument must be finite")
    ax = np.abs(arr)
    out = np.empty_like(ax)
    small = ax <= SERIES_LIMIT + order * order
    if small.any():
        out[small] = _series_scaled(order, ax[small])
    if (~small).any():
        out[~small] = _asymptotic_scaled(order, ax[~small])
    if order % 2 == 1:
        out = np.where(arr < 0, -out, out)
    return out if out.ndim else float(out)


def bessel_i(order: int, x) -> np.ndarray | float:
    """Modified Bessel function of the first kind I_order(x) for integer order.

    Raises
    ------
    OverflowError
        If ``|x|`` is beyond the range where the result is a finite double.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.abs(arr) > OVERFLOW_X):
        raise OverflowError("bessel_i: argument too large, result overflows a double")
    scaled = np.asarray(bessel_ie(order, arr))
    out = scaled * np.exp(np.abs(arr))
    if not np.all(np.isfinite(out)):
        raise OverflowError("bessel_i: result overflows a double")
    return out if out.ndim else float(out)


def i1_over_x(x) -> np.ndarray:
    """I_1(x)/x, with the removable singularity at 0 filled in (= 1/2)."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    tiny = np.abs(x) < 1e-8
    out[tiny] = 0.5 + x[tiny] ** 2 / 16.0
    big = ~tiny
    out[big] = np.asarray(bessel_i(1, x[big])) / x[big]
    return out


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureSpec:
    """How to evaluate an integral over [0, inf)."""

    method: Literal["gauss_laguerre", "adaptive_truncated"] = "gauss_laguerre"
    nodes: int = 64
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    truncation_bound: float = 40.0

    def __post_init__(self):
        if self.method not in ("gauss_laguerre", "adaptive_truncated"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.nodes < 8:
            raise ValueError("nodes must be >= 8")
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.truncation_bound <= 0:
            raise ValueError("truncation_bound must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    converged: bool
    method: str

    def __float__(self) -> float:
        return self.value


class QuadratureWarning(RuntimeWarning):
    pass


@lru_cache(maxsize=None)
def gauss_laguerre_sqrt(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^inf exp(-w^2) g(w) dw ~= sum(W * g(nodes)).

    Built from n-point Gauss-Laguerre after w = sqrt(u); exact when
    g(sqrt(u))/sqrt(u) is a polynomial in u of degree < 2n.
    """
    u, wt = np.polynomial.laguerre.laggauss(n)
    w = np.sqrt(u)
    return w, wt / (2.0 * w)


def _tolerance(spec: QuadratureSpec, value: float) -> float:
    return max(spec.abs_tol, spec.rel_tol * abs(value))


def _adaptive(f: Callable, spec: QuadratureSpec) -> QuadratureResult:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(
                f, 0.0, spec.truncation_bound,
                epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=500,
            )
            converged = err <= _tolerance(spec, value)
        except integrate.IntegrationWarning:
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            value, err = integrate.quad(
                f, 0.0, spec.truncation_bound,
                epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=500,
            )
            converged = False
    return QuadratureResult(float(value), float(err), converged, "adaptive_truncated")


def semi_infinite_integral(f: Callable, spec: QuadratureSpec = QuadratureSpec()) -> QuadratureResult:
    """Integrate ``f`` over [0, inf).

    The Gauss-Laguerre route assumes f(w) decays like exp(-w**2) times something
    smooth. Its answer is checked against a rule with 1.5x the nodes; if the two
    disagree beyond tolerance the adaptive route over [0, truncation_bound] is
    used instead. A result that still misses tolerance comes back with
    ``converged=False`` and a :class:`QuadratureWarning`.
    """
    if spec.method == "gauss_laguerre":
        vals = []
        for n in (spec.nodes, (3 * spec.nodes) // 2):
            w, W = gauss_laguerre_sqrt(n)
            with np.errstate(over="ignore", invalid="ignore"):
                g = np.asarray(f(w), dtype=float) * np.exp(w * w)
            vals.append(float(np.sum(W * g)))
        err = abs(vals[1] - vals[0])
        if np.isfinite(vals[1]) and err <= _tolerance(spec, vals[1]):
            return QuadratureResult(vals[1], err, True, "gauss_laguerre")
        res = _adaptive(f, spec)
    else:
        res = _adaptive(f, spec)
    if not res.converged:
        warnings.warn(
            f"semi_infinite_integral did not reach tolerance (estimate {res.value!r}, error {res.error!r})",
            QuadratureWarning, stacklevel=2,
        )
    return res


def bessel_product_moment(a: float, b: float) -> float:
    """Closed form of int_0^inf w^3 exp(-w^2) I_1(a w) I_1(b w) dw."""
    half = 0.5 * a * b
    pref = math.exp(0.25 * (a * a + b * b)) / 4.0
    return pref * (0.5 * (a * a + b * b) * bessel_i(1, half) + a * b * bessel_i(0, half))


def bessel_arc_exp_integral(alpha: float, beta: float, t: float) -> float:
    """int_0^t exp(beta s) I_0(alpha sqrt(s (t - s))) ds in closed form."""
    if t <= 0:
        raise ValueError("t must be positive")
    root = math.hypot(alpha, beta)
    half = 0.5 * t * root
    # 2 sinh(h)/root, continuous as root -> 0
    if half < 1e-6:
        core = t * (1.0 + half * half / 6.0)
    else:
        core = 2.0 * math.sinh(half) / root
    return math.exp(0.5 * beta * t) * core
