"""Planar motion with three unit directions at 120 degrees.

Directions: v0 = (c, 0), v1 = (-c/2, sqrt(3)c/2), v2 = (-c/2, -sqrt(3)c/2).
At time t the position lies in the triangle with vertices t*v_i. Its
barycentric-type coordinates are

    z0 = ct + 2x,  z1 = ct - x + sqrt(3) y,  z2 = ct - x - sqrt(3) y,

with z0 + z1 + z2 = 3ct; the interior is where all three are positive.

Two switching rules share a rate ``lam``: the *uniform* kind draws the new
direction among all three at every event, the *symmetrically deviating* kind
among the two others. The latter at rate lam equals the former at 3*lam/2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import gammaln

from .events import constant_rate_segments
from .specfun import QuadratureSpec, bessel_ie, gauss_laguerre_sqrt, semi_infinite_integral
from .telegraph import DomainError

SQRT3 = math.sqrt(3.0)
UNIT_VELOCITIES = np.array([[1.0, 0.0], [-0.5, SQRT3 / 2], [-0.5, -SQRT3 / 2]])
BOUNDARY_TOL = 1e-12


class Planar3Kind(str, enum.Enum):
    UNIFORM = "uniform"
    SYMMETRICALLY_DEVIATING = "symmetrically_deviating"


class Region(str, enum.Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Planar3Params:
    lam: float
    c: float
    kind: Planar3Kind = Planar3Kind.UNIFORM

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError("lam must be positive and finite")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError("c must be positive and finite")
        object.__setattr__(self, "kind", Planar3Kind(self.kind))

    def as_uniform(self) -> "Planar3Params":
        """Uniform-kind parameters with the same law."""
        if self.kind is Planar3Kind.UNIFORM:
            return self
        return replace(self, lam=1.5 * self.lam, kind=Planar3Kind.UNIFORM)


@dataclass(frozen=True)
class TrianglePoint:
    x: float
    y: float
    t: float
    c: float = 1.0

    @property
    def z(self) -> tuple[float, float, float]:
        return tuple(float(v) for v in barycentric(self.x, self.y, self.t, self.c))

    @property
    def region(self) -> Region:
        return in_triangle(self.x, self.y, self.t, self.c)


def barycentric(x, y, t: float, c: float):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ct = c * t
    return ct + 2.0 * x, ct - x + SQRT3 * y, ct - x - SQRT3 * y


def triangle_vertices(t: float, c: float) -> np.ndarray:
    return c * t * UNIT_VELOCITIES


def in_triangle(x: float, y: float, t: float, c: float) -> Region:
    zs = barycentric(x, y, t, c)
    tol = BOUNDARY_TOL * c * t
    lo = min(float(z) for z in zs)
    if lo < -tol:
        return Region.OUTSIDE
    if lo <= tol:
        return Region.BOUNDARY
    return Region.INTERIOR


def _interior_z(p: Planar3Params, t: float, x, y):
    z0, z1, z2 = barycentric(x, y, t, p.c)
    tol = BOUNDARY_TOL * p.c * t
    if np.any((z0 <= tol) | (z1 <= tol) | (z2 <= tol)):
        raise DomainError("point is not in the open triangle")
    return z0, z1, z2


def _out(val, shape):
    val = np.asarray(val).reshape(shape)
    return val if val.ndim else float(val)


# ---------------------------------------------------------------------------
# densities (uniform kind)


def density_series(p: Planar3Params, t: float, x, y, *, rtol: float = 1e-14, max_shells: int = 2000):
    """Absolutely continuous density as the triple power series in (z0, z1, z2)."""
    q = p.as_uniform()
    lam, c = q.lam, q.c
    z0, z1, z2 = _interior_z(q, t, x, y)
    shape = np.shape(z0)
    lz = np.log(np.stack([np.ravel(z0), np.ravel(z1), np.ravel(z2)], axis=1))
    log_pref = -lam * t + math.log(2.0 / SQRT3)
    log_r = math.log(lam / c)
    total = np.zeros(lz.shape[0])
    prev = np.full(lz.shape[0], np.nan)
    done = np.zeros(lz.shape[0], dtype=bool)
    for N in range(max_shells):
        n0, n1 = np.meshgrid(np.arange(N + 1), np.arange(N + 1), indexing="ij")
        keep = n0 + n1 <= N
        n0, n1 = n0[keep], n1[keep]
        n2 = N - n0 - n1
        ns = np.stack([n0, n1, n2], axis=1)
        coef = (gammaln(N + 4) - (2 * N + 4) * math.log(3.0)
                - (gammaln(ns + 1) + gammaln(ns + 2)).sum(axis=1))
        logs = lz @ ns.T + coef[None, :] + (N + 2) * log_r + log_pref
        shell = np.exp(logs).sum(axis=1)
        total += np.where(done, 0.0, shell)
        ratio = shell / prev
        tail = np.where(ratio < 0.5, shell * ratio / (1.0 - ratio), np.inf)
        done |= (N > lam * t) & (tail <= rtol * total)
        prev = shell
        if done.all():
            break
    else:
        raise RuntimeError("planar series did not converge")
    return _out(total, shape)


def density_integral(p: Planar3Params, t: float, x, y, *, nodes: int = 96):
    """Absolutely continuous density through the Bessel-product integral (production path)."""
    q = p.as_uniform()
    lam, c = q.lam, q.c
    z0, z1, z2 = _interior_z(q, t, x, y)
    shape = np.shape(z0)
    zs = np.stack([np.ravel(z0), np.ravel(z1), np.ravel(z2)], axis=1)
    coeff = (2.0 / 3.0) * np.sqrt(lam * zs / c)  # Bessel argument per unit u
    pref = 4.0 / (3.0 * SQRT3) * math.sqrt(lam / c) / np.sqrt(zs.prod(axis=1))
    spread = coeff.sum(axis=1)
    w, W = gauss_laguerre_sqrt(nodes)
    arg = coeff[:, :, None] * w[None, None, :]
    log_growth = spread[:, None] * w[None, :] - lam * t
    prod = bessel_ie(1, arg).prod(axis=1) * np.exp(log_growth)
    vals = (prod * w[None, :] ** 4) @ W
    # Gauss-Laguerre loses accuracy once the integrand peak drifts far from the origin
    far = spread > 30.0
    for i in np.flatnonzero(far):
        a = coeff[i]

        def f(u, a=a):
            u = np.asarray(u, dtype=float)
            au = np.multiply.outer(a, u)
            return (np.prod(bessel_ie(1, au), axis=0)
                    * np.exp(a.sum() * u - u * u - lam * t) * u**4)

        vals[i] = semi_infinite_integral(f, QuadratureSpec(method="adaptive_truncated",
                                                           truncation_bound=spread[i] + 20.0)).value
    return _out(pref * vals, shape)


def density_uniform(p: Planar3Params, t: float, x, y, *, method: str = "integral"):
    if p.kind is not Planar3Kind.UNIFORM:
        raise ValueError("density_uniform needs uniform-kind parameters; use density")
    if method == "integral":
        return density_integral(p, t, x, y)
    if method == "series":
        return density_series(p, t, x, y)
    raise ValueError(f"unknown method {method!r}")


def density_sd(p: Planar3Params, t: float, x, y, *, method: str = "integral"):
    """Symmetrically deviating kind: the uniform law at rate 3*lam/2."""
    if p.kind is not Planar3Kind.SYMMETRICALLY_DEVIATING:
        raise ValueError("density_sd needs symmetrically_deviating parameters")
    return density_uniform(p.as_uniform(), t, x, y, method=method)


def density(p: Planar3Params, t: float, x, y, *, method: str = "integral"):
    return density_uniform(p.as_uniform(), t, x, y, method=method)


def ac_mass(p: Planar3Params, t: float) -> float:
    """Probability that all three directions are used by time t."""
    return (1.0 - math.exp(-p.as_uniform().lam * t / 3.0)) ** 2


def single_direction_probability(p: Planar3Params, t: float) -> float:
    if p.kind is Planar3Kind.UNIFORM:
        return math.exp(-2.0 * p.lam * t / 3.0)
    return math.exp(-p.lam * t)


# ---------------------------------------------------------------------------
# sampling


@dataclass(frozen=True)
class PlanarBatch:
    x: np.ndarray
    y: np.ndarray
    distinct: np.ndarray  # number of distinct directions used per path


def _next_directions(kind: Planar3Kind, rng: np.random.Generator, shape) -> np.ndarray:
    if kind is Planar3Kind.UNIFORM:
        return rng.integers(0, 3, size=shape)
    return 1 + rng.integers(0, 2, size=shape)  # offset from the current direction


def sample_planar3_batch(p: Planar3Params, t: float, rng: np.random.Generator, n: int) -> PlanarBatch:
    """Exact endpoints of n independent paths."""
    counts, lengths = constant_rate_segments(rng, p.lam, t, n)
    kseg = lengths.shape[1]
    first = rng.integers(0, 3, size=n)
    draws = _next_directions(p.kind, rng, (n, max(kseg - 1, 0)))
    if p.kind is Planar3Kind.UNIFORM:
        dirs = np.concatenate([first[:, None], draws], axis=1)
    else:
        steps = np.concatenate([first[:, None], draws], axis=1)
        dirs = np.cumsum(steps, axis=1) % 3
    used = lengths > 0
    used[:, 0] = True
    time_per_dir = np.stack([(lengths * (dirs == d)).sum(axis=1) for d in range(3)], axis=1)
    hit = np.stack([((dirs == d) & used).any(axis=1) for d in range(3)], axis=1)
    pos = p.c * time_per_dir @ UNIT_VELOCITIES
    return PlanarBatch(pos[:, 0], pos[:, 1], hit.sum(axis=1))


def sample_planar3(p: Planar3Params, t: float, rng: np.random.Generator):
    """One path: returns (x, y, directions) with the direction used on each segment."""
    k = rng.poisson(p.lam * t)
    times = np.sort(rng.uniform(0.0, t, size=k))
    dirs = [int(rng.integers(0, 3))]
    for _ in range(k):
        if p.kind is Planar3Kind.UNIFORM:
            dirs.append(int(rng.integers(0, 3)))
        else:
            dirs.append((dirs[-1] + 1 + int(rng.integers(0, 2))) % 3)
    bounds = np.concatenate([[0.0], times, [t]])
    durations = np.diff(bounds)
    pos = p.c * (durations[:, None] * UNIT_VELOCITIES[dirs]).sum(axis=0)
    return float(pos[0]), float(pos[1]), dirs
