"""Time spent moving parallel to each axis, and laws built on it.

Along the z-axis the motion is a two-speed process: "moving vertically"
(velocity 1 for the clock T_z) or not (velocity 0). For the OSM a vertical
segment always ends in a horizontal one (rate lam) and a horizontal one turns
vertical with probability 1/2 (rate lam/2). For the OUM the rates are 2lam/3
and lam/3. Either way the motion starts vertical with probability 1/3.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import planar3
from .ortho3d import MotionKind, Path3D, analytic_equivalent
from .specfun import bessel_ie
from .telegraph import DomainError, TelegraphParams, TwoSpeedParams, sym_density_closed, two_speed_density

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class OccupationTriple:
    tx: float
    ty: float
    tz: float

    @property
    def horizon(self) -> float:
        return self.tx + self.ty + self.tz


def occupation_times(path: Path3D) -> OccupationTriple:
    per_axis = [0.0, 0.0, 0.0]
    for d, dur in zip(path.directions, path.durations):
        per_axis[d % 3] += float(dur)
    tx, ty = per_axis[0], per_axis[1]
    return OccupationTriple(tx, ty, path.horizon - tx - ty)


# ---------------------------------------------------------------------------
# T_z


def tz_params(kind, lam: float) -> TwoSpeedParams:
    kind, lam = analytic_equivalent(kind, lam)
    if kind is MotionKind.OSM:
        return TwoSpeedParams(lam, lam / 2.0, 1.0 / 3.0)
    return TwoSpeedParams(2.0 * lam / 3.0, lam / 3.0, 1.0 / 3.0)


def tz_density(kind, lam: float, t: float, s):
    """Density of T_z(t) on (0, t) (atoms at 0 and t excluded)."""
    return two_speed_density(tz_params(kind, lam), t, s)


def tz_density_osm_closed(lam: float, t: float, s):
    """OSM closed form: (lam/3) e^{-lam(t+s)/2} [2 I0(a) + (2t - s) I1(a)/sqrt(2 s (t-s))], a = lam sqrt(2 s (t-s))."""
    s = np.asarray(s, dtype=float)
    if np.any((s <= 0) | (s >= t)):
        raise DomainError("s must lie strictly inside (0, t)")
    root = np.sqrt(2.0 * s * (t - s))
    a = lam * root
    damp = np.exp(a - 0.5 * lam * (t + s))
    val = (lam / 3.0) * damp * (2.0 * bessel_ie(0, a) + (2.0 * t - s) / root * bessel_ie(1, a))
    return val if np.ndim(val) else float(val)


def tz_masses(kind, cum_rate: float) -> tuple[float, float]:
    """(P{T_z = 0}, P{T_z = t}) given Lambda(t)."""
    kind, L = analytic_equivalent(kind, cum_rate)
    if kind is MotionKind.OSM:
        return 2.0 * math.exp(-L / 2.0) / 3.0, math.exp(-L) / 3.0
    return 2.0 * math.exp(-L / 3.0) / 3.0, math.exp(-2.0 * L / 3.0) / 3.0


# ---------------------------------------------------------------------------
# (T_x, T_y)


def txty_planar_params(kind, lam: float, c: float) -> planar3.Planar3Params:
    kind, lam = analytic_equivalent(kind, lam)
    pk = (planar3.Planar3Kind.SYMMETRICALLY_DEVIATING if kind is MotionKind.OSM
          else planar3.Planar3Kind.UNIFORM)
    return planar3.Planar3Params(lam, c, pk)


def txty_map(c: float, t: float, s, r):
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    return 0.5 * c * (3.0 * s - t), 0.5 * SQRT3 * c * (s + 2.0 * r - t)


def joint_txty_density(kind, lam: float, c: float, t: float, s, r):
    """Density of (T_x, T_y) on the open simplex s, r > 0, s + r < t.

    Reading (T_x, T_y, T_z) as barycentric weights of the three-direction
    triangle turns it into a planar position; c cancels out.
    """
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any((s <= 0) | (r <= 0) | (s + r >= t)):
        raise DomainError("(s, r) must lie in the open simplex")
    q = txty_planar_params(kind, lam, c)
    u, v = txty_map(c, t, s, r)
    val = 1.5 * SQRT3 * c * c * planar3.density(q, t, u, v)
    return val if np.ndim(val) else float(val)


def joint_txty_ac_mass(kind, lam: float, t: float) -> float:
    return planar3.ac_mass(txty_planar_params(kind, lam, 1.0), t)


# ---------------------------------------------------------------------------
# conditional laws for the OUM


def z_eq_ctz_params(lam: float) -> TwoSpeedParams:
    # once -z is excluded: vertical segments end at rate 2lam/3, horizontal ones turn up at lam/6
    return TwoSpeedParams(2.0 * lam / 3.0, lam / 6.0, 1.0 / 5.0)


def z_eq_ctz_probability(cum_rate: float) -> float:
    """P{Z(t) = c T_z(t)} for the OUM: the direction -z is never drawn."""
    return 5.0 / 6.0 * math.exp(-cum_rate / 6.0)


def cond_z_eq_ctz_density_oum(lam: float, t: float, s):
    """P{T_z(t) in ds, Z(t) = c s}/ds for the OUM, 0 < s < t."""
    return z_eq_ctz_probability(lam * t) * two_speed_density(z_eq_ctz_params(lam), t, s)


def z_eq_ctz_integral(cum_rate: float) -> float:
    L = cum_rate
    return 5.0 / 6.0 * math.exp(-L / 6.0) - 2.0 / 3.0 * math.exp(-L / 3.0) - math.exp(-5.0 * L / 6.0) / 6.0


def cond_tz_eq_t_density_oum(lam: float, c: float, t: float, z):
    """P{T_z(t) = t, Z(t) in dz}/dz for the OUM, |z| < ct."""
    return math.exp(-2.0 * lam * t / 3.0) / 3.0 * sym_density_closed(TelegraphParams(lam / 6.0, c), t, z)


def tz_eq_t_integral(cum_rate: float) -> float:
    return (math.exp(-2.0 * cum_rate / 3.0) - math.exp(-5.0 * cum_rate / 6.0)) / 3.0


# ---------------------------------------------------------------------------
# OSM: never moving down, by number of events


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero when n < 0, k < 0 or n < k."""
    if n < 0 or k < 0 or n < k:
        return 0
    return math.comb(n, k)


def osm_run_probability(n: int, k: int, start: str) -> Fraction:
    """P{Z = cT_z, N_up = ..., start direction | N(t) = n} for the OSM, exactly.

    ``start="vertical"``: the path starts upward (probability 1/6 included) and
    k further upward segments follow, so N_up = k + 1.
    ``start="horizontal"``: the path starts horizontally (probability 2/3
    included) and N_up = k.
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if start == "vertical":
        if n == 0:
            return Fraction(1, 6) if k == 0 else Fraction(0)
        return Fraction(1, 6) * (Fraction(binom(n - k - 1, k - 1), 2**n)
                                 + Fraction(binom(n - k - 1, k), 2 ** (n - 1)))
    if start == "horizontal":
        return Fraction(1, 3) * (Fraction(binom(n - k, k), 2 ** (n - 1) if n else Fraction(1, 2))
                                 + Fraction(binom(n - k, k - 1), 2**n))
    raise ValueError("start must be 'vertical' or 'horizontal'")


def osm_never_down_probability_given_n(n: int) -> Fraction:
    return sum((osm_run_probability(n, k, s) for s in ("vertical", "horizontal")
                for k in range(n + 2)), Fraction(0))


def osm_never_down_probability(lam: float, t: float, *, tol: float = 1e-17) -> float:
    """P{Z(t) = c T_z(t)} for the OSM at constant rate, summed over the event count."""
    mean = lam * t
    total, n, weight = 0.0, 0, math.exp(-mean)
    while True:
        total += weight * float(osm_never_down_probability_given_n(n))
        n += 1
        weight *= mean / n
        if n > mean and weight < tol:
            return total


@lru_cache(maxsize=None)
def enumerate_osm_runs(n: int) -> dict[tuple[str, int], Fraction]:
    """Exhaustive oracle: every OSM direction sequence with n switches.

    Returns P{never -z, start class, k | N = n} keyed like
    :func:`osm_run_probability`. Each sequence has probability (1/6)(1/4)^n.
    """
    counts: dict[tuple[str, int], int] = {}
    orth = {d: [e for e in range(6) if e % 3 != d % 3] for d in range(6)}
    for first in range(6):
        if first == 5:
            continue
        for choice in itertools.product(range(4), repeat=n):
            seq = [first]
            for ci in choice:
                seq.append(orth[seq[-1]][ci])
            if 5 in seq:
                continue
            ups = seq.count(2)
            key = ("vertical", ups - 1) if first == 2 else ("horizontal", ups)
            counts[key] = counts.get(key, 0) + 1
    denom = 6 * 4**n
    return {key: Fraction(v, denom) for key, v in counts.items()}
