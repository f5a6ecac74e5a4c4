"""Poisson switching times and segment lengths, batched.

Paths are stored as padded arrays: ``lengths[i, k]`` is the duration of the
k-th segment of path i, zero past the last one. With ``counts[i]`` events a
path has ``counts[i] + 1`` segments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RateFunction:
    """Switching intensity: a constant, or piecewise constant on ``knots``.

    For the tabulated form ``values[j]`` applies on ``[knots[j], knots[j+1])``
    and the last value continues past the final knot. ``knots[0]`` must be 0.
    """

    values: tuple[float, ...]
    knots: tuple[float, ...] = (0.0,)
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        vals = tuple(float(v) for v in np.atleast_1d(self.values))
        kn = tuple(float(k) for k in np.atleast_1d(self.knots))
        if len(vals) != len(kn):
            raise ValueError("knots and values must have equal length")
        if kn[0] != 0.0:
            raise ValueError("first knot must be 0")
        if any(b <= a for a, b in zip(kn, kn[1:])):
            raise ValueError("knots must be strictly ascending")
        if any(not (np.isfinite(v) and v > 0) for v in vals):
            raise ValueError("rates must be positive and finite")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "knots", kn)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(kn) * np.array(vals[:-1]))])
        object.__setattr__(self, "_cum", cum)

    @classmethod
    def constant(cls, lam: float) -> "RateFunction":
        return cls((lam,), (0.0,))

    @classmethod
    def tabulated(cls, knots, values) -> "RateFunction":
        return cls(tuple(values), tuple(knots))

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1

    def scaled(self, factor: float) -> "RateFunction":
        return RateFunction(tuple(factor * v for v in self.values), self.knots)

    def __call__(self, t):
        idx = np.searchsorted(self.knots, np.asarray(t, dtype=float), side="right") - 1
        return np.asarray(self.values)[np.maximum(idx, 0)]

    def cumulative(self, t):
        """Lambda(t) = integral of the rate over [0, t], exact."""
        t = np.asarray(t, dtype=float)
        kn = np.asarray(self.knots)
        idx = np.maximum(np.searchsorted(kn, t, side="right") - 1, 0)
        out = self._cum[idx] + (t - kn[idx]) * np.asarray(self.values)[idx]
        return out if out.ndim else float(out)

    def sup_bound_on(self, t: float) -> float:
        hit = [v for k, v in zip(self.knots, self.values) if k < t or k == 0.0]
        return max(hit)

    def to_dict(self) -> dict:
        if self.is_constant:
            return {"form": "constant", "lambda": self.values[0]}
        return {"form": "tabulated", "knots": list(self.knots), "values": list(self.values)}


def _pad_to_lengths(times: np.ndarray, counts: np.ndarray, t: float) -> np.ndarray:
    n, kmax = times.shape
    times = np.where(np.arange(kmax)[None, :] < counts[:, None], times, t)
    bounds = np.concatenate([np.zeros((n, 1)), times, np.full((n, 1), t)], axis=1)
    return np.diff(bounds, axis=1)


def constant_rate_segments(rng: np.random.Generator, lam: float, t: float, n: int):
    """Poisson(lam*t) event counts with sorted uniform event times (order statistics)."""
    counts = rng.poisson(lam * t, size=n)
    kmax = int(counts.max(initial=0))
    u = rng.uniform(0.0, t, size=(n, kmax))
    # slots past counts[i] are parked at +inf so they sort last
    u = np.where(np.arange(kmax)[None, :] < counts[:, None], u, np.inf)
    u.sort(axis=1)
    return counts, _pad_to_lengths(u, counts, t)


def thinned_segments(rng: np.random.Generator, rate: RateFunction, t: float, n: int):
    """Non-homogeneous Poisson events by thinning a homogeneous one at the sup bound."""
    bound = rate.sup_bound_on(t)
    cand = rng.poisson(bound * t, size=n)
    kmax = int(cand.max(initial=0))
    u = rng.uniform(0.0, t, size=(n, kmax))
    real = np.arange(kmax)[None, :] < cand[:, None]
    keep = real & (rng.random((n, kmax)) * bound < rate(u))
    times = np.where(keep, u, np.inf)
    times.sort(axis=1)
    counts = keep.sum(axis=1)
    kept = int(counts.max(initial=0))
    return counts, _pad_to_lengths(times[:, :kept], counts, t)


def segments(rng: np.random.Generator, rate: RateFunction, t: float, n: int):
    if rate.is_constant:
        return constant_rate_segments(rng, rate.values[0], t, n)
    return thinned_segments(rng, rate, t, n)
