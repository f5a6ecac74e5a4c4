"""Finite-difference residuals of analytic densities against their equations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from ..telegraph import DomainError
from .operators import Operator

FieldEvaluator = Callable[..., np.ndarray]


@lru_cache(maxsize=None)
def central_stencil(order: int) -> tuple[tuple[int, float], ...]:
    """Weights of the narrowest central difference for d^order, second-order accurate."""
    if order == 0:
        return ((0, 1.0),)
    half = (order + 1) // 2
    offsets = np.arange(-half, half + 1)
    vander = np.array([offsets.astype(float) ** m / math.factorial(m) for m in range(len(offsets))])
    rhs = np.zeros(len(offsets))
    rhs[order] = 1.0
    weights = np.linalg.solve(vander, rhs)
    return tuple((int(o), float(w)) for o, w in zip(offsets, weights) if abs(w) > 1e-13)


def stencil_reach(operator: Operator) -> tuple[int, ...]:
    """Largest offset (in steps) used along each variable."""
    reach = [0] * len(operator.variables)
    for idx in operator.terms:
        for i, k in enumerate(idx):
            reach[i] = max(reach[i], (k + 1) // 2 if k else 0)
    return tuple(reach)


def default_steps(operator: Operator, scales: Sequence[float], *, noise: float = 1e-13) -> np.ndarray:
    """Per-variable steps balancing O(h^2) truncation against evaluation noise."""
    return np.asarray(scales, dtype=float) * noise ** (1.0 / (operator.order + 2))


def by_time(fn: Callable[..., np.ndarray]) -> FieldEvaluator:
    """Vectorize ``fn(t: float, *coords)`` over an array of times."""

    def field_fn(t, *coords):
        t = np.asarray(t, dtype=float)
        coords = [np.broadcast_to(np.asarray(c, dtype=float), t.shape) for c in coords]
        out = np.empty(t.shape)
        for tv in np.unique(t):
            sel = t == tv
            out[sel] = fn(float(tv), *(c[sel] for c in coords))
        return out

    return field_fn


@dataclass
class ResidualReport:
    equation_id: str
    grid_points: int
    max_abs_residual: float
    max_rel_residual: float
    step_sizes: tuple[float, ...]
    threshold: float = 1e-3
    rms_abs_residual: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.max_rel_residual < self.threshold

    def to_dict(self) -> dict:
        return {"equation_id": self.equation_id, "kind": "fd_residual", "grid_points": self.grid_points,
                "max_abs_residual": self.max_abs_residual, "max_rel_residual": self.max_rel_residual,
                "rms_abs_residual": self.rms_abs_residual, "step_sizes": list(self.step_sizes),
                "threshold": self.threshold, "pass": self.passed, **self.details}


def _check_margin(points: np.ndarray, steps: np.ndarray, margin: int, support) -> None:
    if support is None:
        return
    # supports are convex, so the corners of the margin box decide
    for signs in itertools.product((-1.0, 1.0), repeat=points.shape[1]):
        corner = points + margin * np.asarray(signs) * steps
        if not np.all(support(corner)):
            raise DomainError("grid point within the boundary margin of the support")


def fd_residual(density: FieldEvaluator, operator: Operator, points, *, steps, support=None,
                margin: int = 5, threshold: float = 1e-3, equation_id: str = "") -> ResidualReport:
    """Apply ``operator`` to ``density`` by central differences at ``points``.

    ``density(*columns)`` takes one array per operator variable. The relative
    residual at a point is |L_h p| divided by the sum of the magnitudes of the
    individual terms of L_h p. ``support(points)`` flags points of the open
    support; every stencil, padded to ``margin`` steps, must lie inside it.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    dim = len(operator.variables)
    if points.shape[1] != dim:
        raise ValueError(f"points must have {dim} columns")
    steps = np.broadcast_to(np.asarray(steps, dtype=float), (dim,)).copy()
    if margin < max(stencil_reach(operator)):
        raise ValueError("margin smaller than the stencil reach")
    _check_margin(points, steps, margin, support)

    stencils = {idx: [central_stencil(k) for k in idx] for idx in operator.terms}
    offsets = sorted({tuple(o for o, _ in combo)
                      for st in stencils.values() for combo in itertools.product(*st)})
    where = {off: i for i, off in enumerate(offsets)}
    shifted = points[None, :, :] + np.asarray(offsets, dtype=float)[:, None, :] * steps[None, None, :]
    flat = shifted.reshape(-1, dim)
    values = np.asarray(density(*flat.T), dtype=float).reshape(len(offsets), len(points))

    def derivative(idx):
        acc = np.zeros(len(points))
        for combo in itertools.product(*stencils[idx]):
            off = tuple(o for o, _ in combo)
            weight = math.prod(w for _, w in combo)
            acc += weight * values[where[off]]
        return acc / np.prod(steps ** np.asarray(idx))

    residual = np.abs(operator.evaluate(derivative))
    scale = operator.term_magnitudes(derivative)
    rel = residual / np.maximum(scale, 1e-300)
    return ResidualReport(equation_id, len(points), float(residual.max()), float(rel.max()),
                          tuple(float(h) for h in steps), threshold,
                          float(np.sqrt(np.mean(residual**2))))


@dataclass
class ConvergenceReport:
    equation_id: str
    coarse: ResidualReport
    fine: ResidualReport
    band: tuple[float, float] = (3.0, 5.0)

    @property
    def ratio(self) -> float:
        return self.coarse.rms_abs_residual / max(self.fine.rms_abs_residual, 1e-300)

    @property
    def passed(self) -> bool:
        return self.band[0] <= self.ratio <= self.band[1]

    def to_dict(self) -> dict:
        return {"equation_id": self.equation_id, "kind": "fd_convergence", "ratio": self.ratio,
                "band": list(self.band), "coarse_steps": list(self.coarse.step_sizes),
                "pass": self.passed}


def convergence_check(density: FieldEvaluator, operator: Operator, points, *, steps, support=None,
                      margin: int = 5, equation_id: str = "") -> ConvergenceReport:
    """Residuals at h and h/2; a second-order stencil should shrink them about fourfold.

    Use steps large enough that truncation dominates evaluation noise.
    """
    steps = np.asarray(steps, dtype=float)
    coarse = fd_residual(density, operator, points, steps=steps, support=support, margin=margin,
                         equation_id=equation_id)
    fine = fd_residual(density, operator, points, steps=steps / 2, support=support, margin=margin,
                       equation_id=equation_id)
    return ConvergenceReport(equation_id, coarse, fine)
