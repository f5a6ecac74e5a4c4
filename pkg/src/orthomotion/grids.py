"""Binned densities and cubature on intervals and triangles."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np


@dataclass
class DensityGrid:
    """Per-bin probabilities (or counts) on a lattice of bins.

    ``edges`` holds one edge array per axis for rectangular grids; for
    triangular binnings ``geometry`` is ``"triangle"`` and ``edges`` is empty.
    ``total`` is the number of samples (MC) or the total mass (analytic)
    the bins are a share of.
    """

    values: np.ndarray
    edges: tuple[np.ndarray, ...] = ()
    geometry: str = "rectangular"
    total: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def probabilities(self) -> np.ndarray:
        s = self.values.sum()
        return self.values / s if s > 0 else self.values

    def aligned_with(self, other: "DensityGrid") -> bool:
        if self.values.shape != other.values.shape or self.geometry != other.geometry:
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.edges, other.edges))


# ---------------------------------------------------------------------------
# 1-D


@lru_cache(maxsize=None)
def _legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


def interval_integral(f: Callable, a: float, b: float, *, pieces: int = 64, order: int = 20) -> float:
    """Composite Gauss-Legendre over [a, b]; f is vectorized. Never evaluates the endpoints."""
    x, w = _legendre(order)
    edges = np.linspace(a, b, pieces + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return float(((np.asarray(f(pts)) * w[None, :]).sum(axis=1) * half).sum())


def graded_interval_integral(f: Callable, a: float, b: float, *, pieces: int = 64, order: int = 20) -> float:
    """Like :func:`interval_integral` but with cells clustered at both ends (cosine spacing)."""
    x, w = _legendre(order)
    edges = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.linspace(0.0, np.pi, pieces + 1))
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    pts = mid[:, None] + half[:, None] * x[None, :]
    return float(((np.asarray(f(pts)) * w[None, :]).sum(axis=1) * half).sum())


# ---------------------------------------------------------------------------
# triangles


@lru_cache(maxsize=None)
def _collapsed_rule(order: int):
    """Reference-triangle rule on {(a, b): a, b >= 0, a + b <= 1} via the Duffy map."""
    x, w = _legendre(order)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    U, V = np.meshgrid(u, u, indexing="ij")
    WU, WV = np.meshgrid(wu, wu, indexing="ij")
    a = U
    b = (1.0 - U) * V
    weight = WU * WV * (1.0 - U)
    return a.ravel(), b.ravel(), weight.ravel()


def triangle_rule(vertices: np.ndarray, order: int = 12):
    """Nodes (k, 2) and weights (k,) integrating over the triangle ``vertices`` (3, 2)."""
    vertices = np.asarray(vertices, dtype=float)
    a, b, w = _collapsed_rule(order)
    p0, p1, p2 = vertices
    pts = p0[None, :] + a[:, None] * (p1 - p0)[None, :] + b[:, None] * (p2 - p0)[None, :]
    area2 = abs((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]))
    return pts, w * area2


def sub_triangles(vertices: np.ndarray, k: int) -> np.ndarray:
    """Split a triangle into k*k congruent sub-triangles, shape (k*k, 3, 2).

    Order: all upward triangles (i, j) with i + j <= k-1 in row-major order,
    then all downward ones with i + j <= k-2. :func:`triangle_bin_index`
    uses the same numbering.
    """
    p0, p1, p2 = np.asarray(vertices, dtype=float)
    e1, e2 = (p1 - p0) / k, (p2 - p0) / k
    up, down = [], []
    for i in range(k):
        for j in range(k - i):
            base = p0 + i * e1 + j * e2
            up.append([base, base + e1, base + e2])
            if i + j <= k - 2:
                down.append([base + e1, base + e1 + e2, base + e2])
    return np.array(up + down)


def _bin_tables(k: int):
    up = -np.ones((k, k), dtype=np.int64)
    down = -np.ones((k, k), dtype=np.int64)
    n = 0
    for i in range(k):
        for j in range(k - i):
            up[i, j] = n
            n += 1
    for i in range(k):
        for j in range(k - i - 1):
            down[i, j] = n
            n += 1
    return up, down


def triangle_bin_index(a: np.ndarray, b: np.ndarray, k: int) -> np.ndarray:
    """Bin of points with affine coordinates (a, b) (a, b >= 0, a + b <= 1)."""
    A, B = np.asarray(a) * k, np.asarray(b) * k
    i = np.clip(np.floor(A).astype(np.int64), 0, k - 1)
    j = np.clip(np.floor(B).astype(np.int64), 0, k - 1)
    upward = (A - i) + (B - j) < 1.0
    up, down = _bin_tables(k)
    idx = np.where(upward, up[i, np.minimum(j, k - 1)], down[i, np.minimum(j, k - 1)])
    # points rounding past the hypotenuse fall back to the nearest upward cell
    bad = idx < 0
    if bad.any():
        jj = np.clip(k - 1 - i[bad], 0, k - 1)
        idx[bad] = up[i[bad], jj]
    return idx


def triangle_bin_masses(density: Callable, vertices: np.ndarray, k: int, *, order: int = 10) -> np.ndarray:
    """Integral of a vectorized ``density(x, y)`` over each of the k*k sub-triangles."""
    tris = sub_triangles(vertices, k)
    a, b, w = _collapsed_rule(order)
    p0 = tris[:, 0, :]
    e1 = tris[:, 1, :] - p0
    e2 = tris[:, 2, :] - p0
    area2 = np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    pts = p0[:, None, :] + a[None, :, None] * e1[:, None, :] + b[None, :, None] * e2[:, None, :]
    vals = np.asarray(density(pts[..., 0], pts[..., 1]))
    return (vals * w[None, :]).sum(axis=1) * area2


def triangle_integral(density: Callable, vertices: np.ndarray, *, k: int = 8, order: int = 14) -> float:
    return float(triangle_bin_masses(density, vertices, k, order=order).sum())


def triangle_affine(x, y, vertices: np.ndarray):
    """Affine coordinates (a, b) with point = p0 + a (p1 - p0) + b (p2 - p0)."""
    p0, p1, p2 = np.asarray(vertices, dtype=float)
    basis = np.column_stack([p1 - p0, p2 - p0])
    rel = np.stack([np.asarray(x, dtype=float) - p0[0], np.asarray(y, dtype=float) - p0[1]])
    a, b = np.linalg.solve(basis, rel.reshape(2, -1))
    return a.reshape(np.shape(x)), b.reshape(np.shape(x))


def triangle_histogram(x, y, vertices: np.ndarray, k: int) -> np.ndarray:
    """Counts per sub-triangle, numbered as in :func:`sub_triangles`."""
    a, b = triangle_affine(x, y, vertices)
    idx = triangle_bin_index(np.clip(a, 0.0, 1.0), np.clip(b, 0.0, 1.0), k)
    return np.bincount(idx.ravel(), minlength=k * k).astype(float)
