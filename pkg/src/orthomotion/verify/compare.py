"""Monte Carlo against analytic laws.

Boundary samples are folded onto one representative edge or face by the
octahedral symmetry: an edge point is summarised by v = |X_a| - |X_b| for its
two used axes a < b, a face point by (|X|, |Y|) on the face of the positive
octant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .. import occupation, ortho3d, planar3
from ..grids import DensityGrid, interval_integral, triangle_bin_masses, triangle_histogram
from ..ortho3d import EndpointBatch, MotionKind
from ..rng import stream
from ..telegraph import TelegraphParams, sample_telegraph, sym_cdf
from .stats import StatReport, chi2_test, ks_test, tv_report, variance_z_score

SIGMA_LIMIT = 3.0
_CATEGORY_NAMES = ("vertices", "edges", "faces", "interior")


# ---------------------------------------------------------------------------
# singular masses


def class_counts(kind, lam: float, c: float, t: float, n: int, seed: int, *, threads: int | None = None) -> np.ndarray:
    parts = ortho3d.simulate(kind, lam, c, t, n, seed, threads=threads,
                             reducer=lambda b, s: np.bincount(b.category, minlength=4))
    return np.sum(parts, axis=0)


def singular_mass_check(kind, lam: float, t: float, n: int, seed: int, *, c: float = 1.0,
                        threads: int | None = None) -> StatReport:
    """Class frequencies against the closed forms; pass if every |z| <= 3."""
    counts = class_counts(kind, lam, c, t, n, seed, threads=threads)
    expected = ortho3d.masses(kind, lam * t)
    z = {}
    for name, cnt in zip(_CATEGORY_NAMES, counts):
        p = expected[name]
        z[name] = (cnt - n * p) / math.sqrt(n * p * (1 - p))
    worst = max(abs(v) for v in z.values())
    details = {"kind": MotionKind.parse(kind).value, "lam": lam, "t": t,
               "frequencies": {k: int(v) / n for k, v in zip(_CATEGORY_NAMES, counts)},
               "expected": expected, "z_scores": z}
    return StatReport("binomial-z", worst, SIGMA_LIMIT, n, worst <= SIGMA_LIMIT, details)


# ---------------------------------------------------------------------------
# telegraph and planar


def telegraph_ks(p: TelegraphParams, t: float, n: int, seed: int) -> StatReport:
    x = sample_telegraph(p, t, stream(seed, salt=11), size=n)
    return ks_test(x, sym_cdf(p, t), atoms=True)


def planar_grids(p: planar3.Planar3Params, t: float, n: int, seed: int, *, k: int = 14) -> tuple[DensityGrid, DensityGrid]:
    """(MC, analytic) grids of the absolutely continuous part on k*k sub-triangles."""
    batch = planar3.sample_planar3_batch(p, t, stream(seed, salt=13), n)
    inside = batch.distinct == 3
    verts = planar3.triangle_vertices(t, p.c)
    counts = triangle_histogram(batch.x[inside], batch.y[inside], verts, k)
    exact = triangle_bin_masses(lambda x, y: planar3.density(p, t, x, y), verts, k, order=8)
    mc = DensityGrid(counts, geometry="triangle", total=float(inside.sum()), meta={"sampled": True})
    return mc, DensityGrid(exact, geometry="triangle", total=float(exact.sum()))


def planar_tv(p: planar3.Planar3Params, t: float, n: int, seed: int, *, k: int = 14,
              threshold: float = 0.01) -> StatReport:
    mc, exact = planar_grids(p, t, n, seed, k=k)
    report = tv_report(mc, exact, threshold)
    report.details.update({"ac_samples": int(mc.total), "ac_mass_cubature": exact.total,
                           "ac_mass": planar3.ac_mass(p, t)})
    return report


# ---------------------------------------------------------------------------
# boundary samples


@dataclass
class BoundarySamples:
    """Folded edge and face samples from n simulated paths."""

    n: int
    edge_v: np.ndarray
    face_xy: np.ndarray
    counts: np.ndarray


def _used_axes(mask: np.ndarray) -> np.ndarray:
    bits = (mask[:, None] >> np.arange(6)[None, :]) & 1
    return (bits[:, :3] | bits[:, 3:]).astype(bool)


def fold_edges(batch: EndpointBatch) -> np.ndarray:
    sel = batch.category == 1
    pts = np.abs(batch.endpoints[sel])
    axes = _used_axes(batch.mask[sel])
    first = np.argmax(axes, axis=1)
    last = 2 - np.argmax(axes[:, ::-1], axis=1)
    rows = np.arange(len(pts))
    return pts[rows, first] - pts[rows, last]


def fold_faces(batch: EndpointBatch) -> np.ndarray:
    sel = batch.category == 2
    return np.abs(batch.endpoints[sel][:, :2])


def boundary_samples(kind, lam: float, c: float, t: float, n: int, seed: int, *,
                     threads: int | None = None) -> BoundarySamples:
    def reduce(block: EndpointBatch, start: int):
        return fold_edges(block), fold_faces(block), np.bincount(block.category, minlength=4)

    parts = ortho3d.simulate(kind, lam, c, t, n, seed, reducer=reduce, threads=threads, salt=17)
    return BoundarySamples(n, np.concatenate([p[0] for p in parts]),
                           np.concatenate([p[1] for p in parts]), np.sum([p[2] for p in parts], axis=0))


def edge_chi2(samples: BoundarySamples, kind, lam: float, c: float, t: float, *, bins: int = 50) -> StatReport:
    """Chi-square of folded edge coordinates against the edge density (shape test)."""
    edges = np.linspace(-c * t, c * t, bins + 1)
    observed, _ = np.histogram(samples.edge_v, bins=edges)
    per_bin = np.array([interval_integral(lambda v: ortho3d.edge_density(kind, lam, c, t, v), a, b, pieces=2, order=20)
                        for a, b in zip(edges[:-1], edges[1:])])
    expected = 12.0 * samples.n * per_bin
    report = chi2_test(observed, expected)
    report.details.update({"edge_samples": int(observed.sum()), "expected_edge_samples": float(expected.sum())})
    return report


def face_grids(samples: BoundarySamples, kind, lam: float, c: float, t: float, *, k: int = 10) -> tuple[DensityGrid, DensityGrid]:
    """Face samples and face density, both on k*k sub-triangles of the face."""
    verts = np.array([[0.0, 0.0], [c * t, 0.0], [0.0, c * t]])
    counts = triangle_histogram(samples.face_xy[:, 0], samples.face_xy[:, 1], verts, k)
    exact = triangle_bin_masses(lambda x, y: ortho3d.face_density(kind, lam, c, t, x, y), verts, k, order=8)
    mc = DensityGrid(counts, geometry="triangle", total=float(len(samples.face_xy)), meta={"sampled": True})
    return mc, DensityGrid(exact, geometry="triangle", total=float(exact.sum()))


def face_tv(samples: BoundarySamples, kind, lam: float, c: float, t: float, *, k: int = 10,
            threshold: float = 0.02) -> StatReport:
    mc, exact = face_grids(samples, kind, lam, c, t, k=k)
    report = tv_report(mc, exact, threshold)
    report.details.update({"face_samples": int(mc.total), "face_mass_cubature": exact.total,
                           "face_mass": ortho3d.face_mass(kind, lam, t)})
    return report


# ---------------------------------------------------------------------------
# whole endpoint law


def endpoint_grid(kind, lam: float, c: float, t: float, n: int, seed: int, *, bins: int = 9,
                  salt: int = 0, threads: int | None = None) -> DensityGrid:
    """3-D histogram of all endpoints over [-ct, ct]^3.

    An odd bin count keeps the coordinate planes, where the singular parts
    live, in the middle of bins rather than on bin edges.
    """
    edges = np.linspace(-c * t, c * t, bins + 1)

    def reduce(block: EndpointBatch, start: int):
        return np.histogramdd(block.endpoints, bins=(edges, edges, edges))[0]

    counts = np.sum(ortho3d.simulate(kind, lam, c, t, n, seed, reducer=reduce, threads=threads, salt=salt), axis=0)
    return DensityGrid(counts, (edges, edges, edges), total=float(n), meta={"sampled": True})


def endpoint_tv(kind_a, lam_a: float, kind_b, lam_b: float, c: float, t: float, n: int, seed: int,
                *, threshold: float, bins: int = 9, threads: int | None = None) -> StatReport:
    a = endpoint_grid(kind_a, lam_a, c, t, n, seed, bins=bins, salt=21, threads=threads)
    b = endpoint_grid(kind_b, lam_b, c, t, n, seed, bins=bins, salt=22, threads=threads)
    return tv_report(a, b, threshold)


def plane_reduction_tv(lam: float, c: float, t: float, n: int, seed: int, *, bins: int = 9,
                       threshold: float = 0.015, threads: int | None = None) -> StatReport:
    """OSM endpoints of paths that never move along z against (U + V, U - V).

    U and V are independent telegraph positions with rate lam/4 and speed c/2,
    drawn as many times as there are in-plane paths. Atoms included.
    """
    edges = np.linspace(-c * t, c * t, bins + 1)
    no_z = 0b100100

    def reduce(block: EndpointBatch, start: int):
        pts = block.endpoints[(block.mask & no_z) == 0]
        return np.histogram2d(pts[:, 0], pts[:, 1], bins=(edges, edges))[0]

    counts = np.sum(ortho3d.simulate("osm", lam, c, t, n, seed, reducer=reduce, threads=threads, salt=41), axis=0)
    m = int(counts.sum())
    rng = stream(seed, salt=42)
    half = TelegraphParams(lam / 4.0, c / 2.0)
    u = sample_telegraph(half, t, rng, size=m)
    v = sample_telegraph(half, t, rng, size=m)
    pair = np.histogram2d(u + v, u - v, bins=(edges, edges))[0]
    a = DensityGrid(counts, (edges, edges), total=float(m), meta={"sampled": True})
    b = DensityGrid(pair, (edges, edges), total=float(m), meta={"sampled": True})
    report = tv_report(a, b, threshold)
    report.details.update({"in_plane_fraction": m / n})
    return report


def txty_marginal_tv(kind, lam: float, c: float, t: float, n: int, seed: int, *, bins: int = 100,
                     threshold: float = 0.02, threads: int | None = None) -> StatReport:
    """T_x of paths that used all three axes against the joint (T_x, T_y) density integrated over T_y."""
    edges = np.linspace(0.0, t, bins + 1)

    def reduce(block: EndpointBatch, start: int):
        occ = block.occupation
        used = _used_axes(block.mask).all(axis=1)
        return np.histogram(occ[used, 0], bins=edges)[0]

    counts = np.sum(ortho3d.simulate(kind, lam, c, t, n, seed, reducer=reduce, threads=threads, salt=43), axis=0)
    s_nodes, s_weights = np.polynomial.legendre.leggauss(8)
    r_nodes, r_weights = np.polynomial.legendre.leggauss(24)
    exact = np.empty(bins)
    for i, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        s = 0.5 * (hi - lo) * (s_nodes + 1.0) + lo
        width = t - s
        r = 0.5 * width[:, None] * (r_nodes[None, :] + 1.0)
        vals = occupation.joint_txty_density(kind, lam, c, t, np.broadcast_to(s[:, None], r.shape), r)
        inner = 0.5 * width * (vals @ r_weights)
        exact[i] = 0.5 * (hi - lo) * (inner @ s_weights)
    a = DensityGrid(counts, (edges,), total=float(counts.sum()), meta={"sampled": True})
    b = DensityGrid(exact, (edges,), total=float(exact.sum()))
    report = tv_report(a, b, threshold)
    report.details.update({"ac_samples": int(counts.sum()), "ac_mass_cubature": float(exact.sum()),
                           "ac_mass": occupation.joint_txty_ac_mass(kind, lam, t)})
    return report


# ---------------------------------------------------------------------------
# Kac limit


def kac_limit_check(kind, scale: float, t: float, n: int, seed: int, *, threads: int | None = None) -> StatReport:
    """lam = scale, c = sqrt(scale): coordinates should look like N(0, 2t/3).

    Pass when every coordinate variance lies within 3 standard errors of the
    limit variance and every coordinate passes a KS test against that normal
    law at 1%. The limit variance is 2t/3 for OSM and OUM; OSDM decorrelates
    faster (effective rate 6 lam / 5) and tends to 5t/9.
    """
    c = math.sqrt(scale)
    batch = ortho3d.simulate(kind, scale, c, t, n, seed, threads=threads, salt=31)
    # velocity autocorrelation c^2 exp(-rate s) once OSDM is mapped to its OUM twin
    _, rate = ortho3d.analytic_equivalent(MotionKind.parse(kind), scale)
    target = 2.0 * c * c * t / (3.0 * rate)
    normal = sps.norm(scale=math.sqrt(target))
    coords = {}
    worst = 0.0
    ok = True
    for axis, name in enumerate("xyz"):
        x = batch.endpoints[:, axis]
        var, se, z = variance_z_score(x, target)
        ks = ks_test(x, normal.cdf)
        worst = max(worst, abs(z))
        ok = ok and abs(z) <= SIGMA_LIMIT and ks.passed
        coords[name] = {"variance": var, "standard_error": se, "z": z,
                        "ks_statistic": ks.statistic, "ks_threshold": ks.threshold, "ks_pass": ks.passed}
    exact = (2.0 * c * c / 3.0) * (t / rate - (1.0 - math.exp(-rate * t)) / rate**2)
    details = {"kind": MotionKind.parse(kind).value, "scale": scale, "t": t, "target_variance": target,
               "finite_rate_variance": exact, "coordinates": coords}
    return StatReport("kac", worst, SIGMA_LIMIT, n, ok, details)
