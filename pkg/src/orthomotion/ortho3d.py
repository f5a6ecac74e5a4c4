"""Three-dimensional motion along the coordinate directions.

Directions are indexed 0..5 as +x, +y, +z, -x, -y, -z, so ``d % 3`` is the
axis and ``d >= 3`` flips the sign. At each Poisson event the new direction
is drawn

* OSM: uniformly among the four orthogonal to the current one,
* OUM: uniformly among all six,
* OSDM: uniformly among the five other than the current one.

The OSDM at rate lam has the law of the OUM at rate 6*lam/5. Samplers run the
OSDM rule as stated; analytic evaluators use the identification.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from . import planar3
from .events import RateFunction, segments
from .grids import DensityGrid, _legendre
from .rng import map_blocks
from .specfun import bessel_ie, gauss_laguerre_sqrt
from .telegraph import DomainError, TelegraphParams, sym_density_closed

DIRECTIONS = np.array(
    [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]], dtype=float
)
SQRT3 = math.sqrt(3.0)
# work arrays per sub-chunk are kept near this many entries
_CHUNK_ENTRIES = 1 << 21

__all__ = [
    "MotionKind", "RateFunction", "Path3D", "Category", "SingularClass", "EndpointBatch",
    "sample_path", "sample_batch", "simulate", "endpoint", "classify", "classify_mask",
    "mass_vertices", "mass_edges", "mass_faces", "masses", "edge_density_osm",
    "edge_density_oum", "edge_density", "edge_mass", "face_map", "FACE_JACOBIAN", "plane_conditioned_density", "plane_ac_mass",
    "face_density", "face_mass", "interior_histogram_mc", "write_paths_jsonl", "read_paths_jsonl",
]


class MotionKind(str, enum.Enum):
    OSM = "osm"
    OUM = "oum"
    OSDM = "osdm"

    @classmethod
    def parse(cls, value) -> "MotionKind":
        return value if isinstance(value, cls) else cls(str(value).lower())


def analytic_equivalent(kind: MotionKind, lam: float) -> tuple[MotionKind, float]:
    """(kind, rate) used by closed forms: OSDM becomes OUM at 6/5 the rate."""
    kind = MotionKind.parse(kind)
    if kind is MotionKind.OSDM:
        return MotionKind.OUM, 1.2 * lam
    return kind, lam


def _as_rate(rate) -> RateFunction:
    return rate if isinstance(rate, RateFunction) else RateFunction.constant(float(rate))


# ---------------------------------------------------------------------------
# paths


def _allowed(kind: MotionKind, a: int, b: int) -> bool:
    if kind is MotionKind.OSM:
        return a % 3 != b % 3
    if kind is MotionKind.OSDM:
        return a != b
    return True


@dataclass(frozen=True)
class Path3D:
    horizon: float
    event_times: tuple[float, ...]
    directions: tuple[int, ...]
    kind: MotionKind
    c: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", MotionKind.parse(self.kind))
        object.__setattr__(self, "event_times", tuple(float(v) for v in self.event_times))
        object.__setattr__(self, "directions", tuple(int(d) for d in self.directions))
        if not (self.horizon > 0 and self.c > 0):
            raise ValueError("horizon and c must be positive")
        ts = self.event_times
        if len(self.directions) != len(ts) + 1:
            raise ValueError("need exactly one more direction than event times")
        if any(not 0 <= d <= 5 for d in self.directions):
            raise ValueError("direction indices must lie in 0..5")
        if ts and not (0.0 < ts[0] and ts[-1] < self.horizon):
            raise ValueError("event times must lie inside (0, horizon)")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("event times must be strictly ascending")
        for a, b in zip(self.directions, self.directions[1:]):
            if not _allowed(self.kind, a, b):
                raise ValueError(f"transition {a}->{b} not allowed for {self.kind.value}")

    @property
    def durations(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.event_times, [self.horizon]]))

    def to_record(self, **extra) -> dict:
        rec = {
            "horizon": self.horizon,
            "kind": self.kind.value,
            "c": self.c,
            "event_times": list(self.event_times),
            "directions": list(self.directions),
        }
        rec.update(extra)
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> "Path3D":
        return cls(rec["horizon"], rec["event_times"], rec["directions"], rec["kind"], rec["c"])


def endpoint(path: Path3D) -> tuple[float, float, float]:
    time_per_dir = np.zeros(6)
    np.add.at(time_per_dir, list(path.directions), path.durations)
    pos = path.c * (time_per_dir[:3] - time_per_dir[3:])
    return tuple(float(v) for v in pos)


class Category(str, enum.Enum):
    VERTEX = "vertex"
    EDGE = "edge"
    FACE = "face"
    INTERIOR = "interior"


@dataclass(frozen=True)
class SingularClass:
    category: Category
    directions: tuple[int, ...] = ()  # distinct directions used, ascending

    @property
    def vertex_direction(self) -> int | None:
        return self.directions[0] if self.category is Category.VERTEX else None

    @property
    def edge_axes(self) -> tuple[int, int] | None:
        """Axis pair spanned by an edge (the missing axis names the edge family)."""
        if self.category is not Category.EDGE:
            return None
        return tuple(sorted(d % 3 for d in self.directions))

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if d < 3 else -1 for d in self.directions)

    @property
    def octant(self) -> tuple[int, int, int] | None:
        """Sign triple (x, y, z) of the face."""
        if self.category is not Category.FACE:
            return None
        out = [0, 0, 0]
        for d in self.directions:
            out[d % 3] = 1 if d < 3 else -1
        return tuple(out)


def _category_of_mask(mask: int) -> Category:
    dirs = [d for d in range(6) if mask >> d & 1]
    if len(dirs) == 1:
        return Category.VERTEX
    opposite = any((mask >> d & 1) and (mask >> (d + 3) & 1) for d in range(3))
    if len(dirs) == 2 and not opposite:
        return Category.EDGE
    if len(dirs) == 3 and not opposite:
        return Category.FACE
    return Category.INTERIOR


_CATEGORY_CODES = (Category.VERTEX, Category.EDGE, Category.FACE, Category.INTERIOR)
# code per 6-bit used-direction mask (mask 0 never occurs)
MASK_CATEGORY = np.array(
    [_CATEGORY_CODES.index(_category_of_mask(m)) if m else 3 for m in range(64)], dtype=np.int8
)


def classify_mask(mask: int) -> SingularClass:
    dirs = tuple(d for d in range(6) if mask >> d & 1)
    return SingularClass(_category_of_mask(mask), dirs)


def classify(path: Path3D) -> SingularClass:
    """Singular class by the set of distinct directions used (purely combinatorial)."""
    mask = 0
    for d in path.directions:
        mask |= 1 << d
    return classify_mask(mask)


# ---------------------------------------------------------------------------
# batched sampling


def _directions(kind: MotionKind, rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    first = rng.integers(0, 6, size=n)
    if k <= 1:
        return first[:, None]
    if kind is MotionKind.OUM:
        rest = rng.integers(0, 6, size=(n, k - 1))
        return np.concatenate([first[:, None], rest], axis=1)
    if kind is MotionKind.OSDM:
        steps = 1 + rng.integers(0, 5, size=(n, k - 1))
        return (first[:, None] + np.concatenate([np.zeros((n, 1), int), np.cumsum(steps, axis=1)], axis=1)) % 6
    # OSM: axis moves by 1 or 2 (mod 3) at every event, sign is fresh
    turns = 1 + rng.integers(0, 2, size=(n, k - 1))
    flips = rng.integers(0, 2, size=(n, k - 1))
    axes = (first[:, None] % 3 + np.concatenate([np.zeros((n, 1), int), np.cumsum(turns, axis=1)], axis=1)) % 3
    signs = np.concatenate([(first // 3)[:, None], flips], axis=1)
    return axes + 3 * signs


@dataclass
class EndpointBatch:
    """Per-path summaries of a block of simulated paths.

    ``dir_time[i, d]`` is the time path i spent moving along direction d and
    ``mask[i]`` the bit set of directions it used.
    """

    dir_time: np.ndarray
    mask: np.ndarray
    n_events: np.ndarray
    c: float
    horizon: float
    raw: tuple[np.ndarray, np.ndarray] | None = None  # (lengths, directions), padded

    @property
    def endpoints(self) -> np.ndarray:
        return self.c * (self.dir_time[:, :3] - self.dir_time[:, 3:])

    @property
    def occupation(self) -> np.ndarray:
        occ = self.dir_time[:, :3] + self.dir_time[:, 3:]
        # third time from the identity so the triple sums to the horizon exactly
        occ[:, 2] = self.horizon - occ[:, 0] - occ[:, 1]
        return occ

    @property
    def category(self) -> np.ndarray:
        return MASK_CATEGORY[self.mask]

    def __len__(self) -> int:
        return len(self.mask)

    def select(self, keep: np.ndarray) -> "EndpointBatch":
        raw = None if self.raw is None else (self.raw[0][keep], self.raw[1][keep])
        return EndpointBatch(self.dir_time[keep], self.mask[keep], self.n_events[keep],
                             self.c, self.horizon, raw)

    @staticmethod
    def concat(parts: list["EndpointBatch"]) -> "EndpointBatch":
        if not parts:
            raise ValueError("nothing to concatenate")
        keep_raw = all(p.raw is not None for p in parts)
        raw = None
        if keep_raw:
            width = max(p.raw[0].shape[1] for p in parts)

            def pad(a, fill):
                return np.pad(a, ((0, 0), (0, width - a.shape[1])), constant_values=fill)

            raw = (np.concatenate([pad(p.raw[0], 0.0) for p in parts]),
                   np.concatenate([pad(p.raw[1], -1) for p in parts]))
        return EndpointBatch(
            np.concatenate([p.dir_time for p in parts]),
            np.concatenate([p.mask for p in parts]),
            np.concatenate([p.n_events for p in parts]),
            parts[0].c, parts[0].horizon, raw,
        )

    def path(self, i: int, kind: MotionKind) -> Path3D:
        if self.raw is None:
            raise ValueError("batch was simulated without raw paths")
        lengths, dirs = self.raw
        k = int(self.n_events[i])
        times = np.cumsum(lengths[i, :k])
        return Path3D(self.horizon, tuple(times), tuple(dirs[i, : k + 1]), kind, self.c)


def _expected_width(rate: RateFunction, t: float) -> float:
    mean = rate.sup_bound_on(t) * t
    return mean + 6.0 * math.sqrt(mean) + 8.0


def sample_batch(kind, rate, c: float, t: float, rng: np.random.Generator, n: int,
                 *, keep_raw: bool = False) -> EndpointBatch:
    """Simulate n paths with one generator (sub-chunked, deterministic order)."""
    kind = MotionKind.parse(kind)
    rate = _as_rate(rate)
    chunk = max(64, int(_CHUNK_ENTRIES // _expected_width(rate, t)))
    parts = []
    for start in range(0, n, chunk):
        m = min(chunk, n - start)
        counts, lengths = segments(rng, rate, t, m)
        kseg = lengths.shape[1]
        dirs = _directions(kind, rng, m, kseg)
        real = np.arange(kseg)[None, :] <= counts[:, None]
        dir_time = np.stack([np.where(dirs == d, lengths, 0.0).sum(axis=1) for d in range(6)], axis=1)
        bits = np.where(real, np.left_shift(1, dirs), 0)
        mask = np.bitwise_or.reduce(bits, axis=1).astype(np.int64)
        raw = (lengths, np.where(real, dirs, -1)) if keep_raw else None
        parts.append(EndpointBatch(dir_time, mask, counts, c, t, raw))
    return EndpointBatch.concat(parts)


def sample_path(kind, rate, c: float, t: float, rng: np.random.Generator) -> Path3D:
    kind = MotionKind.parse(kind)
    return sample_batch(kind, rate, c, t, rng, 1, keep_raw=True).path(0, kind)


def simulate(kind, rate, c: float, t: float, n: int, seed: int, *,
             reducer: Callable[[EndpointBatch, int], object] | None = None,
             keep_raw: bool = False, threads: int | None = None, salt: int = 0):
    """Simulate n paths from counter-based streams, block by block.

    Without ``reducer`` the blocks are concatenated into one EndpointBatch;
    with it, returns the list of ``reducer(block, start)`` in block order.
    """
    kind = MotionKind.parse(kind)
    rate = _as_rate(rate)

    def run(rng, start, count):
        block = sample_batch(kind, rate, c, t, rng, count, keep_raw=keep_raw)
        return block if reducer is None else reducer(block, start)

    out = map_blocks(run, n, seed, salt=salt, threads=threads)
    return EndpointBatch.concat(out) if reducer is None else out


def iter_paths(kind, rate, c: float, t: float, n: int, seed: int) -> Iterator[Path3D]:
    kind = MotionKind.parse(kind)
    batch = simulate(kind, rate, c, t, n, seed, keep_raw=True, threads=1)
    for i in range(n):
        yield batch.path(i, kind)


def write_paths_jsonl(paths: Iterable[Path3D], stream, *, seed: int | None = None) -> None:
    for i, p in enumerate(paths):
        rec = p.to_record(seed=seed, index=i)
        stream.write(json.dumps(rec, separators=(",", ":")) + "\n")


def read_paths_jsonl(stream) -> list[Path3D]:
    return [Path3D.from_record(json.loads(line)) for line in stream if line.strip()]


# ---------------------------------------------------------------------------
# singular masses


def mass_vertices(kind, cum_rate: float) -> float:
    kind, lam = analytic_equivalent(kind, cum_rate)
    if kind is MotionKind.OSM:
        return math.exp(-lam)
    return math.exp(-5.0 * lam / 6.0)


def mass_edges(kind, cum_rate: float) -> float:
    kind, lam = analytic_equivalent(kind, cum_rate)
    if kind is MotionKind.OSM:
        return 4.0 * (math.exp(-0.75 * lam) - math.exp(-lam))
    return 4.0 * (math.exp(-2.0 * lam / 3.0) - math.exp(-5.0 * lam / 6.0))


def mass_faces(kind, cum_rate: float) -> float:
    kind, lam = analytic_equivalent(kind, cum_rate)
    if kind is MotionKind.OSM:
        return 4.0 * (math.exp(-0.5 * lam) - math.exp(-0.25 * lam)) ** 2
    return 4.0 * (math.exp(-0.5 * lam) - 2.0 * math.exp(-2.0 * lam / 3.0) + math.exp(-5.0 * lam / 6.0))


def masses(kind, cum_rate: float) -> dict[str, float]:
    v, e, f = mass_vertices(kind, cum_rate), mass_edges(kind, cum_rate), mass_faces(kind, cum_rate)
    return {"vertices": v, "edges": e, "faces": f, "interior": 1.0 - v - e - f}


# ---------------------------------------------------------------------------
# edges: density of v = X - Y on the edge {X + Y = ct, Z = 0}


def edge_density_osm(lam: float, c: float, t: float, v):
    return (1.0 / 3.0) * math.exp(-0.75 * lam * t) * sym_density_closed(TelegraphParams(lam / 4.0, c), t, v)


def edge_density_oum(lam: float, c: float, t: float, v):
    # in-plane events at rate 2 lam/3, of which one in four swaps to the other edge direction
    return (1.0 / 3.0) * math.exp(-2.0 * lam * t / 3.0) * sym_density_closed(TelegraphParams(lam / 6.0, c), t, v)


def edge_density(kind, lam: float, c: float, t: float, v):
    kind, lam = analytic_equivalent(kind, lam)
    fn = edge_density_osm if kind is MotionKind.OSM else edge_density_oum
    return fn(lam, c, t, v)


def edge_mass(kind, lam: float, t: float) -> float:
    """Probability of one particular edge (a twelfth of the edge mass)."""
    return mass_edges(kind, lam * t) / 12.0


# ---------------------------------------------------------------------------
# plane-conditioned laws: (X, Y) on {no z-direction ever used}


def _check_square(c: float, t: float, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) + np.abs(y) >= c * t):
        raise DomainError("(x, y) must satisfy |x| + |y| < ct")
    return x, y


def _osm_plane(lam: float, c: float, t: float, x, y):
    # two independent telegraph factors along the diagonals
    inner = TelegraphParams(lam / 4.0, c)
    fu = sym_density_closed(inner, t, x + y)
    fv = sym_density_closed(inner, t, x - y)
    return (4.0 / 3.0) * math.exp(-0.5 * lam * t) * fu * fv


def _dirichlet_kernel(mu: float, lengths: np.ndarray, nodes: int | None = None) -> np.ndarray:
    """exp(-mu t)/mu * int_0^inf exp(-w) prod_d sqrt(z/L_d) I1(2 sqrt(z L_d)) dw, z = mu w/4.

    ``lengths`` has shape (..., m): the aggregated time spent on each of m
    used directions of a four-direction planar motion with uniform choices.
    """
    m = lengths.shape[-1]
    total = lengths.sum(axis=-1)
    if nodes is None:
        nodes = int(min(128, 32 + 8 * math.ceil(mu * float(np.max(total)))))
    v, W = gauss_laguerre_sqrt(nodes)
    roots = np.sqrt(mu * lengths)  # Bessel argument per unit v (w = v^2)
    arg = roots[..., None] * v  # (..., m, nodes)
    scaled = bessel_ie(1, arg)
    # sqrt(z/L) I1 = v sqrt(mu/(4L)) I1(v sqrt(mu L)); 1/sqrt(L) folded as sqrt(mu)/root
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(arg > 0, scaled / arg, 0.5)
    log_growth = roots.sum(axis=-1)[..., None] * v - mu * total[..., None]
    prod = np.prod(ratio, axis=-2) * np.exp(log_growth) * (mu * v * v / 2.0) ** m
    integral = (prod * 2.0 * v) @ W
    return integral / mu


def _oum_plane_uniform(mu: float, c: float, t: float, x, y, *, s_nodes: int | None = None) -> np.ndarray:
    """AC density of the four-direction planar motion with uniform choices at rate mu."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    xs, ys = x / c, y / c
    out = np.zeros(np.broadcast(xs, ys).shape)
    xs, ys = np.broadcast_arrays(xs, ys)
    if s_nodes is None:
        s_nodes = int(min(48, 10 + 2 * math.ceil(mu * t)))
    # all four directions: one free coordinate s = time on -x
    lo = np.maximum(0.0, -xs)
    hi = 0.5 * (t - xs - np.abs(ys))
    gx, gw = _legendre(s_nodes)
    s = 0.5 * (lo + hi)[..., None] + 0.5 * (hi - lo)[..., None] * gx
    l_px = xs[..., None] + s
    l_mx = s
    rest = t - xs[..., None] - 2.0 * s
    l_py = 0.5 * (rest + ys[..., None])
    l_my = 0.5 * (rest - ys[..., None])
    L = np.stack([l_px, l_py, l_mx, l_my], axis=-1)
    L = np.maximum(L, 0.0)
    kern = _dirichlet_kernel(mu, L)
    out += (kern * gw).sum(axis=-1) * 0.5 * (hi - lo) / (2.0 * c * c)
    # three directions: the missing one fixes the point's quadrant-free coordinate
    with np.errstate(invalid="ignore"):
        # on an axis the one-sided limits agree and each holds one mirrored family
        for sign_axis, keep in (("y", ys >= 0), ("y", ys < 0), ("x", xs >= 0), ("x", xs < 0)):
            if not keep.any():
                continue
            if sign_axis == "y":
                along = np.abs(ys[keep])
                a = 0.5 * (t - along + xs[keep])
                b = 0.5 * (t - along - xs[keep])
            else:
                along = np.abs(xs[keep])
                a = 0.5 * (t - along + ys[keep])
                b = 0.5 * (t - along - ys[keep])
            L3 = np.stack([along, a, b], axis=-1)
            out[keep] += _dirichlet_kernel(mu, L3) / (2.0 * c * c)
    return out


def plane_ac_mass(kind, lam: float, t: float) -> float:
    """Probability of staying in the (x, y) plane while using enough directions to be AC there."""
    kind, lam = analytic_equivalent(kind, lam)
    if kind is MotionKind.OSM:
        return (2.0 / 3.0) * math.exp(-0.5 * lam * t) * (1.0 - math.exp(-0.25 * lam * t)) ** 2
    mu = 2.0 * lam / 3.0
    inner = 1.0 - 3.0 * math.exp(-0.5 * mu * t) + 2.0 * math.exp(-0.75 * mu * t)
    return (2.0 / 3.0) * math.exp(-lam * t / 3.0) * inner


def plane_conditioned_density(kind, lam: float, c: float, t: float, x, y):
    """Density of (X, Y) jointly with Z never having moved, on |x| + |y| < ct.

    OSM: the product of two telegraph factors in x + y and x - y.
    OUM: (2/3) exp(-lam t/3) times the four-direction uniform planar law at rate 2 lam/3.
    """
    kind, lam = analytic_equivalent(kind, lam)
    x, y = _check_square(c, t, x, y)
    shape = np.broadcast(x, y).shape
    if kind is MotionKind.OSM:
        val = _osm_plane(lam, c, t, x, y)
    else:
        val = (2.0 / 3.0) * math.exp(-lam * t / 3.0) * _oum_plane_uniform(2.0 * lam / 3.0, c, t, x, y)
    val = np.asarray(val).reshape(shape)
    return val if val.ndim else float(val)


# ---------------------------------------------------------------------------
# faces: (X, Y) on the face x, y, z > 0, x + y + z = ct


def face_map(c: float, t: float, x, y):
    """Affine map from the face (coordinates x, y) onto the planar three-direction triangle."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return 0.5 * (3.0 * x - c * t), SQRT3 * y + 0.5 * SQRT3 * (x - c * t)


FACE_JACOBIAN = 1.5 * SQRT3


def face_planar_params(kind, lam: float, c: float) -> planar3.Planar3Params:
    kind, lam = analytic_equivalent(kind, lam)
    rate = 0.75 * lam if kind is MotionKind.OSM else 0.5 * lam
    return planar3.Planar3Params(rate, c, planar3.Planar3Kind.UNIFORM)


def face_density(kind, lam: float, c: float, t: float, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any((x <= 0) | (y <= 0) | (x + y >= c * t)):
        raise DomainError("(x, y) must lie in the open face x, y > 0, x + y < ct")
    q = face_planar_params(kind, lam, c)
    _, lam_eff = analytic_equivalent(kind, lam)
    u, v = face_map(c, t, x, y)
    val = 0.5 * FACE_JACOBIAN * math.exp(-0.5 * lam_eff * t) * planar3.density(q, t, u, v)
    return val if np.ndim(val) else float(val)


def face_mass(kind, lam: float, t: float) -> float:
    return mass_faces(kind, lam * t) / 8.0


# ---------------------------------------------------------------------------
# interior


def interior_histogram_mc(kind, rate, c: float, t: float, bins: int, n: int, seed: int,
                          *, threads: int | None = None) -> DensityGrid:
    """3-D histogram of interior-classified endpoints over [-ct, ct]^3."""
    edges = np.linspace(-c * t, c * t, bins + 1)

    def reduce(block: EndpointBatch, start: int):
        inside = block.category == 3
        h, _ = np.histogramdd(block.endpoints[inside], bins=(edges, edges, edges))
        return h, int(inside.sum())

    parts = simulate(kind, rate, c, t, n, seed, reducer=reduce, threads=threads)
    counts = sum(p[0] for p in parts)
    n_inside = sum(p[1] for p in parts)
    return DensityGrid(counts, (edges, edges, edges), total=float(n),
                       meta={"interior_fraction": n_inside / n, "n_interior": n_inside})
