"""
Command-line interface for orthomotion.

Every command builds a JobConfig and hands it to ``run``, which returns
records; those are written as CSV (header row, 17 significant digits) or as
one JSON object ``{"config": ..., "results": [...]}``.

Usage:
    orthomotion masses --kind osm --lambda 1 --t 1
    orthomotion density --target edge --kind osm --lambda 1 --t 1 --grid 101
    orthomotion simulate --kind oum --lambda 1 --t 1 --n 1000 --seed 7 -o paths.csv
    orthomotion verify --suite masses --suite edge --seed 3 --format json
    orthomotion pde-check --equation edge-osm

Exit codes: 0 ok, 1 a check failed, 2 invalid arguments.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import click
import numpy as np

from . import occupation, ortho3d, planar3
from .events import RateFunction
from .ortho3d import MotionKind
from .rng import default_threads
from .telegraph import TelegraphParams, TwoSpeedParams, sym_density_closed, two_speed_density

__all__ = ["JobConfig", "run", "main"]

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

COMMANDS = ("simulate", "masses", "density", "verify", "pde-check")
MOTION_KINDS = ("osm", "oum", "osdm")
PLANAR_KINDS = ("uniform", "sd")
DENSITY_TARGETS = ("telegraph", "two-speed", "planar3", "edge", "plane", "face", "tz", "joint-txty",
                   "z-eq-ctz", "tz-eq-t")
VERIFY_SUITES = ("masses", "telegraph", "planar3", "edge", "face", "endpoint", "kac")

_ONE_D = {"telegraph", "two-speed", "edge", "tz", "z-eq-ctz", "tz-eq-t"}
_NO_KIND = {"telegraph", "two-speed"}
_OUM_ONLY = {"z-eq-ctz", "tz-eq-t"}
_PLANAR_KIND = {"uniform": planar3.Planar3Kind.UNIFORM, "sd": planar3.Planar3Kind.SYMMETRICALLY_DEVIATING}
_DEFAULT_N = {"masses": 10**6, "telegraph": 10**5, "planar3": 10**6, "edge": 10**7, "face": 10**7,
              "endpoint": 10**6, "kac": 10**5}


class ConfigError(ValueError):
    """Invalid job configuration; reported with exit code 2."""


@dataclass(frozen=True)
class JobConfig:
    command: str
    kind: str | None = None
    rate: RateFunction | None = None
    c: float = 1.0
    t: float = 1.0
    seed: int | None = None
    n_paths: int | None = None
    fmt: str = "csv"
    target: str | None = None
    grid: int = 101
    bins: int = 0
    suites: tuple[str, ...] = ()
    scale: float = 400.0
    lambda_still: float | None = None
    p_move0: float = 1.0 / 3.0
    equations: tuple[str, ...] = ()
    threads: int = field(default_factory=default_threads, compare=False)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("c", "t", "scale"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be positive and finite, got {value!r}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.command in ("simulate", "verify") and self.seed is None:
            raise ConfigError(f"{self.command} is stochastic: --seed is required")
        if self.command == "masses" and self.n_paths and self.seed is None:
            raise ConfigError("a Monte Carlo comparison needs --seed")
        if self.seed is not None and not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.n_paths is not None and self.n_paths < 1:
            raise ConfigError("the number of paths must be positive")
        if self.command == "density":
            self._check_density()
        elif self.command in ("simulate", "masses") and self.kind not in MOTION_KINDS:
            raise ConfigError(f"--kind must be one of {', '.join(MOTION_KINDS)}")
        if self.command in ("simulate", "masses", "density", "verify") and self.target not in _NO_KIND:
            if self.rate is None:
                raise ConfigError("a switching rate is required (--lambda or --rate-table)")
        if self.command == "verify":
            bad = set(self.suites) - set(VERIFY_SUITES)
            if bad:
                raise ConfigError(f"unknown suite(s): {', '.join(sorted(bad))}")

    def _check_density(self):
        target, kind = self.target, self.kind
        if target not in DENSITY_TARGETS:
            raise ConfigError(f"--target must be one of {', '.join(DENSITY_TARGETS)}")
        if self.grid < 3:
            raise ConfigError("--grid needs at least 3 points")
        if target in _NO_KIND:
            if kind is not None:
                raise ConfigError(f"target {target} takes no --kind")
        elif target == "planar3":
            if kind not in PLANAR_KINDS:
                raise ConfigError(f"target planar3 needs --kind {' or '.join(PLANAR_KINDS)}")
        elif kind not in MOTION_KINDS:
            raise ConfigError(f"target {target} needs --kind {', '.join(MOTION_KINDS)}")
        elif target in _OUM_ONLY and kind == "osm":
            raise ConfigError(f"target {target} is an OUM law (OSDM maps onto it); OSM has no such density")
        if self.rate is not None and not self.rate.is_constant:
            raise ConfigError("analytic densities need a constant rate (--lambda)")
        if target == "two-speed" and self.lambda_still is None:
            raise ConfigError("target two-speed needs --lambda-still")
        if not 0.0 <= self.p_move0 <= 1.0:
            raise ConfigError("--p-move0 must lie in [0, 1]")

    @property
    def lam(self) -> float:
        if self.rate is None or not self.rate.is_constant:
            raise ConfigError("this job needs a constant rate (--lambda)")
        return self.rate.values[0]

    def echo(self) -> dict:
        """Configuration as written into JSON outputs (worker count excluded)."""
        out = asdict(self)
        out.pop("threads")
        out["rate"] = None if self.rate is None else self.rate.to_dict()
        out["suites"] = list(self.suites)
        out["equations"] = list(self.equations)
        return out


@dataclass
class JobResult:
    columns: tuple[str, ...]
    records: list[dict]
    passed: bool = True


# ---------------------------------------------------------------------------
# jobs


def _simulate(cfg: JobConfig) -> JobResult:
    n = cfg.n_paths or 1000
    if cfg.bins:
        edges = np.linspace(-cfg.c * cfg.t, cfg.c * cfg.t, cfg.bins + 1)
        parts = ortho3d.simulate(cfg.kind, cfg.rate, cfg.c, cfg.t, n, cfg.seed, threads=cfg.threads,
                                 reducer=lambda b, s: np.histogramdd(b.endpoints, bins=(edges,) * 3)[0])
        counts = np.sum(parts, axis=0).astype(np.int64)
        mid = 0.5 * (edges[1:] + edges[:-1])
        records = [{"i": i, "j": j, "k": k, "x": mid[i], "y": mid[j], "z": mid[k], "count": int(counts[i, j, k])}
                   for i, j, k in np.ndindex(counts.shape)]
        return JobResult(("i", "j", "k", "x", "y", "z", "count"), records)
    batch = ortho3d.simulate(cfg.kind, cfg.rate, cfg.c, cfg.t, n, cfg.seed, threads=cfg.threads)
    names = ("vertex", "edge", "face", "interior")
    pts, occ = batch.endpoints, batch.occupation
    records = [{"path": i, "x": pts[i, 0], "y": pts[i, 1], "z": pts[i, 2], "t_x": occ[i, 0], "t_y": occ[i, 1],
                "t_z": occ[i, 2], "n_events": int(batch.n_events[i]), "category": names[batch.category[i]]}
               for i in range(n)]
    return JobResult(("path", "x", "y", "z", "t_x", "t_y", "t_z", "n_events", "category"), records)


def _masses(cfg: JobConfig) -> JobResult:
    cum = float(cfg.rate.cumulative(cfg.t))
    exact = ortho3d.masses(cfg.kind, cum)
    records = [{"class": name, "closed_form": value} for name, value in exact.items()]
    if not cfg.n_paths:
        return JobResult(("class", "closed_form"), records)
    counts = np.sum(ortho3d.simulate(cfg.kind, cfg.rate, cfg.c, cfg.t, cfg.n_paths, cfg.seed, threads=cfg.threads,
                                     reducer=lambda b, s: np.bincount(b.category, minlength=4)), axis=0)
    ok = True
    for rec, count in zip(records, counts):
        p, n = rec["closed_form"], cfg.n_paths
        z = (count - n * p) / math.sqrt(n * p * (1.0 - p))
        rec.update({"mc_frequency": count / n, "z_score": z, "pass": abs(z) <= 3.0})
        ok = ok and rec["pass"]
    return JobResult(("class", "closed_form", "mc_frequency", "z_score", "pass"), records, ok)


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(lo, hi, n)[1:-1]


def _density_1d(cfg: JobConfig):
    kind, c, t = cfg.kind, cfg.c, cfg.t
    ct = c * t
    if cfg.target == "telegraph":
        return "x", _axis(-ct, ct, cfg.grid), lambda x: sym_density_closed(TelegraphParams(cfg.lam, c), t, x)
    if cfg.target == "edge":
        return "v", _axis(-ct, ct, cfg.grid), lambda v: ortho3d.edge_density(kind, cfg.lam, c, t, v)
    if cfg.target == "tz":
        return "s", _axis(0.0, t, cfg.grid), lambda s: occupation.tz_density(kind, cfg.lam, t, s)
    if cfg.target == "two-speed":
        p = TwoSpeedParams(cfg.lam, cfg.lambda_still, cfg.p_move0)
        return "s", _axis(0.0, t, cfg.grid), lambda s: two_speed_density(p, t, s)
    _, lam = ortho3d.analytic_equivalent(MotionKind.parse(kind), cfg.lam)
    if cfg.target == "z-eq-ctz":
        return "s", _axis(0.0, t, cfg.grid), lambda s: occupation.cond_z_eq_ctz_density_oum(lam, t, s)
    return "z", _axis(-ct, ct, cfg.grid), lambda z: occupation.cond_tz_eq_t_density_oum(lam, c, t, z)


def _density_2d(cfg: JobConfig):
    kind, c, t = cfg.kind, cfg.c, cfg.t
    ct = c * t
    eps = 1e-12
    if cfg.target == "planar3":
        p = planar3.Planar3Params(cfg.lam, c, _PLANAR_KIND[kind])
        verts = planar3.triangle_vertices(t, c)
        xs = np.linspace(verts[:, 0].min(), verts[:, 0].max(), cfg.grid)
        ys = np.linspace(verts[:, 1].min(), verts[:, 1].max(), cfg.grid)
        inside = lambda x, y: np.min(planar3.barycentric(x, y, t, c), axis=0) > eps * ct
        return ("x", "y"), xs, ys, inside, lambda x, y: planar3.density(p, t, x, y)
    if cfg.target == "plane":
        xs = ys = np.linspace(-ct, ct, cfg.grid)
        inside = lambda x, y: np.abs(x) + np.abs(y) < ct * (1 - eps)
        return ("x", "y"), xs, ys, inside, lambda x, y: ortho3d.plane_conditioned_density(kind, cfg.lam, c, t, x, y)
    if cfg.target == "face":
        xs = ys = np.linspace(0.0, ct, cfg.grid)
        inside = lambda x, y: (x > eps * ct) & (y > eps * ct) & (x + y < ct * (1 - eps))
        return ("x", "y"), xs, ys, inside, lambda x, y: ortho3d.face_density(kind, cfg.lam, c, t, x, y)
    xs = ys = np.linspace(0.0, t, cfg.grid)
    inside = lambda s, r: (s > eps * t) & (r > eps * t) & (s + r < t * (1 - eps))
    return ("s", "r"), xs, ys, inside, lambda s, r: occupation.joint_txty_density(kind, cfg.lam, c, t, s, r)


def _density(cfg: JobConfig) -> JobResult:
    if cfg.target in _ONE_D:
        name, xs, fn = _density_1d(cfg)
        values = np.asarray(fn(xs), dtype=float)
        return JobResult((name, "density"), [{name: x, "density": v} for x, v in zip(xs, values)])
    names, xs, ys, inside, fn = _density_2d(cfg)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    keep = inside(gx, gy)
    px, py = gx[keep], gy[keep]
    values = np.asarray(fn(px, py), dtype=float)
    return JobResult((*names, "density"),
                     [{names[0]: a, names[1]: b, "density": v} for a, b, v in zip(px, py, values)])


def _verify(cfg: JobConfig) -> JobResult:
    from .verify import compare

    kind, c, t, seed = cfg.kind or "osm", cfg.c, cfg.t, cfg.seed
    lam = cfg.lam
    records = []

    def n_for(suite):
        return cfg.n_paths or _DEFAULT_N[suite]

    boundary = None
    for suite in cfg.suites or VERIFY_SUITES:
        if suite == "masses":
            reports = [compare.singular_mass_check(kind, lam, t, n_for(suite), seed, c=c, threads=cfg.threads)]
        elif suite == "telegraph":
            reports = [compare.telegraph_ks(TelegraphParams(lam, c), t, n_for(suite), seed)]
        elif suite == "planar3":
            reports = [compare.planar_tv(planar3.Planar3Params(lam, c), t, n_for(suite), seed)]
        elif suite in ("edge", "face"):
            if boundary is None:
                boundary = compare.boundary_samples(kind, lam, c, t, n_for(suite), seed, threads=cfg.threads)
            check = compare.edge_chi2 if suite == "edge" else compare.face_tv
            reports = [check(boundary, kind, lam, c, t)]
        elif suite == "endpoint":
            reports = [compare.endpoint_tv("osdm", lam, "oum", 1.2 * lam, c, t, n_for(suite), seed,
                                           threshold=0.015, threads=cfg.threads)]
        else:
            reports = [compare.kac_limit_check(kind, cfg.scale, t, n_for(suite), seed, threads=cfg.threads)]
        records.extend({"suite": suite, **r.to_dict()} for r in reports)
    ok = all(r["pass"] for r in records)
    return JobResult(("suite", "test", "statistic", "threshold", "n_samples", "pass"), records, ok)


def _pde_check(cfg: JobConfig) -> JobResult:
    from .verify import suite

    lam = cfg.lam
    wanted = set(cfg.equations)
    records = []
    for job in suite.identity_jobs(lam, cfg.c):
        if wanted and job.label not in wanted:
            continue
        report, matches = suite.run_identity_job(job)
        records.append({"check": "identity", "id": job.label, "value": report.max_discrepancy,
                        "threshold": report.tolerance, "expect_identity": job.expect_identity,
                        "pass": matches, **{k: v for k, v in report.to_dict().items() if k not in ("pass", "label")}})
    for job in suite.residual_jobs(lam, cfg.c):
        if wanted and job.equation_id not in wanted:
            continue
        outcome = suite.run_residual_job(job)
        rec = outcome.to_dict()
        records.append({"check": "fd_residual", "id": job.equation_id, "value": rec.pop("max_rel_residual"),
                        **rec})
    if wanted and not records:
        raise ConfigError(f"no check matches {', '.join(sorted(wanted))}")
    ok = all(r["pass"] for r in records)
    return JobResult(("check", "id", "value", "threshold", "pass", "convergence_ratio",
                      "negative_control_rel_residual"), records, ok)


_RUNNERS = {"simulate": _simulate, "masses": _masses, "density": _density, "verify": _verify,
            "pde-check": _pde_check}


def run(config: JobConfig) -> JobResult:
    try:
        return _RUNNERS[config.command](config)
    except ValueError as exc:  # DomainError included
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    return value


def _csv_cell(value) -> str:
    value = _plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.17g" % value
    return str(value)


def render(config: JobConfig, result: JobResult) -> str:
    if config.fmt == "json":
        doc = {"config": _plain(config.echo()), "results": _plain(result.records)}
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for rec in result.records:
        writer.writerow([_csv_cell(rec.get(col)) for col in result.columns])
    return buf.getvalue()


def _write(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc.strerror or exc}") from exc


def execute(config: JobConfig, out: str, *, paths_out: str | None = None) -> int:
    result = run(config)
    _write(render(config, result), out)
    if paths_out is not None:
        buf = io.StringIO()
        ortho3d.write_paths_jsonl(ortho3d.iter_paths(config.kind, config.rate, config.c, config.t,
                                                     config.n_paths or 1000, config.seed), buf, seed=config.seed)
        _write(buf.getvalue(), paths_out)
    return EXIT_OK if result.passed else EXIT_FAILED


# ---------------------------------------------------------------------------
# click surface


class RateTable(click.ParamType):
    """Piecewise-constant rate written as ``knot:value,knot:value``, first knot 0."""

    name = "rate-table"

    def convert(self, value, param, ctx):
        if isinstance(value, RateFunction):
            return value
        try:
            pairs = [item.split(":") for item in value.split(",")]
            knots = [float(k) for k, _ in pairs]
            values = [float(v) for _, v in pairs]
            return RateFunction.tabulated(knots, values)
        except ValueError as exc:
            self.fail(f"{value!r}: {exc}", param, ctx)


POSITIVE = click.FloatRange(min=0.0, min_open=True)


def _common(fn):
    options = [
        click.option("--lambda", "lam", type=POSITIVE, help="Constant switching rate."),
        click.option("--c", type=POSITIVE, default=1.0, show_default=True, help="Speed."),
        click.option("--t", type=POSITIVE, default=1.0, show_default=True, help="Time horizon."),
        click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True),
        click.option("-o", "--out", default="-", show_default=True, help="Output file ('-' for stdout)."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _rate(lam, table):
    if lam is not None and table is not None:
        raise ConfigError("give either --lambda or --rate-table, not both")
    return RateFunction.constant(lam) if lam is not None else table


def _finish(config_factory, out, **extra) -> None:
    try:
        code = execute(config_factory(), out, **extra)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    sys.exit(code)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Orthogonal random motions: simulation, analytic laws and checks."""


@main.command()
@_common
@click.option("--kind", type=click.Choice(MOTION_KINDS), required=True)
@click.option("--rate-table", type=RateTable(), help="Piecewise-constant rate, e.g. '0:1,0.5:2'.")
@click.option("--n", "n_paths", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), required=True)
@click.option("--bins", type=click.IntRange(min=0), default=0, show_default=True,
              help="Endpoint histogram with this many bins per axis (0: one row per path).")
@click.option("--paths", "paths_out", help="Also dump full paths as JSON lines to this file.")
@click.option("--threads", type=click.IntRange(min=1), help="Worker threads (default: ORTHOMOTION_THREADS or 1).")
def simulate(lam, c, t, fmt, out, kind, rate_table, n_paths, seed, bins, paths_out, threads):
    """Simulate paths; write endpoints, occupation times and classes."""
    _finish(lambda: JobConfig("simulate", kind, _rate(lam, rate_table), c, t, seed, n_paths, fmt, bins=bins,
                              threads=threads or default_threads()), out, paths_out=paths_out)


@main.command()
@_common
@click.option("--kind", type=click.Choice(MOTION_KINDS), required=True)
@click.option("--rate-table", type=RateTable(), help="Piecewise-constant rate, e.g. '0:1,0.5:2'.")
@click.option("--mc", "n_paths", type=click.IntRange(min=1), help="Compare with this many simulated paths.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1))
@click.option("--threads", type=click.IntRange(min=1))
def masses(lam, c, t, fmt, out, kind, rate_table, n_paths, seed, threads):
    """Probabilities of ending on a vertex, an edge, a face or inside."""
    _finish(lambda: JobConfig("masses", kind, _rate(lam, rate_table), c, t, seed, n_paths, fmt,
                              threads=threads or default_threads()), out)


@main.command()
@_common
@click.option("--target", type=click.Choice(DENSITY_TARGETS), required=True)
@click.option("--kind", type=click.Choice(MOTION_KINDS + PLANAR_KINDS),
              help="osm/oum/osdm for 3-D laws; uniform/sd for planar3; none for telegraph and two-speed.")
@click.option("--grid", type=click.IntRange(min=3), default=101, show_default=True,
              help="Points per axis, boundary points dropped.")
@click.option("--lambda-still", type=POSITIVE, help="two-speed: rate of leaving velocity 0 (--lambda leaves 1).")
@click.option("--p-move0", type=float, default=1.0 / 3.0, show_default=True,
              help="two-speed: probability of starting at velocity 1.")
def density(lam, c, t, fmt, out, target, kind, grid, lambda_still, p_move0):
    """Evaluate an analytic density on a grid of its open support."""
    _finish(lambda: JobConfig("density", kind, _rate(lam, None), c, t, fmt=fmt, target=target, grid=grid,
                              lambda_still=lambda_still, p_move0=p_move0), out)


@main.command()
@_common
@click.option("--kind", type=click.Choice(MOTION_KINDS), default="osm", show_default=True)
@click.option("--suite", "suites", type=click.Choice(VERIFY_SUITES), multiple=True,
              help="Repeatable; default: all suites.")
@click.option("--n", "n_paths", type=click.IntRange(min=1), help="Paths per suite (default: per-suite).")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), required=True)
@click.option("--scale", type=POSITIVE, default=400.0, show_default=True, help="kac: lambda = c^2 = scale.")
@click.option("--threads", type=click.IntRange(min=1))
def verify(lam, c, t, fmt, out, kind, suites, n_paths, seed, scale, threads):
    """Monte Carlo against the analytic laws (exit 1 if any test fails)."""
    _finish(lambda: JobConfig("verify", kind, _rate(lam or 1.0, None), c, t, seed, n_paths, fmt, suites=tuple(suites),
                              scale=scale, threads=threads or default_threads()), out)


@main.command("pde-check")
@_common
@click.option("--equation", "equations", multiple=True, help="Restrict to these check ids (repeatable).")
def pde_check(lam, c, t, fmt, out, equations):
    """Residuals of the analytic densities and operator identities."""
    _finish(lambda: JobConfig("pde-check", None, _rate(lam or 1.0, None), c, t, fmt=fmt, equations=tuple(equations)), out)


if __name__ == "__main__":
    main()
