"""Which inner rates the OUM edge and plane laws need.

Edge: given that only +x and +y are ever used, each event is one of the six
draws; the two in-plane draws that change direction happen at rate lam/6
each way, so the edge position is a telegraph process at rate lam/6. The
script compares the shape of simulated edge positions with telegraph laws
at several candidate rates.

Plane: with z never used, the four in-plane draws happen at rate 2 lam/3
(each 4/6 of lam). The AC plane mass (at least three in-plane
directions used) is checked against the mass formula
evaluated at candidate rates.

    python3 scripts/oum_reduced_rates.py --n 10000000
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from orthomotion import ortho3d
from orthomotion.grids import interval_integral
from orthomotion.telegraph import TelegraphParams, sym_density_closed
from orthomotion.verify import compare
from orthomotion.verify.stats import chi2_test


@dataclass(frozen=True)
class Config:
    lam: float = 4.0
    n_paths: int = 10_000_000
    seed: int = 20240611
    bins: int = 40


def plane_mass(lam: float, mu: float, t: float = 1.0) -> float:
    inner = 1.0 - 3.0 * math.exp(-0.5 * mu * t) + 2.0 * math.exp(-0.75 * mu * t)
    return (2.0 / 3.0) * math.exp(-lam * t / 3.0) * inner


def main(cfg: Config) -> None:
    lam = cfg.lam
    samples = compare.boundary_samples("oum", lam, 1.0, 1.0, cfg.n_paths, cfg.seed)
    edges = np.linspace(-1.0, 1.0, cfg.bins + 1)
    observed, _ = np.histogram(samples.edge_v, bins=edges)
    print("edge: telegraph rate, chi2 (shape), critical, p-value")
    for label, rate in (("lam/4", lam / 4), ("lam/6", lam / 6), ("lam/8", lam / 8), ("lam/3", lam / 3)):
        p = TelegraphParams(rate, 1.0)
        expected = np.array([interval_integral(lambda v: sym_density_closed(p, 1.0, v), a, b, pieces=1)
                             for a, b in zip(edges[:-1], edges[1:])])
        rep = chi2_test(observed, expected * observed.sum() / expected.sum())
        print(f"  {label:6s} {rep.statistic:12.1f} {rep.threshold:8.1f} {rep.details['p_value']:.3g}")

    def reduce(block, start):
        # AC in the plane: z never used and at least three of the four in-plane directions
        no_z = (block.mask & 0b100100) == 0
        in_plane = (((block.mask & 0b011011)[:, None] >> np.arange(6)) & 1).sum(axis=1) >= 3
        return int(np.sum(no_z & in_plane))

    count = sum(ortho3d.simulate("oum", lam, 1.0, 1.0, cfg.n_paths, cfg.seed + 1, reducer=reduce))
    freq = count / cfg.n_paths
    print(f"plane: MC frequency of AC in-plane paths {freq:.6f}")
    for label, mu in (("2lam/3", 2 * lam / 3), ("lam/2", lam / 2)):
        m = plane_mass(lam, mu)
        z = (count - cfg.n_paths * m) / math.sqrt(cfg.n_paths * m * (1 - m))
        print(f"  rate {label:7s} mass {m:.6f}  z {z:+.1f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=Config.lam)
    ap.add_argument("--n", type=int, default=Config.n_paths)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    main(Config(a.lam, a.n, a.seed))
