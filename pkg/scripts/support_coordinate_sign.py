"""Sign of the barycentric coordinates of the planar three-direction motion.

With vertices at distance ct from the centre the coordinates are
z0 = ct + 2x and z1, z2 = ct - x -/+ sqrt(3) y; all are positive inside the
triangle. The alternative reading ct - 2x turns negative on a sizeable part
of the support, which is what rules it out.

    python3 scripts/support_coordinate_sign.py --lam 3 --n 1000000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from orthomotion import planar3
from orthomotion.rng import stream


@dataclass(frozen=True)
class Config:
    lam: float = 3.0
    c: float = 1.0
    t: float = 1.0
    n_paths: int = 1_000_000
    seed: int = 6


def main(cfg: Config) -> None:
    p = planar3.Planar3Params(cfg.lam, cfg.c)
    batch = planar3.sample_planar3_batch(p, cfg.t, stream(cfg.seed), cfg.n_paths)
    ac = batch.distinct == 3
    x, y = batch.x[ac], batch.y[ac]
    ct = cfg.c * cfg.t
    z0, z1, z2 = planar3.barycentric(x, y, cfg.t, cfg.c)
    print(f"AC samples: {ac.sum()} of {cfg.n_paths}")
    print(f"min coordinate over samples: z0 {z0.min():.2e}, z1 {z1.min():.2e}, z2 {z2.min():.2e}")
    print(f"share with ct + 2x > 0: {np.mean(ct + 2 * x > 0):.6f}")
    print(f"share with ct - 2x <= 0: {np.mean(ct - 2 * x <= 0):.6f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=Config.lam)
    ap.add_argument("--n", type=int, default=Config.n_paths)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    main(Config(lam=a.lam, n_paths=a.n, seed=a.seed))
