"""Singular-mass table over a grid of Lambda(t) for the three motions.

Closed forms next to an exact matrix-exponential evaluation of the chain on
(current direction, set of used directions), and optionally Monte Carlo
frequencies with binomial z-scores.

    python3 scripts/mass_table.py --cum 0.5 1 2 4 --mc 1000000 --seed 1
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from orthomotion import ortho3d
from orthomotion.verify import compare

CLASSES = ("vertices", "edges", "faces", "interior")


@dataclass(frozen=True)
class Config:
    cum_rates: tuple[float, ...] = (0.5, 1.0, 2.0, 4.0)
    kinds: tuple[str, ...] = ("osm", "oum", "osdm")
    mc_paths: int = 0
    seed: int = 1


def chain_masses(kind: str, cum: float) -> np.ndarray:
    if kind == "osdm":
        allowed = lambda d, e: e != d
    elif kind == "osm":
        allowed = lambda d, e: e % 3 != d % 3
    else:
        allowed = lambda d, e: True
    states = [(d, m) for d in range(6) for m in range(64) if m >> d & 1]
    index = {s: i for i, s in enumerate(states)}
    gen = np.zeros((len(states), len(states)))
    for (d, m), i in index.items():
        nxt = [e for e in range(6) if allowed(d, e)]
        for e in nxt:
            gen[i, index[(e, m | 1 << e)]] += 1.0 / len(nxt)
        gen[i, i] -= 1.0
    trans = expm(cum * gen)
    start = np.zeros(len(states))
    for d in range(6):
        start[index[(d, 1 << d)]] = 1.0 / 6.0
    final = start @ trans
    out = np.zeros(4)
    for (_, m), j in index.items():
        axes = {k % 3 for k in range(6) if m >> k & 1}
        reversed_axis = any(m >> k & 1 and m >> (k + 3) & 1 for k in range(3))
        out[3 if reversed_axis else len(axes) - 1] += final[j]
    return out


def main(cfg: Config) -> None:
    header = ["kind", "cum_rate", "class", "closed_form", "chain", "gap"]
    if cfg.mc_paths:
        header += ["mc_frequency", "z"]
    print(",".join(header))
    for kind in cfg.kinds:
        for cum in cfg.cum_rates:
            closed = ortho3d.masses(kind, cum)
            chain = chain_masses(kind, cum)
            counts = (compare.class_counts(kind, cum, 1.0, 1.0, cfg.mc_paths, cfg.seed)
                      if cfg.mc_paths else None)
            for i, name in enumerate(CLASSES):
                row = [kind, f"{cum:g}", name, f"{closed[name]:.15f}", f"{chain[i]:.15f}",
                       f"{abs(closed[name] - chain[i]):.1e}"]
                if counts is not None:
                    n, p = cfg.mc_paths, closed[name]
                    row += [f"{counts[i] / n:.6f}", f"{(counts[i] - n * p) / math.sqrt(n * p * (1 - p)):+.2f}"]
                print(",".join(row))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cum", type=float, nargs="+", default=list(Config.cum_rates))
    ap.add_argument("--kind", nargs="+", default=list(Config.kinds), choices=["osm", "oum", "osdm"])
    ap.add_argument("--mc", type=int, default=0)
    ap.add_argument("--seed", type=int, default=1)
    a = ap.parse_args()
    main(Config(tuple(a.cum), tuple(a.kind), a.mc, a.seed))
