"""Run every operator identity and finite-difference residual job and print a table.

    python3 scripts/pde_report.py --lam 1 --c 1
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from orthomotion.verify import suite


@dataclass(frozen=True)
class Config:
    lam: float = 1.0
    c: float = 1.0


def main(cfg: Config) -> int:
    failures = 0
    print(f"{'identity':42s} {'discrepancy':>12s} {'expected':>9s} {'as expected':>12s}")
    for job in suite.identity_jobs(cfg.lam, cfg.c):
        rep, ok = suite.run_identity_job(job)
        failures += not ok
        print(f"{job.label:42s} {rep.max_discrepancy:12.2e} {str(job.expect_identity):>9s} {str(ok):>12s}")
    print()
    print(f"{'equation':16s} {'rel residual':>12s} {'h/2 ratio':>10s} {'perturbed':>10s} {'pass':>5s}")
    for job in suite.residual_jobs(cfg.lam, cfg.c):
        out = suite.run_residual_job(job)
        failures += not out.passed
        print(f"{job.equation_id:16s} {out.report.max_rel_residual:12.2e} {out.convergence.ratio:10.2f} "
              f"{out.negative.max_rel_residual:10.2e} {str(out.passed):>5s}")
    return failures


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--c", type=float, default=1.0)
    a = ap.parse_args()
    raise SystemExit(1 if main(Config(a.lam, a.c)) else 0)
