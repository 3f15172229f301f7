"""Fit log-normal parameters over an (M, alpha) grid and regress their scaling in M.

Records are cached in a JSON-lines file produced by ``skewdisorder sweep``, so an
interrupted run picks up where it stopped.

    python scripts/fit_scaling.py --M 200:1000:100 --alpha=-2,0 --out fits.jsonl
"""

from __future__ import annotations

import argparse
import json
import math
from dataclasses import dataclass, field

from skewdisorder.analysis import scaling_regression
from skewdisorder.cli import SWEEP_ALPHAS, main as cli_main


@dataclass
class ScalingConfig:
    ms: str = "200:1000:100"
    alphas: tuple = SWEEP_ALPHAS
    points: int = 1201
    jobs: int = 1
    out: str = "fits.jsonl"
    extra: list = field(default_factory=list)


def sigma_exponents(alpha):
    # σ′ ~ M^{-(1+α)/2} for α > 0, M^{-1/2} otherwise; next order squares it
    lead = -(1.0 + max(alpha, 0.0)) / 2.0
    return lead, 2.0 * lead


def run(cfg: ScalingConfig):
    alphas = ",".join(repr(float(a)) for a in cfg.alphas)
    code = cli_main(["sweep", "--M", cfg.ms, f"--alpha={alphas}", "--points", str(cfg.points),
                     "--jobs", str(cfg.jobs), "--out", cfg.out])
    if code:
        raise SystemExit(code)
    with open(cfg.out, encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    rows = []
    for alpha in cfg.alphas:
        recs = [r for r in records if r["alpha"] == float(alpha) and r["f0"] is not None]
        if len(recs) < 3:
            continue
        f0 = scaling_regression([(r["M"], r["f0"]) for r in recs], (1, 0))
        sp = scaling_regression([(r["M"], r["sigmaPrime"]) for r in recs], sigma_exponents(alpha))
        width2 = (f0.coefficients[0] * sp.coefficients[0]) ** 2 if alpha <= 0 else math.nan
        rows.append((alpha, f0, sp, width2))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--M", default=ScalingConfig.ms)
    p.add_argument("--alpha", default=",".join(map(str, SWEEP_ALPHAS)))
    p.add_argument("--points", type=int, default=ScalingConfig.points)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=ScalingConfig.out)
    a = p.parse_args(argv)
    cfg = ScalingConfig(a.M, tuple(float(v) for v in a.alpha.split(",")), a.points, a.jobs, a.out)
    print(f"{'alpha':>6}  {'f0 = a M + b':>24}  {'sigma_prime':>40}  (f0 s')^2/M")
    for alpha, f0, sp, width2 in run(cfg):
        (a1, b1), (p1, p2), (c1, c2) = f0.coefficients, sp.exponents, sp.coefficients
        print(f"{alpha:6.2f}  {a1:9.4f} M {b1:+10.4f}  "
              f"{c1:9.4f} M^{p1:+.3f} {c2:+10.4f} M^{p2:+.3f}  {width2:.6f}")
    print(f"pi^2/12 = {math.pi**2 / 12:.6f}")


if __name__ == "__main__":
    main()
