"""Brute-force check of the exact cumulants and density against Monte Carlo samples.

    python scripts/mc_oracle.py --M 8 --x 1 --n 10000000 --bins 32
"""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

import numpy as np

from skewdisorder.charfun import DisorderScale
from skewdisorder.cumulants import cumulants_series
from skewdisorder.inversion import bin_probabilities
from skewdisorder.montecarlo import empirical_cumulants, sample


@dataclass
class OracleConfig:
    M: int = 8
    x: float = 1.0
    n: int = 1_000_000
    seed: int = 12345
    bins: int = 32
    jobs: int = 1


def run(cfg: OracleConfig):
    scale = DisorderScale(cfg.M, cfg.x)
    batch = sample(scale, cfg.n, cfg.seed, jobs=cfg.jobs)
    emp = empirical_cumulants(batch, 4)
    exact = cumulants_series(cfg.M, cfg.x, 4).values
    print(f"{'j':>2} {'exact':>14} {'empirical':>14} {'se':>10} {'z':>7}")
    for j in range(4):
        z = (emp.values[j] - exact[j]) / emp.errors[j]
        print(f"{j + 1:2d} {exact[j]:14.8f} {emp.values[j]:14.8f} {emp.errors[j]:10.2e} {z:7.2f}")
    half = 6 * math.sqrt(exact[1])
    edges = np.linspace(exact[0] - half, exact[0] + half, cfg.bins + 1)
    prob = bin_probabilities(scale, edges)
    counts, _ = np.histogram(batch.samples, edges)
    ok = prob * cfg.n >= 5
    z = (counts[ok] / cfg.n - prob[ok]) / np.sqrt(prob[ok] * (1 - prob[ok]) / cfg.n)
    print(f"bins with >= 5 expected counts: {ok.sum()} of {cfg.bins}; max |z| = {np.abs(z).max():.2f}")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for name, default in vars(OracleConfig()).items():
        p.add_argument(f"--{name}", type=type(default), default=default)
    run(OracleConfig(**vars(p.parse_args(argv))))


if __name__ == "__main__":
    main()
