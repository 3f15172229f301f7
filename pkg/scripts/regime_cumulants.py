"""Compare exact cumulants with the leading large-M law of each disorder regime.

    python scripts/regime_cumulants.py --alpha=-1,0,0.5 --M 500,2000,8000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from skewdisorder.cumulants import asymptotic_predict, cumulants_series
from skewdisorder.errors import UnsupportedOrder


@dataclass
class RegimeConfig:
    alphas: tuple = (-1.0, -0.5, 0.0, 0.5)
    ms: tuple = (500, 2000, 8000)
    orders: int = 4


def table(cfg: RegimeConfig):
    for alpha in cfg.alphas:
        for M in cfg.ms:
            exact = cumulants_series(M, float(M) ** alpha, cfg.orders).values
            for j, value in enumerate(exact, start=1):
                try:
                    law = asymptotic_predict(M, alpha, j)
                except UnsupportedOrder:
                    law = float("nan")
                ratio = value / law if law else float("nan")
                yield alpha, M, j, value, law, ratio


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--alpha", default="-1,-0.5,0,0.5")
    p.add_argument("--M", default="500,2000,8000")
    p.add_argument("--orders", type=int, default=4)
    a = p.parse_args(argv)
    cfg = RegimeConfig(tuple(float(v) for v in a.alpha.split(",")), tuple(int(v) for v in a.M.split(",")), a.orders)
    print(f"{'alpha':>6} {'M':>6} {'j':>2} {'exact':>16} {'law':>16} {'ratio':>10}")
    for alpha, M, j, value, law, ratio in table(cfg):
        print(f"{alpha:6.2f} {M:6d} {j:2d} {value:16.8e} {law:16.8e} {ratio:10.6f}")


if __name__ == "__main__":
    main()
