"""Sweep ||1 - 2f||_quot in the quotient of span{f_0, f_1, f_2} by C e_3.

The first-row bound (2 * 3^(-q/2))^(1/q) only exceeds 1 above
log 4 / (log 4 - log 3); this prints the observed quotient norm next to it.
"""

import argparse

import numpy as np

from lpalg.core import identity
from lpalg.gallery import MP2_THRESHOLD, make_dft_family, make_en, mp2_lower_bound
from lpalg.pnorm import quotient_seminorm

ap = argparse.ArgumentParser()
ap.add_argument("--grid", default="1.5:6:0.5")
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

a, b, step = (float(t) for t in args.grid.split(":"))
grid = np.round(np.arange(a, b + step / 2, step), 10)
f1 = make_dft_family(3, check_p=())["f_1"]
m = identity(3) - 2 * f1

print(f"threshold for the bound: {MP2_THRESHOLD:.6f}")
print(f"{'p':>6} {'quotient':>12} {'bound':>10}")
for p in grid:
    r = quotient_seminorm(m, [make_en(3)], p, seed=args.seed)
    flag = " >1" if r.value > 1 + 2e-6 else ""
    print(f"{p:6.2f} {r.value:12.8f} {mp2_lower_bound(p):10.6f}{flag}", flush=True)
