#!/usr/bin/env python3
"""The two trigonometric kernel bounds, and the count majorant they yield.

First: for every H, the Fejer-type kernel dominates (2H/pi)^2 on the arc
||x|| <= 1/(2H), and the Dirichlet kernel is capped by min(2H+1, 1/(2||x||)).
We scan a fine grid and report the worst slack (it must never be negative).

Second: those bounds convert the exact count A(q, kappa) into the majorant
q^d H^-m sum_{|h|<=H} integral_K prod_i min(1, 1/(r ||h . f'(alpha) e_i||)),
H = floor(1/(4 kappa)), r = floor(sqrt(delta q kappa)). We check dominance on
a small sweep: A / majorant stays below a single constant.
"""
import numpy as np
from fractions import Fraction

from khintype import CountQuery, builtin, compare_sweep, kernel_check

xs = np.arange(2000) / 2000.0
worst_f = worst_d = np.inf
for H in range(1, 33):
    rep = kernel_check(H, xs)
    worst_f = min(worst_f, rep.worst_fejer_slack)
    worst_d = min(worst_d, rep.worst_dirichlet_slack)
print(f"kernel slacks over H=1..32 x 2000 points: "
      f"fejer >= {worst_f:.2e}, dirichlet >= {worst_d:.2e}")

spec = builtin("tracefree2")
queries = [CountQuery.zero_theta(q, Fraction(1, 4), spec.d, spec.m)
           for q in (512, 1024, 2048)]
for delta in (0.01, 0.1):
    table = compare_sweep(spec, queries, delta=delta, grid=32)
    print(f"\ndelta = {delta}:")
    for row in table.rows:
        print(f"  q={row.q:>5} H={row.H} r={row.r}  A={row.count:>8} "
              f"majorant={row.majorant:>12.0f}  ratio={row.ratio:.5f}")
    print(f"  sweep-wide constant C = {table.max_ratio():.5f}")
