#!/usr/bin/env python3
"""How many shifted rationals (a + lam)/q land kappa/q-close to the graph?

We count exactly (integer arithmetic, strict inequalities) for the trace-free
quadratic surface in R^4 and compare against the envelope
q^d * max(kappa, phi(q))^m, where phi(q) = (log^2 q / q)^(k/(2m+k)) is the
scale below which shrinking kappa stops shrinking the count. The ratio
A / envelope should stay bounded as q grows; its plateau estimates the
implied constant.
"""
from fractions import Fraction

from khintype import builtin, bound_sweep, critical_scale, rationalize

spec = builtin("tracefree2")
qs = [2**j for j in range(6, 11)]

def kappas(q):
    phi = critical_scale(q, spec.m, k=2)
    return [Fraction(1, 4), Fraction(1, 16), rationalize(phi), rationalize(phi / 4)]

thetas = [(0,), (Fraction(3, 10), Fraction(7, 10), Fraction(1, 10), Fraction(9, 10))]

sweep = bound_sweep(spec, 2, qs, kappas, thetas)

print(f"{'q':>6} {'kappa':>10} {'theta':>6} {'A':>9} {'envelope':>12} {'ratio':>8}")
for row in sweep.rows:
    print(f"{row.q:>6} {str(row.kappa):>10} {row.theta_id:>6} "
          f"{row.count:>9} {row.envelope:>12.1f} {row.ratio:>8.4f}")

print("\nmax ratio per q (watch it level off):")
for q, ratio in sorted(sweep.block_summary().items()):
    print(f"  q={q:>5}: {ratio:.4f}")
