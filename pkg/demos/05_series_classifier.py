#!/usr/bin/env python3
"""Exact convergence classification of the gauge series, with a numeric probe.

For the gauge g(rho) = rho^s the series sum_q q^n g(q^-1 (q^-1 log^2 q)^e),
e = k/(2m+k), converges exactly when s (1 + e) > n + 1; at equality the
leftover polylog tail diverges. The classifier is pure rational arithmetic.
The probe sums actual terms and guesses from the adjusted tail ratio; it is
NOT rigorous, just a sanity cross-check away from the critical exponent.
"""
from fractions import Fraction

from khintype import DimensionFunction, SeriesSpec, applicability, classify_gseries, partial_sum_probe

print("applicability of the two convergence routes:")
for d, m, k, s in ((4, 1, 1, 5), (2, 2, 2, 4), (1, 1, 1, 2), (3, 2, 2, 6)):
    print(applicability(d, m, k, Fraction(s)).render_text())
    print()

print("classifier vs probe on a spread of exponents (n=3, m=1, k=2):")
for s in (Fraction(7, 2), Fraction(16, 5), Fraction(3), Fraction(5, 2)):
    verdict = classify_gseries(s, n=3, m=1, k=2)
    spec = SeriesSpec(kind="gauge", n=3, g=DimensionFunction(s), m=1, k=2)
    probe = partial_sum_probe(spec, Q=20_000)
    marker = "==" if verdict.verdict == probe.verdict else "!="
    print(f"  s={s}: exact {verdict} {marker} probe {probe.verdict} "
          f"(adjusted ratio {probe.adjusted_ratio:.3f})")

print("\ncritical equality (flagged, classified divergent):")
v = classify_gseries(Fraction(3), n=3, m=2, k=2)  # 3 * (1 + 1/3) = 4 = n + 1 exactly
print(f"  s=3, n=3, m=2, k=2 -> {v}")
