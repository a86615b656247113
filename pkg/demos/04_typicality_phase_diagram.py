#!/usr/bin/env python3
"""Phase diagram: how typical are the rank-2 and same-sign-pair conditions?

For Gaussian pencils of m symmetric d x d matrices the theory predicts sharp
thresholds in m:
    U  (rank2 for all t != 0)  : co-null up to C(d,2), empty from C(d+1,2),
                                 mixed in between
    U~ (same-sign pair)        : co-null up to C(d-1,2), empty above C(d,2),
                                 and empty already at (d,m) = (3,2) because
                                 the middle eigenvalue is odd and continuous
We sample each cell and print observed frequencies against the prediction,
then exhibit the middle-eigenvalue obstruction explicitly: for any surjective
(3,2) pencil a zero of the middle eigenvalue can be bisected along a
semicircle of contractions.
"""
import numpy as np

from khintype import find_zero_middle_eig, middle_eigenvalue, phase_scan, sample_operator

print("cell scan (400 samples each):")
print(f"{'d':>3} {'m':>3} {'freq U':>8} {'pred U':>13} {'freq U~':>8} {'pred U~':>13} agree")
for rep in phase_scan(d_max=3, n_samples=400, budget=2048, seed=11):
    print(f"{rep.d:>3} {rep.m:>3} {rep.freq_U:>8.3f} {rep.predicted_U:>13} "
          f"{rep.freq_Utilde:>8.3f} {rep.predicted_Utilde:>13} {rep.agree}")

print("\nmiddle-eigenvalue obstruction at (d, m) = (3, 2):")
for seed in range(5):
    sample = sample_operator(3, 2, seed)
    t = find_zero_middle_eig(sample)
    gamma = middle_eigenvalue(sample.pencil.contract(t))
    print(f"  seed {seed}: t* = ({t[0]:+.6f}, {t[1]:+.6f}), "
          f"middle eigenvalue {gamma:+.2e}")
print("every pencil's contraction family crosses the difference-of-squares "
      "cone, so the same-sign-pair condition cannot hold for all t")
