#!/usr/bin/env python3
"""Which nondegeneracy conditions do the catalog surfaces satisfy?

Each condition is a statement about the Hessian pencil t -> sum t_k f_k''(a):
  det1        an m x m mixed-derivative determinant is nonzero (not affine
              invariant; implies surjectivity)
  surjective  the pencil spans m independent directions in Sym^2
  rank2       every nonzero contraction has rank >= 2 (decided by budgeted
              search over the unit t-sphere, with margin and witness)
  drv         every nonzero contraction has two nonzero eigenvalues of a
              common sign (strictly stronger than rank2)

The quadratic catalog maps have constant Hessians, so one point tells all.
The veronese5 surface is the canonical example separating det1 from
surjectivity; the trace-free family shows rank2 without drv.
"""
from khintype import builtin, check_det1, check_drv, check_rank_k, check_surjective

for name in ("parabola", "veronese5", "tracefree2", "tracefree(3)", "tracefree(4)"):
    spec = builtin(name)
    pencil = spec.map.hessian_pencil([0.0] * spec.d)
    print(f"{name} (d={spec.d}, m={spec.m}):")
    if spec.m <= spec.d:
        ok, det = check_det1(pencil)
        print(f"  det1       : {'yes' if ok else 'no':3}  (det = {det:+.3f})")
    ok, sigma = check_surjective(pencil)
    print(f"  surjective : {'yes' if ok else 'no':3}  (sigma_min = {sigma:.3f})")
    if spec.d >= 2:
        rep = check_rank_k(pencil, 2, budget=20_000)
        print(f"  rank2      : {rep.verdict:12} margin {rep.margin:+.3e} "
              f"witness t = {tuple(round(x, 3) for x in rep.witness_t)}")
        rep = check_drv(pencil, budget=20_000)
        print(f"  drv        : {rep.verdict:12} margin {rep.margin:+.3e}")
    print()
