"""Nondegeneracy conditions on symmetric pencils, with witnesses and margins.

Five checks on a pencil t -> sum t_k G_k (typically a Hessian pencil at a
point): two determinant conditions, surjectivity of the flattened pencil, the
quantified "rank >= k for every nonzero contraction" condition, and the
quantified "two nonzero eigenvalues of a common sign" condition.

The quantified conditions are decided by budgeted global search over the unit
sphere; reports carry the located minimum (margin) and the witness direction,
and a pass with margin inside 10x the threshold is downgraded to INCONCLUSIVE
because a finite search cannot certify an open condition at its boundary.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spheresearch import minimize_on_sphere, unit_seeds
from .symspace import EPS_REL, SymPencil, flatten_sym

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

#: Default sphere-seed budgets by number of generators.
def default_budget(m: int) -> int:
    return 20_000 if m <= 3 else 200_000


@dataclass
class RankReport:
    """Outcome of a quantified pencil condition.

    margin is the located minimum over unit t of the condition's decision
    function (k-th singular value, or the signed same-sign-pair margin);
    passes is margin > threshold, and verdict additionally downgrades thin
    passes to INCONCLUSIVE.
    """

    condition: str
    k: int
    verdict: str
    passes: bool
    margin: float
    threshold: float
    witness_t: tuple
    budget_used: int


def check_det1(pencil: SymPencil, eps: float = EPS_REL):
    """Determinant of the m x m matrix with (i, j) entry G_j[e1, e_i].

    Requires m <= d. Returns (nonzero?, determinant).
    """
    if pencil.m > pencil.d:
        raise ValueError("det1 needs m <= d")
    m = pencil.m
    B = pencil.stack[:, 0, :m].T  # rows i, columns j
    det = float(np.linalg.det(B))
    return abs(det) > eps, det


def check_det2(pencil: SymPencil, eps: float = EPS_REL):
    """Determinant of the single generator; defined for m == 1 only."""
    if pencil.m != 1:
        raise ValueError("det2 needs m == 1")
    det = float(np.linalg.det(pencil.stack[0]))
    return abs(det) > eps, det


def check_surjective(pencil: SymPencil, eps: float = EPS_REL):
    """Surjectivity of the pencil as a map Sym^2 R^d -> R^m.

    Equivalent to linear independence of the generators: the m x d(d+1)/2
    flattened matrix must have smallest singular value above eps.
    """
    F = flatten_sym(pencil.stack)
    sigma = np.linalg.svd(F, compute_uv=False)
    smallest = float(sigma[-1]) if len(sigma) >= pencil.m else 0.0
    return smallest > eps, smallest


# ----------------------------------------------------------------------
# quantified conditions over the unit sphere in t-space

def _sigma_k_batch(stack: np.ndarray, k: int):
    d = stack.shape[-1]

    def fn(T: np.ndarray) -> np.ndarray:
        mats = np.tensordot(T, stack, axes=(1, 0))
        absw = np.sort(np.abs(np.linalg.eigvalsh(mats)), axis=1)
        return absw[:, d - k]

    return fn


def _same_sign_margin_batch(stack: np.ndarray):
    # margin(t) = max(lambda_(2), -lambda_(d-1)) with eigenvalues descending;
    # positive iff the contraction has two nonzero eigenvalues of one sign.
    def fn(T: np.ndarray) -> np.ndarray:
        mats = np.tensordot(T, stack, axes=(1, 0))
        w = np.linalg.eigvalsh(mats)  # ascending
        return np.maximum(w[:, -2], -w[:, 1])

    return fn


def _pencil_basis(pencil: SymPencil):
    """Least-squares solve data: flattened generators and their pseudoinverse."""
    F = flatten_sym(pencil.stack)  # (m, D)
    P = np.linalg.pinv(F.T)        # (m, D): t = P @ x solves F.T t ~ x
    return F, P


def _seeds_from_targets(F: np.ndarray, P: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Map flattened target matrices to the best contracting directions."""
    T = X @ P.T
    norms = np.linalg.norm(T, axis=1)
    keep = norms > 1e-12
    return T[keep] / norms[keep, None]


def _rank1_certificate_seeds(pencil: SymPencil, n_v: int = 192) -> np.ndarray:
    """Directions whose contraction is as close to a rank-one v v^T as the
    pencil allows; if some contraction is exactly rank one these land on it.
    """
    d = pencil.d
    F, P = _pencil_basis(pencil)
    vs = np.concatenate([unit_seeds(d, n_v), np.eye(d)])
    X = flatten_sym(vs[:, :, None] * vs[:, None, :])

    def residual(V: np.ndarray) -> np.ndarray:
        Xv = flatten_sym(V[:, :, None] * V[:, None, :])
        R = Xv - (Xv @ P.T) @ F
        return np.linalg.norm(R, axis=1)

    polish = minimize_on_sphere(residual, d, max(64, n_v // 2), n_starts=2, max_rounds=150)
    vstar = polish.argmin
    Xs = np.concatenate([X, flatten_sym(np.outer(vstar, vstar))[None, :]])
    return _seeds_from_targets(F, P, Xs)


def _pair_certificate_seeds(pencil: SymPencil, n_pairs: int = 192) -> np.ndarray:
    """Directions whose contraction is close to some v v^T - w w^T."""
    d = pencil.d
    F, P = _pencil_basis(pencil)

    def targets(U: np.ndarray):
        v, w = U[:, :d], U[:, d:]
        X = flatten_sym(v[:, :, None] * v[:, None, :] - w[:, :, None] * w[:, None, :])
        return X

    def residual(U: np.ndarray) -> np.ndarray:
        X = targets(U)
        nrm = np.linalg.norm(X, axis=1)
        R = X - (X @ P.T) @ F
        out = np.ones(len(U))
        ok = nrm > 1e-9  # v close to +-w gives the zero matrix; not a witness
        out[ok] = np.linalg.norm(R[ok], axis=1) / nrm[ok]
        return out

    U0 = unit_seeds(2 * d, n_pairs, antipodal=False)
    polish = minimize_on_sphere(residual, 2 * d, n_pairs, antipodal=False,
                                n_starts=3, max_rounds=200)
    X = targets(np.concatenate([U0, polish.argmin[None, :]]))
    nrm = np.linalg.norm(X, axis=1)
    X = X[nrm > 1e-9]
    return _seeds_from_targets(F, P, X)


def _verdict(margin: float, threshold: float):
    if margin <= threshold:
        return FAIL, False
    if margin < 10.0 * threshold:
        return INCONCLUSIVE, True
    return PASS, True


def check_rank_k(pencil: SymPencil, k: int, budget: int | None = None,
                 eps_rel: float = EPS_REL) -> RankReport:
    """Does every unit contraction have k-th largest |eigenvalue| above threshold?

    Minimizes sigma_k(contract(t)) over the unit sphere (sigma_k of a symmetric
    matrix is its k-th largest absolute eigenvalue).
    """
    if not 1 <= k <= pencil.d:
        raise ValueError(f"need 1 <= k <= d, got k={k}, d={pencil.d}")
    if budget is None:
        budget = default_budget(pencil.m)
    threshold = eps_rel * pencil.scale()
    fn = _sigma_k_batch(pencil.stack, k)

    extra = []
    # a dependent-generator direction kills sigma_1 (and everything above)
    F = flatten_sym(pencil.stack)
    _, _, vt = np.linalg.svd(F.T)
    extra.append(vt[-1])
    if k >= 2:
        extra.extend(_rank1_certificate_seeds(pencil))
    res = minimize_on_sphere(fn, pencil.m, budget, extra_seeds=np.asarray(extra))
    verdict, passes = _verdict(res.value, threshold)
    return RankReport(
        condition=f"rank{k}", k=k, verdict=verdict, passes=passes,
        margin=res.value, threshold=threshold,
        witness_t=tuple(float(x) for x in res.argmin), budget_used=res.evals,
    )


def check_drv(pencil: SymPencil, budget: int | None = None,
              eps_rel: float = EPS_REL) -> RankReport:
    """Does every unit contraction have two nonzero eigenvalues of one sign?

    Antipodal reduction applies: negating t swaps the two terms of the margin,
    so the margin function is even in t.
    """
    if pencil.d < 2:
        raise ValueError("the same-sign-pair condition needs d >= 2")
    if budget is None:
        budget = default_budget(pencil.m)
    threshold = eps_rel * pencil.scale()
    fn = _same_sign_margin_batch(pencil.stack)
    extra = _pair_certificate_seeds(pencil)
    res = minimize_on_sphere(fn, pencil.m, budget, extra_seeds=extra)
    verdict, passes = _verdict(res.value, threshold)
    return RankReport(
        condition="drv", k=2, verdict=verdict, passes=passes,
        margin=res.value, threshold=threshold,
        witness_t=tuple(float(x) for x in res.argmin), budget_used=res.evals,
    )
