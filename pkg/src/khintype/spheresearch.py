"""Budgeted global minimization of batched functions on the unit sphere.

Strategy: deterministic quasi-uniform seed grid (antipodally deduplicated
when the objective is even), then coordinate descent on the sphere from the
best seeds with a halving step down to a fixed tolerance. Objectives receive
whole batches of unit vectors at once so eigenvalue work can be vectorized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SphereMin:
    value: float
    argmin: np.ndarray
    evals: int


def _canonical_sign(points: np.ndarray) -> np.ndarray:
    """Flip each row so its first nonzero entry is positive (antipodal dedupe)."""
    pts = points.copy()
    for row in pts:
        for x in row:
            if x != 0.0:
                if x < 0.0:
                    row *= -1.0
                break
    return pts


def unit_seeds(dim: int, budget: int, antipodal: bool = True) -> np.ndarray:
    """Deterministic quasi-uniform points on S^{dim-1}."""
    budget = max(1, int(budget))
    if dim == 1:
        return np.array([[1.0]]) if antipodal else np.array([[1.0], [-1.0]])
    if dim == 2:
        span = np.pi if antipodal else 2.0 * np.pi
        ang = span * (np.arange(budget) + 0.5) / budget
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if dim == 3:
        # Fibonacci sphere; hemisphere when antipodal
        i = np.arange(budget) + 0.5
        z = 1.0 - i / budget if antipodal else 1.0 - 2.0 * i / budget
        rad = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        golden = np.pi * (3.0 - np.sqrt(5.0))
        ang = golden * i
        return np.stack([rad * np.cos(ang), rad * np.sin(ang), z], axis=1)
    rng = np.random.default_rng(0xC0FFEE + dim)
    pts = rng.standard_normal((budget, dim))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return _canonical_sign(pts) if antipodal else pts


def _normalize_rows(pts: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    keep = norms[:, 0] > 1e-12
    return pts[keep] / norms[keep]


def _descend_multi(batch_fn, T0: np.ndarray, F0: np.ndarray, step0: float,
                   step_tol: float, max_rounds: int):
    """Coordinate descent from several starts at once, one batch per round."""
    S, dim = T0.shape
    T, F = T0.copy(), F0.astype(float).copy()
    steps = np.full(S, step0)
    dirs = np.concatenate([np.eye(dim), -np.eye(dim)])  # (2*dim, dim)
    evals = 0
    for _ in range(max_rounds):
        active = steps >= step_tol
        if not active.any():
            break
        ia = np.nonzero(active)[0]
        cands = T[ia][:, None, :] + steps[ia][:, None, None] * dirs[None, :, :]
        norms = np.linalg.norm(cands, axis=2)
        bad = norms <= 1e-12
        norms[bad] = 1.0
        cands = cands / norms[:, :, None]
        cands[bad] = T[ia][np.nonzero(bad)[0]]  # degenerate step: stay put
        flat = cands.reshape(-1, dim)
        vals = np.asarray(batch_fn(flat), dtype=float).reshape(len(ia), 2 * dim)
        evals += flat.shape[0]
        best = np.argmin(vals, axis=1)
        vb = vals[np.arange(len(ia)), best]
        improved = vb < F[ia]
        T[ia[improved]] = cands[np.arange(len(ia))[improved], best[improved]]
        F[ia[improved]] = vb[improved]
        steps[ia[~improved]] *= 0.5
    k = int(np.argmin(F))
    return T[k], float(F[k]), evals


def minimize_on_sphere(batch_fn, dim: int, budget: int, *, extra_seeds=None,
                       antipodal: bool = True, step_tol: float = 1e-10,
                       n_starts: int = 3, max_rounds: int = 400) -> SphereMin:
    """Minimize batch_fn over the unit sphere in R^dim.

    batch_fn maps an (N, dim) array of unit vectors to N values. The returned
    minimum is an actual evaluation, never an extrapolation, so it always
    upper-bounds the true minimum.
    """
    seeds = unit_seeds(dim, budget, antipodal=antipodal)
    if extra_seeds is not None and len(extra_seeds):
        extra = _normalize_rows(np.atleast_2d(np.asarray(extra_seeds, dtype=float)))
        if len(extra):
            if antipodal:
                extra = _canonical_sign(extra)
            seeds = np.concatenate([seeds, extra])
    vals = np.asarray(batch_fn(seeds), dtype=float)
    evals = len(seeds)
    order = np.argsort(vals, kind="stable")
    best_t, best_f = seeds[order[0]], float(vals[order[0]])
    if dim > 1:
        starts = order[: max(1, n_starts)]
        t, f, used = _descend_multi(batch_fn, seeds[starts], vals[starts],
                                    step0=0.25, step_tol=step_tol,
                                    max_rounds=max_rounds)
        evals += used
        if f < best_f:
            best_t, best_f = t, f
    return SphereMin(value=best_f, argmin=best_t, evals=evals)
