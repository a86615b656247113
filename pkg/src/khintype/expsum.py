"""Trigonometric kernel bounds and the oscillatory-sum majorant for counts.

kernel_check verifies the two closed-form kernel inequalities on a grid.
majorant evaluates q^d H^-m  sum_{|h| <= H} integral_K prod_i min(1, 1/(r
||h . f'(alpha) e_i||)) d alpha by midpoint quadrature with one level of
dyadic refinement on rough cells; it dominates the exact counts up to a
sweep-wide constant when the rank condition holds, and is independent of the
shift theta by construction.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .counting import CountQuery, enumerate_points
from .manifold import ManifoldSpec, Rectangle


class OutOfRegimeError(ValueError):
    """kappa too large (H = 0) or q * kappa too small (r = 0)."""


@dataclass(frozen=True)
class MajorantParams:
    """H = floor(1/(4 kappa)), r = floor(sqrt(delta q kappa)); both must be >= 1."""

    H: int
    r: int
    delta: float

    @classmethod
    def from_query(cls, q: int, kappa, delta: float) -> "MajorantParams":
        kappa = Fraction(kappa)
        if kappa <= 0 or not 0 < delta <= 1:
            raise ValueError("need kappa > 0 and 0 < delta <= 1")
        H = int(Fraction(1, 4) / kappa)
        r = int(math.floor(math.sqrt(delta * q * float(kappa))))
        return cls(H=H, r=r, delta=delta)

    @property
    def in_regime(self) -> bool:
        return self.H >= 1 and self.r >= 1


def nearest_int_dist(x):
    """Distance to the nearest integer, elementwise (round-half-even ties)."""
    x = np.asarray(x, dtype=float)
    return np.abs(x - np.round(x))


def nearest_int_dist_exact(x: Fraction) -> Fraction:
    """Exact rational distance to the nearest integer."""
    x = Fraction(x)
    frac = x - (x.numerator // x.denominator)
    return min(frac, 1 - frac)


# ----------------------------------------------------------------------
# kernel inequalities

def fejer_sum(H: int, x) -> np.ndarray:
    """sum_{|h| <= H} (H - |h|) e(hx) = (sin(H pi x) / sin(pi x))^2."""
    x = np.asarray(x, dtype=float)
    s = np.sin(np.pi * x)
    near_int = np.abs(s) < 1e-12
    out = np.empty_like(x)
    out[near_int] = float(H * H)
    xs = x[~near_int]
    out[~near_int] = (np.sin(H * np.pi * xs) / np.sin(np.pi * xs)) ** 2
    return out


def dirichlet_sum(H: int, x) -> np.ndarray:
    """sum_{|h| <= H} e(hx) = sin((2H+1) pi x) / sin(pi x)."""
    x = np.asarray(x, dtype=float)
    s = np.sin(np.pi * x)
    near_int = np.abs(s) < 1e-12
    out = np.empty_like(x)
    out[near_int] = float(2 * H + 1)
    xs = x[~near_int]
    out[~near_int] = np.sin((2 * H + 1) * np.pi * xs) / np.sin(np.pi * xs)
    return out


@dataclass
class KernelReport:
    H: int
    n_points: int
    worst_fejer_slack: float      # min of fejer - (2H/pi)^2 [||x|| <= 1/(2H)]
    worst_dirichlet_slack: float  # min of min(2H+1, 1/(2||x||)) - dirichlet

    @property
    def ok(self) -> bool:
        return self.worst_fejer_slack >= -1e-9 and self.worst_dirichlet_slack >= -1e-9


def kernel_check(H: int, xs) -> KernelReport:
    """Slack of the two kernel inequalities over the given points."""
    if H < 1:
        raise ValueError("H must be >= 1")
    xs = np.asarray(xs, dtype=float)
    dist = nearest_int_dist(xs)
    fej = fejer_sum(H, xs)
    lower = (2.0 * H / np.pi) ** 2 * (dist <= 1.0 / (2 * H))
    slack1 = fej - lower
    diri = dirichlet_sum(H, xs)
    with np.errstate(divide="ignore"):
        cap = np.where(dist > 0, 1.0 / (2.0 * dist), np.inf)
    upper = np.minimum(2.0 * H + 1.0, cap)
    slack2 = upper - diri
    return KernelReport(H=H, n_points=len(xs),
                        worst_fejer_slack=float(np.min(slack1)),
                        worst_dirichlet_slack=float(np.min(slack2)))


# ----------------------------------------------------------------------
# quadrature of the product integrand

@lru_cache(maxsize=8)
def _grid_data(spec: ManifoldSpec, rect: Rectangle, grid: int):
    """Midpoint / corner lattices and Jacobian-entry values on both."""
    d = spec.d
    lo = np.array([float(x) for x in rect.lo])
    hi = np.array([float(x) for x in rect.hi])
    widths = (hi - lo) / grid
    mids_1d = [lo[i] + widths[i] * (np.arange(grid) + 0.5) for i in range(d)]
    corners_1d = [lo[i] + widths[i] * np.arange(grid + 1) for i in range(d)]
    mid_pts = np.stack(np.meshgrid(*mids_1d, indexing="ij"), axis=-1)
    corner_pts = np.stack(np.meshgrid(*corners_1d, indexing="ij"), axis=-1)
    jac = spec.map.jacobian_polys
    jac_mid = np.stack([
        np.stack([jac[j][i].eval_array(mid_pts) for i in range(d)]) for j in range(spec.m)
    ])  # (m, d, grid, ..., grid)
    jac_corner = np.stack([
        np.stack([jac[j][i].eval_array(corner_pts) for i in range(d)]) for j in range(spec.m)
    ])
    cell_vol = float(np.prod(widths))
    return mid_pts, corner_pts, jac_mid, jac_corner, widths, cell_vol


def _integrand_from_slopes(slopes: np.ndarray, r: int) -> np.ndarray:
    """prod_i min(1, 1/(r ||slope_i||)) along the leading axis."""
    dist = nearest_int_dist(slopes)
    with np.errstate(divide="ignore"):
        vals = np.where(dist > 0, 1.0 / (r * np.where(dist > 0, dist, 1.0)), np.inf)
    return np.prod(np.minimum(1.0, vals), axis=0)


def _corner_extremes(arr: np.ndarray, d: int):
    """Max and min over the 2^d corner values of each cell of a (g+1,)^d array."""
    mx = None
    mn = None
    for offs in itertools.product((0, 1), repeat=d):
        sl = tuple(slice(o, o + arr.shape[i] - 1) for i, o in enumerate(offs))
        piece = arr[sl]
        mx = piece if mx is None else np.maximum(mx, piece)
        mn = piece if mn is None else np.minimum(mn, piece)
    return mx, mn


def product_integral(spec: ManifoldSpec, h, r: int, grid: int = 32,
                     rect: Rectangle | None = None) -> float:
    """integral over the rectangle of prod_i min(1, 1/(r ||h . f'(alpha) e_i||)).

    Midpoint rule on a grid^d lattice with one dyadic refinement of cells whose
    sampled max/min ratio exceeds 4. The integrand is bounded by 1, so the
    result never exceeds the rectangle volume.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if grid < 8:
        raise ValueError("grid must be >= 8 per axis")
    rect = rect or spec.rect
    d = spec.d
    h = np.asarray(h, dtype=float)
    if h.shape != (spec.m,):
        raise ValueError(f"h must have length {spec.m}")
    vol = float(rect.volume())
    if not np.any(h):
        return vol
    mid_pts, _, jac_mid, jac_corner, widths, cell_vol = _grid_data(spec, rect, grid)

    slopes_mid = np.tensordot(h, jac_mid, axes=(0, 0))        # (d, grid^d ...)
    slopes_corner = np.tensordot(h, jac_corner, axes=(0, 0))
    v_mid = _integrand_from_slopes(slopes_mid, r)
    v_corner = _integrand_from_slopes(slopes_corner, r)

    cmax, cmin = _corner_extremes(v_corner, d)
    cmax = np.maximum(cmax, v_mid)
    cmin = np.minimum(cmin, v_mid)
    rough = cmax > 4.0 * cmin

    total = float(np.sum(np.where(rough, 0.0, v_mid))) * cell_vol
    idx = np.argwhere(rough)
    if len(idx):
        centers = mid_pts[tuple(idx.T)]                        # (F, d)
        offsets = np.array(list(itertools.product((-0.25, 0.25), repeat=d)))
        children = centers[:, None, :] + offsets[None, :, :] * widths[None, None, :]
        flat = children.reshape(-1, d)
        jac_vals = np.stack([
            np.stack([spec.map.jacobian_polys[j][i].eval_array(flat) for i in range(d)])
            for j in range(spec.m)
        ])
        slopes = np.tensordot(h, jac_vals, axes=(0, 0))
        child_vals = _integrand_from_slopes(slopes, r).reshape(len(idx), 2**d)
        total += float(np.sum(np.mean(child_vals, axis=1))) * cell_vol
    return total


def majorant(spec: ManifoldSpec, q: int, kappa, delta: float = 0.01,
             grid: int = 32, rect: Rectangle | None = None) -> float:
    """q^d H^-m sum over |h|_inf <= H of the product integral; theta-free.

    Raises OutOfRegimeError when H < 1 or r < 1. The h-box is folded through
    h <-> -h (the integrand is even in h), summed in a fixed order.
    """
    params = MajorantParams.from_query(q, kappa, delta)
    if not params.in_regime:
        raise OutOfRegimeError(
            f"OUT_OF_REGIME: H={params.H}, r={params.r} (need both >= 1)"
        )
    rect = rect or spec.rect
    H, r, m = params.H, params.r, spec.m
    total = float(rect.volume())  # h = 0 term, exact
    for h in itertools.product(*[range(-H, H + 1)] * m):
        first_nonzero = next((x for x in h if x != 0), 0)
        if first_nonzero <= 0:
            continue  # h = 0 done; strictly-negative-leading handled by evenness
        total += 2.0 * product_integral(spec, h, r, grid=grid, rect=rect)
    return float(q) ** spec.d * total / float(H) ** m


# ----------------------------------------------------------------------
# dominance sweep against exact counts

@dataclass
class CompareRow:
    q: int
    kappa: Fraction
    theta_id: int
    count: int
    majorant: float
    ratio: float
    H: int
    r: int
    delta: float


@dataclass
class CompareTable:
    rows: list
    skipped: list  # (q, kappa, reason) for out-of-regime queries

    def max_ratio(self) -> float:
        return max((r.ratio for r in self.rows), default=0.0)


def compare_sweep(spec: ManifoldSpec, queries, delta: float = 0.01,
                  grid: int = 32, *, workers: int = 1,
                  theta_ids=None) -> CompareTable:
    """Exact count vs majorant for each query; out-of-regime rows are skipped
    with a warning (the majorant is undefined there).

    theta_ids optionally labels each query's shift; defaults to its position.
    """
    rows, skipped = [], []
    maj_cache: dict = {}
    if theta_ids is None:
        theta_ids = range(len(queries))
    for tid, query in zip(theta_ids, queries):
        params = MajorantParams.from_query(query.q, query.kappa, delta)
        if not params.in_regime:
            skipped.append((query.q, query.kappa, f"H={params.H}, r={params.r}"))
            continue
        key = (query.q, query.kappa)
        if key not in maj_cache:
            maj_cache[key] = majorant(spec, query.q, query.kappa, delta, grid)
        M = maj_cache[key]
        res = enumerate_points(spec, query, keep_points=False, workers=workers)
        rows.append(CompareRow(q=query.q, kappa=query.kappa, theta_id=tid,
                               count=res.count, majorant=M,
                               ratio=res.count / M, H=params.H, r=params.r,
                               delta=delta))
    if skipped:
        warnings.warn(f"skipped {len(skipped)} out-of-regime queries")
    return CompareTable(rows=rows, skipped=skipped)
