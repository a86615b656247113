"""Graph manifolds {(alpha, f(alpha)) : alpha in K} for polynomial maps f.

Holds exact evaluation of f, its Jacobian and its Hessian pencil, the text
grammar for entering maps, the builtin catalog, and a certified bound for
1 + max |f'| over an enclosing rectangle.
"""
from __future__ import annotations

import heapq
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Sequence

import numpy as np

from .polynomials import ParseError, Polynomial, parse_polynomial
from .symspace import SymMatrix, SymPencil


@dataclass(frozen=True)
class Rectangle:
    """Closed nondegenerate rectangle prod [lo_i, hi_i] with rational corners."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(Fraction(x) for x in self.lo)
        hi = tuple(Fraction(x) for x in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must be nonempty and of equal length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError("need lo[i] < hi[i] in every coordinate")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def d(self) -> int:
        return len(self.lo)

    @classmethod
    def unit(cls, d: int) -> "Rectangle":
        return cls((Fraction(0),) * d, (Fraction(1),) * d)

    def contains(self, point) -> bool:
        if len(point) != self.d:
            raise ValueError("point dimension mismatch")
        return all(a <= x <= b for a, x, b in zip(self.lo, point, self.hi))

    def contains_rect(self, other: "Rectangle") -> bool:
        return all(a <= c for a, c in zip(self.lo, other.lo)) and all(
            c <= b for b, c in zip(self.hi, other.hi)
        )

    def inflate(self, frac=Fraction(1, 10)) -> "Rectangle":
        """Grow by `frac` of the side length on each side."""
        frac = Fraction(frac)
        w = [b - a for a, b in zip(self.lo, self.hi)]
        return Rectangle(
            tuple(a - frac * wi for a, wi in zip(self.lo, w)),
            tuple(b + frac * wi for b, wi in zip(self.hi, w)),
        )

    def volume(self) -> Fraction:
        v = Fraction(1)
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v


@dataclass(frozen=True)
class PolyMap:
    """Polynomial map K subset R^d -> R^m with exact rational coefficients."""

    d: int
    m: int
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if len(comps) != self.m or self.m < 1 or self.d < 1:
            raise ValueError("component count must equal m >= 1, d >= 1")
        if any(not isinstance(p, Polynomial) or p.nvars != self.d for p in comps):
            raise ValueError("components must be polynomials in a1..ad")
        object.__setattr__(self, "components", comps)

    @cached_property
    def jacobian_polys(self) -> tuple:
        """m x d table of first partials."""
        return tuple(tuple(p.diff(i) for i in range(self.d)) for p in self.components)

    @cached_property
    def hessian_polys(self) -> tuple:
        """m x d x d table of second partials."""
        return tuple(
            tuple(tuple(row[i].diff(j) for j in range(self.d)) for i in range(self.d))
            for row in self.jacobian_polys
        )

    def value(self, alpha: Sequence) -> tuple:
        return tuple(p(alpha) for p in self.components)

    def jacobian(self, alpha: Sequence) -> tuple:
        return tuple(tuple(q(alpha) for q in row) for row in self.jacobian_polys)

    def hessian_pencil(self, alpha: Sequence) -> SymPencil:
        gens = []
        for k in range(self.m):
            h = np.empty((self.d, self.d))
            for i in range(self.d):
                for j in range(i, self.d):
                    h[i, j] = float(self.hessian_polys[k][i][j](alpha))
            gens.append(SymMatrix(h))
        return SymPencil(gens)

    def source(self) -> str:
        """Canonical text form; parse_map(source(), d, m) round-trips."""
        return "; ".join(p.canonical() for p in self.components)

    def max_degree(self) -> int:
        return max(p.total_degree() for p in self.components)


@dataclass(frozen=True)
class ManifoldSpec:
    """A rectangle K together with a polynomial map f defined on it."""

    name: str
    rect: Rectangle
    map: PolyMap

    def __post_init__(self):
        if self.rect.d != self.map.d:
            raise ValueError("rectangle dimension must equal map.d")

    @property
    def d(self) -> int:
        return self.map.d

    @property
    def m(self) -> int:
        return self.map.m

    @property
    def n(self) -> int:
        return self.map.d + self.map.m


def parse_map(source: str, d: int, m: int) -> PolyMap:
    """Parse ``m`` semicolon-separated polynomial expressions over a1..ad."""
    pieces = source.split(";")
    if len(pieces) != m:
        raise ParseError(f"expected {m} components separated by ';', got {len(pieces)}", 0)
    comps = []
    offset = 0
    for piece in pieces:
        try:
            comps.append(parse_polynomial(piece, d))
        except ParseError as err:
            raise ParseError(str(err).rsplit(" (at position", 1)[0], offset + err.position) from None
        offset += len(piece) + 1
    return PolyMap(d, m, tuple(comps))


def eval_all(spec: ManifoldSpec, alpha: Sequence):
    """(f(alpha), Jacobian, Hessian pencil); exact when alpha is rational.

    Points outside the declared rectangle only warn: callers deliberately
    evaluate on an enlarged rectangle, and polynomials are global.
    """
    if not spec.rect.contains(alpha):
        warnings.warn(f"point {tuple(alpha)} lies outside rectangle of {spec.name!r}; evaluating anyway")
    return spec.map.value(alpha), spec.map.jacobian(alpha), spec.map.hessian_pencil(alpha)


# ----------------------------------------------------------------------
# builtin catalog

def _tracefree_map(d: int) -> PolyMap:
    # a_i^2 - a_{i+1}^2 for i < d, then a_i*a_j for i < j
    comps = []
    for i in range(d - 1):
        comps.append(
            Polynomial.variable(d, i) ** 2 - Polynomial.variable(d, i + 1) ** 2
        )
    for i in range(d):
        for j in range(i + 1, d):
            comps.append(Polynomial.variable(d, i) * Polynomial.variable(d, j))
    return PolyMap(d, comb(d + 1, 2) - 1, tuple(comps))


def _veronese5_map() -> PolyMap:
    a1 = Polynomial.variable(5, 0)
    a2 = Polynomial.variable(5, 1)
    return PolyMap(5, 3, (a1 * a1, a1 * a2, a2 * a2))


_TRACEFREE_RE = re.compile(r"tracefree\((\d+)\)$")

#: Documented condition verdicts for the builtin maps, keyed by condition tag.
#: These constant-Hessian quadratics have the same verdict at every alpha.
BUILTIN_VERDICTS = {
    "parabola": {"det2": True, "surjective": True},
    "veronese5": {"surjective": True, "det1": False, "rank2": False, "drv": False},
    "tracefree2": {"rank2": True, "drv": False, "surjective": True},
    "tracefree(3)": {"rank2": True, "drv": False, "surjective": True},
    "tracefree(4)": {"rank2": True, "drv": False, "surjective": True},
    "tracefree(5)": {"rank2": True, "drv": False, "surjective": True},
    "tracefree(6)": {"rank2": True, "drv": False, "surjective": True},
}


def builtin(name: str) -> ManifoldSpec:
    """Catalog of example maps, each on the unit rectangle.

    Names: "parabola", "veronese5", "tracefree2", "tracefree(d)" for 2<=d<=6.
    """
    if name == "parabola":
        a1 = Polynomial.variable(1, 0)
        return ManifoldSpec("parabola", Rectangle.unit(1), PolyMap(1, 1, (a1 * a1,)))
    if name == "veronese5":
        return ManifoldSpec("veronese5", Rectangle.unit(5), _veronese5_map())
    if name == "tracefree2":
        return ManifoldSpec("tracefree2", Rectangle.unit(2), _tracefree_map(2))
    m = _TRACEFREE_RE.match(name)
    if m:
        d = int(m.group(1))
        if not 2 <= d <= 6:
            raise ValueError(f"tracefree(d) supports 2 <= d <= 6, got d={d}")
        return ManifoldSpec(name, Rectangle.unit(d), _tracefree_map(d))
    raise ValueError(f"unknown builtin manifold {name!r}")


def builtin_names() -> tuple:
    return ("parabola", "veronese5", "tracefree2", "tracefree(3)", "tracefree(4)",
            "tracefree(5)", "tracefree(6)")


def resolve(name_or_source: str, d: int | None = None, m: int | None = None) -> ManifoldSpec:
    """Resolve a builtin name, or parse a source string when d,m are given."""
    try:
        return builtin(name_or_source)
    except ValueError:
        if d is None or m is None:
            raise
    return ManifoldSpec("custom", Rectangle.unit(d), parse_map(name_or_source, d, m))


# ----------------------------------------------------------------------
# certified maximum of |f'| over a rectangle

def _pow_interval(lo: float, hi: float, k: int):
    if k == 0:
        return 1.0, 1.0
    a, b = lo**k, hi**k
    if k % 2 == 0 and lo < 0.0 < hi:
        return 0.0, max(a, b)
    return min(a, b), max(a, b)


def _range_interval(poly: Polynomial, lo: np.ndarray, hi: np.ndarray):
    """Interval enclosure of poly on the box [lo, hi] (monomial-wise)."""
    tot_lo, tot_hi = 0.0, 0.0
    for e, c in poly.terms.items():
        mlo, mhi = 1.0, 1.0
        for i, k in enumerate(e):
            if k == 0:
                continue
            plo, phi = _pow_interval(lo[i], hi[i], k)
            cands = (mlo * plo, mlo * phi, mhi * plo, mhi * phi)
            mlo, mhi = min(cands), max(cands)
        c = float(c)
        if c >= 0:
            tot_lo += c * mlo
            tot_hi += c * mhi
        else:
            tot_lo += c * mhi
            tot_hi += c * mlo
    return tot_lo, tot_hi


def max_abs_on_box(poly: Polynomial, lo, hi, rel_tol: float = 0.01, max_splits: int = 20000) -> float:
    """Certified upper bound for max |poly| over the box, within rel_tol.

    Branch and bound: interval enclosures give upper bounds per cell, sampled
    midpoints give lower bounds; cells are split along their widest axis until
    the gap closes.
    """
    lo = np.asarray([float(x) for x in lo])
    hi = np.asarray([float(x) for x in hi])
    pad = 1.0 + 1e-12  # absorbs float rounding in the interval arithmetic

    def ub_of(l, h):
        a, b = _range_interval(poly, l, h)
        return max(abs(a), abs(b)) * pad

    def sample(l, h):
        mid = (l + h) / 2.0
        best = abs(poly.eval_array(mid[None, :])[0])
        corners = np.stack(np.meshgrid(*[(l[i], h[i]) for i in range(len(l))], indexing="ij"), axis=-1)
        vals = np.abs(poly.eval_array(corners.reshape(-1, len(l))))
        return max(best, float(np.max(vals)))

    lb = sample(lo, hi)
    heap = [(-ub_of(lo, hi), 0, lo, hi)]
    counter = 1
    for _ in range(max_splits):
        top_ub = -heap[0][0]
        if top_ub <= lb * (1.0 + rel_tol) + 1e-12:
            break
        _, _, l, h = heapq.heappop(heap)
        axis = int(np.argmax(h - l))
        mid = (l[axis] + h[axis]) / 2.0
        left_h = h.copy(); left_h[axis] = mid
        right_l = l.copy(); right_l[axis] = mid
        for cl, ch in ((l, left_h), (right_l, h)):
            lb = max(lb, sample(cl, ch))
            cub = ub_of(cl, ch)
            if cub > lb:
                heapq.heappush(heap, (-cub, counter, cl, ch))
                counter += 1
        if not heap:
            break
    top_ub = -heap[0][0] if heap else lb
    return max(lb, top_ub)


def lipschitz_c1(spec: ManifoldSpec, L: Rectangle | None = None, rel_tol: float = 0.01) -> float:
    """1 + max over L of the entrywise max-norm of the Jacobian of f.

    L defaults to the declared rectangle inflated by 10% per side. The result
    is a certified upper bound within rel_tol of the true maximum.
    """
    if L is None:
        L = spec.rect.inflate()
    if not L.contains_rect(spec.rect):
        raise ValueError("L must contain the declared rectangle")
    best = 0.0
    for row in spec.map.jacobian_polys:
        for entry in row:
            if entry.is_zero():
                continue
            best = max(best, max_abs_on_box(entry, L.lo, L.hi, rel_tol=rel_tol))
    return 1.0 + best
