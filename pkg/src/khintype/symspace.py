"""Symmetric-matrix algebra: pencils, contractions, numerical rank and inertia.

Everything here is a plain value: matrices are stored as read-only numpy
arrays with structurally exact symmetry (the upper triangle is authoritative
and mirrored on construction), so results are safe to share across workers.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

#: Default relative tolerance for rank / signature decisions.
EPS_REL = 1e-8


class SymMatrix:
    """Real symmetric d x d matrix; symmetry is enforced, not assumed."""

    __slots__ = ("mat", "dim")

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("dimension must be >= 1")
        m = np.triu(a) + np.triu(a, 1).T
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "dim", a.shape[0])

    def __setattr__(self, *_):
        raise AttributeError("SymMatrix is immutable")

    def __repr__(self):
        return f"SymMatrix({self.mat.tolist()})"

    @classmethod
    def zeros(cls, d: int) -> "SymMatrix":
        return cls(np.zeros((d, d)))

    @classmethod
    def identity(cls, d: int) -> "SymMatrix":
        return cls(np.eye(d))

    @classmethod
    def diag(cls, values) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    def spectral_norm(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.mat)))) if self.dim else 0.0


class SymPencil:
    """Linear family t -> sum_k t_k * G_k of symmetric d x d matrices."""

    __slots__ = ("generators", "d", "m", "_stack")

    def __init__(self, generators: Sequence):
        gens = tuple(g if isinstance(g, SymMatrix) else SymMatrix(g) for g in generators)
        if not gens:
            raise ValueError("need at least one generator")
        d = gens[0].dim
        if any(g.dim != d for g in gens):
            raise ValueError("generators must share dimension")
        stack = np.stack([g.mat for g in gens])
        stack.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "m", len(gens))
        object.__setattr__(self, "_stack", stack)

    def __setattr__(self, *_):
        raise AttributeError("SymPencil is immutable")

    @property
    def stack(self) -> np.ndarray:
        """(m, d, d) read-only array of the generators."""
        return self._stack

    def contract(self, t) -> SymMatrix:
        return contract(self, t)

    def scale(self) -> float:
        """max(1, largest generator spectral norm); threshold reference."""
        return max(1.0, max(g.spectral_norm() for g in self.generators))

    def __repr__(self):
        return f"SymPencil(d={self.d}, m={self.m})"


class Signature(NamedTuple):
    n_pos: int
    n_neg: int
    n_zero: int


@dataclass(frozen=True)
class SpectralSplit:
    """Eigenvalues split at a relative threshold, with the margin data."""

    eigs: tuple              # descending
    threshold: float
    n_pos: int
    n_neg: int
    n_zero: int
    smallest_retained: float  # min |eig| counted nonzero, inf if none
    largest_discarded: float  # max |eig| treated as zero, 0 if none


def contract(pencil: SymPencil, t) -> SymMatrix:
    """sum_k t_k * G_k; linear in t."""
    t = np.asarray(t, dtype=float)
    if t.shape != (pencil.m,):
        raise ValueError(f"t must have length {pencil.m}, got shape {t.shape}")
    return SymMatrix(np.tensordot(t, pencil.stack, axes=(0, 0)))


def sym_eigs(M: SymMatrix) -> np.ndarray:
    """Eigenvalues in descending order."""
    return np.linalg.eigvalsh(M.mat)[::-1]


def sym_eig_pairs(M: SymMatrix):
    """(eigenvalues descending, matching orthonormal eigenvectors as columns)."""
    w, v = np.linalg.eigh(M.mat)
    return w[::-1], v[:, ::-1]


def spectral_split(M: SymMatrix, eps_rel: float = EPS_REL) -> SpectralSplit:
    if eps_rel <= 0:
        raise ValueError("eps_rel must be positive")
    eigs = sym_eigs(M)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    thr = eps_rel * scale
    # ties exactly at the threshold count as zero (conservative)
    pos = int(np.sum(eigs > thr))
    neg = int(np.sum(eigs < -thr))
    zero = M.dim - pos - neg
    nonzero_abs = [abs(x) for x in eigs if abs(x) > thr]
    zero_abs = [abs(x) for x in eigs if abs(x) <= thr]
    return SpectralSplit(
        eigs=tuple(float(x) for x in eigs),
        threshold=thr,
        n_pos=pos,
        n_neg=neg,
        n_zero=zero,
        smallest_retained=min(nonzero_abs) if nonzero_abs else float("inf"),
        largest_discarded=max(zero_abs) if zero_abs else 0.0,
    )


def rank_eps(M: SymMatrix, eps_rel: float = EPS_REL) -> int:
    """Number of eigenvalues with |eig| > eps_rel * max(1, spectral norm)."""
    s = spectral_split(M, eps_rel)
    return s.n_pos + s.n_neg


def signature(M: SymMatrix, eps_rel: float = EPS_REL) -> Signature:
    s = spectral_split(M, eps_rel)
    return Signature(s.n_pos, s.n_neg, s.n_zero)


def middle_eigenvalue(M: SymMatrix) -> float:
    """Second-largest (equivalently second-smallest) eigenvalue of a 3x3 matrix.

    Continuous in M and odd: middle_eigenvalue(-M) == -middle_eigenvalue(M).
    """
    if M.dim != 3:
        raise ValueError("middle eigenvalue is defined for 3x3 matrices only")
    return float(np.linalg.eigvalsh(M.mat)[1])


def minor(M: SymMatrix, I, J) -> np.ndarray:
    """Submatrix with retained rows I and columns J (1-based index sets)."""
    I = sorted(set(int(i) for i in I))
    J = sorted(set(int(j) for j in J))
    if len(I) != len(J):
        raise ValueError("row and column index sets must have equal cardinality")
    for idx in (*I, *J):
        if not 1 <= idx <= M.dim:
            raise ValueError(f"index {idx} out of range 1..{M.dim}")
    rows = [i - 1 for i in I]
    cols = [j - 1 for j in J]
    return M.mat[np.ix_(rows, cols)].copy()


def flatten_sym(stack: np.ndarray) -> np.ndarray:
    """Flatten (..., d, d) symmetric matrices to (..., d(d+1)/2) vectors.

    Off-diagonal entries are scaled by sqrt(2) so the Euclidean inner product
    of the flattened vectors equals the Frobenius inner product.
    """
    stack = np.asarray(stack, dtype=float)
    d = stack.shape[-1]
    iu, ju = np.triu_indices(d)
    weights = np.where(iu == ju, 1.0, np.sqrt(2.0))
    return stack[..., iu, ju] * weights
