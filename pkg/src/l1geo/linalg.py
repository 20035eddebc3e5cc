"""Tolerance-controlled dense linear algebra shared by the whole package.

Everything here is a thin, deterministic wrapper around numpy's SVD with one
explicit tolerance policy, so that rank / kernel / span decisions are made the
same way in every module.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    rank_rel_tol: singular values below rank_rel_tol * sigma_max count as zero.
    sign_tol:     entries of a vector below sign_tol (in absolute value) count
                  as zero when reading off a sign pattern.
    lp_tol:       feasibility / pivot threshold of the LP engine.
    solver_tol:   threshold under which an optimality residual certifies a
                  solution.
    """

    rank_rel_tol: float = 1e-9
    sign_tol: float = 1e-8
    lp_tol: float = 1e-9
    solver_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_rel_tol", "sign_tol", "lp_tol", "solver_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        # sign reading has to be coarser than what solvers are asked to achieve
        if not self.sign_tol > self.solver_tol:
            raise ValueError("sign_tol must exceed solver_tol")


DEFAULT_TOLS = Tolerances()


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-d float array, rejecting non-finite entries."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Coerce to a 1-d float array, rejecting non-finite entries."""
    a = np.asarray(v, dtype=float)
    if a.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _canonical_signs(B: np.ndarray) -> np.ndarray:
    """Flip basis columns so the largest-magnitude entry is positive.

    SVD leaves the sign of each singular vector arbitrary; fixing it makes
    basis outputs deterministic across runs.
    """
    if B.size == 0:
        return B
    out = B.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            out[:, j] = -col
    return out


def rank(M, tol: Tolerances | None = None) -> int:
    """Numerical rank via SVD with a relative singular-value cutoff."""
    t = tol or DEFAULT_TOLS
    A = as_matrix(M)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    smax = s[0] if s.size else 0.0
    if smax <= 0.0:
        return 0
    return int(np.sum(s > t.rank_rel_tol * smax))


def null_space_basis(M, tol: Tolerances | None = None) -> np.ndarray:
    """Orthonormal basis of {x : Mx = 0} as the columns of an array.

    Returns an (ncols, k) array, k = ncols - rank(M).  Column signs are
    canonical so repeated calls give identical output.
    """
    t = tol or DEFAULT_TOLS
    A = as_matrix(M)
    m, n = A.shape
    if n == 0:
        return np.zeros((0, 0))
    if m == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > t.rank_rel_tol * smax)) if smax > 0.0 else 0
    return _canonical_signs(vh[r:].T)


def intersect_null_spaces(Ms, tol: Tolerances | None = None) -> np.ndarray:
    """Orthonormal basis of the intersection of the kernels of the given matrices.

    All matrices must share the same column count; row-less matrices are
    allowed and contribute no constraint.
    """
    mats = [as_matrix(M) for M in Ms]
    if not mats:
        raise ValueError("need at least one matrix")
    ncols = {A.shape[1] for A in mats}
    if len(ncols) != 1:
        raise ValueError(f"column counts differ: {sorted(ncols)}")
    stacked = np.vstack(mats)
    return null_space_basis(stacked, tol)


def column_space_basis(M, tol: Tolerances | None = None) -> np.ndarray:
    """Orthonormal basis of the column space (image) of M."""
    t = tol or DEFAULT_TOLS
    A = as_matrix(M)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0], 0))
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    smax = s[0] if s.size else 0.0
    r = int(np.sum(s > t.rank_rel_tol * smax)) if smax > 0.0 else 0
    return _canonical_signs(u[:, :r])


def orthonormalize_columns(M, tol: Tolerances | None = None) -> np.ndarray:
    """Orthonormal basis of span(M), keeping M verbatim when already orthonormal.

    The pass-through matters when a caller supplies an exact basis (say a unit
    coordinate vector) and expects it to survive untouched.
    """
    A = as_matrix(M)
    if A.shape[1] == 0:
        return A
    G = A.T @ A
    if np.allclose(G, np.eye(A.shape[1]), atol=1e-12):
        return A
    return column_space_basis(A, tol)


def projector(basis) -> np.ndarray:
    """Orthogonal projector onto the span of the given orthonormal columns."""
    B = as_matrix(basis, "basis")
    if B.shape[1] == 0:
        return np.zeros((B.shape[0], B.shape[0]))
    return B @ B.T


def span_equal(B1, B2, tol: float = 1e-7) -> bool:
    """Whether two column families span the same subspace.

    Inputs are orthonormalized first, then the orthogonal projectors are
    compared in Frobenius norm, which is basis independent.
    """
    P1 = projector(orthonormalize_columns(B1))
    P2 = projector(orthonormalize_columns(B2))
    if P1.shape != P2.shape:
        raise ValueError("bases live in different ambient dimensions")
    return bool(np.linalg.norm(P1 - P2) <= tol)
