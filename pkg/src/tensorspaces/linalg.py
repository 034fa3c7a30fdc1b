"""Truncated SVD with a fixed sign convention, plus orthonormality helpers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SVDResult",
    "truncated_svd",
    "orthonormality_defect",
    "effective_rank",
    "SINGULAR_VALUE_FLOOR",
]

# Singular values below this fraction of the largest one count as zero when
# reporting effective rank.
SINGULAR_VALUE_FLOOR = 1e-12


@dataclass(frozen=True)
class SVDResult:
    """Rank-r factorization ``U @ diag(S) @ V.T`` of a matrix.

    ``U`` and ``V`` hold left/right singular vectors as columns and ``S`` is
    non-increasing.
    """

    U: np.ndarray
    S: np.ndarray
    V: np.ndarray


def truncated_svd(m, rank):
    """Top-``rank`` singular triplets of a matrix.

    By Eckart-Young the implied rank-``rank`` reconstruction is the closest
    one in Frobenius distance.  Signs are normalized so the largest-magnitude
    entry of each left singular vector is positive (earliest index on ties),
    which makes repeated calls bit-identical regardless of the LAPACK
    driver's sign choices.  When ``rank`` exceeds the numerical rank the
    trailing columns are whatever the factorization yields; they are not
    re-padded.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("truncated_svd expects a matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    rank = int(rank)
    if not 1 <= rank <= min(m.shape):
        raise ValueError(
            f"rank {rank} out of range for a {m.shape[0]}x{m.shape[1]} matrix"
        )
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    u = u[:, :rank].copy()
    s = s[:rank].copy()
    v = vh[:rank].T.copy()
    for j in range(rank):
        i = int(np.argmax(np.abs(u[:, j])))
        if u[i, j] < 0:
            u[:, j] = -u[:, j]
            v[:, j] = -v[:, j]
    return SVDResult(U=u, S=s, V=v)


def orthonormality_defect(u):
    """Frobenius norm of ``U.T @ U - I``; zero iff columns are orthonormal."""
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 2:
        raise ValueError("orthonormality_defect expects a matrix")
    g = u.T @ u
    return float(np.sqrt(np.sum(np.square(g - np.eye(g.shape[0])))))


def effective_rank(singular_values, floor=SINGULAR_VALUE_FLOOR):
    """Number of singular values above ``floor`` times the largest one."""
    s = np.asarray(singular_values, dtype=np.float64)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > floor * s[0]))
