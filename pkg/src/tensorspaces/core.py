"""Dense tensor primitives: linearization, unfolding, folding, Kronecker algebra.

Every routine in this package shares one linearization convention: the
multi-index ``(i_0, ..., i_{n-1})`` of a tensor with shape
``(I_0, ..., I_{n-1})`` maps to the flat offset

    ((i_0 * I_1 + i_1) * I_2 + i_2) * ... ,

so the first axis varies slowest (C order).  Under this convention the
vectorization of an outer product ``u_0 o u_1 o ... o u_{n-1}`` equals the
Kronecker product ``u_0 (x) u_1 (x) ... (x) u_{n-1}`` with factors in
ascending axis order, which is what makes the subspace algebra in
:mod:`tensorspaces.models` reduce to plain matrix products.

Axes are 0-based.  All scalars are float64.  Tensors are ordinary
``numpy.ndarray`` objects; nothing here mutates its inputs.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "normalize_axes",
    "complement_axes",
    "unfold",
    "fold",
    "kron",
    "reshape",
    "vectorize",
    "frobenius_norm",
]


def normalize_axes(axes, ndim):
    """Validate a collection of axes and return it as a sorted tuple.

    Axes must be integers in ``[0, ndim)`` with no duplicates and at least
    one element.
    """
    out = []
    for a in axes:
        ia = int(a)
        if ia != a:
            raise ValueError(f"axis {a!r} is not an integer")
        if not 0 <= ia < ndim:
            raise ValueError(f"axis {ia} out of range for order-{ndim} tensor")
        out.append(ia)
    if not out:
        raise ValueError("axis set must be non-empty")
    srt = tuple(sorted(out))
    if len(set(srt)) != len(srt):
        raise ValueError(f"duplicate axes in {tuple(axes)!r}")
    return srt


def complement_axes(axes, ndim):
    """Ascending tuple of the axes of an order-``ndim`` tensor not in ``axes``."""
    inset = set(normalize_axes(axes, ndim))
    return tuple(a for a in range(ndim) if a not in inset)


def unfold(t, row_axes):
    """Matricize ``t``: ``row_axes`` indices become rows, the rest columns.

    Row indices are the lexicographic combination of the ``row_axes``
    multi-index (ascending axis order, first listed axis slowest); column
    indices combine the complementary axes the same way.  ``row_axes`` must
    be a non-empty strict subset of the tensor's axes.
    """
    t = np.asarray(t, dtype=np.float64)
    rows = normalize_axes(row_axes, t.ndim)
    if len(rows) == t.ndim:
        raise ValueError("row axes must be a strict subset of the tensor axes")
    cols = complement_axes(rows, t.ndim)
    n_rows = math.prod(t.shape[a] for a in rows)
    n_cols = math.prod(t.shape[a] for a in cols)
    return t.transpose(rows + cols).reshape(n_rows, n_cols)


def fold(m, row_axes, shape):
    """Inverse of :func:`unfold`: rebuild the tensor of ``shape`` from a matrix."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("fold expects a matrix")
    shape = tuple(int(s) for s in shape)
    rows = normalize_axes(row_axes, len(shape))
    if len(rows) == len(shape):
        raise ValueError("row axes must be a strict subset of the tensor axes")
    cols = complement_axes(rows, len(shape))
    n_rows = math.prod(shape[a] for a in rows)
    n_cols = math.prod(shape[a] for a in cols)
    if m.shape != (n_rows, n_cols):
        raise ValueError(
            f"matrix of shape {m.shape} cannot fold to {shape} along axes {rows}"
        )
    perm = rows + cols
    t = m.reshape([shape[a] for a in perm])
    return t.transpose(np.argsort(perm))


def kron(a, b):
    """Kronecker product of two matrices; block (i, j) equals ``a[i, j] * b``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("kron expects two matrices")
    return np.kron(a, b)


def reshape(t, new_shape):
    """Reinterpret the flat data of ``t`` under the package linearization."""
    t = np.asarray(t, dtype=np.float64)
    new_shape = tuple(int(s) for s in new_shape)
    if math.prod(new_shape) != t.size:
        raise ValueError(f"cannot reshape size {t.size} to {new_shape}")
    return t.reshape(new_shape)


def vectorize(t):
    """Flatten ``t`` to a vector in the package linearization order."""
    return np.asarray(t, dtype=np.float64).reshape(-1)


def frobenius_norm(t):
    """Square root of the sum of squared entries."""
    t = np.asarray(t, dtype=np.float64)
    return float(np.sqrt(np.sum(np.square(t))))
