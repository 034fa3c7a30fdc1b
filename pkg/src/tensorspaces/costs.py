"""Exact storage and projection-cost accounting per model family and scheme.

Counting conventions, applied uniformly:

* storage counts every scalar of every matrix the scheme requires to be
  kept at classification time;
* an ``(m x k) @ (k x n)`` product costs ``m*k*n`` multiply-accumulates;
* materializing a Kronecker product costs one multiply per output entry;
* the Tucker and hierarchical schemes additionally count one multiply per
  coefficient for evaluating the squared-norm score; the tensor-train
  scheme does not (its closed form below omits that term).

Counts depend only on shapes and ranks, never on data values.  The
``cost_formula_*`` functions are the closed forms for the symmetric
order-4 case (every axis of size n, uniform leaf rank r, uniform internal
rank r'); they exist to cross-check the general counter and for plotting
parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .models import HTModel, TuckerModel, is_tt_shaped

__all__ = [
    "SCHEME_TUCKER",
    "SCHEME_MATERIALIZED",
    "SCHEME_FACTORED",
    "SCHEME_TT",
    "CostReport",
    "cost_general",
    "cost_tucker_counts",
    "cost_ht_counts",
    "cost_tt_counts",
    "cost_formula_tucker",
    "cost_formula_hier1",
    "cost_formula_hier2",
    "cost_formula_tt",
]

SCHEME_TUCKER = "tucker"
SCHEME_MATERIALIZED = "materialized"
SCHEME_FACTORED = "factored"
SCHEME_TT = "tt"


@dataclass(frozen=True)
class CostReport:
    """Scalar counts for one model under one projection scheme.

    ``storage_scalars`` is the number of stored reals, ``projection_macs``
    the multiply-accumulate count of one test-point projection, and
    ``ambient_dim`` the length of the vectorized tensor used for
    normalization.
    """

    storage_scalars: int
    projection_macs: int
    ambient_dim: int

    @property
    def norm_storage(self):
        return self.storage_scalars / self.ambient_dim

    @property
    def norm_projection(self):
        return self.projection_macs / self.ambient_dim


def _prod(values):
    return math.prod(int(v) for v in values)


def cost_tucker_counts(shape, ranks):
    """(storage, macs) for the ascending mode-product scheme."""
    shape = [int(s) for s in shape]
    ranks = [int(r) for r in ranks]
    storage = sum(i * r for i, r in zip(shape, ranks))
    macs = 0
    dims = list(shape)
    for axis, (i, r) in enumerate(zip(shape, ranks)):
        rest = _prod(dims[:axis] + dims[axis + 1 :])
        macs += r * i * rest
        dims[axis] = r
    macs += _prod(ranks)  # squared-norm score over the core
    return storage, macs


def _node_rows(node, shape):
    return _prod(shape[a] for a in node)


def _build_cost(node, shape, tree, ranks):
    # Multiplies needed to rebuild a node basis from leaves and transfers.
    if len(node) == 1:
        return 0
    left, right = tree.children[node]
    rows = _node_rows(node, shape)
    r_l, r_r = int(ranks[left]), int(ranks[right])
    cost = _build_cost(left, shape, tree, ranks) + _build_cost(right, shape, tree, ranks)
    cost += rows * r_l * r_r  # materialize the Kronecker product
    cost += rows * (r_l * r_r) * int(ranks[node])  # apply the transfer matrix
    return cost


def cost_ht_counts(shape, tree, ranks, scheme):
    """(storage, macs) for a hierarchical model.

    ``materialized`` stores the root children's bases and projects with
    them directly; ``factored`` stores the leaf bases plus all transfer
    matrices and rebuilds the root children's bases per projection.
    """
    shape = tuple(int(s) for s in shape)
    s1, s2 = tree.children[tree.root]
    r1, r2 = int(ranks[s1]), int(ranks[s2])
    rows1, rows2 = _node_rows(s1, shape), _node_rows(s2, shape)

    project = r1 * rows1 * rows2  # U_s1.T @ unfolding
    project += r1 * rows2 * r2  # ... @ U_s2
    project += r1 * r2  # squared-norm score

    if scheme == SCHEME_MATERIALIZED:
        storage = rows1 * r1 + rows2 * r2
        return storage, project
    if scheme == SCHEME_FACTORED:
        storage = sum(
            shape[node[0]] * int(ranks[node]) for node in tree.leaves
        )
        storage += sum(
            int(ranks[tree.children[node][0]]) * int(ranks[tree.children[node][1]]) * int(ranks[node])
            for node in tree.internal_nodes
        )
        build = _build_cost(s1, shape, tree, ranks) + _build_cost(s2, shape, tree, ranks)
        return storage, project + build
    raise ValueError(f"unknown hierarchical scheme {scheme!r}")


def cost_tt_counts(shape, tree, ranks):
    """(storage, macs) for the chain scheme: store the top factor and the
    last leaf, contract the leaf first."""
    shape = tuple(int(s) for s in shape)
    top, last = tree.children[tree.root]
    r_top, r_last = int(ranks[top]), int(ranks[last])
    rows_top = _node_rows(top, shape)
    i_last = shape[last[0]]
    storage = rows_top * r_top + i_last * r_last
    macs = rows_top * i_last * r_last  # unfolding @ U_last
    macs += r_top * rows_top * r_last  # U_top.T @ ...
    return storage, macs


def cost_general(model, scheme):
    """Exact :class:`CostReport` for a learned model under ``scheme``."""
    if not isinstance(model, (TuckerModel, HTModel)):
        raise TypeError(f"unsupported model type {type(model).__name__}")
    ambient = _prod(model.shape)
    if isinstance(model, TuckerModel):
        if scheme != SCHEME_TUCKER:
            raise ValueError(f"scheme {scheme!r} does not apply to a Tucker model")
        storage, macs = cost_tucker_counts(model.shape, model.ranks)
        return CostReport(storage, macs, ambient)
    if isinstance(model, HTModel):
        ranks = dict(model.tree.ranks)
        if scheme == SCHEME_TT:
            if not is_tt_shaped(model.tree):
                raise ValueError("tt scheme requires a chain model")
            storage, macs = cost_tt_counts(model.shape, model.tree, ranks)
            return CostReport(storage, macs, ambient)
        if scheme in (SCHEME_MATERIALIZED, SCHEME_FACTORED):
            storage, macs = cost_ht_counts(model.shape, model.tree, ranks, scheme)
            return CostReport(storage, macs, ambient)
    raise ValueError(f"scheme {scheme!r} does not apply to a {type(model).__name__}")


def _check_symmetric_args(n, *ranks):
    n = int(n)
    if n < 1:
        raise ValueError("axis size must be >= 1")
    out = [n]
    for r in ranks:
        r = int(r)
        if r < 1:
            raise ValueError("rank must be >= 1")
        out.append(r)
    return out


def cost_formula_tucker(n, r):
    """Symmetric order-4 Tucker: storage 4nr, projection
    n^4 r + n^3 r^2 + n^2 r^3 + n r^4 + r^4."""
    n, r = _check_symmetric_args(n, r)
    storage = 4 * n * r
    projection = n**4 * r + n**3 * r**2 + n**2 * r**3 + n * r**4 + r**4
    return storage, projection


def cost_formula_hier1(n, rp):
    """Symmetric order-4 hierarchical, materialized root children: storage
    2 n^2 r', projection n^4 r' + n^2 r'^2 + r'^2."""
    n, rp = _check_symmetric_args(n, rp)
    storage = 2 * n**2 * rp
    projection = n**4 * rp + n**2 * rp**2 + rp**2
    return storage, projection


def cost_formula_hier2(n, r, rp):
    """Symmetric order-4 hierarchical, factored: storage 4nr + 2 r^2 r',
    projection n^4 r' + n^2 r'^2 + r'^2 + 2 n^2 r^2 + 2 n^2 r^2 r'."""
    n, r, rp = _check_symmetric_args(n, r, rp)
    storage = 4 * n * r + 2 * r**2 * rp
    projection = (
        n**4 * rp + n**2 * rp**2 + rp**2 + 2 * n**2 * r**2 + 2 * n**2 * r**2 * rp
    )
    return storage, projection


def cost_formula_tt(n, r, rp):
    """Symmetric order-4 chain: storage n^3 r' + nr, projection
    n^4 r + n^3 r r'."""
    n, r, rp = _check_symmetric_args(n, r, rp)
    storage = n**3 * rp + n * r
    projection = n**4 * r + n**3 * r * rp
    return storage, projection
