"""Subspace models over tensors and their SVD-based learners.

Three families are supported.

* ``TuckerModel``: one orthonormal factor basis per axis; the model
  subspace is the Kronecker product of the factor spans.
* ``HTModel``: a hierarchical model organized by a binary dimension tree.
  Each leaf axis carries a basis ``U_i``; each internal non-root node ``s``
  with children ``l`` and ``r`` carries a basis ``U_s`` that lies inside
  ``span(U_l (x) U_r)`` together with the transfer matrix
  ``B_s = (U_l (x) U_r).T @ U_s`` expressing it in the children's product
  basis.  The root stores nothing; projections use its two children.
* ``TTModel``: an ``HTModel`` whose tree is the chain produced by
  :func:`tensorspaces.trees.tt_tree` (the tensor-train layout, cf.
  Oseledets 2011); each internal node groups a prefix of the axes.

Learning stacks the samples along a trailing batch axis and runs a
children-before-parents pass of truncated SVDs, in the spirit of the
hierarchical SVD of Grasedyck (2010).  All bases end up with orthonormal
columns, so the squared Frobenius norm of a coefficient block equals the
squared norm of the orthogonal projection of the input onto the model
subspace; that quantity is the classification score used in
:mod:`tensorspaces.classify`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import fold, frobenius_norm, kron, unfold
from .linalg import truncated_svd
from .trees import DimensionTree

__all__ = [
    "TuckerModel",
    "HTModel",
    "TTModel",
    "is_tt_shaped",
    "learn_tucker",
    "learn_hierarchical",
    "learn_tt",
    "project_tucker",
    "project_ht_materialized",
    "project_ht_factored",
    "project_tt",
    "project",
    "projection_energy",
    "build_node_basis",
    "reconstruct_tucker",
    "reconstruct_ht",
    "reconstruct",
    "projection_residual",
    "random_orthonormal",
    "random_tucker_model",
    "random_ht_model",
]


@dataclass(frozen=True)
class TuckerModel:
    """Per-axis orthonormal factor bases ``U_i`` of shape ``(I_i, r_i)``."""

    shape: tuple
    factor_bases: tuple

    @property
    def ranks(self):
        return tuple(u.shape[1] for u in self.factor_bases)


@dataclass(frozen=True)
class HTModel:
    """Hierarchical subspace model over a dimension tree.

    ``leaf_bases`` maps axis -> ``(I_i, r_i)`` basis, ``node_bases`` maps
    each internal non-root node to its materialized basis, and ``transfer``
    maps the same nodes to their transfer matrices.
    """

    shape: tuple
    tree: DimensionTree
    leaf_bases: dict
    node_bases: dict
    transfer: dict

    def __post_init__(self):
        if self.tree.order != len(self.shape):
            raise ValueError("tree order does not match model shape")

    @property
    def root_children(self):
        return self.tree.children[self.tree.root]

    def basis(self, node):
        """Materialized basis stored for ``node`` (leaf or internal non-root)."""
        node = tuple(int(a) for a in node)
        if len(node) == 1:
            return self.leaf_bases[node[0]]
        return self.node_bases[node]


class TTModel(HTModel):
    """An :class:`HTModel` restricted to the chain (tensor-train) tree."""

    def __post_init__(self):
        super().__post_init__()
        if not is_tt_shaped(self.tree):
            raise ValueError("TTModel requires the chain dimension tree")


def is_tt_shaped(tree):
    """True if every internal node splits off exactly its last axis."""
    for node, (left, right) in tree.children.items():
        if len(right) != 1 or left != node[:-1]:
            return False
    return True


def _stack(samples):
    arrays = [np.asarray(s, dtype=np.float64) for s in samples]
    if not arrays:
        raise ValueError("empty sample list")
    shape = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != shape:
            raise ValueError(f"samples disagree in shape: {a.shape} vs {shape}")
    return np.stack(arrays, axis=-1)


def learn_tucker(samples, ranks):
    """Fit per-axis bases: top-``r_i`` left singular vectors of each axis unfolding.

    The samples are stacked along a trailing batch axis, so the column side
    of every unfolding includes the batch; ``r_i`` may not exceed
    ``min(I_i, N * prod(other axes))``.
    """
    stacked = _stack(samples)
    shape = stacked.shape[:-1]
    ranks = [int(r) for r in ranks]
    if len(ranks) != len(shape):
        raise ValueError("need one rank per axis")
    factors = []
    for axis in range(len(shape)):
        factors.append(truncated_svd(unfold(stacked, (axis,)), ranks[axis]).U)
    return TuckerModel(shape=shape, factor_bases=tuple(factors))


def learn_hierarchical(samples, tree):
    """Fit a hierarchical subspace model to equally shaped tensors.

    The tree must carry a rank for every non-root node.  Traversal is
    children-before-parents.  A leaf basis is the top-r left singular block
    of the axis unfolding of the sample stack.  An internal node is fitted
    on its unfolding after re-projection onto the Kronecker product of its
    children's bases:

        usable = kron(U_left, U_right)
        U_node = top-r left singular vectors of usable @ usable.T @ unfolding
        B_node = usable.T @ U_node

    The re-projection keeps ``U_node`` inside ``span(usable)``, which is
    what makes ``B_node`` orthonormal and the stored and transfer forms of
    the basis interchangeable.  Returns a :class:`TTModel` when the tree is
    the chain, else an :class:`HTModel`.
    """
    stacked = _stack(samples)
    shape = stacked.shape[:-1]
    if tree.order != len(shape):
        raise ValueError("tree order does not match sample order")
    if not tree.has_complete_ranks():
        raise ValueError("tree is missing ranks; see assign_ranks")
    leaf_bases = {}
    node_bases = {}
    transfer = {}

    def stored_basis(node):
        return leaf_bases[node[0]] if len(node) == 1 else node_bases[node]

    for node in tree.bottom_up():
        r = tree.rank(node)
        if len(node) == 1:
            leaf_bases[node[0]] = truncated_svd(unfold(stacked, node), r).U
        else:
            left, right = tree.children[node]
            usable = kron(stored_basis(left), stored_basis(right))
            unfolding = unfold(stacked, node)
            projected = usable @ (usable.T @ unfolding)
            u = truncated_svd(projected, r).U
            node_bases[node] = u
            transfer[node] = usable.T @ u

    cls = TTModel if is_tt_shaped(tree) else HTModel
    return cls(
        shape=shape,
        tree=tree,
        leaf_bases=leaf_bases,
        node_bases=node_bases,
        transfer=transfer,
    )


def learn_tt(samples, tree):
    """Fit a tensor-train model on a ranked chain tree (see :func:`tt_tree`)."""
    if not is_tt_shaped(tree):
        raise ValueError("learn_tt requires the chain dimension tree")
    model = learn_hierarchical(samples, tree)
    assert isinstance(model, TTModel)
    return model


def _check_input(model, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != tuple(model.shape):
        raise ValueError(f"input shape {x.shape} does not match model shape {model.shape}")
    return x


def project_tucker(model, x):
    """Coefficient core of ``x``: apply ``U_i.T`` along each axis, ascending."""
    core = _check_input(model, x)
    for axis, u in enumerate(model.factor_bases):
        core = np.moveaxis(np.tensordot(core, u, axes=([axis], [0])), -1, axis)
    return core


def project_ht_materialized(model, x):
    """Coefficient matrix of ``x`` using the stored bases of the root's children.

    With root children ``s1``/``s2`` this is ``U_s1.T @ X^(s1) @ U_s2`` and
    has shape ``(r_s1, r_s2)``.
    """
    x = _check_input(model, x)
    s1, s2 = model.root_children
    return model.basis(s1).T @ unfold(x, s1) @ model.basis(s2)


def build_node_basis(model, node):
    """Rebuild a node basis from leaf bases and transfer matrices alone."""
    node = tuple(int(a) for a in node)
    if len(node) == 1:
        return model.leaf_bases[node[0]]
    left, right = model.tree.children[node]
    return kron(build_node_basis(model, left), build_node_basis(model, right)) @ model.transfer[node]


def project_ht_factored(model, x):
    """Same coefficients as :func:`project_ht_materialized`, computed without
    stored node bases: each root-child basis is rebuilt bottom-up from the
    leaves and transfer matrices (the Kronecker mixed-product identity makes
    the two routes agree), then applied as in the materialized scheme."""
    x = _check_input(model, x)
    s1, s2 = model.root_children
    u1 = build_node_basis(model, s1)
    u2 = build_node_basis(model, s2)
    return u1.T @ unfold(x, s1) @ u2


def project_tt(model, x):
    """Coefficients for a chain model: contract the last leaf first, then the
    materialized top factor, ``U_top.T @ (X^(0..n-2) @ U_last)``."""
    if not is_tt_shaped(model.tree):
        raise ValueError("project_tt requires a chain model")
    x = _check_input(model, x)
    top, last = model.root_children
    return model.basis(top).T @ (unfold(x, top) @ model.leaf_bases[last[0]])


def project(model, x):
    """Family-default projection: Tucker core, TT top factor, or materialized HT."""
    if isinstance(model, TuckerModel):
        return project_tucker(model, x)
    if isinstance(model, TTModel):
        return project_tt(model, x)
    return project_ht_materialized(model, x)


def projection_energy(coefficients):
    """Squared Frobenius norm of a coefficient block.

    With orthonormal bases this equals the squared norm of the orthogonal
    projection of the input onto the model subspace.
    """
    c = np.asarray(coefficients, dtype=np.float64)
    return float(np.sum(np.square(c)))


def reconstruct_tucker(model, core):
    """Map a coefficient core back to the ambient space (apply each ``U_i``)."""
    t = np.asarray(core, dtype=np.float64)
    for axis, u in enumerate(model.factor_bases):
        t = np.moveaxis(np.tensordot(t, u, axes=([axis], [1])), -1, axis)
    return t


def reconstruct_ht(model, coefficients):
    """Map a coefficient matrix back to the ambient space."""
    s1, s2 = model.root_children
    m = model.basis(s1) @ np.asarray(coefficients, dtype=np.float64) @ model.basis(s2).T
    return fold(m, s1, model.shape)


def reconstruct(model, coefficients):
    if isinstance(model, TuckerModel):
        return reconstruct_tucker(model, coefficients)
    return reconstruct_ht(model, coefficients)


def projection_residual(model, x):
    """Relative error of projecting ``x`` onto the model subspace."""
    x = np.asarray(x, dtype=np.float64)
    nx = frobenius_norm(x)
    if nx == 0.0:
        return 0.0
    return frobenius_norm(x - reconstruct(model, project(model, x))) / nx


def random_orthonormal(rows, cols, rng):
    """Orthonormal ``rows x cols`` matrix drawn from a Gaussian via QR."""
    if cols > rows:
        raise ValueError(f"cannot build {cols} orthonormal columns in R^{rows}")
    q, _ = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q[:, :cols]


def random_tucker_model(shape, ranks, rng):
    """Tucker model with independent random orthonormal factor bases."""
    shape = tuple(int(s) for s in shape)
    factors = tuple(
        random_orthonormal(dim, int(r), rng) for dim, r in zip(shape, ranks)
    )
    return TuckerModel(shape=shape, factor_bases=factors)


def random_ht_model(shape, tree, rng):
    """Hierarchical model with random orthonormal leaf bases and transfers.

    The tree must carry ranks.  Leaf ranks may not exceed the axis sizes and
    an internal rank may not exceed the product of its children's ranks,
    since the transfer matrices are drawn with orthonormal columns.
    """
    shape = tuple(int(s) for s in shape)
    if tree.order != len(shape):
        raise ValueError("tree order does not match shape")
    if not tree.has_complete_ranks():
        raise ValueError("tree is missing ranks")
    leaf_bases = {}
    node_bases = {}
    transfer = {}

    def stored_basis(node):
        return leaf_bases[node[0]] if len(node) == 1 else node_bases[node]

    for node in tree.bottom_up():
        r = tree.rank(node)
        if len(node) == 1:
            leaf_bases[node[0]] = random_orthonormal(shape[node[0]], r, rng)
        else:
            left, right = tree.children[node]
            usable = kron(stored_basis(left), stored_basis(right))
            b = random_orthonormal(usable.shape[1], r, rng)
            node_bases[node] = usable @ b
            transfer[node] = b

    cls = TTModel if is_tt_shaped(tree) else HTModel
    return cls(
        shape=shape,
        tree=tree,
        leaf_bases=leaf_bases,
        node_bases=node_bases,
        transfer=transfer,
    )
