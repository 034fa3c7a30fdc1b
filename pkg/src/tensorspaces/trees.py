"""Binary dimension trees over tensor axes, and rank bookkeeping.

A node is a tuple of 0-based axes in ascending order.  The root holds all
axes; leaves are singletons.  Every internal node splits into a left child
holding a prefix of its axes and a right child holding the suffix, so each
node covers a contiguous axis interval.  That restriction is what lets a
node unfolding factor as the Kronecker product of its children's bases
under the package linearization (see :mod:`tensorspaces.core`).

Ranks live on the tree: every node except the root may carry one.  The
builders return trees without ranks; attach them with
:func:`assign_ranks` or :meth:`DimensionTree.with_ranks`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "DimensionTree",
    "balanced_tree",
    "tt_tree",
    "full_node_rank",
    "resolve_rank",
    "assign_ranks",
    "tucker_ranks",
]


def _as_node(axes):
    return tuple(int(a) for a in axes)


@dataclass(frozen=True)
class DimensionTree:
    """Binary tree over the axes ``0..order-1``.

    ``children`` maps each internal node to its ``(left, right)`` pair;
    ``ranks`` maps every non-root node to a positive integer and may be
    empty until learning time.
    """

    order: int
    children: dict
    ranks: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("a dimension tree needs at least 2 axes")
        root = self.root
        if root not in self.children:
            raise ValueError("tree is missing the root split")
        seen = set()
        stack = [root]
        while stack:
            node = stack.pop()
            if node in seen:
                raise ValueError(f"node {node} reachable twice")
            seen.add(node)
            if len(node) == 1:
                if node in self.children:
                    raise ValueError(f"leaf {node} cannot have children")
                continue
            if node not in self.children:
                raise ValueError(f"internal node {node} has no children")
            left, right = self.children[node]
            if tuple(sorted(left + right)) != node or set(left) & set(right):
                raise ValueError(f"children of {node} do not partition it")
            if max(left) >= min(right):
                raise ValueError(
                    f"children of {node} must split it into a prefix and a suffix"
                )
            stack.extend((left, right))
        if set(self.children) - {n for n in seen if len(n) > 1}:
            raise ValueError("tree contains unreachable internal nodes")
        for node, r in self.ranks.items():
            if node not in seen or node == root:
                raise ValueError(f"rank attached to invalid node {node}")
            if int(r) < 1:
                raise ValueError(f"rank for node {node} must be >= 1")

    @property
    def root(self):
        return tuple(range(self.order))

    @property
    def leaves(self):
        return tuple((a,) for a in range(self.order))

    @property
    def internal_nodes(self):
        """Internal nodes other than the root, sorted by size then axes."""
        return tuple(
            sorted((n for n in self.children if n != self.root), key=lambda n: (len(n), n))
        )

    @property
    def nodes(self):
        return tuple(sorted(set(self.children) | set(self.leaves), key=lambda n: (len(n), n)))

    def bottom_up(self, include_root=False):
        """Yield nodes children-before-parents (post-order from the root)."""

        def walk(node):
            if len(node) > 1:
                left, right = self.children[node]
                yield from walk(left)
                yield from walk(right)
            yield node

        for node in walk(self.root):
            if node != self.root or include_root:
                yield node

    def rank(self, node):
        node = _as_node(node)
        if node not in self.ranks:
            raise KeyError(f"no rank assigned to node {node}")
        return int(self.ranks[node])

    def has_complete_ranks(self):
        needed = set(self.nodes) - {self.root}
        return needed <= set(self.ranks)

    def with_ranks(self, ranks):
        """Return a copy of the tree carrying ``ranks`` (node -> positive int)."""
        return replace(self, ranks={_as_node(k): int(v) for k, v in ranks.items()})


def _split_interval(axes, children):
    if len(axes) == 1:
        return
    cut = (len(axes) + 1) // 2
    left, right = axes[:cut], axes[cut:]
    children[axes] = (left, right)
    _split_interval(left, children)
    _split_interval(right, children)


def balanced_tree(order):
    """Tree that halves each node, putting the first ceil(k/2) axes on the left."""
    order = int(order)
    if order < 2:
        raise ValueError("balanced_tree needs order >= 2")
    children = {}
    _split_interval(tuple(range(order)), children)
    return DimensionTree(order=order, children=children)


def tt_tree(order):
    """Chain tree: each internal node ``(0..k)`` splits off its last axis."""
    order = int(order)
    if order < 2:
        raise ValueError("tt_tree needs order >= 2")
    children = {}
    for k in range(order, 1, -1):
        node = tuple(range(k))
        children[node] = (tuple(range(k - 1)), (k - 1,))
    return DimensionTree(order=order, children=children)


def full_node_rank(node, shape, n_samples):
    """Rank ceiling of a node unfolding of an ``n_samples`` stack.

    A stack of samples of the given shape unfolds along ``node`` into a
    matrix with ``prod(shape[node])`` rows and ``n_samples`` times the
    complementary product columns; the ceiling is the smaller of the two.
    """
    node = _as_node(node)
    shape = tuple(int(s) for s in shape)
    n_samples = int(n_samples)
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    inside = math.prod(shape[a] for a in node)
    outside = math.prod(s for a, s in enumerate(shape) if a not in set(node))
    return min(inside, n_samples * outside)


def resolve_rank(spec, full):
    """Turn a rank spec into an integer rank.

    An integer spec is taken as-is (validated >= 1); a float in (0, 1] is a
    fraction of ``full``, rounded half-up with a floor of 1.
    """
    full = int(full)
    if isinstance(spec, bool):
        raise ValueError("rank spec must be an integer or a fraction")
    if isinstance(spec, int):
        if spec < 1:
            raise ValueError(f"rank {spec} must be >= 1")
        return int(spec)
    try:
        f = float(spec)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"rank spec {spec!r} is neither an integer nor a fraction") from exc
    if not 0.0 < f <= 1.0:
        raise ValueError(f"rank fraction {f} must lie in (0, 1]")
    return max(1, int(math.floor(f * full + 0.5)))


def assign_ranks(tree, shape, n_samples, leaf, internal):
    """Attach ranks to every non-root node from leaf/internal specs.

    ``leaf`` and ``internal`` are each an absolute rank or a fraction of the
    node's :func:`full_node_rank` for a training stack of ``n_samples``.
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) != tree.order:
        raise ValueError("shape does not match tree order")
    ranks = {}
    for node in tree.nodes:
        if node == tree.root:
            continue
        spec = leaf if len(node) == 1 else internal
        ranks[node] = resolve_rank(spec, full_node_rank(node, shape, n_samples))
    return tree.with_ranks(ranks)


def tucker_ranks(shape, n_samples, spec):
    """Per-axis ranks for a Tucker model from a list, an int, or a fraction."""
    shape = tuple(int(s) for s in shape)
    if isinstance(spec, (list, tuple)):
        if len(spec) != len(shape):
            raise ValueError("need one rank per axis")
        specs = list(spec)
    else:
        specs = [spec] * len(shape)
    return [
        resolve_rank(s, full_node_rank((a,), shape, n_samples))
        for a, s in enumerate(specs)
    ]
