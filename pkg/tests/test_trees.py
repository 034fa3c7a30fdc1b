import pytest

from tensorspaces import (
    DimensionTree,
    assign_ranks,
    balanced_tree,
    full_node_rank,
    resolve_rank,
    tt_tree,
    tucker_ranks,
)


def test_balanced_tree_order4_node_set():
    tree = balanced_tree(4)
    expected = {(0, 1, 2, 3), (0, 1), (2, 3), (0,), (1,), (2,), (3,)}
    assert set(tree.nodes) == expected
    assert tree.children[(0, 1, 2, 3)] == ((0, 1), (2, 3))


def test_balanced_tree_small_orders():
    t2 = balanced_tree(2)
    assert t2.children == {(0, 1): ((0,), (1,))}
    t3 = balanced_tree(3)
    assert set(t3.nodes) == {(0, 1, 2), (0, 1), (0,), (1,), (2,)}
    assert t3.children[(0, 1, 2)] == ((0, 1), (2,))


def test_tt_tree_structure():
    t4 = tt_tree(4)
    assert t4.internal_nodes == ((0, 1), (0, 1, 2))
    assert t4.children[(0, 1, 2, 3)] == ((0, 1, 2), (3,))
    assert tt_tree(2).children == balanced_tree(2).children
    t5 = tt_tree(5)
    assert t5.internal_nodes == ((0, 1), (0, 1, 2), (0, 1, 2, 3))


def test_order_too_small():
    with pytest.raises(ValueError):
        balanced_tree(1)
    with pytest.raises(ValueError):
        tt_tree(1)


def test_tree_validation():
    # children must partition the node
    with pytest.raises(ValueError):
        DimensionTree(order=3, children={(0, 1, 2): ((0,), (1,)), (0, 1): ((0,), (1,))})
    # interleaved children are rejected: left must be a prefix
    with pytest.raises(ValueError):
        DimensionTree(
            order=3,
            children={(0, 1, 2): ((0, 2), (1,))},
        )
    # ranks may not sit on the root
    with pytest.raises(ValueError):
        balanced_tree(2).with_ranks({(0, 1): 2})


def test_bottom_up_order():
    tree = balanced_tree(4)
    order = list(tree.bottom_up())
    assert tree.root not in order
    seen = set()
    for node in order:
        if len(node) > 1:
            left, right = tree.children[node]
            assert left in seen and right in seen
        seen.add(node)
    full = list(tree.bottom_up(include_root=True))
    assert full[-1] == tree.root


def test_full_node_rank():
    shape = (8, 8, 8, 8)
    assert full_node_rank((0,), shape, 10) == 8
    assert full_node_rank((0, 1), shape, 10) == 64
    assert full_node_rank((0, 1, 2), shape, 10) == 80  # sample-limited: 10 * 8
    assert full_node_rank((0, 1, 2), shape, 100) == 512
    with pytest.raises(ValueError):
        full_node_rank((0,), shape, 0)


def test_resolve_rank():
    assert resolve_rank(0.7, 8) == 6
    assert resolve_rank(0.25, 64) == 16
    assert resolve_rank(1.0, 5) == 5
    assert resolve_rank(0.01, 100) == 1
    assert resolve_rank(0.001, 100) == 1  # floor of one
    assert resolve_rank(3, 100) == 3
    with pytest.raises(ValueError):
        resolve_rank(0, 5)
    with pytest.raises(ValueError):
        resolve_rank(1.5, 5)
    with pytest.raises(ValueError):
        resolve_rank(True, 5)


def test_assign_ranks_and_tucker_ranks():
    shape = (8, 8, 8, 8)
    tree = assign_ranks(balanced_tree(4), shape, 12, leaf=0.7, internal=0.25)
    assert tree.rank((0,)) == 6
    assert tree.rank((0, 1)) == 16
    assert tree.has_complete_ranks()
    assert tucker_ranks(shape, 12, 0.5) == [4, 4, 4, 4]
    assert tucker_ranks(shape, 12, [1, 2, 3, 4]) == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        tucker_ranks(shape, 12, [1, 2])
