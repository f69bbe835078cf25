"""Edge paths and tree depth."""

import pytest

from treeseq.errors import ValidationError
from treeseq.paths import edge_paths, tree_depth
from treeseq.tree import leaf, linearize, listing, node, single, wrap

from conftest import ASSIGN_PATHS_L10


def test_assign_example_rows(assign_tree):
    rows = edge_paths(assign_tree, 10)
    assert [list(r) for r in rows] == ASSIGN_PATHS_L10


def test_one_path_per_token(toy100):
    for sample in toy100:
        assert len(edge_paths(sample.tree, 8)) == len(linearize(sample.tree))


def test_root_path_is_zeros(assign_tree):
    assert edge_paths(assign_tree, 10)[0] == (0,) * 10


def test_child_tail_is_parent_path(toy100):
    # dropping a row's two freshest hops leaves its owner's full path,
    # and preorder guarantees the owner appeared earlier
    for sample in toy100[:30]:
        tokens = linearize(sample.tree)
        rows = edge_paths(sample.tree, 8)
        seen = set()
        for tok, row in zip(tokens, rows):
            if any(x != 0 for x in row):
                owner = tuple(row[2:]) + (0, 0)
                assert owner in seen, f"{tok.text()} has orphan path {row}"
            seen.add(tuple(row))


def test_depth_counts_hops():
    t = wrap(node("A", single("x", leaf("number", "1"))))
    # sos -> start -> A -> x -> leaf: 4 hops
    assert tree_depth(t) == 4


def test_path_len_overflow_raises():
    t = wrap(node("A", single("x", leaf("number", "1"))))
    with pytest.raises(ValidationError):
        edge_paths(t, 2)


def test_exact_fit_is_allowed():
    t = wrap(node("A", single("x", leaf("number", "1"))))
    rows = edge_paths(t, 4)
    assert rows[2] == (1, 1, 1, 1)  # the leaf fills the whole path


def test_sibling_rows_differ_in_first_entry_only():
    t = wrap(node("A", listing("xs", leaf("number", "1"), leaf("number", "2"), leaf("number", "3"))))
    rows = edge_paths(t, 6)
    texts = [tok.text() for tok in linearize(t)]
    i1, i2, i3 = texts.index("number:1"), texts.index("number:2"), texts.index("number:3")
    assert rows[i1][1:] == rows[i2][1:] == rows[i3][1:]
    assert (rows[i1][0], rows[i2][0], rows[i3][0]) == (1, 2, 3)
