"""Batch edge paths for whole trees.

Every token of a linearized tree sits at the end of a path of edges
from the synthetic root.  Both kinds of hops count: object node to
attribute slot, and attribute slot to child.  A path is written
deepest edge first as 1-based indices and zero-padded to a fixed
length, so the root ``sos`` token is all zeros and a child's path ends
with its parent's path.

``le`` tokens take the sibling position one past the last child of the
slot they close.

This mirrors what :meth:`treeseq.automaton.DecoderState.next_edge_path`
produces incrementally; the two are computed independently and tested
against each other.
"""

from __future__ import annotations

from .errors import ValidationError
from .tree import ObjectNode, TypedTree

Path = tuple[int, ...]


def tree_depth(tree: TypedTree) -> int:
    """Maximum number of hops from the root to any token position."""
    best = 0

    def visit(n: ObjectNode, depth: int) -> None:
        nonlocal best
        best = max(best, depth)
        for slot in n.attrs:
            for child in slot.children:
                visit(child, depth + 2)
            if slot.kind == "list":
                best = max(best, depth + 2)

    visit(tree.root, 0)
    return best


def edge_paths(tree: TypedTree, path_len: int) -> list[Path]:
    """One path per linearized token, in token order."""
    out: list[Path] = []

    def pad(path: Path) -> Path:
        if len(path) > path_len:
            raise ValidationError(
                f"edge path depth {len(path)} exceeds configured length {path_len}"
            )
        return path + (0,) * (path_len - len(path))

    def visit(n: ObjectNode, path: Path) -> None:
        out.append(pad(path))
        for attr_pos, slot in enumerate(n.attrs, start=1):
            for child_pos, child in enumerate(slot.children, start=1):
                visit(child, (child_pos, attr_pos) + path)
            if slot.kind == "list":
                out.append(pad((len(slot.children) + 1, attr_pos) + path))

    visit(tree.root, ())
    return out
