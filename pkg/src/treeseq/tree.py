"""Typed ordered trees and their depth-first linearization.

A tree is built from object nodes.  Each object node either carries a
literal (then it is a leaf) or owns an ordered run of named attribute
slots.  A slot is ``single`` (exactly one child) or ``list`` (zero or
more children).  Every tree is wrapped in a synthetic ``sos`` root with
two singleton slots: ``start`` holding the real root and ``end``
holding an ``eos`` leaf.

Linearization emits one token per object node in depth-first preorder
plus one ``le`` token closing every list slot; singleton slots emit no
marker.  An empty list slot therefore emits an immediate ``le``.  The
token count of a linearized tree equals the number of object nodes
(including sos/eos) plus the number of list slots.

``delinearize`` is the exact inverse given the grammar that describes
each node type's slots.  It is a plain recursive-descent parser and is
deliberately independent from the incremental automaton in
:mod:`treeseq.automaton` so the two can be checked against each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import ValidationError
from .tokens import (
    CATEGORY_TYPES,
    EOS,
    LE,
    SOS,
    AstToken,
    LITERAL_CATEGORIES,
    lit_token,
    node_token,
)

SLOT_KINDS = ("single", "list")


@dataclass(frozen=True, slots=True)
class Literal:
    category: str
    value: str

    def __post_init__(self):
        if self.category not in LITERAL_CATEGORIES:
            raise ValidationError(f"unknown literal category {self.category!r}")
        if not isinstance(self.value, str):
            raise ValidationError("literal value must be a string")


@dataclass(frozen=True, slots=True)
class AttrSlot:
    name: str
    kind: str
    children: tuple["ObjectNode", ...]

    def __post_init__(self):
        if self.kind not in SLOT_KINDS:
            raise ValidationError(f"unknown slot kind {self.kind!r}")
        if self.kind == "single" and len(self.children) != 1:
            raise ValidationError(
                f"singleton slot {self.name!r} has {len(self.children)} children"
            )


@dataclass(frozen=True, slots=True)
class ObjectNode:
    node_type: str
    literal: Optional[Literal]
    attrs: tuple[AttrSlot, ...]

    def __post_init__(self):
        if self.literal is not None:
            if self.attrs:
                raise ValidationError(
                    f"literal node {self.node_type!r} must not own attribute slots"
                )
            expected = CATEGORY_TYPES[self.literal.category]
            if self.node_type != expected:
                raise ValidationError(
                    f"literal leaf of category {self.literal.category!r} "
                    f"must have node type {expected!r}, got {self.node_type!r}"
                )
        elif self.node_type.startswith("$"):
            raise ValidationError(
                f"node type {self.node_type!r} is reserved for literal leaves"
            )

    @property
    def is_leaf(self) -> bool:
        return not self.attrs


def leaf(category: str, value: str) -> ObjectNode:
    """Literal leaf node; its type is the category's canonical symbol."""
    if category not in CATEGORY_TYPES:
        raise ValidationError(f"unknown literal category {category!r}")
    return ObjectNode(CATEGORY_TYPES[category], Literal(category, value), ())


def node(node_type: str, *attrs: AttrSlot) -> ObjectNode:
    return ObjectNode(node_type, None, tuple(attrs))


def single(name: str, child: ObjectNode) -> AttrSlot:
    return AttrSlot(name, "single", (child,))


def listing(name: str, *children: ObjectNode) -> AttrSlot:
    return AttrSlot(name, "list", tuple(children))


EOS_NODE = ObjectNode("eos", None, ())


@dataclass(frozen=True, slots=True)
class TypedTree:
    """A tree wrapped in the synthetic sos root."""

    root: ObjectNode

    def __post_init__(self):
        r = self.root
        if (
            r.node_type != "sos"
            or len(r.attrs) != 2
            or r.attrs[0].name != "start"
            or r.attrs[1].name != "end"
            or r.attrs[0].kind != "single"
            or r.attrs[1].kind != "single"
            or r.attrs[1].children[0] != EOS_NODE
        ):
            raise ValidationError("tree root must be the canonical sos wrapper")

    @property
    def real_root(self) -> ObjectNode:
        return self.root.attrs[0].children[0]


def wrap(real_root: ObjectNode) -> TypedTree:
    if real_root.node_type in ("sos", "eos"):
        raise ValidationError("sos/eos cannot appear inside a tree")
    sos_node = ObjectNode(
        "sos", None, (single("start", real_root), single("end", EOS_NODE))
    )
    return TypedTree(sos_node)


def iter_nodes(root: ObjectNode) -> Iterator[ObjectNode]:
    """All object nodes under (and including) ``root``, preorder."""
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        for slot in reversed(n.attrs):
            stack.extend(reversed(slot.children))


# ---------------------------------------------------------------------------
# interchange documents


def node_from_doc(doc) -> ObjectNode:
    if not isinstance(doc, dict):
        raise ValidationError(f"node document must be an object, got {type(doc).__name__}")
    unknown = set(doc) - {"type", "literal", "attrs"}
    if unknown:
        raise ValidationError(f"unknown node fields {sorted(unknown)}")
    node_type = doc.get("type")
    if not isinstance(node_type, str) or not node_type:
        raise ValidationError("node 'type' must be a non-empty string")
    lit_doc = doc.get("literal")
    attrs_doc = doc.get("attrs", [])
    if lit_doc is not None:
        if not isinstance(lit_doc, dict) or set(lit_doc) != {"category", "value"}:
            raise ValidationError(f"malformed literal document {lit_doc!r}")
        literal = Literal(lit_doc["category"], lit_doc["value"])
        if attrs_doc:
            raise ValidationError("literal node must have empty 'attrs'")
        return ObjectNode(node_type, literal, ())
    if not isinstance(attrs_doc, list):
        raise ValidationError("'attrs' must be a list")
    slots = []
    seen = set()
    for entry in attrs_doc:
        if not isinstance(entry, list) or len(entry) != 3:
            raise ValidationError(f"attribute entry must be [name, kind, children]: {entry!r}")
        name, kind, children_doc = entry
        if not isinstance(name, str) or name in seen:
            raise ValidationError(f"bad or duplicate attribute name {name!r}")
        seen.add(name)
        if not isinstance(children_doc, list):
            raise ValidationError(f"children of slot {name!r} must be a list")
        children = tuple(node_from_doc(c) for c in children_doc)
        slots.append(AttrSlot(name, kind, children))
    return ObjectNode(node_type, None, tuple(slots))


def node_to_doc(n: ObjectNode) -> dict:
    if n.literal is not None:
        return {
            "type": n.node_type,
            "literal": {"category": n.literal.category, "value": n.literal.value},
            "attrs": [],
        }
    return {
        "type": n.node_type,
        "literal": None,
        "attrs": [
            [slot.name, slot.kind, [node_to_doc(c) for c in slot.children]]
            for slot in n.attrs
        ],
    }


def read_tree(doc) -> TypedTree:
    """Parse an interchange document (the unwrapped tree) and wrap it."""
    return wrap(node_from_doc(doc))


def tree_to_doc(tree: TypedTree) -> dict:
    return node_to_doc(tree.real_root)


@dataclass(frozen=True, slots=True)
class Sample:
    nl: str
    tree: TypedTree


def load_corpus(path) -> list[Sample]:
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}:{lineno}: not valid JSON: {exc}") from exc
            if not isinstance(rec, dict) or "nl" not in rec or "tree" not in rec:
                raise ValidationError(f"{path}:{lineno}: record needs 'nl' and 'tree'")
            if not isinstance(rec["nl"], str):
                raise ValidationError(f"{path}:{lineno}: 'nl' must be a string")
            try:
                tree = read_tree(rec["tree"])
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
            samples.append(Sample(rec["nl"], tree))
    if not samples:
        raise ValidationError(f"{path}: corpus is empty")
    return samples


def save_corpus(samples, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            rec = {"nl": s.nl, "tree": tree_to_doc(s.tree)}
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# linearization


def _node_to_token(n: ObjectNode) -> AstToken:
    if n.literal is not None:
        return lit_token(n.literal.category, n.literal.value)
    if n.node_type == "sos":
        return SOS
    if n.node_type == "eos":
        return EOS
    return node_token(n.node_type)


def linearize(tree: TypedTree) -> list[AstToken]:
    """Depth-first preorder token sequence, list slots closed by ``le``."""
    out: list[AstToken] = []

    def visit(n: ObjectNode) -> None:
        out.append(_node_to_token(n))
        for slot in n.attrs:
            for child in slot.children:
                visit(child)
            if slot.kind == "list":
                out.append(LE)

    visit(tree.root)
    return out


def delinearize(tokens, grammar) -> TypedTree:
    """Rebuild the tree from its token sequence under ``grammar``.

    Raises :class:`ValidationError` on an illegal token, a premature
    end of sequence, or trailing tokens.
    """
    tokens = list(tokens)
    pos = 0

    def fail(msg: str):
        raise ValidationError(f"token {pos}: {msg}")

    def take() -> AstToken:
        nonlocal pos
        if pos >= len(tokens):
            raise ValidationError("sequence ended before the tree was complete")
        t = tokens[pos]
        pos += 1
        return t

    def parse_child(slot) -> ObjectNode:
        t = take()
        if t.kind == "le":
            fail(f"le cannot open a child of slot {slot.name!r}")
        if t.kind == "lit":
            symbol = CATEGORY_TYPES[t.category]
            if symbol not in slot.children:
                fail(f"literal category {t.category!r} not allowed in slot {slot.name!r}")
            return leaf(t.category, t.payload)
        symbol = t.payload if t.kind == "node" else t.kind
        if symbol not in slot.children:
            fail(f"node type {symbol!r} not allowed in slot {slot.name!r}")
        return parse_object(symbol)

    def parse_object(node_type: str) -> ObjectNode:
        slots = []
        for spec in grammar.slots_of(node_type):
            if spec.kind == "single":
                slots.append(AttrSlot(spec.name, "single", (parse_child(spec),)))
            else:
                children = []
                while True:
                    if pos >= len(tokens):
                        raise ValidationError(
                            f"sequence ended inside list slot {spec.name!r} of {node_type!r}"
                        )
                    if tokens[pos].kind == "le":
                        take()
                        break
                    children.append(parse_child(spec))
                slots.append(AttrSlot(spec.name, "list", tuple(children)))
        return ObjectNode(node_type, None, tuple(slots))

    t = take()
    if t.kind != "sos":
        raise ValidationError(f"token 0: sequence must open with sos, got {t.text()!r}")
    if not grammar.has_type("sos"):
        raise ValidationError("grammar does not describe the sos wrapper")
    root = parse_object("sos")
    if pos != len(tokens):
        raise ValidationError(
            f"trailing tokens after the tree closed (consumed {pos} of {len(tokens)})"
        )
    return TypedTree(root)
