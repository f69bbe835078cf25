"""Grammar graphs induced from tree corpora.

The grammar is a bipartite labeled graph: object types own ordered,
named attribute slots, and each slot records the set of child symbols
observed in it.  Literal leaves are generalized to their category
symbol (``$string``, ``$number``, ...), so one observed string literal
licenses every string literal in that slot.  List slots accept any
length including zero; observed lengths are not constraints.

Induction is a plain union over the corpus.  Two occurrences of the
same node type must present the same attribute names, kinds and order;
anything else is a corpus inconsistency and raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import ValidationError
from .tokens import CATEGORY_TYPES
from .tree import ObjectNode, TypedTree, iter_nodes

FORMAT_VERSION = 1


@dataclass(frozen=True)
class SlotSpec:
    name: str
    kind: str
    children: frozenset[str]


def _child_symbol(n: ObjectNode) -> str:
    if n.literal is not None:
        return CATEGORY_TYPES[n.literal.category]
    return n.node_type


class GrammarGraph:
    def __init__(self, slots: dict[str, tuple[SlotSpec, ...]], object_types: frozenset[str]):
        self._slots = dict(slots)
        self.object_types = frozenset(object_types)

    # -- queries ------------------------------------------------------------

    def has_type(self, node_type: str) -> bool:
        return node_type in self.object_types

    def slots_of(self, node_type: str) -> tuple[SlotSpec, ...]:
        if node_type not in self.object_types:
            raise ValidationError(f"unknown object type {node_type!r}")
        return self._slots.get(node_type, ())

    def triples(self) -> frozenset[tuple[str, str, str]]:
        """(owner, attribute, child symbol) for every edge pair."""
        out = set()
        for owner, slots in self._slots.items():
            for spec in slots:
                for child in spec.children:
                    out.add((owner, spec.name, child))
        return frozenset(out)

    def stats(self) -> dict:
        n_attrs = sum(len(s) for s in self._slots.values())
        return {
            "object_types": len(self.object_types),
            "attributes": n_attrs,
            "child_edges": len(self.triples()),
        }

    def __eq__(self, other):
        return (
            isinstance(other, GrammarGraph)
            and self.object_types == other.object_types
            and self._slots == other._slots
        )

    def __hash__(self):
        return hash(self.object_types)

    # -- validation ---------------------------------------------------------

    def accepts(self, tree: TypedTree) -> tuple[bool, str | None]:
        """Structural check of a whole tree; returns (ok, violation)."""
        for n in iter_nodes(tree.root):
            if n.literal is not None:
                continue
            if n.node_type not in self.object_types:
                return False, f"unknown object type {n.node_type!r}"
            specs = self._slots.get(n.node_type, ())
            sig = tuple((s.name, s.kind) for s in n.attrs)
            want = tuple((s.name, s.kind) for s in specs)
            if sig != want:
                return False, (
                    f"{n.node_type!r} has attribute signature {sig}, grammar expects {want}"
                )
            for slot, spec in zip(n.attrs, specs):
                for child in slot.children:
                    symbol = _child_symbol(child)
                    if symbol not in spec.children:
                        return False, (
                            f"({n.node_type!r}, {slot.name!r}, {symbol!r}) is not a grammar edge"
                        )
        return True, None

    # -- serialization ------------------------------------------------------

    def to_doc(self) -> dict:
        attributes = []
        children = {}
        for owner in sorted(self._slots):
            for position, spec in enumerate(self._slots[owner], start=1):
                attributes.append(
                    {"owner": owner, "name": spec.name, "position": position, "kind": spec.kind}
                )
                key = f"{owner}.{spec.name}"
                if key in children:
                    raise ValidationError(f"attribute key collision for {key!r}")
                children[key] = sorted(spec.children)
        return {
            "format_version": FORMAT_VERSION,
            "object_types": sorted(self.object_types),
            "attributes": attributes,
            "children": children,
        }

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_doc(), fh, sort_keys=True, indent=2, ensure_ascii=False)
            fh.write("\n")

    @classmethod
    def from_doc(cls, doc) -> "GrammarGraph":
        if not isinstance(doc, dict):
            raise ValidationError("grammar document must be an object")
        if doc.get("format_version") != FORMAT_VERSION:
            raise ValidationError(
                f"unsupported grammar format_version {doc.get('format_version')!r}, "
                f"expected {FORMAT_VERSION}"
            )
        unknown = set(doc) - {"format_version", "object_types", "attributes", "children"}
        if unknown:
            raise ValidationError(f"unknown grammar fields {sorted(unknown)}")
        try:
            object_types = frozenset(doc["object_types"])
            slots: dict[str, list[SlotSpec | None]] = {}
            for entry in doc["attributes"]:
                owner = entry["owner"]
                position = entry["position"]
                child_set = frozenset(doc["children"][f"{owner}.{entry['name']}"])
                per_owner = slots.setdefault(owner, [])
                while len(per_owner) < position:
                    per_owner.append(None)
                per_owner[position - 1] = SlotSpec(entry["name"], entry["kind"], child_set)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed grammar document: {exc!r}") from exc
        fixed: dict[str, tuple[SlotSpec, ...]] = {}
        for owner, specs in slots.items():
            if any(s is None for s in specs):
                raise ValidationError(f"attribute positions of {owner!r} are not consecutive")
            if owner not in object_types:
                raise ValidationError(f"attribute owner {owner!r} missing from object_types")
            fixed[owner] = tuple(specs)
        for owner in object_types:
            # slotless types (eos, leaf categories, childless nodes) carry
            # no attribute rows in the document but still own an entry
            fixed.setdefault(owner, ())
        return cls(fixed, object_types)

    @classmethod
    def load(cls, path) -> "GrammarGraph":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
        return cls.from_doc(doc)


def induce(trees) -> GrammarGraph:
    """Union the structure of every tree into one grammar graph.

    ``trees`` is an iterable of :class:`TypedTree`.  Raises on an empty
    corpus or on conflicting attribute signatures.
    """
    signatures: dict[str, tuple[tuple[str, str], ...]] = {}
    child_sets: dict[tuple[str, str], set[str]] = {}
    object_types: set[str] = set()
    count = 0
    for tree in trees:
        count += 1
        for n in iter_nodes(tree.root):
            if n.literal is not None:
                object_types.add(_child_symbol(n))
                continue
            object_types.add(n.node_type)
            sig = tuple((s.name, s.kind) for s in n.attrs)
            prior = signatures.setdefault(n.node_type, sig)
            if prior != sig:
                raise ValidationError(
                    f"attribute signature conflict for {n.node_type!r}: "
                    f"{prior} vs {sig}"
                )
            for slot in n.attrs:
                bucket = child_sets.setdefault((n.node_type, slot.name), set())
                for child in slot.children:
                    bucket.add(_child_symbol(child))
    if count == 0:
        raise ValidationError("cannot induce a grammar from an empty corpus")
    slots: dict[str, tuple[SlotSpec, ...]] = {}
    for owner, sig in signatures.items():
        slots[owner] = tuple(
            SlotSpec(name, kind, frozenset(child_sets.get((owner, name), ())))
            for name, kind in sig
        )
    for owner in object_types:
        slots.setdefault(owner, ())
    return GrammarGraph(slots, frozenset(object_types))
