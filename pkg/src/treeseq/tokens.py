"""Token alphabet for linearized trees.

A linearized tree is a flat sequence of :class:`AstToken`.  Four token
kinds exist:

* ``sos`` / ``eos`` -- the synthetic root and terminator that wrap
  every tree,
* ``le`` -- the list-end marker closing a list-valued attribute slot,
* ``node`` -- an object node, payload is its type symbol,
* ``lit`` -- a literal leaf, payload is the value text and ``category``
  names one of the five literal categories.

Literal leaves are atomic at this layer; splitting string values into
subwords happens in :mod:`treeseq.vocab`.
"""

from __future__ import annotations

from typing import NamedTuple, Optional

LITERAL_CATEGORIES = ("string", "number", "identifier", "boolean", "none")

#: node_type used for a literal leaf of a given category
CATEGORY_TYPES = {c: "$" + c for c in LITERAL_CATEGORIES}


class AstToken(NamedTuple):
    kind: str  # "sos" | "eos" | "le" | "node" | "lit"
    payload: Optional[str] = None
    category: Optional[str] = None

    def text(self) -> str:
        """Canonical printable form, used by metrics and dumps."""
        if self.kind == "lit":
            value = "<MASKED>" if self.payload is None else self.payload
            return f"{self.category}:{value}"
        if self.kind == "node":
            return self.payload
        return self.kind

    def to_json(self) -> list:
        if self.kind == "lit":
            return [self.kind, self.payload, self.category]
        if self.kind == "node":
            return [self.kind, self.payload]
        return [self.kind]


SOS = AstToken("sos")
EOS = AstToken("eos")
LE = AstToken("le")


def node_token(node_type: str) -> AstToken:
    return AstToken("node", node_type)


def lit_token(category: str, value: Optional[str]) -> AstToken:
    if category not in LITERAL_CATEGORIES:
        raise ValueError(f"unknown literal category {category!r}")
    return AstToken("lit", value, category)


def token_from_json(obj) -> AstToken:
    if not isinstance(obj, list) or not obj or not isinstance(obj[0], str):
        raise ValueError(f"malformed token {obj!r}")
    kind = obj[0]
    if kind in ("sos", "eos", "le"):
        if len(obj) != 1:
            raise ValueError(f"token kind {kind!r} takes no payload: {obj!r}")
        return AstToken(kind)
    if kind == "node":
        if len(obj) != 2 or not isinstance(obj[1], str):
            raise ValueError(f"malformed node token {obj!r}")
        return AstToken("node", obj[1])
    if kind == "lit":
        if len(obj) != 3 or (obj[1] is not None and not isinstance(obj[1], str)):
            raise ValueError(f"malformed literal token {obj!r}")
        return lit_token(obj[2], obj[1])
    raise ValueError(f"unknown token kind {kind!r}")


def grammar_symbol(token: AstToken) -> str:
    """The symbol a token contributes to grammar edges.

    Literals are generalized to their category; everything else keeps
    its own name.  ``le`` is structural and has no symbol.
    """
    if token.kind == "lit":
        return CATEGORY_TYPES[token.category]
    if token.kind == "node":
        return token.payload
    if token.kind in ("sos", "eos"):
        return token.kind
    raise ValueError(f"{token.kind} tokens carry no grammar symbol")
