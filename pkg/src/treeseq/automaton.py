"""Incremental acceptor for linearized trees.

The automaton consumes one token at a time and always knows which
tokens may come next and which tree position the next token will
occupy.  Its state is a stack of frames, one per object node whose
subtree is still open.  A frame tracks the node's type, which
attribute slot is currently being filled, how many children that slot
has received so far, and the node's own edge path.

States are immutable values: ``step`` returns a new state and old
states stay valid, so beam search can fork hypotheses by reference.

Token legality is expressed at the symbol level: node types appear by
name, literal categories as their ``$``-prefixed symbol, and the
structural markers as ``sos`` / ``eos`` / ``le``.  Any literal value
text of a legal category is legal; values are never constrained here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import IllegalTokenError, ValidationError
from .grammar import GrammarGraph
from .tokens import AstToken, grammar_symbol


class _Frame(NamedTuple):
    node_type: str
    slot_idx: int
    count: int
    path: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class DecoderState:
    grammar: GrammarGraph = field(compare=False)
    stack: tuple[_Frame, ...] = ()
    started: bool = False

    @property
    def finished(self) -> bool:
        return self.started and not self.stack

    def legal_tokens(self) -> frozenset[str]:
        """Symbols that may come next (empty once finished)."""
        if not self.started:
            return frozenset(("sos",))
        if not self.stack:
            return frozenset()
        frame = self.stack[-1]
        spec = self.grammar.slots_of(frame.node_type)[frame.slot_idx]
        if spec.kind == "list":
            return spec.children | {"le"}
        return spec.children

    def allows(self, token: AstToken) -> bool:
        symbol = "le" if token.kind == "le" else grammar_symbol(token)
        return symbol in self.legal_tokens()

    def step(self, token: AstToken) -> "DecoderState":
        if token.kind == "sos":
            if self.started:
                raise IllegalTokenError("sos is only legal first", self.legal_tokens())
            if not self.grammar.has_type("sos"):
                raise ValidationError("grammar does not describe the sos wrapper")
            return DecoderState(self.grammar, (_Frame("sos", 0, 0, ()),), True)
        if not self.started or not self.stack:
            raise IllegalTokenError(
                f"{token.text()!r} rejected: no open node", self.legal_tokens()
            )
        frame = self.stack[-1]
        spec = self.grammar.slots_of(frame.node_type)[frame.slot_idx]
        if token.kind == "le":
            if spec.kind != "list":
                raise IllegalTokenError(
                    f"le rejected: slot {spec.name!r} of {frame.node_type!r} is singleton",
                    self.legal_tokens(),
                )
            return DecoderState(self.grammar, _advance(self.grammar, self.stack), True)
        symbol = grammar_symbol(token)
        if symbol not in spec.children:
            raise IllegalTokenError(
                f"{token.text()!r} rejected in slot {spec.name!r} of {frame.node_type!r}",
                self.legal_tokens(),
            )
        child_path = (frame.count + 1, frame.slot_idx + 1) + frame.path
        stack = self.stack[:-1] + (frame._replace(count=frame.count + 1),)
        if self.grammar.slots_of(symbol):
            stack = stack + (_Frame(symbol, 0, 0, child_path),)
        else:
            # leaf child (literal, eos, or attribute-less node): completes at once
            top = stack[-1]
            if self.grammar.slots_of(top.node_type)[top.slot_idx].kind != "list":
                stack = _advance(self.grammar, stack)
        return DecoderState(self.grammar, stack, True)

    def next_edge_path(self, path_len: int) -> tuple[int, ...]:
        """Edge path the next token will occupy, zero-padded to ``path_len``."""
        if not self.started:
            return (0,) * path_len
        if not self.stack:
            raise ValidationError("no next token: the tree is finished")
        frame = self.stack[-1]
        path = (frame.count + 1, frame.slot_idx + 1) + frame.path
        if len(path) > path_len:
            raise ValidationError(
                f"edge path depth {len(path)} exceeds configured length {path_len}"
            )
        return path + (0,) * (path_len - len(path))


def _advance(grammar: GrammarGraph, stack: tuple[_Frame, ...]) -> tuple[_Frame, ...]:
    """Close the top frame's current slot and cascade completions upward."""
    frame = stack[-1]
    stack = stack[:-1] + (frame._replace(slot_idx=frame.slot_idx + 1, count=0),)
    while True:
        frame = stack[-1]
        if frame.slot_idx < len(grammar.slots_of(frame.node_type)):
            return stack
        stack = stack[:-1]
        if not stack:
            return stack
        parent = stack[-1]
        if grammar.slots_of(parent.node_type)[parent.slot_idx].kind == "list":
            return stack
        stack = stack[:-1] + (parent._replace(slot_idx=parent.slot_idx + 1, count=0),)


def initial_state(grammar: GrammarGraph) -> DecoderState:
    if not grammar.has_type("sos"):
        raise ValidationError("grammar does not describe the sos wrapper")
    return DecoderState(grammar)


def replay(grammar: GrammarGraph, tokens) -> DecoderState:
    """Fold a whole sequence; raises on the first illegal token."""
    state = initial_state(grammar)
    for token in tokens:
        state = state.step(token)
    return state
