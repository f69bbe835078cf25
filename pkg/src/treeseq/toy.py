"""Seeded toy corpus: tiny imperative programs described in English.

Trees are built over a 12-type node alphabet (Module, five statement
forms, Call, and four literal-carrying expression leaves) and stay
within 8 hops of the root, so they fit the default path length.  Each
tree is rendered into a deterministic English sentence; the pair forms
one corpus sample.  Statement counts, list lengths and optional slots
vary, which shifts flat token positions around while tree coordinates
stay put.
"""

from __future__ import annotations

import random

from .tree import Sample, leaf, listing, node, single, wrap

IDENTIFIERS = (
    "acc", "base", "count", "delta", "flag", "idx",
    "item", "res", "total", "tmp", "val", "size",
)
NUMBERS = tuple(str(n) for n in range(21))
WORDS = (
    "alpha", "beta", "gamma", "delta", "omega", "red", "blue", "green",
    "spam", "eggs", "north", "south", "haze", "stone", "ember", "frost",
    "quill", "latch",
)
BOOLEANS = ("true", "false")

_STMT_KINDS = ("assign", "call", "return", "print", "global", "pass")
_STMT_WEIGHTS = (0.32, 0.22, 0.14, 0.14, 0.10, 0.08)
_EXPR_KINDS = ("name", "num", "str", "bool", "none")
_EXPR_WEIGHTS = (0.26, 0.28, 0.28, 0.12, 0.06)


def _expr(rng: random.Random):
    kind = rng.choices(_EXPR_KINDS, _EXPR_WEIGHTS)[0]
    if kind == "name":
        name = rng.choice(IDENTIFIERS)
        return node("Name", single("id", leaf("identifier", name))), [name]
    if kind == "num":
        value = rng.choice(NUMBERS)
        return node("Num", single("n", leaf("number", value))), [value]
    if kind == "str":
        word = rng.choice(WORDS)
        return node("Str", single("s", leaf("string", word))), ["text", word]
    if kind == "bool":
        value = rng.choice(BOOLEANS)
        return node("Bool", single("b", leaf("boolean", value))), [value]
    return node("NoneConst", single("v", leaf("none", "none"))), ["none"]


def _name(rng: random.Random):
    name = rng.choice(IDENTIFIERS)
    return node("Name", single("id", leaf("identifier", name))), name


def _join(phrases: list[list[str]]) -> list[str]:
    out: list[str] = []
    for i, p in enumerate(phrases):
        if i:
            out.append("and")
        out.extend(p)
    return out


def _stmt(rng: random.Random):
    kind = rng.choices(_STMT_KINDS, _STMT_WEIGHTS)[0]
    if kind == "assign":
        targets = [_name(rng) for _ in range(rng.choices((1, 2), (0.8, 0.2))[0])]
        value, phrase = _expr(rng)
        tree = node(
            "Assign",
            listing("targets", *(t for t, _ in targets)),
            single("value", value),
        )
        words = ["set"] + _join([[n] for _, n in targets]) + ["to"] + phrase
        return tree, words
    if kind == "call":
        func, fname = _name(rng)
        args = [_expr(rng) for _ in range(rng.choices((0, 1, 2, 3), (0.2, 0.4, 0.3, 0.1))[0])]
        tree = node("Call", single("func", func), listing("args", *(a for a, _ in args)))
        words = ["call", fname]
        if args:
            words += ["with"] + _join([p for _, p in args])
        return tree, words
    if kind == "return":
        if rng.random() < 0.3:
            return node("Return", listing("value")), ["return", "nothing"]
        value, phrase = _expr(rng)
        return node("Return", listing("value", value)), ["return"] + phrase
    if kind == "print":
        values = [_expr(rng) for _ in range(rng.choices((1, 2), (0.7, 0.3))[0])]
        tree = node("Print", listing("values", *(v for v, _ in values)))
        return tree, ["print"] + _join([p for _, p in values])
    if kind == "global":
        names = [_name(rng) for _ in range(rng.choices((1, 2), (0.7, 0.3))[0])]
        tree = node("Global", listing("names", *(n for n, _ in names)))
        return tree, ["mark"] + _join([[n] for _, n in names]) + ["global"]
    return node("Pass"), ["do", "nothing"]


def gen_sample(rng: random.Random) -> Sample:
    n_stmts = rng.choices((1, 2, 3), (0.45, 0.35, 0.2))[0]
    stmts, words = [], []
    for i in range(n_stmts):
        tree, phrase = _stmt(rng)
        stmts.append(tree)
        if i:
            words.append("then")
        words.extend(phrase)
    module = node("Module", listing("body", *stmts))
    return Sample(" ".join(words), wrap(module))


def gen_corpus(n: int, seed: int) -> list[Sample]:
    rng = random.Random(seed)
    return [gen_sample(rng) for _ in range(n)]
