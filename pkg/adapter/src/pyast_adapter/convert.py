"""Lowering from Python's own ``ast`` to typed-tree object nodes.

The mapping is mechanical: every AST node becomes an object node named
after its class, and its fields become attribute slots in native field
order.  Three kinds of field never survive the trip:

* ``ctx`` (expression load/store context), ``type_comment`` and
  ``type_ignores`` are dropped; they carry nothing a tree consumer of
  this format can use,
* constants are replaced by category-specific nodes (``Num``, ``Str``,
  ``Bool``, ``NoneConst``, with ``Const`` as the catch-all) holding one
  literal leaf,
* plain-string fields such as ``Name.id`` become identifier leaves,
  and plain-int fields become number leaves.

``ast`` classes do not record which fields may be None, so the
optional ones are curated in OPTIONAL_FIELDS below.  An optional field
always exports as a list slot of length zero or one, present or not,
which keeps the induced grammar stable across corpora.  A None in any
field missing from the table raises rather than guessing, so gaps in
the table stay loud.
"""

import ast

from treeseq.tree import ObjectNode, TypedTree, leaf, listing, node, single, wrap

DROP_FIELDS = frozenset({"ctx", "type_comment", "type_ignores"})

OPTIONAL_FIELDS = {
    "AnnAssign": frozenset({"value"}),
    "Assert": frozenset({"msg"}),
    "AsyncFunctionDef": frozenset({"returns"}),
    "ExceptHandler": frozenset({"type", "name"}),
    "FormattedValue": frozenset({"format_spec"}),
    "FunctionDef": frozenset({"returns"}),
    "ImportFrom": frozenset({"module"}),
    "Raise": frozenset({"exc", "cause"}),
    "Return": frozenset({"value"}),
    "Slice": frozenset({"lower", "upper", "step"}),
    "Yield": frozenset({"value"}),
    "alias": frozenset({"asname"}),
    "arg": frozenset({"annotation"}),
    "arguments": frozenset({"vararg", "kwarg"}),
    "keyword": frozenset({"arg"}),
    "withitem": frozenset({"optional_vars"}),
}


class Unconvertible(Exception):
    """A snippet that cannot be represented; the message says why."""


def convert_constant(value) -> ObjectNode:
    # bool subclasses int, so it must be tested first
    if isinstance(value, bool):
        return node("Bool", single("value", leaf("boolean", str(value))))
    if value is None:
        return node("NoneConst", single("value", leaf("none", "None")))
    if isinstance(value, (int, float, complex)):
        return node("Num", single("n", leaf("number", repr(value))))
    if isinstance(value, str):
        return node("Str", single("s", leaf("string", value)))
    # bytes, Ellipsis and friends: stringified, category string
    return node("Const", single("value", leaf("string", repr(value))))


def convert_node(n: ast.AST) -> ObjectNode:
    if isinstance(n, ast.Constant):
        return convert_constant(n.value)
    name = type(n).__name__
    optional = OPTIONAL_FIELDS.get(name, frozenset())
    slots = []
    for field in n._fields:
        if field in DROP_FIELDS:
            continue
        value = getattr(n, field)
        if field in optional:
            children = [] if value is None else [_convert_value(value)]
            slots.append(listing(field, *children))
        elif isinstance(value, list):
            slots.append(listing(field, *[_convert_value(v) for v in value]))
        elif value is None:
            raise Unconvertible(f"{name}.{field} is None but not marked optional")
        else:
            slots.append(single(field, _convert_value(value)))
    return node(name, *slots)


def _convert_value(v) -> ObjectNode:
    if v is None:
        # a hole in a list field: dict ** keys, absent kw-only defaults
        return node("NoneConst", single("value", leaf("none", "None")))
    if isinstance(v, ast.AST):
        return convert_node(v)
    if isinstance(v, bool):
        return leaf("boolean", str(v))
    if isinstance(v, str):
        return leaf("identifier", v)
    if isinstance(v, int):
        return leaf("number", str(v))
    raise Unconvertible(f"unsupported field value {v!r}")


def module_tree(mod: ast.Module) -> TypedTree:
    return wrap(convert_node(mod))


def snippet_tree(code: str) -> TypedTree:
    """Parse one snippet as a module and lower it."""
    try:
        mod = ast.parse(code)
    except SyntaxError as exc:
        raise Unconvertible(f"does not parse: {exc.msg} (line {exc.lineno})") from exc
    return module_tree(mod)
