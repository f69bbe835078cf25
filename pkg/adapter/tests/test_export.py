"""End-to-end export checks over a 50-snippet corpus.

The snippet set walks most of the everyday statement and expression
surface; the release check is that every exported tree survives the
full interchange round trip and that the classic single-assignment
example lowers to the expected shape.
"""

import json

import pytest

from pyast_adapter import export_pairs
from pyast_adapter.cli import main
from treeseq.automaton import replay
from treeseq.grammar import induce
from treeseq.tree import delinearize, linearize, load_corpus, read_tree, tree_to_doc

SNIPPETS = [
    ("assign ten to a", "a = 10"),
    ("odd constants", 'stub = (..., b"\\x00")'),
    ("price arithmetic", "total = price * count - discount"),
    ("string assign", 'name = "ada"'),
    ("boolean assign", "flag = True"),
    ("none assign", "result = None"),
    ("float assign", "pi = 3.14159"),
    ("complex assign", "z = 2 + 3j"),
    ("bump a global counter", "def bump():\n    global counter\n    counter += 1"),
    ("chained assign", "x = y = 0"),
    ("increment", "n += 1"),
    ("annotated counter", "count: int = 0"),
    ("range check", "valid = 0 <= idx < size"),
    ("head of a list", "def first(xs):\n    head, *rest = xs\n    return head"),
    ("attribute chain", "value = obj.attr.inner"),
    ("substring", "part = text[2:5]"),
    ("cached lookup", "if (m := lookup(key)) is not None:\n    use(m)"),
    ("formatted label", 'label = f"n={num!r} w={width:>3}"'),
    ("decorated class", '@register\nclass Point(Base):\n    kind = "p"'),
    ("list literal", "xs = [1, 2, 3]"),
    ("tuple literal", "point = (0, 0)"),
    ("set literal", "seen = {1, 2}"),
    ("dict literal", 'ages = {"ada": 36, "alan": 41}'),
    ("dict merge", 'merged = {**base, "k": 1}'),
    ("conjunction", "ok = x > 0 and y < 10"),
    ("negation", "neg = not done"),
    ("arithmetic negation", "low = -limit"),
    ("conditional expression", 'state = "on" if active else "off"'),
    ("keyword argument", "biggest = max(nums, key=len)"),
    ("argument splat", "call(*args, **kwargs)"),
    ("delete a key", "del cache[key]"),
    ("guarded assertion", 'assert x >= 0, "negative"'),
    (
        "sign of x",
        "if x > 0:\n    sign = 1\nelif x < 0:\n    sign = -1\nelse:\n    sign = 0",
    ),
    ("iterate items", "for item in items:\n    process(item)"),
    ("skip odd numbers", "for i in range(10):\n    if i % 2:\n        continue\n    emit(i)"),
    ("drain queue", "while pending:\n    step()"),
    ("add with default", "def add(a, b=0):\n    return a + b"),
    ("annotated greeting", 'def greet(name: str) -> str:\n    return "hi " + name'),
    ("variadic signature", "def spread(*xs, scale=1, **opts):\n    return"),
    ("squaring lambda", "square = lambda v: v * v"),
    ("list comprehension", "squares = [v * v for v in values]"),
    ("set comprehension", "evens = {v for v in values if v % 2 == 0}"),
    ("dict comprehension", "index = {k: i for i, k in enumerate(keys)}"),
    ("generator sum", "total = sum(x * x for x in xs)"),
    ("plain import", "import os"),
    ("aliased import", "from pathlib import Path as P"),
    (
        "guarded call",
        "try:\n    risky()\nexcept ValueError as exc:\n    handle(exc)\nfinally:\n    cleanup()",
    ),
    ("chained raise", 'raise RuntimeError("boom") from exc'),
    ("read a file", "with open(path) as fh:\n    data = fh.read()"),
    ("tiny generator", "def gen(n):\n    yield n\n    yield from range(n)"),
]

FIG_SHAPE = [
    "sos",
    "Module",
    "Assign",
    "Name",
    "identifier:a",
    "le",
    "Num",
    "number:10",
    "le",
    "eos",
]


@pytest.fixture(scope="module")
def report():
    rep = export_pairs((f"s{i}", nl, code) for i, (nl, code) in enumerate(SNIPPETS))
    assert not rep.skipped, rep.skipped
    return rep


class TestCorpus:
    def test_all_fifty_export(self, report):
        assert len(report.samples) == 50

    def test_single_assignment_shape(self, report):
        tree = report.samples[0].tree
        assert [t.text() for t in linearize(tree)] == FIG_SHAPE

    def test_interchange_round_trip(self, report):
        for s in report.samples:
            assert read_tree(tree_to_doc(s.tree)) == s.tree

    def test_linearize_round_trip_under_own_grammar(self, report):
        grammar = induce(s.tree for s in report.samples)
        for s in report.samples:
            toks = linearize(s.tree)
            assert delinearize(toks, grammar) == s.tree
            assert replay(grammar, toks).finished

    def test_grammar_accepts_every_export(self, report):
        grammar = induce(s.tree for s in report.samples)
        for s in report.samples:
            ok, why = grammar.accepts(s.tree)
            assert ok, why

    def test_invalid_snippet_skipped_with_reason(self):
        rep = export_pairs([("good", "x", "x = 1"), ("bad", "y", "def :")])
        assert len(rep.samples) == 1
        assert len(rep.skipped) == 1
        key, reason = rep.skipped[0]
        assert key == "bad"
        assert "parse" in reason


class TestCli:
    def test_jsonl_to_corpus(self, tmp_path, capsys):
        src = tmp_path / "pairs.jsonl"
        with open(src, "w", encoding="utf-8") as fh:
            for nl, code in SNIPPETS:
                fh.write(json.dumps({"nl": nl, "code": code}) + "\n")
            fh.write(json.dumps({"nl": "broken", "code": "def :"}) + "\n")
        out = tmp_path / "corpus.jsonl"
        assert main([str(src), "-o", str(out), "-q"]) == 0
        assert "exported 50 records" in capsys.readouterr().out
        corpus = load_corpus(out)
        assert len(corpus) == 50
        assert corpus[0].nl == "assign ten to a"

    def test_py_file_docstring_becomes_nl(self, tmp_path):
        py = tmp_path / "mod.py"
        py.write_text('"""Sum two numbers."""\nc = a + b\n', encoding="utf-8")
        out = tmp_path / "corpus.jsonl"
        assert main([str(py), "-o", str(out), "-q"]) == 0
        corpus = load_corpus(out)
        assert corpus[0].nl == "Sum two numbers."
        seq = [t.text() for t in linearize(corpus[0].tree)]
        assert "string:Sum two numbers." not in seq  # docstring left the tree

    def test_nothing_exported_fails(self, tmp_path):
        py = tmp_path / "broken.py"
        py.write_text("def :\n", encoding="utf-8")
        assert main([str(py), "-o", str(tmp_path / "o.jsonl"), "-q"]) == 1

    def test_missing_input_fails(self, tmp_path):
        rc = main([str(tmp_path / "absent.py"), "-o", str(tmp_path / "o.jsonl"), "-q"])
        assert rc == 2
