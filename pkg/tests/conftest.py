"""Shared fixtures: the worked ``a=10`` example and small toy corpora."""

import pytest

from treeseq.grammar import induce
from treeseq.toy import gen_corpus
from treeseq.tree import leaf, listing, node, single, wrap

# The a=10 tree, its token sequence, and its edge paths (L=10) were
# derived by hand and are frozen here; several suites assert against
# them verbatim.

ASSIGN_TOKEN_TEXTS = [
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

ASSIGN_PATHS_L10 = [
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],  # sos
    [1, 1, 0, 0, 0, 0, 0, 0, 0, 0],  # Module
    [1, 1, 1, 1, 0, 0, 0, 0, 0, 0],  # Assign
    [1, 1, 1, 1, 1, 1, 0, 0, 0, 0],  # Name
    [1, 1, 1, 1, 1, 1, 1, 1, 0, 0],  # 'a'
    [2, 1, 1, 1, 1, 1, 0, 0, 0, 0],  # le closing targets
    [1, 2, 1, 1, 1, 1, 0, 0, 0, 0],  # Num
    [1, 1, 1, 2, 1, 1, 1, 1, 0, 0],  # 10
    [2, 1, 1, 1, 0, 0, 0, 0, 0, 0],  # le closing body
    [1, 2, 0, 0, 0, 0, 0, 0, 0, 0],  # eos
]


def build_assign_tree():
    return wrap(
        node(
            "Module",
            listing(
                "body",
                node(
                    "Assign",
                    listing("targets", node("Name", single("id", leaf("identifier", "a")))),
                    single("value", node("Num", single("n", leaf("number", "10")))),
                ),
            ),
        )
    )


@pytest.fixture
def assign_tree():
    return build_assign_tree()


@pytest.fixture
def assign_grammar(assign_tree):
    return induce([assign_tree])


@pytest.fixture(scope="session")
def toy100():
    return gen_corpus(100, seed=7)


@pytest.fixture(scope="session")
def toy_grammar(toy100):
    return induce(s.tree for s in toy100)


# The release-gate tests in test_acceptance.py register a verdict line
# each; they are echoed after the run so the gate is readable at a
# glance even when every test passed.

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
