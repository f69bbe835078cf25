"""Grammar-constrained tree-to-sequence toolkit."""

__version__ = "0.1.0"

from .tokens import AstToken, LITERAL_CATEGORIES, SOS, EOS, LE  # noqa: F401
from .tree import (  # noqa: F401
    AttrSlot,
    Literal,
    ObjectNode,
    Sample,
    TypedTree,
    delinearize,
    leaf,
    linearize,
    listing,
    load_corpus,
    node,
    read_tree,
    save_corpus,
    single,
    tree_to_doc,
    wrap,
)
from .grammar import GrammarGraph, induce  # noqa: F401
from .automaton import DecoderState, initial_state, replay  # noqa: F401
from .paths import edge_paths, tree_depth  # noqa: F401
