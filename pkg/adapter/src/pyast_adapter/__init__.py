"""Export real Python sources into the treeseq typed-tree corpus format."""

from .convert import OPTIONAL_FIELDS, Unconvertible, convert_node, module_tree, snippet_tree
from .export import ExportReport, export_inputs, export_pairs, write_corpus

__all__ = [
    "OPTIONAL_FIELDS",
    "Unconvertible",
    "convert_node",
    "module_tree",
    "snippet_tree",
    "ExportReport",
    "export_inputs",
    "export_pairs",
    "write_corpus",
]
