"""Corpus export: snippets in, typed-tree JSONL out.

Inputs come either as (key, nl, code) triples, as JSONL files with
``nl`` and ``code`` fields, or as .py files whose module docstring is
taken as the nl text (and removed from the exported tree).  Snippets
that cannot be converted are skipped and logged, never fatal; the
report carries both the exported samples and the skip reasons.
"""

import ast
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from treeseq.tree import Sample, save_corpus

from .convert import Unconvertible, module_tree, snippet_tree

log = logging.getLogger(__name__)


@dataclass
class ExportReport:
    samples: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (key, reason) pairs

    def add(self, key: str, nl: str, code: str) -> None:
        try:
            tree = snippet_tree(code)
        except Unconvertible as exc:
            log.warning("skipping %s: %s", key, exc)
            self.skipped.append((key, str(exc)))
            return
        self.samples.append(Sample(nl=nl, tree=tree))

    def add_module_source(self, key: str, source: str) -> None:
        """A whole .py file; its docstring becomes the nl text."""
        try:
            mod = ast.parse(source)
        except SyntaxError as exc:
            reason = f"does not parse: {exc.msg} (line {exc.lineno})"
            log.warning("skipping %s: %s", key, reason)
            self.skipped.append((key, reason))
            return
        nl = ast.get_docstring(mod) or ""
        if nl:
            mod.body = mod.body[1:]
        try:
            tree = module_tree(mod)
        except Unconvertible as exc:
            log.warning("skipping %s: %s", key, exc)
            self.skipped.append((key, str(exc)))
            return
        self.samples.append(Sample(nl=nl, tree=tree))


def export_pairs(pairs) -> ExportReport:
    """pairs: iterable of (key, nl, code)."""
    report = ExportReport()
    for key, nl, code in pairs:
        report.add(key, nl, code)
    return report


def iter_jsonl(path) -> list:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            key = f"{path}:{lineno}"
            try:
                rec = json.loads(line)
                pairs.append((key, str(rec["nl"]), str(rec["code"])))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{key}: not a {{nl, code}} record: {exc}") from exc
    return pairs


def export_inputs(inputs) -> ExportReport:
    """Paths of .py files, directories of them, or .jsonl pair files."""
    report = ExportReport()
    for raw in inputs:
        path = Path(raw)
        if path.is_dir():
            for py in sorted(path.rglob("*.py")):
                report.add_module_source(str(py), py.read_text(encoding="utf-8"))
        elif path.suffix == ".jsonl":
            for key, nl, code in iter_jsonl(path):
                report.add(key, nl, code)
        else:
            report.add_module_source(str(path), path.read_text(encoding="utf-8"))
    return report


def write_corpus(report: ExportReport, out_path) -> None:
    save_corpus(report.samples, out_path)
