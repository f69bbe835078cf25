"""Corpus samples to padded id/path arrays."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from ..paths import edge_paths
from ..tree import Sample, linearize
from ..vocab import PAD, JointVocab


@dataclass
class Example:
    nl_ids: list[int]
    ast_ids: list[int]          # joint ids, subword runs expanded
    ast_paths: list[tuple]      # one path per joint id
    ref_tokens: list            # atomic AstTokens, for scoring


def encode_sample(sample: Sample, joint: JointVocab, path_len: int) -> Example:
    tokens = linearize(sample.tree)
    paths = edge_paths(sample.tree, path_len)
    ids: list[int] = []
    id_paths: list[tuple] = []
    for tok, path in zip(tokens, paths):
        if tok.kind == "lit" and tok.category == "string":
            sub = joint.subword.encode(tok.payload)
            run = [joint.offset + s for s in sub] + [joint.lit_end_id]
            ids.extend(run)
            id_paths.extend([path] * len(run))
        else:
            ids.append(joint.ast.encode(tok))
            id_paths.append(path)
    nl_ids = joint.subword.encode(sample.nl)
    return Example(nl_ids, ids, id_paths, tokens)


def encode_corpus(samples, joint: JointVocab, path_len: int) -> list[Example]:
    return [encode_sample(s, joint, path_len) for s in samples]


@dataclass
class Batch:
    nl: np.ndarray       # (B, S) int64, pad = subword PAD
    ast: np.ndarray      # (B, T) int64, pad = joint pad id
    paths: np.ndarray    # (B, T, L) int64, zeros at pad


def make_batch(examples: list[Example], joint: JointVocab, path_len: int) -> Batch:
    if not examples:
        raise ValidationError("empty batch")
    B = len(examples)
    S = max(1, max(len(e.nl_ids) for e in examples))
    T = max(len(e.ast_ids) for e in examples)
    nl = np.full((B, S), PAD, dtype=np.int64)
    ast = np.full((B, T), joint.pad_id, dtype=np.int64)
    paths = np.zeros((B, T, path_len), dtype=np.int64)
    for i, e in enumerate(examples):
        nl[i, : len(e.nl_ids)] = e.nl_ids
        ast[i, : len(e.ast_ids)] = e.ast_ids
        paths[i, : len(e.ast_paths)] = np.asarray(e.ast_paths, dtype=np.int64)
    return Batch(nl, ast, paths)
