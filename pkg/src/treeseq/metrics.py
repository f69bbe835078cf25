"""Corpus metrics over token sequences.

All functions take parallel lists of token-string sequences.  BLEU is
the corpus-level score: modified n-gram precisions for n = 1..4 pooled
over the corpus, geometric mean, multiplied by the brevity penalty
exp(1 - r/c) when the candidate corpus is shorter than the reference.
Zero numerators are smoothed to a 1e-9 precision; n-gram orders for
which the whole candidate corpus has no n-grams at all are dropped
from the mean (otherwise a corpus of short sequences could never reach
the identity score of 1).

The prefix family scores the longest common prefix of each pair:
token-level scores pool LCP lengths over the corpus (micro average),
sequence-level scores average the per-sample ratios (macro average).
An empty prediction contributes a zero precision term.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, asdict

from .errors import ValidationError
from .vocab import mask_literals

EPSILON = 1e-9
MAX_ORDER = 4


def _check_parallel(preds, refs) -> None:
    if len(preds) != len(refs):
        raise ValidationError(
            f"prediction and reference corpora differ in size ({len(preds)} vs {len(refs)})"
        )
    if len(preds) == 0:
        raise ValidationError("cannot score an empty corpus")


def _ngrams(seq, n: int) -> Counter:
    return Counter(tuple(seq[i : i + n]) for i in range(len(seq) - n + 1))


def bleu(preds, refs) -> float:
    _check_parallel(preds, refs)
    cand_len = sum(len(p) for p in preds)
    ref_len = sum(len(r) for r in refs)
    if cand_len == 0:
        return 0.0
    log_sum = 0.0
    orders = 0
    for n in range(1, MAX_ORDER + 1):
        matched = 0
        total = 0
        for p, r in zip(preds, refs):
            total += max(len(p) - n + 1, 0)
            if len(p) >= n:
                ref_counts = _ngrams(r, n)
                for g, c in _ngrams(p, n).items():
                    matched += min(c, ref_counts.get(g, 0))
        if total == 0:
            continue
        orders += 1
        log_sum += math.log(matched / total) if matched > 0 else math.log(EPSILON)
    if orders == 0:
        return 0.0
    brevity = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return brevity * math.exp(log_sum / orders)


def exact_match(preds, refs) -> float:
    _check_parallel(preds, refs)
    hits = sum(1 for p, r in zip(preds, refs) if list(p) == list(r))
    return hits / len(preds)


def _lcp(a, b) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def prefix_scores(preds, refs) -> dict:
    _check_parallel(preds, refs)
    for r in refs:
        if len(r) == 0:
            raise ValidationError("references must be non-empty")
    lcps = [_lcp(p, r) for p, r in zip(preds, refs)]
    total_pred = sum(len(p) for p in preds)
    total_ref = sum(len(r) for r in refs)
    return {
        "token_recall": sum(lcps) / total_ref,
        "token_precision": sum(lcps) / total_pred if total_pred > 0 else 0.0,
        "seq_recall": sum(l / len(r) for l, r in zip(lcps, refs)) / len(refs),
        "seq_precision": sum(
            l / len(p) if len(p) > 0 else 0.0 for l, p in zip(lcps, preds)
        )
        / len(preds),
    }


@dataclass(frozen=True)
class EvalReport:
    n_samples: int
    masked: bool
    bleu: float
    exact_match: float
    token_recall: float
    token_precision: float
    seq_recall: float
    seq_precision: float

    def to_doc(self) -> dict:
        return asdict(self)

    def table(self) -> str:
        rows = [
            ("samples", f"{self.n_samples}"),
            ("literals masked", "yes" if self.masked else "no"),
            ("bleu", f"{self.bleu:.4f}"),
            ("exact match", f"{self.exact_match:.4f}"),
            ("token prefix recall", f"{self.token_recall:.4f}"),
            ("token prefix precision", f"{self.token_precision:.4f}"),
            ("seq prefix recall", f"{self.seq_recall:.4f}"),
            ("seq prefix precision", f"{self.seq_precision:.4f}"),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def evaluate(pred_tokens, ref_tokens, mask: bool = False) -> EvalReport:
    """Score predicted against reference token sequences.

    Inputs are sequences of :class:`treeseq.tokens.AstToken`; with
    ``mask`` set, string-literal values on both sides are replaced by
    the category sentinel before scoring.
    """
    _check_parallel(pred_tokens, ref_tokens)
    if mask:
        pred_tokens = [mask_literals(s) for s in pred_tokens]
        ref_tokens = [mask_literals(s) for s in ref_tokens]
    preds = [[t.text() for t in s] for s in pred_tokens]
    refs = [[t.text() for t in s] for s in ref_tokens]
    prefix = prefix_scores(preds, refs)
    return EvalReport(
        n_samples=len(preds),
        masked=mask,
        bleu=bleu(preds, refs),
        exact_match=exact_match(preds, refs),
        **prefix,
    )
