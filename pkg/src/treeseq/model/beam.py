"""Beam decoding with optional grammar masking.

Hypotheses carry the decoding automaton state alongside their token
ids, so at every step the set of legal next ids is known exactly: tree
tokens legal for the automaton, or (inside a string literal) any
subword plus the literal-end marker.  With masking on, illegal ids get
their log-probability forced to -inf before expansion, which makes
every finished hypothesis a grammar-accepted tree by construction; an
instrumentation check verifies that anyway and raises if violated.

Without masking the same machinery runs open-loop: the automaton is
still tracked opportunistically because tree-mode positional rows are
derived from it, but after the first illegal token a hypothesis is
marked derailed and its remaining positions fall back to zero paths.

Hypotheses within one step always share their length, so the live set
is scored as a single forward batch.  Finished hypotheses leave the
beam; the search stops when the beam is empty, ``k`` hypotheses have
finished, or ``max_len`` is reached.  Final ranking is by
length-normalized log-probability, finished before unfinished.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..automaton import initial_state
from ..encoding import encode_path, sequential_encoding
from ..errors import IllegalTokenError, ValidationError, VerificationError
from ..tokens import SOS, AstToken, lit_token
from ..tree import delinearize
from ..vocab import PAD, JointVocab
from .config import ModelConfig
from .transformer import _forward
from .._kernels import kernels as default_kernels

NEG_INF = float("-inf")


@dataclass
class Hypothesis:
    ids: list[int]
    tokens: list[AstToken]
    rows: list[np.ndarray]            # one positional row per id (tree mode)
    state: object                     # DecoderState or None once derailed
    logp: float = 0.0
    finished: bool = False
    run_ids: list[int] | None = None  # open string run (subword-local ids)
    run_row: np.ndarray | None = None

    @property
    def norm_score(self) -> float:
        return self.logp / max(1, len(self.ids) - 1)


def _zero_row(cfg: ModelConfig, dt) -> np.ndarray:
    return np.zeros(cfg.d_model, dtype=dt)


def _pos_row(cfg: ModelConfig, dt, position: int, path=None) -> np.ndarray:
    if cfg.positional == "seq":
        return sequential_encoding(np.asarray(position), cfg.d_model).astype(dt)
    return encode_path(path, cfg.d_idx).astype(dt)


class BeamSearch:
    def __init__(
        self,
        cfg: ModelConfig,
        params: dict,
        joint: JointVocab,
        grammar=None,
        *,
        constrained: bool = True,
        beams: int = 5,
        max_len: int | None = None,
        kern=None,
    ):
        if beams < 1:
            raise ValidationError("need at least one beam")
        if constrained and grammar is None:
            raise ValidationError("constrained decoding needs a grammar")
        if cfg.positional == "tree" and grammar is None:
            raise ValidationError("tree positional mode needs a grammar for edge paths")
        if grammar is not None:
            joint.validate_against(grammar)
        self.cfg = cfg
        self.params = params
        self.joint = joint
        self.grammar = grammar
        self.constrained = constrained
        self.beams = beams
        self.max_len = max_len or cfg.max_len
        self.kern = kern or default_kernels
        self.dt = np.float32 if cfg.dtype == "float32" else np.float64
        self._symbol_ids_cache: dict[str, np.ndarray] = {}

    # -- masking ------------------------------------------------------------

    def _ids_for(self, symbol: str) -> np.ndarray:
        try:
            return self._symbol_ids_cache[symbol]
        except KeyError:
            ids = np.asarray(self.joint.symbol_ids(symbol), dtype=np.int64)
            self._symbol_ids_cache[symbol] = ids
            return ids

    def _legal_ids(self, hyp: Hypothesis) -> np.ndarray:
        if hyp.run_ids is not None:
            return self._ids_for("$string")
        parts = [self._ids_for(s) for s in sorted(hyp.state.legal_tokens())]
        if not parts:
            return np.asarray([], dtype=np.int64)
        return np.concatenate(parts)

    # -- expansion ----------------------------------------------------------

    def _extend(self, hyp: Hypothesis, vid: int, score: float) -> Hypothesis:
        cfg, joint = self.cfg, self.joint
        new = Hypothesis(
            ids=hyp.ids + [vid],
            tokens=list(hyp.tokens),
            rows=list(hyp.rows),
            state=hyp.state,
            logp=score,
            run_ids=None if hyp.run_ids is None else list(hyp.run_ids),
            run_row=hyp.run_row,
        )
        position = len(hyp.ids)

        def next_row():
            if cfg.positional == "seq":
                return _pos_row(cfg, self.dt, position)
            if new.state is None:
                return _zero_row(cfg, self.dt)
            return _pos_row(cfg, self.dt, position, new.state.next_edge_path(cfg.path_len))

        def step_token(token: AstToken):
            if new.state is None:
                return
            try:
                new.state = new.state.step(token)
            except IllegalTokenError:
                if self.constrained:
                    raise
                new.state = None  # derailed; keep generating open-loop

        if joint.is_subword_id(vid):
            if vid == joint.lit_end_id:
                run = new.run_ids if new.run_ids is not None else []
                row = new.run_row if new.run_row is not None else next_row()
                value = joint.subword.decode(run)
                token = lit_token("string", value)
                new.tokens.append(token)
                new.rows.append(row)
                new.run_ids = None
                new.run_row = None
                step_token(token)
            else:
                if new.run_ids is None:
                    new.run_ids = []
                    new.run_row = next_row()
                new.run_ids.append(vid - joint.offset)
                new.rows.append(new.run_row)
        else:
            token = joint.ast.decode(vid)
            if new.run_ids is not None:
                # a tree token inside an open string run is ill-formed;
                # only reachable without masking
                if self.constrained:
                    raise VerificationError("masked decoding entered an open-run conflict")
                new.run_ids = None
                new.run_row = None
                new.state = None
            new.rows.append(next_row())
            new.tokens.append(token)
            step_token(token)
        if new.state is not None and new.state.finished:
            new.finished = True
        elif new.state is None and vid == joint.eos_id:
            new.finished = True  # unconstrained stop condition
        return new

    # -- search -------------------------------------------------------------

    def decode(self, nl_ids: list[int]) -> list[Hypothesis]:
        cfg, joint = self.cfg, self.joint
        state = initial_state(self.grammar) if self.grammar is not None else None
        root = Hypothesis(
            ids=[joint.sos_id],
            tokens=[SOS],
            rows=[_pos_row(cfg, self.dt, 0, (0,) * cfg.path_len)],
            state=state.step(SOS) if state is not None else None,
            logp=0.0,
        )
        nl = np.asarray([nl_ids if nl_ids else [PAD]], dtype=np.int64)
        live = [root]
        done: list[Hypothesis] = []
        while live and len(live[0].ids) < self.max_len:
            # Filling the finished pool is not enough to stop: a live
            # hypothesis may still outrank everything in it.  Expand until
            # the best live mean falls to the k-th finished one.
            if len(done) >= self.beams:
                floor = sorted((h.norm_score for h in done), reverse=True)[self.beams - 1]
                if live[0].norm_score <= floor:
                    break
            B = len(live)
            ast = np.asarray([h.ids for h in live], dtype=np.int64)
            pos = np.stack([np.stack(h.rows) for h in live])
            logp, _ = _forward(
                cfg,
                self.params,
                self.kern,
                np.repeat(nl, B, axis=0),
                ast,
                None,
                PAD,
                joint.pad_id,
                pos_rows=pos,
            )
            last = logp[:, -1, :].astype(np.float64)
            scores = last + np.asarray([h.logp for h in live])[:, None]
            if self.constrained:
                masked = np.full_like(scores, NEG_INF)
                for i, h in enumerate(live):
                    legal = self._legal_ids(h)
                    masked[i, legal] = scores[i, legal]
                scores = masked
            else:
                scores[:, joint.pad_id] = NEG_INF
            flat = scores.ravel()
            width = min(self.beams, flat.size)
            top = np.argpartition(-flat, width - 1)[:width]
            top = top[np.argsort(-flat[top])]
            new_live: list[Hypothesis] = []
            for idx in top:
                score = flat[idx]
                if score == NEG_INF:
                    continue
                hyp_idx, vid = divmod(int(idx), scores.shape[1])
                if self.constrained and not np.isfinite(last[hyp_idx, vid]):
                    raise VerificationError("masked decoding chose a non-finite expansion")
                new = self._extend(live[hyp_idx], int(vid), float(score))
                if new.finished:
                    done.append(new)
                else:
                    new_live.append(new)
            live = new_live
        done.sort(key=lambda h: -h.norm_score)
        live.sort(key=lambda h: -h.norm_score)
        ranked = done + live
        if self.constrained:
            for h in done:
                tree = delinearize(h.tokens, self.grammar)
                ok, why = self.grammar.accepts(tree)
                if not ok:
                    raise VerificationError(f"masked decoding produced a rejected tree: {why}")
        if not ranked:
            raise VerificationError("beam search produced no hypotheses")
        return ranked


def hyp_is_parsable(hyp: Hypothesis, grammar) -> bool:
    """Finished and the token sequence rebuilds into an accepted tree."""
    if not hyp.finished or grammar is None:
        return False
    try:
        tree = delinearize(hyp.tokens, grammar)
    except ValidationError:
        return False
    return grammar.accepts(tree)[0]
