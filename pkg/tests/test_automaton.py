"""Pushdown automaton: legality, stepping, replay, incremental paths."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeseq.automaton import DecoderState, initial_state, replay
from treeseq.errors import IllegalTokenError, ValidationError
from treeseq.grammar import induce
from treeseq.paths import edge_paths
from treeseq.tokens import SOS, node_token
from treeseq.toy import gen_corpus
from treeseq.tree import linearize


def test_fresh_state_wants_sos(assign_grammar):
    st0 = initial_state(assign_grammar)
    assert st0.legal_tokens() == frozenset({"sos"})
    assert not st0.finished


def test_legal_set_matches_step_success(toy100, toy_grammar):
    # at every prefix of every training sequence, a symbol is legal
    # exactly when step() succeeds on it
    symbols = sorted(toy_grammar.object_types | {"le", "sos", "eos"})
    for sample in toy100[:25]:
        state = initial_state(toy_grammar)
        for token in linearize(sample.tree):
            legal = state.legal_tokens()
            for sym in symbols:
                probe = _probe_token(sym)
                stepped_ok = True
                try:
                    state.step(probe)
                except IllegalTokenError:
                    stepped_ok = False
                assert stepped_ok == (sym in legal), (sym, legal)
            state = state.step(token)
        assert state.finished


def _probe_token(symbol):
    from treeseq.tokens import EOS, LE, lit_token

    if symbol == "sos":
        return SOS
    if symbol == "eos":
        return EOS
    if symbol == "le":
        return LE
    if symbol.startswith("$"):
        return lit_token(symbol[1:], "probe")
    return node_token(symbol)


def test_step_is_pure(assign_grammar):
    st0 = initial_state(assign_grammar)
    st1 = st0.step(SOS)
    assert st0.legal_tokens() == frozenset({"sos"})
    assert st1 is not st0


def test_states_hashable_and_comparable(assign_grammar, assign_tree):
    a = replay(assign_grammar, linearize(assign_tree)[:4])
    b = replay(assign_grammar, linearize(assign_tree)[:4])
    assert a == b
    assert hash(a) == hash(b)
    assert len({a, b}) == 1


def test_finished_state_rejects_everything(assign_grammar, assign_tree):
    final = replay(assign_grammar, linearize(assign_tree))
    assert final.finished
    assert final.legal_tokens() == frozenset()
    with pytest.raises(IllegalTokenError):
        final.step(SOS)


def test_illegal_token_reports_alternatives(assign_grammar):
    state = initial_state(assign_grammar).step(SOS)
    try:
        state.step(node_token("Name"))
        raise AssertionError("should have been rejected")
    except IllegalTokenError as exc:
        assert "Module" in exc.legal


def test_incremental_paths_match_batch(toy100, toy_grammar):
    for sample in toy100[:40]:
        tokens = linearize(sample.tree)
        expected = edge_paths(sample.tree, 8)
        state = initial_state(toy_grammar)
        for tok, want in zip(tokens, expected):
            assert state.next_edge_path(8) == tuple(want), tok.text()
            state = state.step(tok)


def test_path_depth_overflow(assign_grammar, assign_tree):
    state = initial_state(assign_grammar)
    tokens = linearize(assign_tree)
    state = state.step(tokens[0]).step(tokens[1])
    with pytest.raises(ValidationError):
        state.next_edge_path(1)


def test_replay_full_sequence(toy100, toy_grammar):
    for sample in toy100:
        assert replay(toy_grammar, linearize(sample.tree)).finished


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=30))
def test_prefix_never_finishes(seed, cut):
    corpus = gen_corpus(2, seed=seed)
    grammar = induce(s.tree for s in corpus)
    tokens = linearize(corpus[0].tree)
    cut = min(cut, len(tokens) - 1)
    state = replay(grammar, tokens[:cut])
    assert not state.finished
    assert state.legal_tokens(), "unfinished state must offer a continuation"
