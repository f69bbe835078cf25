"""The bundled corpus generator."""

from treeseq.grammar import induce
from treeseq.paths import tree_depth
from treeseq.toy import gen_corpus, gen_sample
from treeseq.tree import delinearize, linearize
import random


def test_seeded_determinism():
    assert gen_corpus(30, seed=42) == gen_corpus(30, seed=42)


def test_different_seeds_differ():
    assert gen_corpus(30, seed=1) != gen_corpus(30, seed=2)


def test_depth_bound():
    corpus = gen_corpus(500, seed=13)
    assert max(tree_depth(s.tree) for s in corpus) <= 8


def test_every_sample_round_trips():
    corpus = gen_corpus(200, seed=17)
    grammar = induce(s.tree for s in corpus)
    for s in corpus:
        assert delinearize(linearize(s.tree), grammar) == s.tree


def test_nl_is_nonempty_text():
    for s in gen_corpus(100, seed=23):
        assert s.nl.strip()
        assert s.nl == s.nl.lower()


def test_single_sample_generator():
    rng = random.Random(7)
    a = gen_sample(rng)
    b = gen_sample(rng)
    assert a.tree.root.node_type == "sos"
    assert a != b  # the stream advances
