import numpy as np
import pytest

from rgnnt.baselines import (ArityTooHigh, PairEmbeddingVocab, SizeCap, build_2gnn_input, build_rgnn2_input,
                             initial_pair_embeddings)
from rgnnt.domains import gen_vacuum
from rgnnt.relcore import TRIANGLE, atom, make_state


def test_pair_embedding_sums():
    s = make_state("ab", [atom("on", "a", "b")], [atom("on", "b", "a")])
    vocab = PairEmbeddingVocab.random({"on": 2}, 4, seed=0)
    table = initial_pair_embeddings(s, vocab)
    assert not table[("a", "a")].any()
    assert np.array_equal(table[("a", "b")], vocab.vectors["on"])
    assert np.array_equal(table[("b", "a")], vocab.vectors["on_g"])


def test_vacuum_is_unsuitable():
    s = gen_vacuum(4, 1).instances()[0].initial
    with pytest.raises(ArityTooHigh, match="ternary"):
        initial_pair_embeddings(s, PairEmbeddingVocab(4))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_2gnn_atom_count(n):
    nodes, atoms = build_2gnn_input([f"o{i}" for i in range(n)])
    assert len(nodes) == n * n and len(atoms) == 2 * n ** 3


def test_2gnn_single_object():
    _, atoms = build_2gnn_input(["a"])
    assert all(set(a.args) == {("a", "a")} for a in atoms)


def test_rgnn2_triangles():
    ts = build_rgnn2_input(make_state("ab", []))
    assert sum(a.predicate == TRIANGLE for a in ts.atoms) == 8
    assert build_rgnn2_input(make_state((), [])).atoms == ()
    with pytest.raises(SizeCap):
        build_2gnn_input(range(5), cap=4)
