"""Property tests for the invariants of the core components."""

import math
import random

import networkx as nx
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from rgnnt import autodiff as ad
from rgnnt.autodiff import Tensor
from rgnnt.joins import brute_force_join, evaluate_join, random_formula
from rgnnt.net import RgnnConfig, ValueModel
from rgnnt.oracle import label
from rgnnt.relcore import Atom, make_state
from rgnnt.train import make_batches
from rgnnt.transform import a0_transform, at_transform, compute_rt, delta_atoms, is_triangle_shaped, prepare
from rgnnt.wl import distinguishes

from conftest import navig

OBJECTS = st.lists(st.sampled_from("abcdef"), min_size=1, max_size=6, unique=True)


@st.composite
def states(draw, max_atoms=12):
    objs = draw(OBJECTS)
    arity = {"p": 1, "q": 2, "r": 3}
    atoms = draw(st.lists(st.sampled_from("pqr").flatmap(
        lambda p: st.tuples(st.just(p), st.lists(st.sampled_from(objs), min_size=arity[p], max_size=arity[p]))),
        max_size=max_atoms))
    goal = draw(st.lists(st.tuples(st.just("q"), st.lists(st.sampled_from(objs), min_size=2, max_size=2)),
                         max_size=2))
    return make_state(objs, [Atom(p, tuple(a)) for p, a in atoms], [Atom(p, tuple(a)) for p, a in goal])


@given(states(), st.randoms())
def test_canonical_form_ignores_order(s, rnd):
    atoms = list(s.atoms)
    rnd.shuffle(atoms)
    assert make_state(reversed(s.objects), atoms, s.goal).key() == s.key()


@given(states())
def test_lifting_shape(s):
    lifted = a0_transform(s)
    assert len(lifted) == len(s.atoms)
    assert all(len(b.args) == len(a.args) ** 2 for a, b in zip(s.atoms, lifted))
    rel = compute_rt(s, 1)
    tris = delta_atoms(rel)
    assert all(is_triangle_shaped(a) for a in tris)
    assert len(tris) == sum(1 for x in rel for y in rel if x[1] == y[0])


@settings(max_examples=25, deadline=None)
@given(states(max_atoms=8), st.permutations("abcdef"), st.sampled_from([("rgnn", None), ("rgnn-t", 0), ("rgnn-t", 1)]))
def test_value_is_bitwise_invariant_under_renaming(s, perm, model):
    kind, t = model
    vm = ValueModel(kind, {"p": 1, "q": 2, "r": 3}, RgnnConfig(6, 2), t=t, seed=1)
    renamed = s.rename(dict(zip("abcdef", perm)))
    assert vm.value(s) == vm.value(renamed)


@given(st.integers(1, 30), st.integers(1, 6), st.integers(0, 2**31), st.randoms())
def test_segment_reductions_ignore_row_order(rows, segments, seed, rnd):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((rows, 3)) * 5
    seg = rng.integers(0, segments, rows)
    perm = list(range(rows))
    rnd.shuffle(perm)
    for op in (ad.segment_smoothmax, ad.segment_sum):
        a = op(Tensor(x), seg, segments).data
        b = op(Tensor(x[perm]), seg[perm], segments).data
        assert np.array_equal(a, b)
    top = np.array([x[seg == i].max(axis=0) if (seg == i).any() else np.zeros(3) for i in range(segments)])
    sm = ad.segment_smoothmax(Tensor(x), seg, segments).data
    assert np.all(sm >= top - 1e-12)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=60), st.integers(1, 16), st.integers(0, 100))
def test_batches_cover_every_item_once(labels, size, seed):
    batches = make_batches(labels, size, seed)
    flat = [i for b in batches for i in b]
    assert sorted(flat) == list(range(len(labels)))
    assert all(len(b) <= size for b in batches)
    first = batches[0]
    assert len({labels[i] for i in first}) == min(len(set(labels)), len(first))


@settings(max_examples=60, deadline=None)
@given(states(max_atoms=10), st.integers(0, 10**6))
def test_join_matches_quantifier_expansion(s, seed):
    f = random_formula(random.Random(seed), ["p", "q", "r"], 3)
    assert evaluate_join(f, s, ["p", "q", "r"]) == brute_force_join(f, s, ["p", "q", "r"])


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10**6))
def test_refinement_ignores_vertex_names(n, seed):
    g = nx.gnp_random_graph(n, 0.4, seed=seed)
    perm = list(range(n))
    random.Random(seed).shuffle(perm)
    h = nx.relabel_nodes(g, dict(zip(range(n), perm)))
    for algo in ("wl1", "fwl2", "owl2"):
        assert not distinguishes(g, h, algo)[0]


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.sets(st.tuples(st.integers(1, 4), st.integers(1, 4)), max_size=4))
def test_optimal_values_satisfy_bellman(n, m, blocked):
    cells = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]
    blocked = {c for c in blocked if c in cells and c not in ((1, 1), (n, m))}
    sp = label(navig(n, m, blocked, (1, 1), (n, m)))
    for v, succ, g in zip(sp.vstar, sp.edges, sp.goal):
        assert (v == 0) == g
        if 0 < v < math.inf:
            assert min(sp.vstar[j] for j in succ) == v - 1
