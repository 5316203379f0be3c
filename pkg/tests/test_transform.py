import itertools

from rgnnt.relcore import TRIANGLE, atom, make_state
from rgnnt.transform import (a0_transform, at_transform, compute_rt, delta_atoms, is_triangle_shaped,
                             prepare, square_tuple)

from conftest import navig


def test_square_tuple():
    assert square_tuple(("a", "b")) == (("a", "a"), ("a", "b"), ("b", "a"), ("b", "b"))
    assert square_tuple(("a",)) == (("a", "a"),)
    sq = square_tuple(("r", "x", "y"))
    assert len(sq) == 9 and sq[2] == ("r", "y")


def test_a0_lifting():
    s = make_state(["x1", "y2"], [atom("at", "x1", "y2")])
    assert a0_transform(s) == (atom("at", ("x1", "x1"), ("x1", "y2"), ("y2", "x1"), ("y2", "y2")),)
    assert a0_transform(make_state((), [])) == ()
    (lifted,) = a0_transform(make_state(["r", "a", "b"], [atom("adjacent", "r", "a", "b")]))
    assert len(lifted.args) == 9


def _brute_rt(state, t):
    objs = state.objects
    r = {(a, b) for at in state.atoms for a in at.args for b in at.args}
    for _ in range(t - 1):
        r = {(a, c) for a in objs for c in objs if any((a, b) in r and (b, c) in r for b in objs)}
    return r


def test_rt_against_definition():
    s = make_state("abc", [atom("P", "a", "b"), atom("P", "b", "c")])
    assert {("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")} <= compute_rt(s, 1)
    assert ("a", "c") not in compute_rt(s, 1)
    assert ("a", "c") in compute_rt(s, 2)
    for t in (1, 2, 3):
        assert compute_rt(s, t) == _brute_rt(s, t)
    assert compute_rt(make_state("ab", []), 1) == set()


def test_delta_atoms():
    assert atom(TRIANGLE, ("a", "b"), ("b", "c"), ("a", "c")) in delta_atoms({("a", "b"), ("b", "c")})
    assert delta_atoms(set()) == ()
    assert delta_atoms({("a", "a")}) == (atom(TRIANGLE, ("a", "a"), ("a", "a"), ("a", "a")),)


def test_composable_pair_count_matches_brute_force():
    s = prepare(navig(3, 2).initial)
    rel = compute_rt(s, 1)
    brute = sum(1 for p, q in itertools.product(rel, rel) if p[1] == q[0])
    tris = delta_atoms(rel)
    assert len(tris) == brute
    assert all(is_triangle_shaped(a) for a in tris)


def test_t0_is_lifting_only():
    s = prepare(navig(2, 2).initial)
    assert at_transform(s, 0).atoms == tuple(sorted(a0_transform(s)))


def test_navig_triangles_connect_neighbours():
    s = prepare(navig(3, 3).initial)
    atoms = set(at_transform(s, 1).atoms)
    # x1 -> y1 -> y2 chain through cell(x1,y1) and succ-y(y1,y2)
    assert atom(TRIANGLE, ("x1", "y1"), ("y1", "y2"), ("x1", "y2")) in atoms


def test_t2_adds_longer_compositions():
    s = make_state("abc", [atom("P", "a", "b"), atom("P", "b", "c")])
    t1, t2 = set(at_transform(s, 1).atoms), set(at_transform(s, 2).atoms)
    extra = t2 - t1
    assert extra and all(a.predicate == TRIANGLE for a in extra)
    assert atom(TRIANGLE, ("a", "c"), ("c", "c"), ("a", "c")) in extra
