import random

import pytest

from rgnnt.joins import (And, Converse, Exists, Neg, Rel, UnknownRelation, brute_force_join, dist_k, evaluate_join,
                         key_opens_lock, min_dist, navig_phi, quantifier_depth, random_formula, suggest_parameters)
from rgnnt.oracle import label
from rgnnt.relcore import atom, make_state

from conftest import navig


def test_key_opens_lock():
    s = make_state(["k1", "l1", "l2", "round", "square"],
                   [atom("key", "k1", "round"), atom("lock", "l1", "round"), atom("lock", "l2", "square")])
    assert evaluate_join(key_opens_lock(), s) == {("k1", "l1")}


def test_atom_denotes_relation():
    s = make_state("abc", [atom("r", "a", "b"), atom("r", "c", "a")])
    assert evaluate_join(Rel("r"), s) == {("a", "b"), ("c", "a")}
    with pytest.raises(UnknownRelation):
        evaluate_join(Rel("nope"), s)


def test_negation_of_compound_rejected():
    with pytest.raises(TypeError):
        Neg(And(Rel("a"), Rel("b")))
    with pytest.raises(TypeError):
        Converse(Neg(Rel("a")))


def test_random_formulas_match_expansion():
    rng = random.Random(0)
    for _ in range(40):
        objs = [f"o{i}" for i in range(rng.randint(1, 5))]
        atoms = [atom(p, rng.choice(objs), rng.choice(objs)) for p in "pq" for _ in range(rng.randint(0, 6))]
        atoms += [atom("u", rng.choice(objs))]
        s = make_state(objs, atoms)
        f = random_formula(rng, ["p", "q", "u"], 3)
        assert evaluate_join(f, s, ["p", "q", "u"]) == brute_force_join(f, s, ["p", "q", "u"])


def test_dist0_is_goal_test():
    assert dist_k(navig(2, 2, robot=(1, 1), goal=(1, 1)).initial, 0)
    assert not dist_k(navig(2, 2, robot=(1, 1), goal=(2, 2)).initial, 0)


def test_corridor_distance():
    inst = navig(1, 3, robot=(1, 1), goal=(1, 3))
    assert min_dist(inst.initial) == 2 == label(inst).vstar[0]


def test_min_dist_equals_optimal_value_on_blocked_grid():
    inst = navig(3, 4, {(2, 2), (2, 3)}, robot=(1, 3), goal=(3, 2))
    sp = label(inst)
    assert [min_dist(s) for s in sp.states] == sp.vstar


def test_parameter_report():
    assert quantifier_depth(navig_phi(3)) == 3
    assert quantifier_depth(Exists(Rel("a"), Exists(Rel("b"), Rel("c")))) == 2
    assert suggest_parameters([navig_phi(3)])["t"] == 3
