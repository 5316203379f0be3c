import random

from rgnnt.relcore import OBJ, add_obj_atoms, atom, augment_goal, canonicalize, make_state


def test_goal_atoms_get_goal_copies():
    s = augment_goal(make_state("ab", [atom("at", "a")], [atom("at", "b")]))
    assert set(s.atoms) == {atom("at", "a"), atom("at_g", "b")}


def test_empty_goal_leaves_state_alone():
    s = make_state("ab", [atom("at", "a")])
    assert augment_goal(s).atoms == s.atoms


def test_goal_copies_count():
    s = make_state("abc", [atom("on", "c", "a")], [atom("on", "a", "b"), atom("on", "b", "c")])
    out = augment_goal(s)
    assert len(out.atoms) == len(s.atoms) + 2
    assert {atom("on_g", "a", "b"), atom("on_g", "b", "c")} <= set(out.atoms)


def test_obj_markers():
    s = add_obj_atoms(make_state("ab", []))
    assert set(s.atoms) == {atom(OBJ, "a"), atom(OBJ, "b")}
    assert add_obj_atoms(make_state((), [])).atoms == ()
    assert len(add_obj_atoms(make_state("abcde", [])).atoms) == 5


def test_canonical_order():
    s = make_state("x", [atom("B", "x"), atom("A", "x")])
    assert s.atoms == (atom("A", "x"), atom("B", "x"))
    assert canonicalize(s) == s


def test_shuffled_state_has_same_canonical_form():
    rng = random.Random(3)
    objs = [f"o{i}" for i in range(8)]
    atoms = [atom(f"p{rng.randrange(4)}", rng.choice(objs), rng.choice(objs)) for _ in range(50)]
    ref = make_state(objs, atoms)
    for _ in range(20):
        rng.shuffle(atoms)
        rng.shuffle(objs)
        assert make_state(objs, atoms).key() == ref.key()


def test_rename_is_a_bijection_on_atoms():
    s = make_state("ab", [atom("on", "a", "b")], [atom("on", "b", "a")])
    r = s.rename({"a": "q", "b": "p"})
    assert r.atoms == (atom("on", "q", "p"),) and r.goal == (atom("on", "p", "q"),)
