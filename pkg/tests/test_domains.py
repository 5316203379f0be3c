import json

import pytest

from rgnnt.domains import (DOMAIN_TEXT, UnsatisfiableAfterRetries, blocks_problem, gen_blocks, gen_gripper,
                           gen_navig_xy, gen_vacuum, gen_visitall, grid_distance, vacuum_problem, vacuum_reach_oracle,
                           vacuum_value, visitall_xy_problem)
from rgnnt.oracle import label
from rgnnt.pddl import Instance, load_directory

from conftest import LAYOUT_OPEN, LAYOUT_CORRIDOR, layout_instance


def test_open_grid_distance_is_manhattan():
    for inst in gen_navig_xy(4, 3, 0.0, seed=5, count=5).instances():
        at = {a.args for a in inst.initial.atoms if a.predicate == "at"}.pop()
        goal = inst.initial.goal[0].args
        manhattan = abs(int(at[0][1:]) - int(goal[0][1:])) + abs(int(at[1][1:]) - int(goal[1][1:]))
        assert label(inst).vstar[0] == manhattan


def test_reference_layouts_are_solvable():
    assert label(layout_instance(LAYOUT_OPEN, "l")).vstar[0] == 3
    assert label(layout_instance(LAYOUT_CORRIDOR, "r")).vstar[0] == 14


def test_one_cell_grid_gives_up():
    with pytest.raises(UnsatisfiableAfterRetries):
        gen_navig_xy(1, 1)


def test_generated_instances_are_solvable():
    for inst in gen_navig_xy(3, 3, 0.3, seed=2, count=10).instances():
        assert label(inst).vstar[0] < float("inf")
    assert grid_distance(2, 2, {(1, 2), (2, 1)}, (1, 1), (2, 2)) is None


def _path_vacuum(length, start):
    locs = [f"l{i}" for i in range(length)]
    edges = {(locs[i], locs[i + 1]) for i in range(length - 1)}
    return Instance.from_text(DOMAIN_TEXT["vacuum"], vacuum_problem(locs, {"r1": edges}, {"r1": start}, locs[-1]))


def test_vacuum_path_graph():
    inst = _path_vacuum(5, "l0")
    assert label(inst).vstar[0] == 4 + 1
    assert vacuum_value(inst.initial) == 5
    assert "l0" in vacuum_reach_oracle(inst.initial, "r1", 4)
    assert vacuum_reach_oracle(inst.initial, "r1", 0) == {"l4"}


def test_vacuum_oracle_matches_bfs_on_random_instances():
    for inst in gen_vacuum(6, 2, seed=3, count=4).instances():
        sp = label(inst)
        assert [vacuum_value(s) for s in sp.states] == sp.vstar


def test_vacuum_disconnected_robot():
    locs = ["a", "b", "c"]
    inst = Instance.from_text(DOMAIN_TEXT["vacuum"], vacuum_problem(
        locs, {"r1": set(), "r2": {("a", "b"), ("b", "c")}}, {"r1": "a", "r2": "a"}, "c"))
    assert all("a" not in vacuum_reach_oracle(inst.initial, "r1", k) for k in range(4))
    assert label(inst).vstar[0] == 3


def test_fixture_values():
    assert label(gen_gripper(1).instances()[0]).vstar[0] == 3
    stacked = Instance.from_text(DOMAIN_TEXT["blocks-s"], blocks_problem([["b1", "b2"]], [["b1", "b2"]]))
    assert label(stacked).vstar[0] == 0
    tour = Instance.from_text(DOMAIN_TEXT["visitall-xy"], visitall_xy_problem(2, 2, (1, 1)))
    assert label(tour).vstar[0] == 3


def test_blocks_generator_avoids_solved_starts():
    for variant in ("blocks-s", "blocks-m"):
        for inst in gen_blocks(variant, 3, seed=1, count=5).instances():
            assert label(inst).vstar[0] > 0


def test_visitall_variants():
    for variant in ("visitall", "visitall-xy"):
        for inst in gen_visitall(variant, 2, 3, targets=3, seed=0, count=2).instances():
            assert 0 < label(inst).vstar[0] < float("inf")


def test_write_and_reload(tmp_path):
    g = gen_navig_xy(4, 3, seed=7, count=3)
    out = g.write(tmp_path / "data")
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["generator"]["seed"] == 7 and len(manifest["problems"]) == 3
    loaded = load_directory(out)
    assert [i.initial for i in loaded] == [i.initial for i in g.instances()]
