from rgnnt.oracle import label
from rgnnt.policy import evaluate_suite, oracle_value, run_policy, summarize, write_records

from conftest import LAYOUT_OPEN, LAYOUT_CORRIDOR, layout_instance, navig


def test_goal_at_start():
    rec = run_policy(navig(2, 2, robot=(1, 1), goal=(1, 1)), lambda s: 0.0)
    assert rec.solved and rec.steps == 0 and rec.termination == "goal"


def test_optimal_value_gives_optimal_plans():
    instances = [navig(3, 4, {(2, 2)}, robot=(1, 1), goal=(3, 4)), layout_instance(LAYOUT_OPEN, "left"),
                 layout_instance(LAYOUT_CORRIDOR, "right")]
    for inst in instances:
        sp = label(inst)
        rec = run_policy(inst, oracle_value(sp), vstar_initial=sp.vstar[0])
        assert rec.solved and rec.steps == sp.vstar[0]


def test_constant_value_walks_a_corridor():
    rec = run_policy(navig(1, 6, robot=(1, 1), goal=(1, 6)), lambda s: 0.0)
    assert rec.solved and rec.steps == 5


def test_dead_end_and_cap():
    # goal walled off: the walk exhausts the reachable cells
    inst = navig(3, 3, {(2, 3), (3, 2)}, robot=(1, 1), goal=(3, 3))
    rec = run_policy(inst, lambda s: 0.0)
    assert not rec.solved and rec.termination == "dead-end" and rec.steps <= 6
    rec = run_policy(navig(1, 6, robot=(1, 1), goal=(1, 6)), lambda s: 0.0, step_cap=2)
    assert not rec.solved and rec.steps == 2


def test_suite_summary(tmp_path):
    insts = [navig(2, 2, name="a"), navig(1, 3, robot=(1, 1), goal=(1, 3), name="b")]
    spaces = {i.name: label(i) for i in insts}
    table = {}
    for sp in spaces.values():
        table.update({s.key(): v for s, v in zip(sp.states, sp.vstar)})
    summary, records = evaluate_suite(insts, lambda s: table[s.key()], vstars={k: v.vstar[0] for k, v in spaces.items()})
    assert summary.coverage == 1.0 and summary.total_length == 4
    assert [r.steps for r in records] == [r.vstar_initial for r in records]
    write_records(tmp_path / "e.csv", records)
    assert (tmp_path / "e.csv").read_text().count("\n") == 3
    empty = summarize([])
    assert (empty.solved, empty.total, empty.coverage) == (0, 0, 0.0)
