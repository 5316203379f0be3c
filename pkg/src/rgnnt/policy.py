"""Greedy execution of a value function and suite statistics."""

from __future__ import annotations

import csv
import random
import statistics
from dataclasses import dataclass, field

GOAL = "goal"
DEAD_END = "dead-end"
STEP_CAP = "step-cap"


@dataclass
class EvalRecord:
    instance: str
    solved: bool
    steps: int
    vstar_initial: float | None
    termination: str
    plan: list = field(default_factory=list, repr=False)


@dataclass
class SuiteSummary:
    solved: int
    total: int
    total_length: int
    median_length: float | None
    mean_length: float | None

    @property
    def coverage(self) -> float:
        # an empty suite reports 0/0 as coverage 0
        return self.solved / self.total if self.total else 0.0


def _values(value_fn, states) -> list[float]:
    if hasattr(value_fn, "values"):
        return [float(v) for v in value_fn.values(states)]
    return [float(value_fn(s)) for s in states]


def run_policy(instance, value_fn, step_cap: int = 1000, vstar_initial=None, tie_seed: int | None = None) -> EvalRecord:
    """Follow the unvisited successor of lowest value until goal, dead end or cap.

    ``value_fn`` is a :class:`~rgnnt.net.ValueModel` or any callable on states.
    Ties go to the smallest canonical state key, or to a random choice when
    ``tie_seed`` is given.
    """
    rng = random.Random(tie_seed) if tie_seed is not None else None
    state = instance.initial
    visited = {state.key()}
    plan = []
    while True:
        if state.is_goal():
            return EvalRecord(instance.name, True, len(plan), vstar_initial, GOAL, plan)
        if len(plan) >= step_cap:
            return EvalRecord(instance.name, False, len(plan), vstar_initial, STEP_CAP, plan)
        options = [(a, s) for a, s in instance.successors(state) if s.key() not in visited]
        if not options:
            return EvalRecord(instance.name, False, len(plan), vstar_initial, DEAD_END, plan)
        vals = _values(value_fn, [s for _, s in options])
        best = min(vals)
        tied = [(s.key(), a, s) for (a, s), v in zip(options, vals) if v == best]
        tied.sort(key=lambda x: x[0])
        _, action, state = rng.choice(tied) if rng else tied[0]
        visited.add(state.key())
        plan.append(str(action))


def summarize(records) -> SuiteSummary:
    lengths = [r.steps for r in records if r.solved]
    return SuiteSummary(
        len(lengths), len(records), sum(lengths),
        statistics.median(lengths) if lengths else None,
        statistics.fmean(lengths) if lengths else None,
    )


def evaluate_suite(instances, value_fn, step_cap: int = 1000, vstars=None,
                   tie_seed: int | None = None) -> tuple[SuiteSummary, list[EvalRecord]]:
    """Run the policy on every instance; ``vstars`` maps instance names to V*(init)."""
    vstars = vstars or {}
    records = [run_policy(inst, value_fn, step_cap, vstars.get(inst.name), tie_seed) for inst in instances]
    return summarize(records), records


def write_records(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["instance", "solved", "steps", "vstar_initial", "termination"])
        for r in records:
            vstar = "" if r.vstar_initial is None else r.vstar_initial
            w.writerow([r.instance, int(r.solved), r.steps, vstar, r.termination])


def oracle_value(space):
    """The optimal value function of an expanded state space, as a callable."""
    table = {s.key(): v for s, v in zip(space.states, space.vstar)}
    return lambda state: table[state.key()]
