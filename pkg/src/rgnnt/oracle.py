"""Exhaustive state-space expansion and optimal value labels."""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .relcore import Atom, RelationalState

INF = math.inf


class CapExceeded(RuntimeError):
    pass


class EmptySpace(ValueError):
    pass


@dataclass
class StateSpace:
    """Reachable states of an instance; index 0 is the initial state."""

    name: str
    states: list[RelationalState]
    edges: list[list[int]]
    goal: list[bool]
    vstar: list[float] | None = None

    def __len__(self):
        return len(self.states)

    def index(self) -> dict:
        return {s.atoms: i for i, s in enumerate(self.states)}


@dataclass(frozen=True)
class LabeledState:
    state: RelationalState
    vstar: float
    instance: str = ""


def expand(instance, cap: int = 200_000) -> StateSpace:
    """Breadth-first expansion of every state reachable from the initial one."""
    init = instance.initial
    states = [init]
    index = {init.atoms: 0}
    edges: list[list[int]] = []
    queue = deque([0])
    while queue:
        i = queue.popleft()
        succ = []
        for _, nxt in instance.successors(states[i]):
            j = index.get(nxt.atoms)
            if j is None:
                if len(states) >= cap:
                    raise CapExceeded(f"{instance.name}: more than {cap} states")
                j = index[nxt.atoms] = len(states)
                states.append(nxt)
                queue.append(j)
            succ.append(j)
        # BFS pops indices in order, so edges[i] is filled for i = 0, 1, ...
        edges.append(succ)
    goal = [s.is_goal() for s in states]
    return StateSpace(getattr(instance, "name", ""), states, edges, goal)


def optimal_values(space: StateSpace) -> list[float]:
    """Multi-source backward BFS from all goal states; unreachable -> inf."""
    preds: list[list[int]] = [[] for _ in space.states]
    for i, succ in enumerate(space.edges):
        for j in succ:
            preds[j].append(i)
    values = [INF] * len(space.states)
    queue = deque()
    for i, g in enumerate(space.goal):
        if g:
            values[i] = 0
            queue.append(i)
    while queue:
        j = queue.popleft()
        for i in preds[j]:
            if values[i] == INF:
                values[i] = values[j] + 1
                queue.append(i)
    space.vstar = values
    return values


def label(instance, cap: int = 200_000) -> StateSpace:
    space = expand(instance, cap)
    optimal_values(space)
    return space


def sample_training_set(
    spaces: Iterable[StateSpace],
    per_value_cap: int | None = None,
    seed: int = 0,
    include_dead_ends: bool = False,
    dead_end_value: float = 1000.0,
) -> list[LabeledState]:
    """Stratified sample over distinct V* values.

    States are grouped by V*, shuffled within each group under ``seed``, each
    group is truncated to ``per_value_cap`` and the result interleaves the
    groups round-robin in increasing value order.
    """
    strata: dict[float, list[LabeledState]] = {}
    nonempty = False
    for space in spaces:
        if space.vstar is None:
            optimal_values(space)
        for s, v in zip(space.states, space.vstar):
            nonempty = True
            if v == INF:
                if not include_dead_ends:
                    continue
                v = dead_end_value
            strata.setdefault(v, []).append(LabeledState(s, v, space.name))
    if not nonempty:
        raise EmptySpace("no states to sample from")
    rng = random.Random(seed)
    groups = []
    for v in sorted(strata):
        group = list(strata[v])
        rng.shuffle(group)
        if per_value_cap is not None:
            group = group[:per_value_cap]
        groups.append(group)
    return _round_robin(groups)


def _round_robin(groups: list[list]) -> list:
    out = []
    for i in range(max((len(g) for g in groups), default=0)):
        out.extend(g[i] for g in groups if i < len(g))
    return out


# ---------------------------------------------------------------- dataset I/O


def _atoms_json(atoms):
    return [[a.predicate, *a.args] for a in atoms]


def dump_record(item: LabeledState) -> str:
    v = item.vstar
    rec = {
        "instance": item.instance,
        "vstar": "inf" if v == INF else int(v),
        "objects": list(item.state.objects),
        "atoms": _atoms_json(item.state.atoms),
        "goal": _atoms_json(item.state.goal),
    }
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def load_record(line: str) -> LabeledState:
    rec = json.loads(line)
    v = INF if rec["vstar"] == "inf" else rec["vstar"]
    state = RelationalState(
        tuple(rec["objects"]),
        tuple(Atom(a[0], tuple(a[1:])) for a in rec["atoms"]),
        tuple(Atom(a[0], tuple(a[1:])) for a in rec["goal"]),
    )
    return LabeledState(state, v, rec["instance"])


def write_dataset(path, items: Iterable[LabeledState]) -> None:
    with open(path, "w", newline="\n") as fh:
        for item in items:
            fh.write(dump_record(item) + "\n")


def read_dataset(path) -> list[LabeledState]:
    with open(path) as fh:
        return [load_record(line) for line in fh if line.strip()]
