"""Instance generators for the desk-scale domains, and analytic oracles.

Every generator emits PDDL text; instances are always loaded back through
the parser.  Encodings:

navig-xy     coordinates as objects: ``succ-x``, ``succ-y``, ``at(x,y)``,
             ``blocked(x,y)`` and ``cell(x,y)``.  ``cell`` holds for the free
             cells, which is what the (positive) move preconditions test.
visitall-xy  the same coordinates without obstacles, plus ``visited(x,y)``.
visitall     one object per cell: ``at-robot``, ``visited``, ``connected``.
gripper      the IPC STRIPS encoding (rooms, two grippers, balls).
blocks-s/m   three-operator blocks world (``on``, ``ontable``, ``clear``);
             no hand, so no propositional atoms.
vacuum       robots with private maps ``adjacent(r,x,y)``, one dirty cell.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .pddl import Instance, parse_domain, parse_problem
from .relcore import RelationalState

DOMAIN_NAMES = ("navig-xy", "visitall-xy", "visitall", "gripper", "blocks-s", "blocks-m", "vacuum")


class UnsatisfiableAfterRetries(RuntimeError):
    pass


@dataclass
class GeneratorSpec:
    domain: str
    params: dict
    seed: int


@dataclass
class Generated:
    """A domain file and its generated problems."""

    spec: GeneratorSpec
    domain_text: str
    problems: list[tuple[str, str]] = field(default_factory=list)

    def instances(self) -> list[Instance]:
        domain = parse_domain(self.domain_text)
        return [Instance.from_problem(domain, parse_problem(text, domain), name) for name, text in self.problems]

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "domain.pddl").write_text(self.domain_text)
        files = {}
        for i, (name, text) in enumerate(self.problems, 1):
            files[f"p{i:02d}.pddl"] = name
            (out / f"p{i:02d}.pddl").write_text(text)
        manifest = {"generator": asdict(self.spec), "problems": files}
        (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
        return out


def _atoms(atoms) -> str:
    return "\n    ".join(f"({' '.join(a)})" for a in atoms)


def _problem(name, domain, objects, init, goal) -> str:
    return (
        f"(define (problem {name})\n  (:domain {domain})\n"
        f"  (:objects {' '.join(objects)})\n"
        f"  (:init\n    {_atoms(init)})\n"
        f"  (:goal (and\n    {_atoms(goal)})))\n"
    )


def _grid_moves(extra_pre="", extra_add="") -> str:
    moves = []
    for name, rel, var in (("right", "succ-x ?x ?n", "x"), ("left", "succ-x ?n ?x", "x"),
                           ("up", "succ-y ?y ?n", "y"), ("down", "succ-y ?n ?y", "y")):
        new = "?n ?y" if var == "x" else "?x ?n"
        moves.append(
            f"  (:action move-{name}\n"
            f"   :parameters (?x ?y ?n)\n"
            f"   :precondition (and (at ?x ?y) ({rel}) (cell {new}){extra_pre})\n"
            f"   :effect (and (at {new}) (not (at ?x ?y)){extra_add.replace('NEW', new)}))\n"
        )
    return "".join(moves)


NAVIG_XY_DOMAIN = (
    "(define (domain navig-xy)\n  (:requirements :strips)\n"
    "  (:predicates (succ-x ?a ?b) (succ-y ?a ?b) (at ?x ?y) (blocked ?x ?y) (cell ?x ?y))\n"
    + _grid_moves() + ")\n"
)

VISITALL_XY_DOMAIN = (
    "(define (domain visitall-xy)\n  (:requirements :strips)\n"
    "  (:predicates (succ-x ?a ?b) (succ-y ?a ?b) (at ?x ?y) (visited ?x ?y) (cell ?x ?y))\n"
    + _grid_moves(extra_add=" (visited NEW)") + ")\n"
)

VISITALL_DOMAIN = """(define (domain visitall)
  (:requirements :strips)
  (:predicates (at-robot ?c) (visited ?c) (connected ?a ?b))
  (:action move
   :parameters (?from ?to)
   :precondition (and (at-robot ?from) (connected ?from ?to))
   :effect (and (at-robot ?to) (visited ?to) (not (at-robot ?from)))))
"""

GRIPPER_DOMAIN = """(define (domain gripper)
  (:requirements :strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g) (at-robby ?r) (at ?b ?r) (free ?g) (carry ?b ?g))
  (:action move
   :parameters (?from ?to)
   :precondition (and (room ?from) (room ?to) (at-robby ?from))
   :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
   :parameters (?obj ?room ?g)
   :precondition (and (ball ?obj) (room ?room) (gripper ?g) (at ?obj ?room) (at-robby ?room) (free ?g))
   :effect (and (carry ?obj ?g) (not (at ?obj ?room)) (not (free ?g))))
  (:action drop
   :parameters (?obj ?room ?g)
   :precondition (and (ball ?obj) (room ?room) (gripper ?g) (carry ?obj ?g) (at-robby ?room))
   :effect (and (at ?obj ?room) (free ?g) (not (carry ?obj ?g)))))
"""

BLOCKS_DOMAIN = """(define (domain blocks)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x))
  (:action move-b-to-b
   :parameters (?b ?from ?to)
   :precondition (and (clear ?b) (clear ?to) (on ?b ?from))
   :effect (and (on ?b ?to) (clear ?from) (not (on ?b ?from)) (not (clear ?to))))
  (:action move-b-to-t
   :parameters (?b ?from)
   :precondition (and (clear ?b) (on ?b ?from))
   :effect (and (ontable ?b) (clear ?from) (not (on ?b ?from))))
  (:action move-t-to-b
   :parameters (?b ?to)
   :precondition (and (clear ?b) (clear ?to) (ontable ?b))
   :effect (and (on ?b ?to) (not (ontable ?b)) (not (clear ?to)))))
"""

VACUUM_DOMAIN = """(define (domain vacuum)
  (:requirements :strips)
  (:predicates (adjacent ?r ?x ?y) (at ?r ?x) (dirty ?x) (clean ?x))
  (:action move
   :parameters (?r ?x ?y)
   :precondition (and (at ?r ?x) (adjacent ?r ?x ?y))
   :effect (and (at ?r ?y) (not (at ?r ?x))))
  (:action suck
   :parameters (?r ?x)
   :precondition (and (at ?r ?x) (dirty ?x))
   :effect (and (clean ?x) (not (dirty ?x)))))
"""

DOMAIN_TEXT = {
    "navig-xy": NAVIG_XY_DOMAIN,
    "visitall-xy": VISITALL_XY_DOMAIN,
    "visitall": VISITALL_DOMAIN,
    "gripper": GRIPPER_DOMAIN,
    "blocks-s": BLOCKS_DOMAIN,
    "blocks-m": BLOCKS_DOMAIN,
    "vacuum": VACUUM_DOMAIN,
}


# ---------------------------------------------------------------- grids


def grid_distance(n, m, blocked, start, goal) -> int | None:
    """BFS distance between cells of an ``n x m`` grid (1-based), None if unreachable."""
    blocked = set(blocked)
    if start in blocked or goal in blocked:
        return None
    dist = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        if c == goal:
            return dist[c]
        i, j = c
        for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if 1 <= nb[0] <= n and 1 <= nb[1] <= m and nb not in blocked and nb not in dist:
                dist[nb] = dist[c] + 1
                queue.append(nb)
    return None


def _coords(n, m):
    xs = [f"x{i}" for i in range(1, n + 1)]
    ys = [f"y{j}" for j in range(1, m + 1)]
    succ = [("succ-x", xs[i], xs[i + 1]) for i in range(n - 1)]
    succ += [("succ-y", ys[j], ys[j + 1]) for j in range(m - 1)]
    return xs, ys, succ


def navig_problem(n, m, blocked, robot, goal, name="navig") -> str:
    """Problem text for an explicit Navig-xy layout (1-based cells)."""
    blocked = set(blocked)
    xs, ys, init = _coords(n, m)
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            init.append(("blocked" if (i, j) in blocked else "cell", f"x{i}", f"y{j}"))
    init.append(("at", f"x{robot[0]}", f"y{robot[1]}"))
    return _problem(name, "navig-xy", xs + ys, init, [("at", f"x{goal[0]}", f"y{goal[1]}")])


def gen_navig_xy(n, m, obstacle_density=0.2, seed=0, count=1, retries=100) -> Generated:
    """Random solvable Navig-xy instances with distinct robot and goal cells."""
    rng = random.Random(seed)
    spec = GeneratorSpec("navig-xy", {"n": n, "m": m, "obstacle_density": obstacle_density, "count": count}, seed)
    out = Generated(spec, NAVIG_XY_DOMAIN)
    cells = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]
    for k in range(count):
        for _ in range(retries):
            blocked = {c for c in cells if rng.random() < obstacle_density}
            free = [c for c in cells if c not in blocked]
            if len(free) < 2:
                continue
            robot, goal = rng.sample(free, 2)
            if grid_distance(n, m, blocked, robot, goal) is not None:
                break
        else:
            raise UnsatisfiableAfterRetries(f"no solvable {n}x{m} navig-xy instance in {retries} tries")
        name = f"navig-{n}x{m}-s{seed}-{k:02d}"
        out.problems.append((name, navig_problem(n, m, blocked, robot, goal, name)))
    return out


def visitall_xy_problem(n, m, robot, targets=None, name="visitall-xy") -> str:
    xs, ys, init = _coords(n, m)
    init += [("cell", f"x{i}", f"y{j}") for i in range(1, n + 1) for j in range(1, m + 1)]
    init += [("at", f"x{robot[0]}", f"y{robot[1]}"), ("visited", f"x{robot[0]}", f"y{robot[1]}")]
    if targets is None:
        targets = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]
    goal = [("visited", f"x{i}", f"y{j}") for i, j in targets]
    return _problem(name, "visitall-xy", xs + ys, init, goal)


def visitall_problem(n, m, robot, targets=None, name="visitall") -> str:
    cells = {(i, j): f"c{i}-{j}" for i in range(1, n + 1) for j in range(1, m + 1)}
    init = []
    for (i, j), c in cells.items():
        for nb in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
            if nb in cells:
                init.append(("connected", c, cells[nb]))
    init += [("at-robot", cells[robot]), ("visited", cells[robot])]
    if targets is None:
        targets = list(cells)
    return _problem(name, "visitall", list(cells.values()), init, [("visited", cells[c]) for c in targets])


def gen_visitall(variant, n, m, targets=None, seed=0, count=1) -> Generated:
    """Visitall instances; ``targets`` cells (default all) must be visited."""
    if variant not in ("visitall", "visitall-xy"):
        raise ValueError(f"unknown visitall variant {variant!r}")
    rng = random.Random(seed)
    spec = GeneratorSpec(variant, {"n": n, "m": m, "targets": targets, "count": count}, seed)
    out = Generated(spec, DOMAIN_TEXT[variant])
    cells = [(i, j) for i in range(1, n + 1) for j in range(1, m + 1)]
    make = visitall_xy_problem if variant == "visitall-xy" else visitall_problem
    for k in range(count):
        robot = rng.choice(cells)
        goal_cells = None if targets is None else sorted(rng.sample(cells, min(targets, len(cells))))
        name = f"{variant}-{n}x{m}-s{seed}-{k:02d}"
        out.problems.append((name, make(n, m, robot, goal_cells, name)))
    return out


# ---------------------------------------------------------------- gripper / blocks


def gripper_problem(balls, name="gripper") -> str:
    bs = [f"ball{i}" for i in range(1, balls + 1)]
    init = [("room", "rooma"), ("room", "roomb"), ("gripper", "left"), ("gripper", "right"),
            ("at-robby", "rooma"), ("free", "left"), ("free", "right")]
    init += [x for b in bs for x in (("ball", b), ("at", b, "rooma"))]
    return _problem(name, "gripper", ["rooma", "roomb", "left", "right"] + bs, init, [("at", b, "roomb") for b in bs])


def gen_gripper(balls, seed=0, count=1) -> Generated:
    spec = GeneratorSpec("gripper", {"balls": balls, "count": count}, seed)
    out = Generated(spec, GRIPPER_DOMAIN)
    for k in range(count):
        name = f"gripper-{balls}-s{seed}-{k:02d}"
        out.problems.append((name, gripper_problem(balls, name)))
    return out


def _tower_atoms(towers):
    atoms = []
    for tower in towers:
        if not tower:
            continue
        atoms.append(("ontable", tower[0]))
        atoms += [("on", top, below) for below, top in zip(tower, tower[1:])]
        atoms.append(("clear", tower[-1]))
    return atoms


def _blocks_goal(goal_towers):
    goal = [a for a in _tower_atoms(goal_towers) if a[0] == "on" or (a[0] == "ontable" and len(goal_towers) > 1)]
    return goal or _tower_atoms(goal_towers)


def blocks_problem(init_towers, goal_towers, name="blocks") -> str:
    """Towers are lists of blocks from bottom to top."""
    blocks = sorted(b for t in init_towers for b in t)
    return _problem(name, "blocks", blocks, _tower_atoms(init_towers), _blocks_goal(goal_towers))


def _random_towers(rng, blocks):
    blocks = list(blocks)
    rng.shuffle(blocks)
    towers = []
    for b in blocks:
        if towers and rng.random() < 0.6:
            rng.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def gen_blocks(variant, blocks, seed=0, count=1) -> Generated:
    """``blocks-s`` builds one tower of all blocks; ``blocks-m`` random towers."""
    if variant not in ("blocks-s", "blocks-m"):
        raise ValueError(f"unknown blocks variant {variant!r}")
    rng = random.Random(seed)
    spec = GeneratorSpec(variant, {"blocks": blocks, "count": count}, seed)
    out = Generated(spec, BLOCKS_DOMAIN)
    names = [f"b{i}" for i in range(1, blocks + 1)]
    for k in range(count):
        while True:
            init = _random_towers(rng, names)
            if variant == "blocks-s":
                order = list(names)
                rng.shuffle(order)
                goal = [order]
            else:
                goal = _random_towers(rng, names)
            # redraw configurations that already satisfy the goal
            if blocks < 2 or not set(_blocks_goal(goal)) <= set(_tower_atoms(init)):
                break
        name = f"{variant}-{blocks}-s{seed}-{k:02d}"
        out.problems.append((name, blocks_problem(init, goal, name)))
    return out


# ---------------------------------------------------------------- vacuum


def vacuum_problem(locations, maps, starts, dirty, name="vacuum") -> str:
    """``maps[r]`` is a set of undirected edges; ``starts[r]`` the robot's cell."""
    robots = sorted(maps)
    init = []
    for r in robots:
        for x, y in sorted(maps[r]):
            init += [("adjacent", r, x, y), ("adjacent", r, y, x)]
        init.append(("at", r, starts[r]))
    init.append(("dirty", dirty))
    return _problem(name, "vacuum", list(locations) + robots, init, [("clean", dirty)])


def _reach(edges, start):
    adj: dict = {}
    for x, y in edges:
        adj.setdefault(x, set()).add(y)
        adj.setdefault(y, set()).add(x)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        c = queue.popleft()
        for nb in sorted(adj.get(c, ())):
            if nb not in dist:
                dist[nb] = dist[c] + 1
                queue.append(nb)
    return dist


def gen_vacuum(locations, robots, seed=0, count=1, edge_prob=0.6, retries=100) -> Generated:
    """Locations on a near-square grid, dirt in the middle, one random map per robot."""
    rng = random.Random(seed)
    spec = GeneratorSpec("vacuum", {"locations": locations, "robots": robots, "count": count,
                                    "edge_prob": edge_prob}, seed)
    out = Generated(spec, VACUUM_DOMAIN)
    width = max(1, round(locations ** 0.5))
    pos = {f"l{i}": (i % width, i // width) for i in range(locations)}
    names = list(pos)
    grid_edges = [(a, b) for a in names for b in names
                  if a < b and abs(pos[a][0] - pos[b][0]) + abs(pos[a][1] - pos[b][1]) == 1]
    dirty = names[locations // 2]
    for k in range(count):
        for _ in range(retries):
            maps = {f"r{i}": {e for e in grid_edges if rng.random() < edge_prob} for i in range(1, robots + 1)}
            starts = {r: rng.choice(names) for r in maps}
            if any(dirty in _reach(maps[r], starts[r]) for r in maps):
                break
        else:
            raise UnsatisfiableAfterRetries("no vacuum instance with a robot reaching the dirt")
        name = f"vacuum-{locations}-{robots}-s{seed}-{k:02d}"
        out.problems.append((name, vacuum_problem(names, maps, starts, dirty, name)))
    return out


def vacuum_reach_oracle(state: RelationalState, robot: str, k: int) -> frozenset:
    """Locations ``x`` with ``P_k(robot, x)``: a length-``k`` walk of ``robot`` from ``x`` to dirt.

    ``P_0(r,x) = dirty(x)``; ``P_k(r,x) = exists y adjacent(r,x,y) and P_{k-1}(r,y)``.
    """
    level = {a.args[0] for a in state.atoms if a.predicate == "dirty"}
    moves = [a.args[1:] for a in state.atoms if a.predicate == "adjacent" and a.args[0] == robot]
    for _ in range(k):
        level = {x for x, y in moves if y in level}
    return frozenset(level)


def vacuum_value(state: RelationalState, max_k: int | None = None) -> float:
    """``min over robots of (min k with P_k(r, at(r))) + 1``; inf if no robot reaches dirt."""
    if state.is_goal():
        return 0
    locations = {a.args[1] for a in state.atoms if a.predicate == "adjacent"}
    max_k = len(locations) if max_k is None else max_k
    best = float("inf")
    for a in state.atoms:
        if a.predicate != "at":
            continue
        r, x = a.args
        for k in range(max_k + 1):
            if x in vacuum_reach_oracle(state, r, k):
                best = min(best, k + 1)
                break
    return best


GENERATORS = {
    "navig-xy": gen_navig_xy,
    "visitall": lambda *a, **kw: gen_visitall("visitall", *a, **kw),
    "visitall-xy": lambda *a, **kw: gen_visitall("visitall-xy", *a, **kw),
    "gripper": gen_gripper,
    "blocks-s": lambda *a, **kw: gen_blocks("blocks-s", *a, **kw),
    "blocks-m": lambda *a, **kw: gen_blocks("blocks-m", *a, **kw),
    "vacuum": gen_vacuum,
}
