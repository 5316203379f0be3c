"""Optimal values on a small grid and what the pair transform does to a state.

Run: python3 demos/01_grid_values_and_pairs.py
"""

from rgnnt.domains import DOMAIN_TEXT, navig_problem
from rgnnt.joins import min_dist
from rgnnt.oracle import label
from rgnnt.pddl import Instance
from rgnnt.relcore import TRIANGLE
from rgnnt.transform import at_transform, prepare

# A 4x3 grid with two walls; the robot starts bottom-left, the goal is top-right.
inst = Instance.from_text(DOMAIN_TEXT["navig-xy"], navig_problem(4, 3, {(2, 2), (3, 2)}, (1, 1), (4, 3)))
space = label(inst)
print(f"{len(space)} reachable states, V*(init) = {space.vstar[0]}")

for s, v in zip(space.states, space.vstar):
    at = next(a for a in s.atoms if a.predicate == "at")
    print(f"  robot at {at.args}: V* = {v}")

# The distance formulas evaluated as joins agree with breadth-first search.
assert [min_dist(s) for s in space.states] == space.vstar

# Lifting to pairs: every atom p(w) becomes p(<w>^2); t >= 1 adds triangles.
s = prepare(inst.initial)
for t in (0, 1, 2):
    ts = at_transform(s, t)
    tris = sum(a.predicate == TRIANGLE for a in ts.atoms)
    print(f"t={t}: {len(ts.atoms)} atoms ({tris} triangles) over {len(ts.nodes)} pair nodes")
