"""Fit R-GNN[1] to one grid's optimal values, then plan greedily with it.

Takes a few minutes on one core.
Run: python3 demos/02_train_and_plan.py
"""

import numpy as np

from rgnnt.domains import gen_navig_xy
from rgnnt.oracle import label, sample_training_set
from rgnnt.policy import run_policy
from rgnnt.train import TrainConfig, train

inst = gen_navig_xy(3, 4, 0.2, seed=0).instances()[0]
space = label(inst)
items = sample_training_set([space])
print(f"{inst.name}: {len(items)} labeled states, values {sorted(set(space.vstar))}")

cfg = TrainConfig(kind="rgnn-t", t=1, embed_dim=16, layers=8, max_steps=5000, eval_every=50,
                  seeds=(0,), target_loss=0.2)
report, model = train(cfg, items, predicates=inst.domain.predicates)

for seed, step, loss, val in report.curve[::250]:
    print(f"step {step:5d}  batch loss {loss:8.3f}")
print(f"kept snapshot from step {report.best_step[0]} (loss {report.val_loss[0]:.3f})")

v = model.values(space.states)
print("V  :", np.round(v, 2))
print("V* :", space.vstar)

rec = run_policy(inst, model, vstar_initial=space.vstar[0])
print(f"greedy policy: {rec.termination} after {rec.steps} steps (optimal {space.vstar[0]})")
print(" ".join(str(a) for a in rec.plan))
