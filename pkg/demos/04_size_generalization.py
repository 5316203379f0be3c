"""Train on small grids, test on larger ones: R-GNN vs R-GNN[0] vs R-GNN[1].

The full run (30 training grids with area <= 12, 20 test grids with area
13..20, 3000 steps per model, one seed) takes about ten minutes on one core; pass
--quick for a 300-step smoke run.

Run: python3 demos/04_size_generalization.py [--quick]
"""

import sys

from rgnnt.bench import navig_suite, run_generalization

quick = "--quick" in sys.argv
train_set = navig_suite(30, 0, 12, seed=1)
val_set = navig_suite(6, 0, 12, seed=2)
test_set = navig_suite(20, 12, 20, seed=3)

results = run_generalization(train_set, val_set, test_set, embed_dim=16, layers=10,
                             max_steps=300 if quick else 3000, eval_every=100 if quick else 250)

print()
print(f"{'model':10s} {'coverage':>8s} {'val loss':>9s}")
for r in results:
    print(f"{r.arm:10s} {r.coverage:8.2f} {r.val_loss:9.3f}")

# per-instance outcome of the strongest model
for rec in results[-1].records:
    print(f"  {rec.instance}: {rec.termination} in {rec.steps} steps")
