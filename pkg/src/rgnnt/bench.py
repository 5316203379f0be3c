"""Size-generalization benchmark on Navig-xy: train on small grids, test on larger ones."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .domains import gen_navig_xy
from .oracle import label, sample_training_set
from .policy import evaluate_suite
from .train import TrainConfig, train


def grid_shapes(min_area: int, max_area: int, min_side: int = 2) -> list[tuple[int, int]]:
    """Grid shapes ``(n, m)`` with ``min_area < n*m <= max_area``."""
    return [(n, m) for n in range(min_side, max_area + 1) for m in range(min_side, max_area + 1)
            if min_area < n * m <= max_area]


def navig_suite(count: int, min_area: int, max_area: int, seed: int, density: float = 0.2):
    """``count`` solvable instances on random shapes in the given area band."""
    rng = random.Random(seed)
    shapes = grid_shapes(min_area, max_area)
    out = []
    for i in range(count):
        n, m = rng.choice(shapes)
        out += gen_navig_xy(n, m, density, seed=seed * 10_000 + i).instances()
    return out


@dataclass
class Arm:
    name: str
    kind: str
    t: int | None


ARMS = (Arm("R-GNN", "rgnn", None), Arm("R-GNN[0]", "rgnn-t", 0), Arm("R-GNN[1]", "rgnn-t", 1))


@dataclass
class ArmResult:
    arm: str
    coverage: float
    solved: int
    total: int
    val_loss: float
    seconds: float
    selected_seed: int
    records: list = field(default_factory=list)


def run_generalization(train_instances, val_instances, test_instances, arms=ARMS,
                       embed_dim=16, layers=10, max_steps=3000, seeds=(0,), eval_every=250,
                       step_cap=1000, log=print) -> list[ArmResult]:
    """Train every arm on the labeled state spaces of ``train_instances`` and run
    the greedy policy of the selected model on ``test_instances``."""
    train_items = sample_training_set([label(i) for i in train_instances])
    val_items = sample_training_set([label(i) for i in val_instances]) if val_instances else []
    predicates = train_instances[0].domain.predicates
    results = []
    for arm in arms:
        t0 = time.time()
        cfg = TrainConfig(kind=arm.kind, t=arm.t, embed_dim=embed_dim, layers=layers,
                          max_steps=max_steps, seeds=tuple(seeds), eval_every=eval_every)
        report, model = train(cfg, train_items, val_items, predicates=predicates)
        summary, records = evaluate_suite(test_instances, model, step_cap)
        res = ArmResult(arm.name, summary.coverage, summary.solved, summary.total,
                        report.val_loss[report.selected_seed], time.time() - t0,
                        report.selected_seed, records)
        log(f"{arm.name}: coverage {res.solved}/{res.total} val_loss {res.val_loss:.3f} "
            f"seed {res.selected_seed} ({res.seconds:.0f}s)")
        results.append(res)
    return results
