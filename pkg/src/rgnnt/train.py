"""Supervised value learning: ``|V*(S) - V(S)|`` minimized with Adam.

Batches are stratified by V*: the states of every value stratum are shuffled
under the seed and dealt round-robin in increasing value order, so each batch
holds as many distinct values as the data allows.  Every seed keeps the
parameter snapshot with the lowest validation loss; the seed with the lowest
such loss is selected.
"""

from __future__ import annotations

import csv
import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .net import RgnnConfig, ValueModel


class InfiniteLabel(ValueError):
    pass


class NonFiniteLoss(FloatingPointError):
    pass


@dataclass
class TrainConfig:
    kind: str = "rgnn-t"
    t: int | None = 1
    embed_dim: int = 32
    layers: int = 15
    lr: float = 2e-4
    batch_size: int = 16
    max_steps: int = 1000
    max_epochs: int | None = None
    seeds: tuple = (0, 1, 2)
    val_fraction: float = 0.0
    eval_every: int = 100
    cumulative: bool = False
    hidden: int | None = None
    workers: int = 1
    target_loss: float | None = None   # stop a seed once its selection loss is below this

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        self.seeds = tuple(self.seeds)

    def model_config(self) -> RgnnConfig:
        return RgnnConfig(self.embed_dim, self.layers, hidden=self.hidden,
                          readout="sum" if self.kind == "rgnn" else "diagonal")


@dataclass
class SeedResult:
    seed: int
    params: ad.ParameterSet
    best_loss: float
    best_step: int
    curve: list = field(default_factory=list)
    error: str | None = None


@dataclass
class TrainReport:
    curve: list            # (seed, step, train_loss, val_loss or None)
    val_loss: dict         # seed -> best validation loss
    best_step: dict        # seed -> step of the kept snapshot
    selected_seed: int
    aborted: dict = field(default_factory=dict)

    def write_metrics(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["step", "train_loss", "val_loss", "seed"])
            for seed, step, tl, vl in self.curve:
                w.writerow([step, repr(tl), "" if vl is None else repr(vl), seed])


def loss(vstar, v):
    """``|V* - V|``; ``v`` may be a float or a Tensor (the subgradient at 0 is 0)."""
    if not math.isfinite(float(vstar)):
        raise InfiniteLabel(f"label {vstar} is not finite")
    if isinstance(v, Tensor):
        return ad.absolute(v - float(vstar))
    return abs(float(vstar) - float(v))


def _labels(items) -> np.ndarray:
    y = np.array([float(it.vstar) for it in items])
    if not np.all(np.isfinite(y)):
        raise InfiniteLabel("training and validation labels must be finite")
    return y


def make_batches(labels, batch_size: int, seed: int) -> list[list[int]]:
    """Index batches covering every item once, distinct values first."""
    if len(labels) == 0:
        raise ValueError("cannot batch an empty dataset")
    rng = random.Random(seed)
    strata: dict = {}
    for i, v in enumerate(labels):
        strata.setdefault(v, []).append(i)
    queues = []
    for v in sorted(strata):
        idx = strata[v]
        rng.shuffle(idx)
        queues.append(idx)
    order = []
    depth = 0
    while len(order) < len(labels):
        order += [q[depth] for q in queues if depth < len(q)]
        depth += 1
    return [order[i:i + batch_size] for i in range(0, len(order), batch_size)]


def split_validation(items, fraction: float, seed: int = 0):
    """Random train/validation split; the validation part may be empty."""
    if not 0 <= fraction < 1:
        raise ValueError("validation fraction must be in [0, 1)")
    idx = list(range(len(items)))
    random.Random(seed).shuffle(idx)
    n_val = int(round(fraction * len(items)))
    val = sorted(idx[:n_val])
    train = sorted(idx[n_val:])
    return [items[i] for i in train], [items[i] for i in val]


def _mean_loss(model, graphs, y) -> float:
    return float(np.mean(np.abs(model.values(None, graphs=graphs) - y)))


def _train_seed(job) -> SeedResult:
    cfg, model, seed, graphs, y, val_graphs, val_y = job
    params = model.params
    selection = (val_graphs, val_y) if len(val_y) else (graphs, y)
    best = _mean_loss(model, *selection)
    result = SeedResult(seed, params.copy(), best, 0)
    result.curve.append((seed, 0, _mean_loss(model, graphs, y), best))
    step, epoch = 0, 0
    while step < cfg.max_steps and (cfg.max_epochs is None or epoch < cfg.max_epochs):
        for batch in make_batches(y, cfg.batch_size, seed * 1_000_003 + epoch):
            if step >= cfg.max_steps:
                break
            sub = [graphs[i] for i in batch]
            target = y[batch]

            def objective(P):
                return ad.mean(ad.absolute(model.batch_values(sub, P) - Tensor(target)))

            value, grads = ad.gradients(objective, params)
            if not math.isfinite(value) or not all(np.all(np.isfinite(g)) for g in grads.values()):
                result.error = f"non-finite loss at step {step}"
                return result
            ad.adam_step(params, grads, lr=cfg.lr)
            step += 1
            val = None
            if step % cfg.eval_every == 0 or step == cfg.max_steps:
                val = _mean_loss(model, *selection)
                if not math.isfinite(val):
                    result.error = f"non-finite validation loss at step {step}"
                    return result
                if val < result.best_loss:
                    result.best_loss, result.best_step, result.params = val, step, params.copy()
                if cfg.target_loss is not None and val < cfg.target_loss:
                    result.curve.append((seed, step, value, val))
                    return result
            result.curve.append((seed, step, value, val))
        epoch += 1
    return result


def worker_count(requested: int) -> int:
    cap = os.environ.get("RGNN_THREADS")
    if cap:
        requested = min(requested, max(1, int(cap)))
    return max(1, requested)


def train(cfg: TrainConfig, train_items, val_items=(), predicates=None) -> tuple[TrainReport, ValueModel]:
    """Train one model per seed and return the report and the selected model."""
    train_items = list(train_items)
    if not train_items:
        raise ValueError("empty training set")
    val_items = list(val_items)
    if not val_items and cfg.val_fraction > 0:
        train_items, val_items = split_validation(train_items, cfg.val_fraction, cfg.seeds[0])
    y, val_y = _labels(train_items), _labels(val_items)
    if predicates is None:
        predicates = {}
        for it in train_items + val_items:
            predicates.update(it.state.predicates())
    models = {s: ValueModel(cfg.kind, predicates, cfg.model_config(), cfg.t, seed=s, cumulative=cfg.cumulative)
              for s in cfg.seeds}
    proto = models[cfg.seeds[0]]
    graphs = [proto.encode(it.state) for it in train_items]
    val_graphs = [proto.encode(it.state) for it in val_items]
    jobs = [(cfg, models[s], s, graphs, y, val_graphs, val_y) for s in cfg.seeds]
    workers = worker_count(cfg.workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(min(workers, len(jobs))) as pool:
            results = list(pool.map(_train_seed, jobs))
    else:
        results = [_train_seed(j) for j in jobs]

    curve = [row for r in results for row in r.curve]
    aborted = {r.seed: r.error for r in results if r.error}
    finished = [r for r in results if not r.error]
    if not finished:
        raise NonFiniteLoss("every seed diverged: " + "; ".join(aborted.values()))
    chosen = min(finished, key=lambda r: (r.best_loss, cfg.seeds.index(r.seed)))
    report = TrainReport(curve, {r.seed: r.best_loss for r in finished},
                         {r.seed: r.best_step for r in finished}, chosen.seed, aborted)
    model = models[chosen.seed]
    model.params = chosen.params
    return report, model
