import math

import numpy as np
import pytest

from rgnnt.oracle import LabeledState, label, sample_training_set
from rgnnt.train import InfiniteLabel, TrainConfig, loss, make_batches, split_validation, train

from conftest import navig


def test_loss_values():
    assert loss(3, 3.0) == 0
    assert loss(4, 2.5) == 1.5
    with pytest.raises(InfiniteLabel):
        loss(math.inf, 1.0)


def test_distinct_values_fill_one_batch():
    (batch,) = make_batches(list(range(16)), 16, seed=0)
    assert sorted(batch) == list(range(16))


def test_each_batch_mixes_values():
    labels = [1] * 16 + [2] * 16
    batches = make_batches(labels, 16, seed=3)
    assert sorted(i for b in batches for i in b) == list(range(32))
    assert all({labels[i] for i in b} == {1, 2} for b in batches)
    assert batches == make_batches(labels, 16, seed=3)


def test_split_validation():
    tr, va = split_validation(list(range(10)), 0.3, seed=1)
    assert len(va) == 3 and sorted(tr + va) == list(range(10))


@pytest.fixture(scope="module")
def items():
    inst = navig(2, 3)
    return sample_training_set([label(inst)]), inst.domain.predicates


def test_zero_budget_keeps_initial_parameters(items):
    data, preds = items
    cfg = TrainConfig(kind="rgnn", embed_dim=4, layers=2, max_steps=0, seeds=(0,))
    report, model = train(cfg, data, predicates=preds)
    fresh = train(TrainConfig(kind="rgnn", embed_dim=4, layers=2, max_steps=0, seeds=(0,)), data, predicates=preds)[1]
    assert model.params.equals(fresh.params)
    assert [row[1] for row in report.curve] == [0]


def test_selected_seed_is_argmin(items):
    data, preds = items
    cfg = TrainConfig(kind="rgnn-t", t=1, embed_dim=4, layers=2, max_steps=20, eval_every=10, seeds=(0, 1, 2))
    report, _ = train(cfg, data, data[:3], predicates=preds)
    assert report.selected_seed == min(report.val_loss, key=report.val_loss.get)


def test_identical_runs_are_bit_identical(items):
    data, preds = items
    cfg = TrainConfig(kind="rgnn-t", t=1, embed_dim=4, layers=2, max_steps=15, seeds=(0,))
    a, b = train(cfg, data, predicates=preds)[1], train(cfg, data, predicates=preds)[1]
    assert a.params.equals(b.params)


def test_target_loss_stops_early(items):
    data, preds = items
    cfg = TrainConfig(kind="rgnn", embed_dim=4, layers=2, max_steps=50, eval_every=5, seeds=(0,), target_loss=1e9)
    report, _ = train(cfg, data, predicates=preds)
    assert max(row[1] for row in report.curve) == 5


@pytest.mark.slow
def test_single_state_overfit():
    # L1 + Adam oscillates around the target, so the emitted checkpoint is the
    # best snapshot of the run, checked every 100 steps
    inst = navig(2, 2)
    item = [LabeledState(inst.initial, 2.0)]
    cfg = TrainConfig(kind="rgnn-t", t=1, embed_dim=16, layers=8, max_steps=2000, eval_every=100, seeds=(0,))
    report, model = train(cfg, item, predicates=inst.domain.predicates)
    assert report.val_loss[0] < 0.1
    assert abs(model.value(inst.initial) - 2.0) < 0.1
