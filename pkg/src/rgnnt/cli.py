"""Command-line entry point: ``rgnnt <subcommand> ...``.

Exit status is 0 on success, 1 when the inputs are rejected (bad PDDL,
unsuitable domain, diverged training, ...) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from . import autodiff as ad
from .baselines import ArityTooHigh, SizeCap, build_2gnn_input, build_rgnn2_input, check_pair_arity
from .domains import DOMAIN_NAMES, UnsatisfiableAfterRetries, gen_blocks, gen_gripper, gen_navig_xy, gen_vacuum, gen_visitall
from .net import MODEL_KINDS, RgnnConfig, UnknownPredicate, ValueModel
from .oracle import INF, CapExceeded, EmptySpace, LabeledState, label, read_dataset, write_dataset
from .pddl import PDDLError, load_directory, parse_domain
from .policy import run_policy, summarize, write_records
from .train import InfiniteLabel, NonFiniteLoss, TrainConfig, train, worker_count
from .transform import EmptyTuple, at_transform, prepare
from .wl import ALGORITHMS, distinguishes, read_edge_list

DOMAIN_ERRORS = (PDDLError, ArityTooHigh, SizeCap, UnsatisfiableAfterRetries, CapExceeded, EmptySpace,
                 InfiniteLabel, NonFiniteLoss, UnknownPredicate, EmptyTuple, FileNotFoundError)


def write_manifest(path, command: str, args: argparse.Namespace, artifacts: dict, started: float) -> None:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "started")}
    doc = {
        "subcommand": command,
        "config": config,
        "seeds": config.get("seeds", config.get("seed")),
        "artifacts": artifacts,
        "version": __version__,
        "wall_time_s": round(time.time() - started, 3),
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n")


def _sidecar(path, suffix: str) -> Path:
    path = Path(path)
    return path.with_name(path.name + suffix)


# ---------------------------------------------------------------- gen


def cmd_gen(args) -> int:
    d = args.domain
    if d == "navig-xy":
        g = gen_navig_xy(args.n, args.m, args.density, args.seed, args.count)
    elif d in ("visitall", "visitall-xy"):
        g = gen_visitall(d, args.n, args.m, args.targets, args.seed, args.count)
    elif d == "gripper":
        g = gen_gripper(args.balls, args.seed, args.count)
    elif d in ("blocks-s", "blocks-m"):
        g = gen_blocks(d, args.blocks, args.seed, args.count)
    else:
        g = gen_vacuum(args.locations, args.robots, args.seed, args.count)
    out = g.write(args.out)
    write_manifest(out / "run-manifest.json", "gen", args,
                   {"domain": "domain.pddl", "problems": len(g.problems)}, args.started)
    print(f"wrote {len(g.problems)} {d} instances to {out}")
    return 0


# ---------------------------------------------------------------- oracle / transform


def _label_dir(path, cap):
    items, spaces = [], []
    for inst in load_directory(path):
        space = label(inst, cap)
        spaces.append(space)
        items += [LabeledState(s, v, inst.name) for s, v in zip(space.states, space.vstar)]
    return items, spaces


def cmd_oracle(args) -> int:
    items, spaces = _label_dir(args.data, args.cap)
    write_dataset(args.out, items)
    for sp in spaces:
        print(f"{sp.name}: {len(sp)} states, V*(init) = {sp.vstar[0]}")
    write_manifest(_sidecar(args.out, ".manifest.json"), "oracle", args, {"dataset": str(args.out)}, args.started)
    return 0


def cmd_transform(args) -> int:
    lines = []
    for inst in load_directory(args.data):
        s = inst.initial
        if args.model == "rgnn":
            nodes, atoms = s.objects, s.atoms
        elif args.model == "rgnn2":
            ts = build_rgnn2_input(prepare(s), s.objects)
            nodes, atoms = ts.nodes, ts.atoms
        elif args.model == "2gnn":
            check_pair_arity(s.predicates())
            nodes, atoms = build_2gnn_input(s.objects)
        else:
            ts = at_transform(prepare(s), args.t, args.cumulative)
            nodes, atoms = ts.nodes, ts.atoms
        lines.append(json.dumps({"instance": inst.name, "model": args.model, "t": args.t,
                                 "nodes": len(nodes), "atoms": [str(a) for a in atoms]}))
        print(f"{inst.name}: {len(s.atoms)} atoms -> {len(atoms)} atoms over {len(nodes)} nodes")
    if args.out:
        Path(args.out).write_text("\n".join(lines) + "\n")
        write_manifest(_sidecar(args.out, ".manifest.json"), "transform", args, {"output": str(args.out)}, args.started)
    return 0


# ---------------------------------------------------------------- train / eval


def _load_items(path, cap):
    """Labeled states and predicate arities from an instance directory or a dataset file."""
    path = Path(path)
    if path.is_dir():
        items, spaces = _label_dir(path, cap)
        domain = parse_domain((path / "domain.pddl").read_text())
        return items, domain.predicates
    items = read_dataset(path)
    preds: dict = {}
    for it in items:
        preds.update(it.state.predicates())
    return items, preds


def cmd_train(args) -> int:
    items, preds = _load_items(args.data, args.cap)
    items = [it for it in items if it.vstar != INF]
    val = []
    if args.val:
        val, _ = _load_items(args.val, args.cap)
        val = [it for it in val if it.vstar != INF]
    dim = args.dim if args.dim is not None else (16 if args.model == "rgnn2" else 32)
    cfg = TrainConfig(kind=args.model, t=args.t if args.model == "rgnn-t" else None, embed_dim=dim,
                      layers=args.layers, lr=args.lr, batch_size=args.batch, max_steps=args.steps,
                      seeds=tuple(args.seeds), val_fraction=args.val_fraction, eval_every=args.eval_every,
                      cumulative=args.cumulative, workers=args.workers)
    report, model = train(cfg, items, val, predicates=preds)
    model.save(args.out)
    metrics = args.metrics or _sidecar(args.out, ".metrics.csv")
    report.write_metrics(metrics)
    for seed, msg in report.aborted.items():
        print(f"seed {seed} aborted: {msg}", file=sys.stderr)
    for seed, v in report.val_loss.items():
        print(f"seed {seed}: best loss {v:.4f} at step {report.best_step[seed]}")
    print(f"selected seed {report.selected_seed}; checkpoint {args.out}")
    write_manifest(_sidecar(args.out, ".manifest.json"), "train", args,
                   {"checkpoint": str(args.out), "metrics": str(metrics), "selected_seed": report.selected_seed},
                   args.started)
    return 0


def _eval_one(job):
    inst, model, cap, step_cap, tie_seed, oracle = job
    vstar = None
    if oracle:
        try:
            vstar = label(inst, cap).vstar[0]
        except CapExceeded:
            vstar = None
    return run_policy(inst, model, step_cap, vstar, tie_seed)


def cmd_eval(args) -> int:
    model = ValueModel.load(args.model)
    instances = load_directory(args.data)
    jobs = [(inst, model, args.cap, args.step_cap, args.tie_seed, not args.no_oracle) for inst in instances]
    workers = worker_count(args.workers)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_eval_one, jobs))
    else:
        records = [_eval_one(j) for j in jobs]
    summary = summarize(records)
    out = args.out or Path(args.data) / "eval.csv"
    write_records(out, records)
    print(f"coverage {summary.solved}/{summary.total} = {summary.coverage:.3f}")
    if summary.solved:
        print(f"plan length total {summary.total_length}, median {summary.median_length}, "
              f"mean {summary.mean_length:.2f}")
    write_manifest(_sidecar(out, ".manifest.json"), "eval", args, {"records": str(out)}, args.started)
    return 0


# ---------------------------------------------------------------- diagnostics


def cmd_wl(args) -> int:
    a, b = read_edge_list(args.a), read_edge_list(args.b)
    differ, rounds = distinguishes(a, b, args.algo)
    print(f"{'DISTINGUISHED' if differ else 'NOT-DISTINGUISHED'} ({args.algo}, {rounds} rounds to stability)")
    return 0


def cmd_gradcheck(args) -> int:
    inst = gen_navig_xy(args.n, args.m, args.density, args.seed).instances()[0]
    state = inst.initial
    model = ValueModel(args.model, inst.domain.predicates, RgnnConfig(args.dim, args.layers),
                       t=args.t if args.model == "rgnn-t" else None, seed=args.seed)
    graph = model.encode(state)
    target = float(label(inst).vstar[0])

    def objective(P):
        return ad.absolute(model.batch_values([graph], P) - target)

    err = ad.grad_check(objective, model.params, step=args.step, samples=args.samples, seed=args.seed)
    ok = err <= args.tol
    print(f"max relative error {err:.3e} over {args.samples} coordinates ({'ok' if ok else 'above'} tolerance {args.tol:g})")
    return 0 if ok else 1


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rgnnt", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate instance files")
    g.add_argument("--domain", required=True, choices=DOMAIN_NAMES)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--m", type=int, default=3)
    g.add_argument("--density", type=float, default=0.2, help="navig-xy obstacle density")
    g.add_argument("--targets", type=int, default=None, help="visitall: cells to visit (default all)")
    g.add_argument("--balls", type=int, default=2)
    g.add_argument("--blocks", type=int, default=4)
    g.add_argument("--locations", type=int, default=9)
    g.add_argument("--robots", type=int, default=2)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", help="label every reachable state with V*")
    o.add_argument("--data", required=True, help="directory with domain.pddl and problems")
    o.add_argument("--out", required=True, help="JSON-lines dataset")
    o.add_argument("--cap", type=int, default=200_000, help="state-space size cap")
    o.set_defaults(func=cmd_oracle)

    t = sub.add_parser("transform", help="show the network input of each initial state")
    t.add_argument("--data", required=True)
    t.add_argument("--model", choices=MODEL_KINDS, default="rgnn-t")
    t.add_argument("--t", type=int, default=1)
    t.add_argument("--cumulative", action="store_true")
    t.add_argument("--out")
    t.set_defaults(func=cmd_transform)

    tr = sub.add_parser("train", help="fit a value function")
    tr.add_argument("--model", choices=MODEL_KINDS, default="rgnn-t")
    tr.add_argument("--t", type=int, default=1)
    tr.add_argument("--dim", type=int, default=None, help="embedding size k (32; 16 for rgnn2)")
    tr.add_argument("--layers", type=int, default=15, help="message-passing rounds L")
    tr.add_argument("--lr", type=float, default=2e-4)
    tr.add_argument("--batch", type=int, default=16)
    tr.add_argument("--steps", type=int, default=1000)
    tr.add_argument("--eval-every", type=int, default=100)
    tr.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    tr.add_argument("--val", help="validation instances or dataset")
    tr.add_argument("--val-fraction", type=float, default=0.0)
    tr.add_argument("--cumulative", action="store_true")
    tr.add_argument("--cap", type=int, default=200_000)
    tr.add_argument("--workers", type=int, default=1)
    tr.add_argument("--data", required=True, help="instance directory or dataset file")
    tr.add_argument("--out", required=True, help="checkpoint path")
    tr.add_argument("--metrics")
    tr.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="run the greedy policy of a checkpoint")
    e.add_argument("--model", required=True, help="checkpoint path")
    e.add_argument("--data", required=True)
    e.add_argument("--step-cap", type=int, default=1000)
    e.add_argument("--tie-seed", type=int, default=None)
    e.add_argument("--no-oracle", action="store_true", help="skip computing V*(init)")
    e.add_argument("--cap", type=int, default=200_000)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)

    w = sub.add_parser("wl", help="compare two graphs by color refinement")
    w.add_argument("--algo", choices=ALGORITHMS, default="fwl2")
    w.add_argument("--a", required=True)
    w.add_argument("--b", required=True)
    w.set_defaults(func=cmd_wl)

    c = sub.add_parser("gradcheck", help="compare backprop with finite differences")
    c.add_argument("--model", choices=MODEL_KINDS, default="rgnn-t")
    c.add_argument("--t", type=int, default=1)
    c.add_argument("--dim", type=int, default=8)
    c.add_argument("--layers", type=int, default=3)
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--m", type=int, default=3)
    c.add_argument("--density", type=float, default=0.2)
    c.add_argument("--samples", type=int, default=100)
    c.add_argument("--step", type=float, default=3e-3, help="finite-difference step (Richardson-extrapolated)")
    c.add_argument("--tol", type=float, default=1e-5)
    c.add_argument("--seed", type=int, default=0)
    c.set_defaults(func=cmd_gradcheck)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.started = time.time()
    try:
        return args.func(args)
    except DOMAIN_ERRORS as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
