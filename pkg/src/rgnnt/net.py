"""Relational message passing over atoms, and value functions built on it.

A network input is a :class:`Graph`: a node universe (objects or object
pairs) and, per predicate, the node indices of every atom.  Each layer
lets every atom ``p(n_1..n_m)`` emit ``m`` messages computed by ``MLP_p``
from the concatenated embeddings of its arguments; each node aggregates
its messages with a smooth maximum and takes a residual step through
``MLP_U``.  Value functions read out a sum of selected node embeddings
through a final MLP.

Four model kinds share this engine:

``rgnn``    object embeddings, sum readout over all objects;
``rgnn-t``  pair embeddings over ``A_t(S)``, readout over diagonal pairs;
``rgnn2``   pair embeddings over ``A_0(S)`` plus all ``n^3`` triangles;
``2gnn``    pair embeddings with ``p1``/``p2`` atoms and initial embeddings
            encoding the state and goal.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .autodiff import ParameterSet, Tensor
from .baselines import (
    P1, P2, build_2gnn_input, build_rgnn2_input, check_pair_arity, pair_features, pair_indicator,
)
from .relcore import OBJ, TRIANGLE, RelationalState, augment_goal, goal_name
from .transform import EmptyTuple, at_transform, prepare

MODEL_KINDS = ("rgnn", "rgnn-t", "rgnn2", "2gnn")
CHECKPOINT_FORMAT = "rgnnt-checkpoint"
CHECKPOINT_VERSION = 1


class UnknownPredicate(KeyError):
    pass


class UniverseMismatch(ValueError):
    pass


class MissingDiagonal(ValueError):
    pass


@dataclass
class RgnnConfig:
    embed_dim: int = 32
    layers: int = 15
    shared_weights: bool = True
    readout: str = "diagonal"
    hidden: int | None = None

    def __post_init__(self):
        if self.embed_dim < 1 or self.layers < 1:
            raise ValueError("embed_dim and layers must be >= 1")
        if self.readout not in ("sum", "diagonal"):
            raise ValueError(f"unknown readout {self.readout!r}")

    @property
    def width(self) -> int:
        return self.hidden or self.embed_dim


@dataclass
class Graph:
    """Compiled network input."""

    n_nodes: int
    relations: dict[str, np.ndarray]
    readout: np.ndarray
    init: np.ndarray | None = None
    nodes: tuple = field(default=(), repr=False)

    def message_count(self) -> int:
        return sum(int(idx.size) for idx in self.relations.values())


def build_graph(atoms, universe, readout_nodes, init=None) -> Graph:
    """Index atoms over ``universe``; ``readout_nodes`` are summed by the readout."""
    universe = tuple(universe)
    index = {n: i for i, n in enumerate(universe)}
    grouped: dict[str, list] = {}
    for a in atoms:
        if len(a.args) == 0:
            raise EmptyTuple(f"arity-0 atom {a.predicate} cannot be routed to any node")
        try:
            grouped.setdefault(a.predicate, []).append([index[x] for x in a.args])
        except KeyError as e:
            raise UniverseMismatch(f"argument {e.args[0]!r} of {a} is not in the universe") from None
    relations = {p: np.array(rows, dtype=np.intp) for p, rows in sorted(grouped.items())}
    readout = np.array([index[n] for n in readout_nodes], dtype=np.intp)
    return Graph(len(universe), relations, readout, init, universe)


def batch_graphs(graphs: list[Graph]) -> tuple[Graph, np.ndarray]:
    """Disjoint union of graphs plus the graph id of every readout node."""
    offset = 0
    rel: dict[str, list] = {}
    readout, seg, init = [], [], []
    for gi, g in enumerate(graphs):
        for p, idx in g.relations.items():
            rel.setdefault(p, []).append(idx + offset)
        readout.append(g.readout + offset)
        seg.append(np.full(len(g.readout), gi, dtype=np.intp))
        if g.init is not None:
            init.append(g.init)
        offset += g.n_nodes
    relations = {p: np.concatenate(v) for p, v in sorted(rel.items())}
    merged = Graph(
        offset, relations,
        np.concatenate(readout) if readout else np.zeros(0, np.intp),
        np.concatenate(init) if init else None,
    )
    return merged, (np.concatenate(seg) if seg else np.zeros(0, np.intp))


# ---------------------------------------------------------------- parameters


def _init_mlp(params: ParameterSet, rng, prefix: str, n_in: int, n_hidden: int, n_out: int):
    params[prefix + "/w1"] = ad.glorot(rng, n_in, n_hidden)
    params[prefix + "/b1"] = np.zeros(n_hidden)
    params[prefix + "/w2"] = ad.glorot(rng, n_hidden, n_out)
    params[prefix + "/b2"] = np.zeros(n_out)


def mlp(x: Tensor, P: dict, prefix: str) -> Tensor:
    """Linear, Mish, linear."""
    h = ad.mish(ad.linear(x, P[prefix + "/w1"], P[prefix + "/b1"]))
    return ad.linear(h, P[prefix + "/w2"], P[prefix + "/b2"])


def init_params(vocabulary: dict[str, int], config: RgnnConfig, seed: int = 0,
                init_features: int = 0) -> ParameterSet:
    """Fresh parameters: Glorot-uniform weights and zero biases."""
    rng = np.random.default_rng(seed)
    k, h = config.embed_dim, config.width
    params = ParameterSet()
    prefixes = [""] if config.shared_weights else [f"layer{i}/" for i in range(config.layers)]
    for prefix in prefixes:
        for pred, arity in sorted(vocabulary.items()):
            _init_mlp(params, rng, f"{prefix}rel/{pred}", arity * k, h, arity * k)
        _init_mlp(params, rng, f"{prefix}update", 2 * k, h, k)
    _init_mlp(params, rng, "readout", k, h, 1)
    if init_features:
        params["init/embed"] = ad.glorot(rng, init_features, k)
    return params


# ---------------------------------------------------------------- forward


def forward(graph: Graph, P: dict, config: RgnnConfig, trace: bool = False):
    """Final node embeddings after ``config.layers`` rounds of message passing.

    ``P`` maps parameter names to tensors.  With ``trace`` a list of the
    embeddings of every layer (including the initial one) is returned too.
    """
    k = config.embed_dim
    n = graph.n_nodes
    if graph.init is None:
        f = Tensor(np.zeros((n, k)))
    else:
        f = ad.linear(Tensor(graph.init), P["init/embed"])
    layers = [f] if trace else None
    receivers = [idx.ravel() for idx in graph.relations.values()]
    receivers = np.concatenate(receivers) if receivers else np.zeros(0, np.intp)
    layout = ad.SegmentLayout(receivers, n)
    for i in range(config.layers):
        prefix = "" if config.shared_weights else f"layer{i}/"
        messages = []
        for pred, idx in graph.relations.items():
            name = f"{prefix}rel/{pred}"
            if name + "/w1" not in P:
                raise UnknownPredicate(pred)
            n_atoms, arity = idx.shape
            x = ad.reshape(ad.gather(f, idx.ravel()), (n_atoms, arity * k))
            messages.append(ad.reshape(mlp(x, P, name), (n_atoms * arity, k)))
        if messages:
            agg = ad.segment_smoothmax(ad.concat(messages, axis=0), layout, n)
        else:
            agg = Tensor(np.zeros((n, k)))
        f = f + mlp(ad.concat([f, agg], axis=1), P, f"{prefix}update")
        if trace:
            layers.append(f)
    return (f, layers) if trace else f


def readout_values(f: Tensor, readout: np.ndarray, seg: np.ndarray, n_graphs: int, P: dict) -> Tensor:
    """``MLP(sum of readout node embeddings)`` for every graph of a batch."""
    pooled = ad.segment_sum(ad.gather(f, readout), seg, n_graphs)
    return ad.reshape(mlp(pooled, P, "readout"), (n_graphs,))


def _readout_single(f: Tensor, nodes, selected, P) -> Tensor:
    index = {n: i for i, n in enumerate(nodes)}
    rows = np.array([index[n] for n in selected], dtype=np.intp)
    return readout_values(f, rows, np.zeros(len(rows), np.intp), 1, P)


def value_sum_readout(f: Tensor, nodes, objects, P: dict) -> Tensor:
    """``V = MLP(sum over objects o of f(o))``."""
    return _readout_single(f, nodes, objects, P)


def value_diag_readout(f: Tensor, nodes, objects, P: dict) -> Tensor:
    """``V = MLP(sum over objects o of f(<o,o>))``."""
    present = set(nodes)
    missing = [o for o in objects if (o, o) not in present]
    if missing:
        raise MissingDiagonal(f"no diagonal pair for objects {missing}")
    return _readout_single(f, nodes, [(o, o) for o in objects], P)


def embedding_table(graph: Graph, f: Tensor) -> dict:
    return {node: f.data[i] for i, node in enumerate(graph.nodes)}


# ---------------------------------------------------------------- models


def network_vocabulary(kind: str, predicates: dict[str, int], t: int | None = None) -> dict[str, int]:
    """Arity of every predicate the network of ``kind`` sees, given domain arities."""
    for p, m in predicates.items():
        if m == 0:
            raise EmptyTuple(f"arity-0 predicate {p!r} is not supported by the networks")
    if kind == "2gnn":
        check_pair_arity(predicates)
        return {P1: 2, P2: 2}
    with_goal = {}
    for p, m in predicates.items():
        with_goal[p] = m
        with_goal[goal_name(p)] = m
    if kind == "rgnn":
        return with_goal
    vocab = {p: m * m for p, m in with_goal.items()}
    vocab[OBJ] = 1
    if kind == "rgnn2" or (kind == "rgnn-t" and t and t >= 1):
        vocab[TRIANGLE] = 3
    return vocab


class ValueModel:
    """A value function ``V(S)`` of one of the supported kinds."""

    def __init__(self, kind: str, predicates: dict[str, int], config: RgnnConfig,
                 t: int | None = None, seed: int = 0, cumulative: bool = False,
                 params: ParameterSet | None = None):
        if kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")
        if kind == "rgnn-t" and (t is None or t < 0):
            raise ValueError("rgnn-t needs a non-negative t")
        if kind == "rgnn" and config.readout != "sum":
            config = RgnnConfig(**{**asdict(config), "readout": "sum"})
        self.kind = kind
        self.t = t if kind == "rgnn-t" else None
        self.cumulative = cumulative
        # accepts plain arities or Predicate records
        self.predicates = {p: int(getattr(m, "arity", m)) for p, m in sorted(predicates.items())}
        self.config = config
        self.vocabulary = network_vocabulary(kind, self.predicates, self.t)
        self.features = pair_features(self.predicates) if kind == "2gnn" else []
        self.params = params if params is not None else init_params(
            self.vocabulary, config, seed, len(self.features))

    # -- inputs

    def encode(self, state: RelationalState) -> Graph:
        """Compile ``state`` (with its goal) into a network input."""
        unknown = set(state.predicates()) - set(self.predicates)
        if unknown:
            raise UnknownPredicate(f"predicates {sorted(unknown)} are not in the model vocabulary")
        if self.kind == "rgnn":
            s = augment_goal(state)
            return build_graph(s.atoms, s.objects, s.objects)
        diag = [(o, o) for o in state.objects]
        if self.kind == "rgnn-t":
            ts = at_transform(prepare(state), self.t, self.cumulative)
            return build_graph(ts.atoms, ts.nodes, diag)
        if self.kind == "rgnn2":
            ts = build_rgnn2_input(prepare(state), state.objects)
            return build_graph(ts.atoms, ts.nodes, diag)
        nodes, atoms = build_2gnn_input(state.objects)
        return build_graph(atoms, nodes, diag, pair_indicator(state, nodes, self.features))

    # -- evaluation

    def batch_values(self, graphs: list[Graph], P: dict) -> Tensor:
        merged, seg = batch_graphs(graphs)
        f = forward(merged, P, self.config)
        return readout_values(f, merged.readout, seg, len(graphs), P)

    def values(self, states, graphs: list[Graph] | None = None, chunk: int = 64) -> np.ndarray:
        graphs = graphs if graphs is not None else [self.encode(s) for s in states]
        P = {k: Tensor(v) for k, v in self.params.values.items()}
        out = [self.batch_values(graphs[i:i + chunk], P).data for i in range(0, len(graphs), chunk)]
        return np.concatenate(out) if out else np.zeros(0)

    def value(self, state: RelationalState) -> float:
        return float(self.values([state])[0])

    def __call__(self, states):
        return self.values(states)

    # -- persistence

    def to_document(self) -> dict:
        return {
            "format": CHECKPOINT_FORMAT,
            "version": CHECKPOINT_VERSION,
            "kind": self.kind,
            "t": self.t,
            "cumulative": self.cumulative,
            "config": asdict(self.config),
            "predicates": self.predicates,
            "vocabulary": self.vocabulary,
            "init_features": self.features,
            "parameters": self.params.to_json(),
        }

    @classmethod
    def from_document(cls, doc: dict) -> "ValueModel":
        if doc.get("format") != CHECKPOINT_FORMAT:
            raise ValueError("not a model checkpoint")
        if doc.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
        model = cls(doc["kind"], doc["predicates"], RgnnConfig(**doc["config"]), doc["t"],
                    cumulative=doc["cumulative"], params=ParameterSet.from_json(doc["parameters"]))
        if model.vocabulary != doc["vocabulary"]:
            raise ValueError("checkpoint vocabulary does not match its predicates")
        return model

    def save(self, path) -> None:
        Path(path).write_text(ad.dumps_document(self.to_document()))

    @classmethod
    def load(cls, path) -> "ValueModel":
        return cls.from_document(json.loads(Path(path).read_text()))


def rgnn_t_value(state: RelationalState, t: int, params: ParameterSet, config: RgnnConfig,
                 cumulative: bool = False) -> float:
    """``MLP(sum_o f_L(<o,o>))`` for ``R-GNN(A_t(S), O^2)``.

    ``state`` is the raw state; goal copies and ``Obj`` markers are added here.
    """
    ts = at_transform(prepare(state), t, cumulative)
    graph = build_graph(ts.atoms, ts.nodes, [(o, o) for o in state.objects])
    P = {k: Tensor(v) for k, v in params.values.items()}
    f = forward(graph, P, config)
    return value_diag_readout(f, ts.nodes, state.objects, P).item()
