"""Inputs for the pair-embedding baselines.

* 2-GNN: every pair ``<u,v>`` hears from ``<w,v>`` through ``p1`` and from
  ``<u,w>`` through ``p2``; the state and goal are encoded only in the
  initial pair embeddings.
* R-GNN2: the lifted state plus every triangle over ``O^3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .relcore import Atom, RelationalState, goal_name
from .transform import TransformedState, a0_transform, full_triangles

P1 = "p1"
P2 = "p2"
DEFAULT_SIZE_CAP = 40


class ArityTooHigh(ValueError):
    """Pair embeddings can only encode unary and binary predicates."""

    def __init__(self, predicate, arity):
        super().__init__(
            f"Unsuitable domain: ternary predicates ({predicate!r} has arity {arity})")
        self.predicate = predicate
        self.arity = arity


class SizeCap(ValueError):
    pass


def check_pair_arity(predicates: dict[str, int]) -> None:
    for p, m in sorted(predicates.items()):
        if m > 2:
            raise ArityTooHigh(p, m)


def _pair_of(a: Atom):
    # unary atoms are mapped to binary by repeating the first term
    if len(a.args) > 2:
        raise ArityTooHigh(a.predicate, len(a.args))
    if len(a.args) == 0:
        raise ValueError(f"arity-0 atom {a.predicate} has no pair")
    return (a.args[0], a.args[-1])


def pair_features(predicates: dict[str, int]) -> list[str]:
    """Feature names ``p`` and ``p_g`` for every domain predicate."""
    check_pair_arity(predicates)
    return [name for p in sorted(predicates) for name in (p, goal_name(p))]


def pair_indicator(state: RelationalState, nodes, features: list[str]) -> np.ndarray:
    """Counts ``[p(o,o') in S]`` and ``[p(o,o') in G]`` per pair and feature."""
    index = {n: i for i, n in enumerate(nodes)}
    col = {f: j for j, f in enumerate(features)}
    out = np.zeros((len(nodes), len(features)))
    for atoms, rename in ((state.atoms, lambda p: p), (state.goal, goal_name)):
        for a in atoms:
            name = rename(a.predicate)
            if name not in col:
                raise KeyError(f"predicate {a.predicate!r} not in the embedding vocabulary")
            out[index[_pair_of(a)], col[name]] += 1.0
    return out


@dataclass
class PairEmbeddingVocab:
    """Learned vectors ``e_p`` and ``e_{p_g}`` keyed by ``p`` and ``p_g``."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def random(cls, predicates: dict[str, int], dim: int, seed: int = 0) -> "PairEmbeddingVocab":
        rng = np.random.default_rng(seed)
        return cls(dim, {f: rng.standard_normal(dim) for f in pair_features(predicates)})


def initial_pair_embeddings(state: RelationalState, vocab: PairEmbeddingVocab) -> dict:
    """``e_{o,o'} = sum_p e_p [p(o,o') in S] + e_{p_g} [p(o,o') in G]`` over ``O^2``."""
    check_pair_arity(state.predicates())
    nodes = [(a, b) for a in state.objects for b in state.objects]
    features = sorted(vocab.vectors)
    counts = pair_indicator(state, nodes, features)
    table = {}
    for i, pair in enumerate(nodes):
        vec = np.zeros(vocab.dim)
        for j, f in enumerate(features):
            if counts[i, j]:
                vec = vec + counts[i, j] * vocab.vectors[f]
        table[pair] = vec
    return table


def build_2gnn_input(objects, cap: int = DEFAULT_SIZE_CAP) -> tuple[list, list[Atom]]:
    """All ``p1(<w,v>,<u,v>)`` and ``p2(<u,w>,<u,v>)``: ``2 n^3`` atoms over ``O^2``."""
    objects = sorted(objects)
    if len(objects) > cap:
        raise SizeCap(f"2-GNN input for {len(objects)} objects exceeds the cap of {cap}")
    nodes = [(a, b) for a in objects for b in objects]
    atoms = []
    for u in objects:
        for v in objects:
            for w in objects:
                atoms.append(Atom(P1, ((w, v), (u, v))))
                atoms.append(Atom(P2, ((u, w), (u, v))))
    return nodes, atoms


def build_rgnn2_input(state: RelationalState, objects=None, cap: int = DEFAULT_SIZE_CAP) -> TransformedState:
    """``A_0(S)`` plus all ``n^3`` triangles; ``state`` should carry goal and ``Obj`` atoms."""
    objects = sorted(state.objects if objects is None else objects)
    if len(objects) > cap:
        raise SizeCap(f"R-GNN2 input for {len(objects)} objects exceeds the cap of {cap}")
    atoms = tuple(sorted(a0_transform(state) + full_triangles(objects)))
    nodes = tuple((a, b) for a in objects for b in objects)
    return TransformedState(nodes, atoms, None)

