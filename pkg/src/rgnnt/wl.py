"""Weisfeiler-Leman color refinement: 1-WL, folklore and oblivious k-WL.

Graphs are refined jointly: every round, the refinement keys of all graphs
are sorted and numbered densely, so a color id means the same thing in every
graph of the run and ids never depend on hashing or insertion order.  Two
graphs are distinguished when their stable color histograms differ.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import networkx as nx

ALGORITHMS = ("wl1", "fwl2", "owl2", "owl3", "fwl3")
OWL3_SIZE_CAP = 12


class SizeCap(ValueError):
    pass


@dataclass
class Coloring:
    """Stable colors of the vertices (1-WL) or k-tuples of one graph."""

    colors: dict
    rounds: int

    def histogram(self) -> Counter:
        return Counter(self.colors.values())

    def classes(self) -> int:
        return len(set(self.colors.values()))


# ---------------------------------------------------------------- refinement steps


def _wl1_setup(g: nx.Graph, initial=None):
    domain = sorted(g.nodes, key=repr)
    init = {v: (0 if initial is None else initial[v]) for v in domain}
    nbrs = {v: sorted(g.neighbors(v), key=repr) for v in domain}

    def key(c, v):
        return (c[v], tuple(sorted(c[u] for u in nbrs[v])))

    return domain, init, key


def _atomic_type(g: nx.Graph, tup) -> tuple:
    # equality and adjacency pattern of the positions of a tuple
    return tuple((tup[i] == tup[j], g.has_edge(tup[i], tup[j]))
                 for i in range(len(tup)) for j in range(len(tup)) if i != j)


def _kwl_setup(g: nx.Graph, k: int, folklore: bool):
    vertices = sorted(g.nodes, key=repr)
    domain = list(itertools.product(vertices, repeat=k))
    init = {t: _atomic_type(g, t) for t in domain}

    def swap(t, j, w):
        return t[:j] + (w,) + t[j + 1:]

    if folklore:
        def key(c, t):
            return (c[t], tuple(sorted(tuple(c[swap(t, j, w)] for j in range(k)) for w in vertices)))
    else:
        def key(c, t):
            return (c[t],) + tuple(tuple(sorted(c[swap(t, j, w)] for w in vertices)) for j in range(k))
    return domain, init, key


def _setup(g: nx.Graph, algorithm: str, initial=None):
    if algorithm == "wl1":
        return _wl1_setup(g, initial)
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    k = int(algorithm[-1])
    if k == 3 and g.number_of_nodes() > OWL3_SIZE_CAP:
        raise SizeCap(f"{algorithm} is limited to {OWL3_SIZE_CAP} vertices")
    return _kwl_setup(g, k, folklore=algorithm.startswith("fwl"))


def _relabel(keyed: list[dict]) -> list[dict]:
    ids = {key: i for i, key in enumerate(sorted({k for d in keyed for k in d.values()}))}
    return [{x: ids[key] for x, key in d.items()} for d in keyed]


def refine_jointly(graphs, algorithm: str, initial=None) -> list[Coloring]:
    """Refine all ``graphs`` with one shared relabeling until no class splits.

    ``initial`` optionally gives per-graph vertex colors (1-WL only).
    """
    setups = [_setup(g, algorithm, None if initial is None else initial[i]) for i, g in enumerate(graphs)]
    colors = _relabel([dict(init) for _, init, _ in setups])
    n_classes = len({c for d in colors for c in d.values()})
    rounds = 0
    bound = sum(len(d) for d in colors) + 1
    while rounds < bound:
        nxt = _relabel([{x: key(c, x) for x in domain} for (domain, _, key), c in zip(setups, colors)])
        count = len({c for d in nxt for c in d.values()})
        if count == n_classes:
            break
        colors, n_classes = nxt, count
        rounds += 1
    return [Coloring(c, rounds) for c in colors]


def _single(algorithm):
    def run(g: nx.Graph, initial=None) -> Coloring:
        return refine_jointly([g], algorithm, None if initial is None else [initial])[0]
    run.__name__ = algorithm
    return run


wl1 = _single("wl1")
fwl2 = _single("fwl2")
owl2 = _single("owl2")


def kwl(g: nx.Graph, k: int, folklore: bool = False) -> Coloring:
    if k not in (2, 3):
        raise ValueError("k-tuple refinement is implemented for k in {2, 3}")
    return refine_jointly([g], f"{'f' if folklore else 'o'}wl{k}")[0]


def distinguishes(g1: nx.Graph, g2: nx.Graph, algorithm: str) -> tuple[bool, int]:
    """Whether ``algorithm`` tells the graphs apart, and the rounds to stability."""
    c1, c2 = refine_jointly([g1, g2], algorithm)
    return c1.histogram() != c2.histogram(), c1.rounds


def corpus_classes(graphs, algorithm: str) -> list[int]:
    """Class id per graph; equal ids mean the algorithm cannot tell them apart."""
    colorings = refine_jointly(graphs, algorithm)
    keys = [tuple(sorted(c.histogram().items())) for c in colorings]
    ids = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [ids[k] for k in keys]


def small_graphs(max_vertices: int = 6) -> list[nx.Graph]:
    """Every graph with 1..``max_vertices`` vertices, up to isomorphism."""
    from networkx.generators.atlas import graph_atlas_g

    return [g for g in graph_atlas_g() if 1 <= g.number_of_nodes() <= max_vertices]


def read_edge_list(path) -> nx.Graph:
    """One ``u v`` edge or a lone vertex per line; ``#`` starts a comment."""
    g = nx.Graph()
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            g.add_node(parts[0])
        elif len(parts) == 2:
            g.add_edge(parts[0], parts[1])
        else:
            raise ValueError(f"{path}:{lineno}: expected 'u v' or a single vertex")
    return g
