"""Which refinement tells a 6-cycle from two triangles, and 1-WL vs 2-OWL on small graphs.

Run: python3 demos/03_color_refinement.py
"""

import itertools

import networkx as nx

from rgnnt.wl import corpus_classes, distinguishes, small_graphs

c6 = nx.cycle_graph(6)
triangles = nx.disjoint_union(nx.cycle_graph(3), nx.cycle_graph(3))
for algo in ("wl1", "owl2", "fwl2", "owl3"):
    differ, rounds = distinguishes(c6, triangles, algo)
    print(f"{algo:5s} {'distinguishes' if differ else 'cannot tell apart'} ({rounds} rounds)")

graphs = small_graphs(6)
classes = {algo: corpus_classes(graphs, algo) for algo in ("wl1", "owl2", "fwl2")}
for algo, ids in classes.items():
    print(f"{algo:5s} {len(set(ids))} classes over {len(graphs)} graphs")

pairs = list(itertools.combinations(range(len(graphs)), 2))
agree = all((classes["wl1"][i] != classes["wl1"][j]) == (classes["owl2"][i] != classes["owl2"][j]) for i, j in pairs)
print("wl1 and owl2 separate the same pairs:", agree)

# the pairs that only the folklore variant separates
ids = classes["wl1"]
hard = [(i, j) for i, j in pairs if ids[i] == ids[j]]
for i, j in hard:
    g, h = graphs[i], graphs[j]
    print(f"  {g.number_of_nodes()} vertices, {g.number_of_edges()} edges: "
          f"fwl2 separates = {classes['fwl2'][i] != classes['fwl2'][j]}")
