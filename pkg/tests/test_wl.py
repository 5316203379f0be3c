import networkx as nx
import pytest

from rgnnt.wl import SizeCap, distinguishes, fwl2, kwl, owl2, read_edge_list, refine_jointly, wl1

C6 = nx.cycle_graph(6)
TWO_TRIANGLES = nx.disjoint_union(nx.cycle_graph(3), nx.cycle_graph(3))


def test_regular_graph_single_class():
    assert wl1(nx.petersen_graph()).classes() == 1


def test_path_endpoints_split():
    c = wl1(nx.path_graph(3))
    assert c.colors[0] == c.colors[2] != c.colors[1]
    assert c.rounds == 1


@pytest.mark.parametrize("algo,expected", [("wl1", False), ("owl2", False), ("fwl2", True), ("owl3", True)])
def test_c6_vs_two_triangles(algo, expected):
    assert distinguishes(C6, TWO_TRIANGLES, algo)[0] is expected


def test_single_vertex_pair_colouring():
    g = nx.Graph()
    g.add_node("v")
    c = fwl2(g)
    assert list(c.colors) == [("v", "v")] and c.rounds == 0


def test_isomorphic_relabelling():
    g = nx.gnm_random_graph(7, 10, seed=1)
    h = nx.relabel_nodes(g, {v: f"n{(3 * v) % 7}" for v in g})
    for algo in ("wl1", "fwl2", "owl2"):
        assert not distinguishes(g, h, algo)[0]


def test_kwl_wrapper_and_cap():
    assert kwl(C6, 2, folklore=True).histogram() == fwl2(C6).histogram()
    assert kwl(C6, 2).histogram() == owl2(C6).histogram()
    with pytest.raises(SizeCap):
        refine_jointly([nx.path_graph(13)], "owl3")


def test_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# triangle\na b\nb c\nc a\nlonely\n")
    g = read_edge_list(p)
    assert g.number_of_nodes() == 4 and g.number_of_edges() == 3
