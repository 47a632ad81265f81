import networkx as nx

from phidiag.graphs import backward_closure, bfs_path, cyclic_nodes, nontrivial_sccs


def _graph() -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_edges_from([("a", "b"), ("b", "c"), ("c", "b"), ("d", "d"), ("e", "a"), ("c", "f")])
    return g


def test_cycles():
    g = _graph()
    assert sorted(map(sorted, nontrivial_sccs(g))) == [["b", "c"], ["d"]]
    assert cyclic_nodes(g) == {"b", "c", "d"}


def test_backward_closure():
    g = _graph()
    assert backward_closure(g, ["b"]) == {"a", "b", "c", "e"}
    assert backward_closure(g, ["f", "d"]) == {"a", "b", "c", "d", "e", "f"}
    assert backward_closure(g, ["e"]) == {"e"}
    assert backward_closure(g, []) == frozenset()


def test_bfs_path():
    g = _graph()

    def succ(v):
        return [(f"{v}{w}", w) for w in sorted(g.successors(v))]

    assert bfs_path(succ, ["e"], lambda v: v == "f") == ("e", [("ea", "a"), ("ab", "b"), ("bc", "c"), ("cf", "f")])
    assert bfs_path(succ, ["b"], lambda v: v == "b") == ("b", [])
    assert bfs_path(succ, ["b"], lambda v: v == "b", first_step=True) == ("b", [("bc", "c"), ("cb", "b")])
    assert bfs_path(succ, ["a"], lambda v: v == "f", allowed={"a", "b"}) is None
    assert bfs_path(succ, ["f"], lambda v: v == "a") is None
