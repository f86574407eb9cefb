import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fedscan.errors import InputError
from fedscan.graph import (AttributedNetwork, Subgraph, bfs_path, connected_components, induced_subgraph,
                           is_connected, subgraph_set_op)


def net_of(edges, nodes=None, nid="g"):
    nodes = set(nodes or []) | {x for e in edges for x in e}
    return AttributedNetwork.build(nid, edges, {v: 0.5 for v in nodes}, nodes)


TRIANGLE = net_of([("a", "b"), ("b", "c"), ("a", "c")])
PATH = net_of([("a", "b"), ("b", "c")])


def test_induced_triangle_pair():
    s = induced_subgraph(TRIANGLE, {"a", "b"})
    assert s.nodes == {"a", "b"}
    assert s.edges == {("a", "b")}


def test_induced_empty_and_disconnected():
    assert induced_subgraph(TRIANGLE, set()) == Subgraph.empty("g")
    s = induced_subgraph(PATH, {"a", "c"})
    assert s.nodes == {"a", "c"} and not s.edges


def test_induced_unknown_node_named():
    with pytest.raises(InputError, match="'zz'"):
        induced_subgraph(PATH, {"a", "zz"})


def test_network_validation():
    with pytest.raises(InputError):
        AttributedNetwork.build("g", [("a", "a")], {"a": 0.5})
    with pytest.raises(InputError):
        AttributedNetwork.build("g", [("a", "b")], {"a": 0.5, "b": 0.0})
    with pytest.raises(InputError):
        AttributedNetwork.build("g", [("a", "b")], {"a": 0.5})
    # duplicate / reversed edges collapse
    g = AttributedNetwork.build("g", [("b", "a"), ("a", "b")], {"a": 0.5, "b": 1.0})
    assert g.edges == {("a", "b")}


def test_set_ops_examples():
    s1 = Subgraph("g", frozenset({"a", "b"}), frozenset({("a", "b")}))
    s2 = Subgraph("g", frozenset({"b", "c"}), frozenset({("b", "c")}))
    u = subgraph_set_op(s1, s2, "union")
    assert u.nodes == {"a", "b", "c"} and u.edges == {("a", "b"), ("b", "c")}
    d = subgraph_set_op(s1, Subgraph("g", frozenset({"b"}), frozenset()), "difference")
    # literal difference keeps the dangling edge
    assert d.nodes == {"a"} and d.edges == {("a", "b")}
    for mode, expect in (("union", s1), ("intersection", s1), ("difference", Subgraph.empty("g"))):
        assert subgraph_set_op(s1, s1, mode) == expect
    with pytest.raises(InputError):
        subgraph_set_op(s1, Subgraph.empty("other"), "union")
    with pytest.raises(InputError):
        subgraph_set_op(s1, s2, "xor")


def test_connectivity():
    assert is_connected(PATH.whole())
    assert not is_connected(induced_subgraph(PATH, {"a", "c"}))
    assert is_connected(Subgraph.empty("g"))
    assert is_connected(induced_subgraph(PATH, {"b"}))


def test_components_order():
    g = net_of([("a", "b"), ("d", "e")])
    comps = connected_components(g.whole())
    assert [c.nodes for c in comps] == [{"a", "b"}, {"d", "e"}]
    assert connected_components(PATH.whole()) == [PATH.whole()]
    assert connected_components(Subgraph.empty("g")) == []


def test_bfs_path_prefers_shortest():
    g = net_of([("a", "b"), ("b", "c"), ("c", "d"), ("a", "x"), ("x", "d"), ("d", "e")])
    path = bfs_path(g, {"a"}, {"e"})
    assert path[0] == "a" and path[-1] == "e" and len(path) == 4
    assert bfs_path(net_of([("a", "b")], nodes={"c"}), {"a"}, {"c"}) is None


def test_csr_matches_adjacency():
    g = net_of([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")])
    indptr, indices = g.csr
    for i, v in enumerate(g.order):
        nbrs = {g.order[j] for j in indices[indptr[i]:indptr[i + 1]]}
        assert nbrs == set(g.adjacency[v])


@st.composite
def graphs_and_sets(draw):
    n = draw(st.integers(1, 9))
    names = [f"n{i}" for i in range(n)]
    pairs = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    g = net_of(edges, nodes=names)
    a = draw(st.sets(st.sampled_from(names)))
    b = draw(st.sets(st.sampled_from(names)))
    return g, induced_subgraph(g, a), induced_subgraph(g, b)


@settings(max_examples=200, deadline=None)
@given(graphs_and_sets())
def test_set_algebra_properties(data):
    g, s1, s2 = data
    u = subgraph_set_op(s1, s2, "union")
    i = subgraph_set_op(s1, s2, "intersection")
    assert len(u.nodes) + len(i.nodes) == len(s1.nodes) + len(s2.nodes)
    assert induced_subgraph(g, s1.nodes) == s1
    comps = connected_components(s1)
    seen = set()
    for c in comps:
        assert not (seen & c.nodes)
        assert is_connected(c)
        seen |= c.nodes
    assert seen == s1.nodes
