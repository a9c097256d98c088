import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chtest import _kernels
from chtest._kernels import reach_many, reach_many_py


def csr(n, edges):
    adj = [sorted({v for u2, v in edges if u2 == u}) for u in range(n)]
    indptr = np.zeros(n + 1, dtype=np.int32)
    indptr[1:] = np.cumsum([len(a) for a in adj])
    indices = np.asarray([v for a in adj for v in a], dtype=np.int32)
    return indptr, indices


def oracle(n, edges, terminal, s):
    # edges leaving a terminal node are never followed, except from the start
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    g.add_edges_from((u, v) for u, v in edges if u == s or not terminal[u])
    out = set(nx.descendants(g, s))
    if any(g.has_edge(u, s) for u in out | {s}):
        out.add(s)
    return sorted(out)


graphs = st.integers(min_value=1, max_value=25).flatmap(lambda n: st.tuples(
    st.just(n),
    st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=4 * n),
    st.lists(st.booleans(), min_size=n, max_size=n),
))


@pytest.mark.parametrize("impl", [reach_many, reach_many_py], ids=["active", "python"])
@settings(max_examples=150, deadline=None)
@given(graph=graphs)
def test_reach_matches_networkx(impl, graph):
    n, edges, term = graph
    indptr, indices = csr(n, edges)
    terminal = np.asarray(term, dtype=np.uint8)
    starts = np.arange(n, dtype=np.int32)
    ptr, nodes = impl(indptr, indices, terminal, starts)
    for s in range(n):
        assert nodes[ptr[s]:ptr[s + 1]].tolist() == oracle(n, edges, term, s)


def test_empty_start_list():
    ptr, nodes = reach_many(np.zeros(2, np.int32), np.zeros(0, np.int32),
                            np.zeros(1, np.uint8), np.zeros(0, np.int32))
    assert ptr.tolist() == [0] and nodes.size == 0


def test_terminal_is_collected_not_expanded():
    # 0 -> 1 (terminal) -> 2
    indptr, indices = csr(3, [(0, 1), (1, 2)])
    terminal = np.asarray([0, 1, 0], np.uint8)
    ptr, nodes = reach_many(indptr, indices, terminal, np.asarray([0, 1], np.int32))
    assert nodes[ptr[0]:ptr[1]].tolist() == [1]
    assert nodes[ptr[1]:ptr[2]].tolist() == [2]


def test_backend_is_named():
    assert _kernels.BACKEND in {"cython", "python"}
