"""Oracle behavior: validity checks, diameter, brute-force packing."""
import math

import pytest

from shortcycles import (CycleDecomposition, EngineConfig, GraphError,
                         MultiGraph, brute_force_short_cycles, decompose,
                         measure_diameter, naive_short_cycle,
                         verify_decomposition)
from shortcycles.io import gnm
from shortcycles.primitives import Cycle

from conftest import cycle_graph, path_graph, random_multigraph, star_graph


def _dec(cycles, leftover, g):
    return CycleDecomposition(cycles=cycles, leftover=set(leftover),
                              source_m=g.m_active, source_n=g.n_active)


def test_whole_cycle_valid():
    g = cycle_graph(5)
    d = _dec([Cycle(edges=[0, 1, 2, 3, 4], vertices=[0, 1, 2, 3, 4])], [], g)
    rep = verify_decomposition(g, d, 0, 5)
    assert rep.valid
    assert rep.max_cycle_length == 5
    assert rep.coverage_fraction == 1.0


def test_all_leftover_valid():
    g = path_graph(6)
    rep = verify_decomposition(g, _dec([], range(5), g), 5, 10)
    assert rep.valid
    assert rep.k_hat_observed == 5


def test_duplicate_edge_flagged():
    g = cycle_graph(5)
    d = _dec([Cycle(edges=[0, 1, 2, 3, 4], vertices=[0, 1, 2, 3, 4]),
              Cycle(edges=[0], vertices=[0])], [], g)
    rep = verify_decomposition(g, d, 0, 5)
    assert not rep.valid
    assert sum(v.kind == "duplicate" for v in rep.violations) == 1


def test_uncovered_edge_flagged():
    g = cycle_graph(3)
    rep = verify_decomposition(g, _dec([], [0, 1], g), 5, 5)
    assert not rep.valid
    assert any(v.kind == "uncovered" for v in rep.violations)


def test_length_violation_flagged():
    g = cycle_graph(5)
    d = _dec([Cycle(edges=[0, 1, 2, 3, 4], vertices=[0, 1, 2, 3, 4])], [], g)
    rep = verify_decomposition(g, d, 0, 4)
    assert not rep.valid
    assert any(v.kind == "length" for v in rep.violations)


def test_leftover_bound_flagged():
    g = path_graph(6)
    rep = verify_decomposition(g, _dec([], range(5), g), 3, 10)
    assert not rep.valid
    assert any(v.kind == "leftover" for v in rep.violations)


def test_incidence_violation_flagged():
    g = cycle_graph(4)
    d = _dec([Cycle(edges=[0, 2], vertices=[0, 1])], [1, 3], g)
    rep = verify_decomposition(g, d, 5, 5)
    assert not rep.valid
    assert any(v.kind == "incidence" for v in rep.violations)


def test_dangling_edge_raises():
    g = cycle_graph(3)
    d = _dec([Cycle(edges=[9], vertices=[0])], [0, 1, 2], g)
    with pytest.raises(GraphError):
        verify_decomposition(g, d, 5, 5)


def test_corruption_sensitivity():
    """Single-edit corruptions of real engine output all get caught."""
    g = gnm(64, 2000, seed=11)
    dec = decompose(g, EngineConfig(c=1, seed=11))
    assert dec.cycles
    base = verify_decomposition(g, dec, 20 * 64, 10 ** 9)
    assert base.valid

    a = _dec([Cycle(list(c.edges), list(c.vertices)) for c in dec.cycles],
             dec.leftover, g)
    a.cycles[0].edges.pop()  # shorten one cycle by an edge
    a.cycles[0].vertices.pop()
    assert not verify_decomposition(g, a, 20 * 64, 10 ** 9).valid

    b = _dec([Cycle(list(c.edges), list(c.vertices)) for c in dec.cycles],
             dec.leftover, g)
    b.leftover.add(b.cycles[0].edges[0])
    assert not verify_decomposition(g, b, 20 * 64, 10 ** 9).valid

    c = _dec([Cycle(list(c.edges), list(c.vertices)) for c in dec.cycles],
             set(dec.leftover), g)
    dropped = c.leftover.pop()
    assert not verify_decomposition(g, c, 20 * 64, 10 ** 9).valid


# -- measure_diameter -------------------------------------------------------

def test_diameter_singleton():
    assert measure_diameter(MultiGraph(1), [0]) == 0


def test_diameter_c6():
    assert measure_diameter(cycle_graph(6), range(6)) == 3


def test_diameter_star():
    assert measure_diameter(star_graph(9), range(10)) == 2


def test_diameter_disconnected_raises():
    g = MultiGraph(3)
    g.add_edge(0, 1)
    with pytest.raises(GraphError):
        measure_diameter(g, [0, 1, 2])


def _floyd_warshall_diameter(g, comp):
    idx = {v: i for i, v in enumerate(comp)}
    k = len(comp)
    inf = float("inf")
    dist = [[0 if i == j else inf for j in range(k)] for i in range(k)]
    for e in g.active_edges():
        u, v = g.eu[e], g.ev[e]
        if u in idx and v in idx and u != v:
            dist[idx[u]][idx[v]] = dist[idx[v]][idx[u]] = 1
    for h in range(k):
        for i in range(k):
            dh = dist[i][h]
            if dh == inf:
                continue
            row = dist[h]
            for j in range(k):
                if dh + row[j] < dist[i][j]:
                    dist[i][j] = dh + row[j]
    return max(max(row) for row in dist)


def test_diameter_matches_floyd_warshall(rng):
    from shortcycles import connected_components
    for _ in range(15):
        g = random_multigraph(rng, 20, 40)
        for comp in connected_components(g):
            assert measure_diameter(g, comp) == \
                _floyd_warshall_diameter(g, comp)


# -- brute_force_short_cycles -----------------------------------------------

def test_brute_k4():
    g = MultiGraph(4)
    for u in range(4):
        for v in range(u + 1, 4):
            g.add_edge(u, v)
    out = brute_force_short_cycles(g, 4)
    assert out.total_vertices == 4


def test_brute_triangle_short_limit():
    out = brute_force_short_cycles(cycle_graph(3), 2)
    assert out.total_vertices == 0


def test_brute_two_triangles():
    g = MultiGraph(6)
    for a, b in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]:
        g.add_edge(a, b)
    out = brute_force_short_cycles(g, 3)
    assert out.total_vertices == 6


def test_brute_refuses_large():
    with pytest.raises(GraphError):
        brute_force_short_cycles(MultiGraph(13), 3)


def test_brute_output_is_valid_packing(rng):
    for _ in range(20):
        g = random_multigraph(rng, 8, 14)
        l_max = max(2, int(2 * math.log2(8)))
        out = brute_force_short_cycles(g, l_max)
        seen = set()
        for c in out.cycles:
            assert len(c) <= l_max
            assert not (set(c.vertices) & seen)
            seen.update(c.vertices)
        assert naive_short_cycle(g).total_vertices <= out.total_vertices
