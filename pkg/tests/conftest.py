"""Shared builders for the test suite."""
import random

import pytest

from shortcycles import MultiGraph


def random_multigraph(rng: random.Random, n: int, m: int,
                      loops: bool = True) -> MultiGraph:
    """Uniform random endpoint pairs; parallel edges always possible."""
    g = MultiGraph(n)
    for _ in range(m):
        u = rng.randrange(n)
        v = rng.randrange(n)
        if not loops:
            while v == u:
                v = rng.randrange(n)
        g.add_edge(u, v)
    return g


def path_graph(n: int) -> MultiGraph:
    g = MultiGraph(n)
    for i in range(n - 1):
        g.add_edge(i, i + 1)
    return g


def cycle_graph(n: int) -> MultiGraph:
    g = MultiGraph(n)
    for i in range(n):
        g.add_edge(i, (i + 1) % n)
    return g


def star_graph(leaves: int) -> MultiGraph:
    """Vertex 0 is the center."""
    g = MultiGraph(leaves + 1)
    for i in range(1, leaves + 1):
        g.add_edge(0, i)
    return g


def recomputed_degrees(g: MultiGraph) -> list[int]:
    """Degree of every vertex slot from the raw edge arrays only."""
    deg = [0] * g.n_total
    for e in range(g.m_total):
        if not g.eactive[e]:
            continue
        u, v = g.eu[e], g.ev[e]
        if u == v:
            deg[u] += 2
        else:
            deg[u] += 1
            deg[v] += 1
    return deg


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
