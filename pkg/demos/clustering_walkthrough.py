"""Watch the low-diameter clustering at work.

Runs the exponential-shift clustering on a long path and on a dense random
graph, then confirms the two guarantees by hand: few edges cut, and every
cluster has small strong diameter in the cut graph.
"""
from fractions import Fraction

from shortcycles import low_diam_decomp, measure_diameter
from shortcycles.io import gnm
from shortcycles.ldd import diameter_cap
from shortcycles.graph import MultiGraph


def path(n):
    g = MultiGraph(n)
    for v in range(n - 1):
        g.add_edge(v, v + 1)
    return g


def show(name, g, beta, seed):
    res = low_diam_decomp(g, beta, seed=seed)
    cut = g.copy()
    for e in res.removed:
        cut.delete_edge(e)
    worst = max(measure_diameter(cut, cl) for cl in res.clusters)
    cap = diameter_cap(beta, g.n_active)
    print(f"{name}: n={g.n_active} m={g.m_active}")
    print(f"  clusters {len(res.clusters)}, cut {len(res.removed)} edges "
          f"(allowed {int(beta * g.m_active)})")
    print(f"  worst measured diameter {worst} (cap {cap})")
    print(f"  retries {res.retries}, truncated shifts {res.truncated_shifts}")


def main():
    beta = Fraction(1, 12)
    show("path", path(2000), beta, seed=3)
    show("gnm", gnm(500, 5000, seed=3), beta, seed=3)


if __name__ == "__main__":
    main()
