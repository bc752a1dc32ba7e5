"""Decomposition engine: the layered cycle-finding algorithms.

Layers, innermost first:
  one_round_short_cycle  -- one contraction round on a low-diameter piece
  improved_short_cycle   -- LDD + one_round loop, O(m sqrt(n)) flavor
  short_cycle_decomp     -- recursive contraction + sparsification
  decompose              -- driver turning any multigraph into edge-disjoint
                            short cycles plus at most 20n leftover edges

The inner algorithms require m = 10n on entry and consume (mutate) the
graph they are given; `decompose` works on a private copy of its input.
"""
from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import (GraphError, MultiGraph, SpanningTree, bfs_tree_np,
                    contract, tree_path)
from .ldd import LddError, low_diam_decomp
from .primitives import (Cycle, LabeledTree, VertexDisjointCycleSet,
                         graph_reduce, naive_short_cycle, pull_up,
                         sparsify, split_circuit, tree_split)
from .rng import mix64


@dataclass(frozen=True)
class EngineConfig:
    c: int = 1
    seed: int = 0
    beta: Fraction = Fraction(1, 12)
    vertex_target_divisor: int = 10
    small_n_cutoff: int = 100
    ldd_diam_constant: int = 4
    ldd_max_retries: int = 20
    max_round_budget: int | None = None   # None: 100*sqrt(n) / 100*k default
    greedy_rounds: bool = True            # keep extracting past the target

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("c must be >= 1")
        if not (0 < self.beta <= 1):
            raise ValueError("beta must be in (0, 1]")


@dataclass
class LevelStats:
    level: int
    edges_processed: int = 0
    rounds: int = 0
    ldd_retries: int = 0
    cycles_found: int = 0


@dataclass
class CycleDecomposition:
    cycles: list[Cycle]
    leftover: set[int]
    source_m: int
    source_n: int
    level_stats: list[LevelStats] = field(default_factory=list)

    @property
    def cycle_edge_count(self) -> int:
        return sum(len(c.edges) for c in self.cycles)

    def max_cycle_length(self) -> int:
        return max((len(c) for c in self.cycles), default=0)


class EngineFailure(GraphError):
    """Round budget exhausted or LDD hard failure; `partial` holds whatever
    was extracted before the failure."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class _Ctx:
    """Per-run bookkeeping: seed stream and per-level statistics."""

    def __init__(self, cfg: EngineConfig):
        self.cfg = cfg
        self.stream = 0
        self.levels: dict[int, LevelStats] = {}

    def next_seed(self) -> int:
        self.stream += 1
        return mix64(self.cfg.seed, self.stream)

    def stats(self, level: int) -> LevelStats:
        if level not in self.levels:
            self.levels[level] = LevelStats(level=level)
        return self.levels[level]

    def stats_list(self) -> list[LevelStats]:
        return [self.levels[k] for k in sorted(self.levels)]


def _isqrt_ceil(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1


def _introot(x: int, p: int) -> int:
    """floor(x ** (1/p)) without float drift."""
    if x < 1:
        return 0
    r = int(round(x ** (1.0 / p)))
    while r ** p > x:
        r -= 1
    while (r + 1) ** p <= x:
        r += 1
    return r


def _local_degrees(g: MultiGraph, vertices, _mark: bytearray | None = None):
    """Degrees inside the induced subgraph on `vertices` (loops count 2).
    Returns (degrees, edge_count). `_mark` is an optional shared scratch
    byte array; touched entries are reset before returning."""
    mark = bytearray(g.n_total) if _mark is None else _mark
    for v in vertices:
        mark[v] = 1
    degs: dict[int, int] = {}
    twice = 0
    eu, ev = g.eu, g.ev
    for v in vertices:
        d = 0
        for e in g.incident(v):
            u, w = eu[e], ev[e]
            if u == w:
                d += 2
            elif mark[w if u == v else u]:
                d += 1
        degs[v] = d
        twice += d
    for v in vertices:
        mark[v] = 0
    return degs, twice // 2


# Cluster size at which one_round switches to the vectorized scan.
_VEC_CUTOFF = 4096


def _cluster_tree(adj_np, root: int, n_total: int, cnp):
    """BFS spanning tree of root's center class, confined by center labels,
    plus the maximum tree degree. `adj_np` is a flat adjacency snapshot and
    `cnp` the per-vertex center array."""
    o, pv, pe, ls = bfs_tree_np(adj_np, root, n_total, cnp)
    order = o.tolist()
    parent = dict(zip(order[1:], zip(pv.tolist(), pe.tolist())))
    depth = dict(zip(order, np.repeat(
        np.arange(len(ls) - 1), np.diff(ls)).tolist()))
    tree = SpanningTree(root=root, parent=parent, depth=depth, order=order)
    # Tree degree of v: its child count, plus 1 unless root.
    tdeg = np.bincount(pv, minlength=n_total)[o] + 1
    tdeg[0] -= 1
    return tree, int(tdeg.max())


def _subtree(tree: SpanningTree, part: list[int]) -> SpanningTree:
    """Spanning tree of `part` using only tree edges internal to the part.
    `part` must be connected within the tree (tree_split guarantees it)."""
    pset = set(part)
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in part}
    for v in part:
        pe = tree.parent.get(v)
        if pe is not None and pe[0] in pset:
            adj[v].append(pe)
            adj[pe[0]].append((v, pe[1]))
    root = part[0]
    parent: dict[int, tuple[int, int]] = {}
    depth = {root: 0}
    order = [root]
    head = 0
    while head < len(order):
        v = order[head]
        head += 1
        for w, e in adj[v]:
            if w not in depth:
                depth[w] = depth[v] + 1
                parent[w] = (v, e)
                order.append(w)
    if len(order) != len(part):
        raise GraphError("part not connected within its tree")
    return SpanningTree(root=root, parent=parent, depth=depth, order=order)


def one_round_short_cycle(g: MultiGraph, cfg: EngineConfig,
                          component=None,
                          _mark: bytearray | None = None,
                          _adj=None,
                          _center=None,
                          _adj_np=None,
                          _cnp=None) -> VertexDisjointCycleSet:
    """One contraction round on a connected low-diameter piece.

    Spanning tree -> degree-labeled tree split at threshold 4*ceil(sqrt(m))
    -> contraction without the part-tree edges -> maximal vertex-disjoint
    collection of parallel-pair 2-cycles then self-loops -> pull-up.
    """
    if component is None:
        component = g.active_vertices()
    if not component:
        return VertexDisjointCycleSet()
    eu, ev, ea, inc = g.eu, g.ev, g.eactive, g.inc
    out = VertexDisjointCycleSet()
    if len(component) == 1:
        v = component[0]
        for e in inc[v]:
            if ea[e] and eu[e] == ev[e]:
                out.add(Cycle(edges=[e], vertices=[v]))
                break
        return out
    tree = None
    tree_maxdeg = None
    # One pass: local degrees, internal adjacency, and candidate edge list.
    degs: dict[int, int] = {}
    adj: dict[int, list[tuple[int, int]]] = {}
    edges: list[int] = []
    twice = 0
    if (_adj_np is not None and _cnp is not None
            and len(component) >= _VEC_CUTOFF):
        # Big cluster: masked selection and a vectorized layer BFS replace
        # the per-vertex scan. Edge ids are reordered by (head, id) to match
        # the scan order exactly.
        cid = int(_cnp[component[0]])
        eunp = np.frombuffer(g.eu, dtype=np.int32)
        evnp = np.frombuffer(g.ev, dtype=np.int32)
        eanp = np.frombuffer(g.eactive, dtype=np.uint8)
        ids = np.nonzero((eanp != 0) & (_cnp[eunp] == cid)
                         & (_cnp[evnp] == cid))[0]
        ids = ids[np.argsort(eunp[ids], kind="stable")]
        degl = (np.bincount(eunp[ids], minlength=g.n_total)
                + np.bincount(evnp[ids], minlength=g.n_total))
        degs = {v: int(degl[v]) for v in component}
        edges = ids.tolist()
        twice = 2 * len(edges)
        tree, tree_maxdeg = _cluster_tree(_adj_np, component[0],
                                          g.n_total, _cnp)
        if len(tree.order) != len(component):
            raise GraphError("one_round_short_cycle needs a connected input")
    elif _adj is not None:
        # The component is a cluster of a decomposition whose flat adjacency
        # and center labels the caller still holds; membership is a label
        # compare instead of a mark array.
        starts, tails, eids = _adj
        cid = _center[component[0]]
        for v in component:
            d = 0
            av = []
            for i in range(starts[v], starts[v + 1]):
                w = tails[i]
                if _center[w] != cid:
                    continue
                e = eids[i]
                if w == v:
                    d += 2
                    av.append((e, v))
                    edges.append(e)
                else:
                    d += 1
                    av.append((e, w))
                    if eu[e] == v:
                        edges.append(e)
            degs[v] = d
            adj[v] = av
            twice += d
    else:
        # Scratch mark array, shared across calls by the round loops;
        # touched entries are reset before returning.
        mark = bytearray(g.n_total) if _mark is None else _mark
        for v in component:
            mark[v] = 1
        for v in component:
            d = 0
            av = []
            for e in inc[v]:
                if not ea[e]:
                    continue
                u, w = eu[e], ev[e]
                if u == w:
                    if v == u:
                        d += 2
                        av.append((e, v))
                        edges.append(e)
                else:
                    o = w if u == v else u
                    if mark[o]:
                        d += 1
                        av.append((e, o))
                        if v == u:
                            edges.append(e)
            degs[v] = d
            adj[v] = av
            twice += d
        for v in component:
            mark[v] = 0
    m_i = twice // 2
    if tree is None:
        root = component[0]
        parent: dict[int, tuple[int, int]] = {}
        depth = {root: 0}
        order = [root]
        head = 0
        while head < len(order):
            v = order[head]
            head += 1
            dv = depth[v] + 1
            for e, w in adj[v]:
                if w not in depth:
                    depth[w] = dv
                    parent[w] = (v, e)
                    order.append(w)
        if len(order) != len(component):
            raise GraphError("one_round_short_cycle needs a connected input")
        tree = SpanningTree(root=root, parent=parent, depth=depth, order=order)
    else:
        parent = tree.parent
    if m_i == 0:
        return VertexDisjointCycleSet()
    threshold = 4 * _isqrt_ceil(m_i)
    if 2 * m_i < threshold or len(component) == 1:
        # Single part: contraction would collapse the piece to one vertex
        # with every non-tree edge a loop, and the greedy would keep the
        # smallest-id loop. Lift it along the tree path directly.
        tree_edges = {e for (_, e) in parent.values()}
        best = min((e for e in edges if e not in tree_edges), default=-1)
        if best >= 0:
            pv_, pe_ = tree_path(tree, ev[best], eu[best])
            pe_.append(best)
            out.add(Cycle(edges=pe_, vertices=pv_))
        return out
    else:
        if tree_maxdeg is None:
            tree_deg: dict[int, int] = {v: 0 for v in component}
            for v, (p, _) in tree.parent.items():
                tree_deg[v] += 1
                tree_deg[p] += 1
            tree_maxdeg = max(tree_deg.values())
        lt = LabeledTree(tree=tree, labels=degs,
                         label_cap=max(degs.values()),
                         max_deg=tree_maxdeg)
        parts = tree_split(lt, threshold)
    part_trees = [_subtree(tree, part) for part in parts]
    exclude = set()
    for st in part_trees:
        for (_, e) in st.parent.values():
            exclude.add(e)
    cm = contract(g, parts, exclude, edges=edges)
    h = cm.h
    pair_first: dict[tuple[int, int], int] = {}
    loops: dict[int, int] = {}
    cycles_h = VertexDisjointCycleSet()
    used = set()
    for he in range(h.m_total):
        a, b = h.endpoints(he)
        if a == b:
            if a not in loops:
                loops[a] = he
            continue
        key = (a, b) if a < b else (b, a)
        if key in pair_first:
            first = pair_first[key]
            if first >= 0 and a not in used and b not in used:
                cycles_h.add(Cycle(edges=[first, he], vertices=[key[0], key[1]]))
                used.add(a)
                used.add(b)
                pair_first[key] = -1
        else:
            pair_first[key] = he
    for a in sorted(loops):
        if a not in used:
            cycles_h.add(Cycle(edges=[loops[a]], vertices=[a]))
            used.add(a)
    return pull_up(cm, part_trees, cycles_h)


def _delete_used(g: MultiGraph, cs: VertexDisjointCycleSet, since: int) -> int:
    """Delete vertices of cycles added at index `since` onward; returns the
    number of vertices covered by those cycles."""
    covered = 0
    for cyc in cs.cycles[since:]:
        covered += len(cyc.vertices)
        for v in cyc.vertices:
            g.delete_vertex(v)
    return covered


def _naive_sweep(g: MultiGraph, acc: VertexDisjointCycleSet,
                 vertices=None) -> int:
    found = naive_short_cycle(g, vertices)
    before = len(acc.cycles)
    acc.extend(found)
    return _delete_used(g, acc, before)


def improved_short_cycle(g: MultiGraph, cfg: EngineConfig,
                         _ctx: _Ctx | None = None,
                         _level: int = 0) -> VertexDisjointCycleSet:
    """LDD + one_round loop covering at least m/(10*max_degree) vertices.

    Requires m = 10n on entry. Consumes the graph (covered vertices are
    deleted between rounds).
    """
    ctx = _ctx or _Ctx(cfg)
    n0, m0 = g.n_active, g.m_active
    if m0 != 10 * n0:
        raise GraphError(f"improved_short_cycle requires m = 10n, "
                         f"got n={n0} m={m0}")
    st = ctx.stats(_level)
    st.edges_processed += m0
    acc = VertexDisjointCycleSet()
    if m0 == 0:
        return acc
    delta0 = g.max_degree()
    if n0 <= cfg.small_n_cutoff:
        _naive_sweep(g, acc)
        st.cycles_found += len(acc.cycles)
        return acc
    target_num, target_den = m0, 10 * delta0   # covered >= m0/(10*delta0)
    covered = 0
    budget = cfg.max_round_budget or 100 * _isqrt_ceil(n0)
    rounds = 0
    mark = bytearray(g.n_total)
    while True:
        if covered * target_den >= target_num:
            if not cfg.greedy_rounds:
                break
        if g.n_active == 0:
            break
        if g.n_active <= cfg.small_n_cutoff:
            covered += _naive_sweep(g, acc)
            break
        rounds += 1
        if rounds > budget:
            raise EngineFailure(
                f"improved_short_cycle exhausted its round budget ({budget})",
                partial=acc)
        ldd = low_diam_decomp(g, cfg.beta, ctx.next_seed(),
                              cfg.ldd_diam_constant, cfg.ldd_max_retries)
        st.ldd_retries += ldd.retries
        round_yield = 0
        before = len(acc.cycles)
        for cluster in ldd.clusters:
            found = one_round_short_cycle(g, cfg, cluster, _mark=mark,
                                          _adj=ldd._adj, _center=ldd._center,
                                          _adj_np=ldd._adj_np, _cnp=ldd._center_np)
            acc.extend(found)
        round_yield = _delete_used(g, acc, before)
        covered += round_yield
        st.rounds += 1
        done = covered * target_den >= target_num
        if done and (not cfg.greedy_rounds
                     or round_yield * 4 * target_den < target_num):
            break
        if round_yield == 0 and done:
            break
        if round_yield == 0 and not done:
            # No 1/2-cycles found this round; retry with fresh shifts until
            # the budget runs out rather than failing immediately.
            continue
    if covered * target_den < target_num:
        raise EngineFailure(
            f"improved_short_cycle covered {covered} vertices, "
            f"target {m0}/(10*{delta0})", partial=acc)
    st.cycles_found += len(acc.cycles)
    return acc


def short_cycle_decomp(g: MultiGraph, d: int, cfg: EngineConfig, k: int,
                       _ctx: _Ctx | None = None) -> VertexDisjointCycleSet:
    """Recursive engine: contract tree-split parts, sparsify, recurse,
    pull up. Requires m = 10n; covers at least m/(10*max_degree) vertices.

    At depth d = c-1 this is improved_short_cycle. When the sparsification
    target would not shrink the contracted graph (small k), the round falls
    back to per-cluster one_round calls, which preserves every guarantee
    except the asymptotic runtime.
    """
    ctx = _ctx or _Ctx(cfg)
    if not (0 <= d <= cfg.c - 1):
        raise GraphError(f"depth {d} outside [0, c-1]")
    if d == cfg.c - 1:
        return improved_short_cycle(g, cfg, _ctx=ctx, _level=d)
    n0, m0 = g.n_active, g.m_active
    if m0 != 10 * n0:
        raise GraphError(f"short_cycle_decomp requires m = 10n, "
                         f"got n={n0} m={m0}")
    st = ctx.stats(d)
    st.edges_processed += m0
    acc = VertexDisjointCycleSet()
    if m0 == 0:
        return acc
    delta0 = g.max_degree()
    target_num, target_den = m0, 10 * delta0
    covered = 0
    budget = cfg.max_round_budget or 100 * k
    rounds = 0
    mark = bytearray(g.n_total)
    while True:
        done = covered * target_den >= target_num
        if done and not cfg.greedy_rounds:
            break
        if g.n_active == 0:
            break
        if g.n_active <= cfg.small_n_cutoff:
            covered += _naive_sweep(g, acc)
            break
        rounds += 1
        if rounds > budget:
            raise EngineFailure(
                f"short_cycle_decomp exhausted its round budget ({budget})",
                partial=acc)
        ldd = low_diam_decomp(g, cfg.beta, ctx.next_seed(),
                              cfg.ldd_diam_constant, cfg.ldd_max_retries)
        st.ldd_retries += ldd.retries
        st.rounds += 1
        small = [c for c in ldd.clusters if len(c) <= k]
        big = [c for c in ldd.clusters if len(c) > k]
        small_edges = sum(_local_degrees(g, c, _mark=mark)[1] for c in small)
        before = len(acc.cycles)
        if 4 * small_edges >= m0:
            for cluster in small:
                found = naive_short_cycle(g, cluster)
                acc.extend(found)
        elif not big:
            # Few small-cluster edges and no big clusters: everything left
            # sits on cut edges; extract per-cluster directly.
            for cluster in ldd.clusters:
                found = one_round_short_cycle(
                    g, cfg, cluster, _mark=mark,
                    _adj=ldd._adj, _center=ldd._center,
                    _adj_np=ldd._adj_np, _cnp=ldd._center_np)
                acc.extend(found)
        else:
            parts: list[list[int]] = []
            trees: list[SpanningTree] = []
            exclude: set[int] = set()
            # Reuse the decomposition's adjacency snapshot and center labels:
            # a cluster's internal edges are exactly those whose tails carry
            # the cluster's center, and internal degrees come from one
            # bincount over the non-crossing edges.
            cnp = ldd._center_np
            eunp = np.frombuffer(g.eu, dtype=np.int32)
            evnp = np.frombuffer(g.ev, dtype=np.int32)
            eanp = np.frombuffer(g.eactive, dtype=np.uint8)
            internal = (eanp != 0) & (cnp[eunp] == cnp[evnp])
            degl = (np.bincount(eunp[internal], minlength=g.n_total)
                    + np.bincount(evnp[internal], minlength=g.n_total)).tolist()
            for cluster in big:
                degs = {v: degl[v] for v in cluster}
                tree, tree_maxdeg = _cluster_tree(ldd._adj_np, cluster[0],
                                                  g.n_total, cnp)
                lt = LabeledTree(tree=tree, labels=degs,
                                 label_cap=max(degs.values()),
                                 max_deg=tree_maxdeg)
                for part in tree_split(lt, k):
                    parts.append(part)
                    sub = _subtree(tree, part)
                    trees.append(sub)
                    for (_, e) in sub.parent.values():
                        exclude.add(e)
            cm = contract(g, parts, exclude)
            n_target = max(-(-20 * n0 // k), len(parts))
            m_target = 10 * n_target
            if m_target > cm.h.m_active:
                # Recursion cannot shrink the instance at this k; extract
                # directly from the low-diameter clusters instead.
                for cluster in ldd.clusters:
                    found = one_round_short_cycle(
                        g, cfg, cluster, _mark=mark,
                        _adj=ldd._adj, _center=ldd._center,
                        _adj_np=ldd._adj_np, _cnp=ldd._center_np)
                    acc.extend(found)
            else:
                cm.h.add_vertices(n_target - cm.h.n_total)
                h_sub = sparsify(cm.h, m_target)
                assert h_sub.m_active == 10 * h_sub.n_active
                inner = short_cycle_decomp(h_sub, d + 1, cfg, k, _ctx=ctx)
                pulled = pull_up(cm, trees, inner)
                acc.extend(pulled)
        round_yield = _delete_used(g, acc, before)
        covered += round_yield
        done = covered * target_den >= target_num
        if done and (not cfg.greedy_rounds
                     or round_yield * 4 * target_den < target_num):
            break
        if round_yield == 0 and done:
            break
    if covered * target_den < target_num:
        raise EngineFailure(
            f"short_cycle_decomp covered {covered} vertices, "
            f"target {m0}/(10*{delta0})", partial=acc)
    st.cycles_found += len(acc.cycles)
    return acc


def decompose(g: MultiGraph, cfg: EngineConfig) -> CycleDecomposition:
    """Full (20n, L)-short cycle decomposition of any undirected multigraph.

    While more than 20n edges remain: take the 20n lowest active edge ids,
    reduce to a bounded-degree graph on exactly 2n vertices, run the
    recursive engine, map its cycles back through the vertex splitting
    (splitting circuits into simple cycles), and delete those edges.
    Leftover is whatever remains, at most 20n edges.
    """
    work = g.copy()
    n = work.n_active
    ctx = _Ctx(cfg)
    cycles: list[Cycle] = []
    if n == 0:
        return CycleDecomposition(cycles=[], leftover=set(),
                                  source_m=g.m_active, source_n=0,
                                  level_stats=[])
    k = max(2, _introot(2 * n, cfg.c + 1))
    try:
        while work.m_active > 20 * n:
            chosen = []
            ea = work.eactive
            for e in range(len(ea)):
                if ea[e]:
                    chosen.append(e)
                    if len(chosen) == 20 * n:
                        break
            gp = MultiGraph.__new__(MultiGraph)
            gp.eu, gp.ev = array("i"), array("i")
            gp.eactive = bytearray()
            gp.vactive = bytearray(work.vactive)
            gp.inc = [array("i") for _ in range(work.n_total)]
            gp.deg = array("i", bytes(4 * work.n_total))
            gp.n_active = work.n_active
            gp.m_active = 0
            for e in chosen:
                gp.add_edge(work.eu[e], work.ev[e])
            rmap = graph_reduce(gp, n_override=n)
            h = rmap.h
            if h.n_total > 2 * n:
                raise GraphError("reduction produced more than 2n vertices")
            h.add_vertices(2 * n - h.n_total)
            found = short_cycle_decomp(h, 0, cfg, k, _ctx=ctx)
            removed = 0
            for hc in found.cycles:
                walk_vs = [rmap.origin_vertex[v] for v in hc.vertices]
                walk_es = [chosen[rmap.origin_edge[e]] for e in hc.edges]
                for simple in split_circuit(walk_vs, walk_es):
                    cycles.append(simple)
                    for e in simple.edges:
                        work.delete_edge(e)
                        removed += 1
            if removed == 0:
                raise EngineFailure("driver made no progress", partial=None)
    except (EngineFailure, LddError) as exc:
        partial = CycleDecomposition(
            cycles=cycles, leftover=set(work.active_edges()),
            source_m=g.m_active, source_n=n,
            level_stats=ctx.stats_list())
        raise EngineFailure(str(exc), partial=partial) from exc
    return CycleDecomposition(cycles=cycles,
                              leftover=set(work.active_edges()),
                              source_m=g.m_active, source_n=n,
                              level_stats=ctx.stats_list())
