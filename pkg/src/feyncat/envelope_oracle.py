"""Brute-force checks of the envelope computations on small comma categories.

Objects are connected graphs (or ribbon graphs) with a fixed tail set S.
Morphisms between them are generated by edge contractions and tail-fixing
isomorphisms; connected components are found with a union-find.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations, product

import networkx as nx
from networkx.utils import UnionFind

from .decorations import (PolycyclicOrder, RibbonGraph, SurfaceType, contract_pairs,
                          surface_type)
from .graph_core import Graph, NotConnected, is_forest, Subgraph, spanning_trees
from .morphisms import SizeLimitExceeded, _iso_search, contract_edge, find_isomorphism


@dataclass(frozen=True)
class CommaObjectClass:
    representative: object
    invariant: object
    size: int = 1

    def __str__(self):
        return f"{self.invariant} [{self.size} objects]"


# -- canonical keys ---------------------------------------------------------

def _vertex_inv(g: Graph, v):
    fl = g.flags_at(v)
    tails = tuple(sorted(f for f in fl if g.involution[f] == f))
    loops = sum(1 for f in fl if g.involution[f] != f and g.boundary[g.involution[f]] == v)
    return (len(fl), loops, tails)


def graph_key(g: Graph) -> tuple:
    """Canonical key under isomorphisms fixing every tail."""
    inv = {v: _vertex_inv(g, v) for v in g.vertices}
    verts = sorted(g.vertices, key=lambda v: (inv[v], v))
    blocks = []
    for v in verts:
        if blocks and inv[blocks[-1][0]] == inv[v]:
            blocks[-1].append(v)
        else:
            blocks.append([v])
    edges = [(g.boundary[a], g.boundary[b]) for a, b in g.edges]
    tails = [(f, g.boundary[f]) for f in g.tails]
    best = None
    for choice in product(*(permutations(b) for b in blocks)):
        order = [v for blk in choice for v in blk]
        pos = {v: i for i, v in enumerate(order)}
        es = tuple(sorted(tuple(sorted((pos[a], pos[b]))) for a, b in edges))
        key = (es, tuple((f, pos[v]) for f, v in tails))
        if best is None or key < best:
            best = key
    return (tuple(inv[v] for v in verts), best)


def ribbon_key(rg: RibbonGraph) -> tuple:
    """Canonical key of a connected ribbon graph under tail-fixing isomorphisms.

    Flags are numbered in depth-first order along sigma and iota from a
    start flag: the least tail if there is one, else every flag is tried.
    """
    g = rg.graph
    if not g.flags:
        return ("bare", len(g.vertices))
    sigma = rg.sigma()
    starts = [min(g.tails)] if g.tails else sorted(g.flags)
    best = None
    for s in starts:
        num = {}
        stack = [s]
        while stack:
            f = stack.pop()
            if f in num:
                continue
            num[f] = len(num)
            stack.append(g.involution[f])
            stack.append(sigma[f])
        if len(num) != len(g.flags):
            raise NotConnected("ribbon_key needs a connected graph")
        code = []
        for f in sorted(num, key=num.get):
            j = g.involution[f]
            code.append((num[sigma[f]], ("t", f) if j == f else ("e", num[j])))
        code = tuple(code)
        if best is None or code < best:
            best = code
    return best


# -- enumeration ------------------------------------------------------------

def _check_size(S, max_edges):
    if len(S) > 6 or max_edges > 6:
        raise SizeLimitExceeded("enumeration limited to |S| <= 6 and max_edges <= 6")


def _build(S, n_vertices, edge_pairs, tail_at) -> Graph:
    verts = [f"v{i}" for i in range(n_vertices)]
    boundary = {t: verts[tail_at[i]] for i, t in enumerate(S)}
    inv = []
    for k, (a, b) in enumerate(edge_pairs):
        fa, fb = f"h{k}a", f"h{k}b"
        boundary[fa], boundary[fb] = verts[a], verts[b]
        inv.append((fa, fb))
    return Graph(boundary, verts, boundary, inv)


def enumerate_connected_graphs(S, max_edges: int) -> list[Graph]:
    """Connected graphs with tail set S and at most max_edges edges, up to tail-fixing iso."""
    S = sorted(S)
    _check_size(S, max_edges)
    out = {}
    for E in range(max_edges + 1):
        for V in range(1, E + 2):
            slots = [(a, b) for a in range(V) for b in range(a, V)]
            for edges in combinations_with_replacement(slots, E):
                comps = UnionFind(range(V))
                for a, b in edges:
                    comps.union(a, b)
                if len(list(comps.to_sets())) != 1:
                    continue
                for tail_at in product(range(V), repeat=len(S)):
                    g = _build(S, V, edges, tail_at)
                    k = graph_key(g)
                    if k not in out:
                        out[k] = g
    return [out[k] for k in sorted(out, key=lambda k: (len(out[k].edges), len(out[k].vertices), repr(k)))]


def enumerate_ribbon_graphs(S, max_edges: int) -> list[RibbonGraph]:
    """Connected ribbon graphs with tail set S, at most max_edges edges, up to iso."""
    out = {}
    for g in enumerate_connected_graphs(S, max_edges):
        per_vertex = []
        for v in sorted(g.vertices):
            fl = g.flags_at(v)
            if not fl:
                per_vertex.append([(v, [])])
                continue
            first, rest = fl[0], fl[1:]
            per_vertex.append([(v, [[first, *p]]) for p in permutations(rest)])
        for choice in product(*per_vertex):
            rg = RibbonGraph(g, dict(choice))
            k = ribbon_key(rg)
            if k not in out:
                out[k] = rg
    return list(out.values())


def ribbon_contract(rg: RibbonGraph, e) -> RibbonGraph:
    """Contract a non-loop edge, splicing the two cyclic orders."""
    g = rg.graph
    s, t = e
    m = contract_edge(g, (s, t))
    sig = contract_pairs(rg.sigma(), [(s, t)])
    tgt = m.target
    orders = {v: PolycyclicOrder({f: sig[f] for f in tgt.flags_at(v)}) for v in tgt.vertices}
    return RibbonGraph(tgt, orders)


# -- pi_0 of the forest-contraction category ---------------------------------

def _non_loop_edges(g: Graph):
    return [(a, b) for a, b in g.edges if g.boundary[a] != g.boundary[b]]


def pi0_forest_contraction(objects, ribbon: bool = False) -> list[CommaObjectClass]:
    """Classes of objects under subforest contractions and tail-fixing isos.

    Every forest contraction is a composite of single edge contractions,
    so the union-find only links an object to its one-edge contractions.
    """
    objects = list(objects)
    key = ribbon_key if ribbon else graph_key
    index = {key(o): o for o in objects}
    uf = UnionFind(index)
    for k, o in index.items():
        g = o.graph if ribbon else o
        for e in _non_loop_edges(g):
            c = ribbon_contract(o, e) if ribbon else contract_edge(g, e).target
            kc = key(c)
            if kc not in index:
                raise KeyError("contraction left the enumerated object set")
            uf.union(k, kc)
    out = []
    for cls in uf.to_sets():
        members = [index[k] for k in cls]
        rep = min(members, key=lambda o: len((o.graph if ribbon else o).vertices))
        if ribbon:
            invs = {next(iter(surface_type(m).values())) for m in members}
        else:
            invs = {1 - m.euler_characteristic() for m in members}
        if len(invs) != 1:
            raise AssertionError(f"class with several invariants: {invs}")
        out.append(CommaObjectClass(rep, invs.pop(), len(members)))
    out.sort(key=lambda c: str(c.invariant))
    return out


def realizable_surface_types(S, max_loops: int) -> set:
    """All (g, p, sigma) on S with b >= 1 and 2g + p + b - 1 <= max_loops."""
    S = sorted(S)
    out = set()
    for perm in permutations(S):
        sigma = PolycyclicOrder(dict(zip(S, perm)))
        b = sigma.orbit_count()
        for L in range(max_loops + 1):
            rest = L + 1 - b
            for g in range(rest // 2 + 1) if rest >= 0 else ():
                out.add(SurfaceType(g, rest - 2 * g, sigma))
    return out


def genus_bijection(S, max_edges: int) -> dict:
    """Check that loop number is a complete invariant of pi_0; returns a report dict."""
    classes = pi0_forest_contraction(enumerate_connected_graphs(S, max_edges))
    invs = [c.invariant for c in classes]
    return {
        "classes": len(classes),
        "invariants": sorted(invs),
        "injective": len(set(invs)) == len(invs),
        "surjective": set(invs) == set(range(max_edges + 1)),
    }


def ribbon_bijection(S, max_loops: int) -> dict:
    """Surface types against pi_0 for ribbon graphs with at most max_loops loops.

    One-vertex words with L loops are only linked through two-vertex graphs
    with L + 1 edges, so the enumeration runs one edge further and then
    keeps the objects with loop number <= max_loops.
    """
    objs = [rg for rg in enumerate_ribbon_graphs(S, max_loops + 1)
            if 1 - rg.graph.euler_characteristic() <= max_loops]
    classes = pi0_forest_contraction(objs, ribbon=True)
    invs = [c.invariant for c in classes]
    target = realizable_surface_types(S, max_loops) if S else None
    return {
        "classes": len(classes),
        "invariants": invs,
        "injective": len(set(invs)) == len(invs),
        "surjective": None if target is None else set(invs) == target,
    }


# -- spanning tree mutations -------------------------------------------------

def spanning_tree_mutation_graph(g: Graph) -> nx.Graph:
    """Spanning trees as nodes (frozensets of edges), adjacent when they differ in one edge."""
    if len(g.edges) > 12:
        raise SizeLimitExceeded("spanning tree graph limited to 12 edges")
    trees = [frozenset(t.edges) for t in spanning_trees(g)]
    T = nx.Graph()
    T.add_nodes_from(trees)
    for a, b in combinations_with_replacement(trees, 2):
        if a != b and len(a - b) == 1:
            T.add_edge(a, b)
    return T


def is_connected(T: nx.Graph) -> bool:
    return T.number_of_nodes() > 0 and nx.is_connected(T)


def tree_exchange(g: Graph, tree, out_edge, in_edge) -> frozenset:
    """Swap one edge of a spanning tree for another, checking the result is a tree."""
    new = (frozenset(tree) - {out_edge}) | {in_edge}
    s = Subgraph.from_edges(g, new)
    if not (is_forest(s) and len(s.components()) == 1):
        raise ValueError("exchange does not give a spanning tree")
    return new


# -- fibers of the nc pushforward -----------------------------------------------

@dataclass(frozen=True)
class FiberClass:
    partition: tuple  # sorted tuple of (block, genus)
    representative: Graph
    labels: tuple
    size: int


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _set_partitions(rest):
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]
        yield [[first]] + p


def classify_nc_fibers(S, bound: int = 2, max_genus: int = 1) -> list[FiberClass]:
    """Aggregates merging onto the corolla on S, classified up to tail-fixing iso.

    Objects: aggregates with flag set S, at most ``bound`` extra flagless
    vertices, genus labels up to ``max_genus``. Two objects are identified
    when a tail-fixing isomorphism matches their labels; the classes are
    then compared with the induced labelled partition of S.
    """
    S = sorted(S)
    if len(S) > 5 or bound > 3:
        raise SizeLimitExceeded("nc fiber enumeration limited to |S| <= 5 and bound <= 3")
    objects = []
    for parts in _set_partitions(S):
        for extra in range(bound + 1):
            blocks = [sorted(b) for b in parts] + [[] for _ in range(extra)]
            n = len(blocks)
            verts = [f"u{i}" for i in range(n)]
            g = Graph(S, verts, {f: verts[i] for i, b in enumerate(blocks) for f in b}, {})
            for labels in product(range(max_genus + 1), repeat=n):
                objects.append((g, dict(zip(verts, labels))))
    reps: list = []
    for g, lab in objects:
        part = _labelled_partition(g, lab)
        for i, (h, hlab, hpart, count) in enumerate(reps):
            if _label_iso(g, lab, h, hlab):
                if hpart != part:
                    raise AssertionError("isomorphic objects with different partitions")
                reps[i] = (h, hlab, hpart, count + 1)
                break
        else:
            reps.append((g, lab, part, 1))
    parts = [r[2] for r in reps]
    if len(set(parts)) != len(parts):
        raise AssertionError("two classes share a labelled partition")
    return [FiberClass(p, g, tuple(sorted(lab.items())), c) for g, lab, p, c in reps]


def _labelled_partition(g: Graph, labels) -> tuple:
    return tuple(sorted((tuple(g.flags_at(v)), labels[v]) for v in g.vertices))


def _label_iso(g1, l1, g2, l2) -> bool:
    if find_isomorphism(g1, g2, fix_tails=True) is None:
        return False
    for vm, _ in _iso_search(g1, g2, fix_tails=True):
        if all(l1[v] == l2[vm[v]] for v in g1.vertices):
            return True
    return False


# -- reports ----------------------------------------------------------------

def report_lines(classes) -> list[str]:
    return [f"class {i}: {c}" for i, c in enumerate(classes)]
