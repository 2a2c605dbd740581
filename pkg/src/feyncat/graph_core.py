"""Graphs as flags, vertices, a boundary map and a flag involution."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from networkx.utils import UnionFind


class GraphError(ValueError):
    """Base class for invalid graph data."""


class NonInvolutive(GraphError):
    pass


class DanglingBoundary(GraphError):
    pass


class UnknownFlag(GraphError):
    pass


class NotSpanning(GraphError):
    pass


class NotConnected(GraphError):
    pass


def _freeze(mapping):
    return tuple(sorted(mapping.items()))


class Graph:
    """An immutable graph (F, V, boundary, involution).

    Identifiers are strings. Edges are the 2-orbits of the involution,
    tails its fixed points.
    """

    __slots__ = ("flags", "vertices", "boundary", "involution", "_key", "_hash")

    def __init__(self, flags, vertices, boundary: Mapping, involution):
        # involution: a total or partial map (missing flags are fixed), or a list of pairs
        if not isinstance(involution, Mapping):
            pairs = {}
            for a, b in involution:
                pairs[a], pairs[b] = b, a
            involution = pairs
        flags = frozenset(flags)
        vertices = frozenset(vertices)
        boundary = dict(boundary)
        involution = {f: involution.get(f, f) for f in flags}
        for f in boundary:
            if f not in flags:
                raise UnknownFlag(f"boundary given for unknown flag {f!r}")
        for f in flags:
            if f not in boundary:
                raise UnknownFlag(f"flag {f!r} has no boundary vertex")
            if boundary[f] not in vertices:
                raise DanglingBoundary(f"flag {f!r} sits on undeclared vertex {boundary[f]!r}")
        for f, g in involution.items():
            if g not in flags:
                raise UnknownFlag(f"involution sends {f!r} to unknown flag {g!r}")
            if involution[g] != f:
                raise NonInvolutive(f"iota({f!r}) = {g!r} but iota({g!r}) = {involution[g]!r}")
        self.flags = flags
        self.vertices = vertices
        self.boundary = boundary
        self.involution = involution
        self._key = (tuple(sorted(flags)), tuple(sorted(vertices)), _freeze(boundary), _freeze(involution))
        self._hash = hash(self._key)

    def __eq__(self, other):
        return isinstance(other, Graph) and self._key == other._key

    def __hash__(self):
        return self._hash

    def __repr__(self):
        es = " ".join(f"{a}-{b}" for a, b in self.edges)
        return f"Graph(V={sorted(self.vertices)}, F={sorted(self.flags)}, E=[{es}])"

    def iota(self, f):
        return self.involution[f]

    @property
    def edges(self) -> list[tuple[str, str]]:
        """Edges as sorted flag pairs, in sorted order."""
        return sorted((f, g) for f, g in self.involution.items() if f < g)

    @property
    def tails(self) -> list[str]:
        return sorted(f for f, g in self.involution.items() if f == g)

    def flags_at(self, v) -> list[str]:
        return sorted(f for f, w in self.boundary.items() if w == v)

    def valency(self, v) -> int:
        return len(self.flags_at(v))

    def is_edge_flag(self, f) -> bool:
        return self.involution[f] != f

    def is_aggregate(self) -> bool:
        return not self.edges

    def is_corolla(self) -> bool:
        return len(self.vertices) == 1 and self.is_aggregate()

    def components(self) -> list[frozenset]:
        """Vertex sets of connected components, sorted by minimal vertex."""
        return vertex_components(self.vertices, ((self.boundary[a], self.boundary[b]) for a, b in self.edges))

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges)

    def surface_euler_characteristic(self) -> int:
        """Euler characteristic of the closed surface realization, 2 chi(graph)."""
        return 2 * self.euler_characteristic()

    def rename(self, flag_map: Mapping | None = None, vertex_map: Mapping | None = None) -> "Graph":
        fm = flag_map or {}
        vm = vertex_map or {}
        F = lambda f: fm.get(f, f)
        W = lambda v: vm.get(v, v)
        return Graph(
            [F(f) for f in self.flags],
            [W(v) for v in self.vertices],
            {F(f): W(v) for f, v in self.boundary.items()},
            {F(f): F(g) for f, g in self.involution.items()},
        )


def new_graph(flags, vertices, boundary, involution) -> Graph:
    flags = list(flags)
    vertices = list(vertices)
    if len(set(flags)) != len(flags):
        raise GraphError("flag identifiers are not distinct")
    if len(set(vertices)) != len(vertices):
        raise GraphError("vertex identifiers are not distinct")
    return Graph(flags, vertices, boundary, involution)


def corolla(flags: Iterable[str], vertex: str = "*") -> Graph:
    flags = list(flags)
    return Graph(flags, [vertex], {f: vertex for f in flags}, {})


def empty_graph() -> Graph:
    return Graph([], [], {}, {})


def vertex_components(vertices, links) -> list[frozenset]:
    uf = UnionFind(vertices)
    for a, b in links:
        uf.union(a, b)
    comps = [frozenset(c) for c in uf.to_sets()]
    return sorted(comps, key=min)


@dataclass(frozen=True)
class TopologicalType:
    b0: int
    b1: int
    chi: int


def topological_type(g: Graph) -> TopologicalType:
    chi = g.euler_characteristic()
    b0 = len(g.components())
    return TopologicalType(b0, b0 - chi, chi)


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    """Disjoint union; identifiers present in both get "L:"/"R:" prefixes."""
    fclash = g1.flags & g2.flags
    vclash = g1.vertices & g2.vertices
    left = g1.rename({f: "L:" + f for f in fclash}, {v: "L:" + v for v in vclash})
    right = g2.rename({f: "R:" + f for f in fclash}, {v: "R:" + v for v in vclash})
    if left.flags & right.flags or left.vertices & right.vertices:
        raise GraphError("renaming collision in disjoint union")
    return Graph(
        left.flags | right.flags,
        left.vertices | right.vertices,
        {**left.boundary, **right.boundary},
        {**left.involution, **right.involution},
    )


def agg(g: Graph) -> Graph:
    """Total dissection: forget all edges."""
    return Graph(g.flags, g.vertices, g.boundary, {})


class Subgraph:
    """Vertex subset of a parent plus an involution on the flags there.

    Every 2-orbit of the sub-involution must be an edge of the parent.
    """

    __slots__ = ("parent", "sub_vertices", "sub_involution")

    def __init__(self, parent: Graph, sub_vertices, sub_involution: Mapping | None = None):
        sub_vertices = frozenset(sub_vertices)
        if not sub_vertices <= parent.vertices:
            raise GraphError("subgraph vertices not in parent")
        flags = [f for f in parent.flags if parent.boundary[f] in sub_vertices]
        inv = {f: (sub_involution or {}).get(f, f) for f in flags}
        for f, g in inv.items():
            if g == f:
                continue
            if g not in inv or inv[g] != f:
                raise NonInvolutive(f"sub-involution not an involution at {f!r}")
            if parent.involution[f] != g:
                raise GraphError(f"{f!r}-{g!r} is not an edge of the parent")
        self.parent = parent
        self.sub_vertices = sub_vertices
        self.sub_involution = inv

    @classmethod
    def from_edges(cls, parent: Graph, edges, vertices=None):
        """Subgraph with the given parent edges; spanning unless vertices given."""
        inv = {}
        verts = set(parent.vertices if vertices is None else vertices)
        for a, b in edges:
            inv[a] = b
            inv[b] = a
            verts.add(parent.boundary[a])
            verts.add(parent.boundary[b])
        return cls(parent, verts, inv)

    def _key(self):
        return (self.parent, self.sub_vertices, _freeze(self.sub_involution))

    def __eq__(self, other):
        return isinstance(other, Subgraph) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Subgraph(V={sorted(self.sub_vertices)}, E={self.edges})"

    @property
    def edges(self) -> list[tuple[str, str]]:
        return sorted((f, g) for f, g in self.sub_involution.items() if f < g)

    @property
    def flags(self):
        return frozenset(self.sub_involution)

    def is_spanning(self) -> bool:
        return self.sub_vertices == self.parent.vertices

    def completed(self) -> "Subgraph":
        """Add the missing vertex-corollas so the subgraph becomes spanning."""
        return Subgraph(self.parent, self.parent.vertices, self.sub_involution)

    def as_graph(self) -> Graph:
        p = self.parent
        return Graph(self.sub_involution, self.sub_vertices,
                     {f: p.boundary[f] for f in self.sub_involution}, self.sub_involution)

    def components(self) -> list[frozenset]:
        p = self.parent
        return vertex_components(self.sub_vertices, ((p.boundary[a], p.boundary[b]) for a, b in self.edges))


def is_forest(s: Subgraph) -> bool:
    return len(s.sub_vertices) - len(s.edges) == len(s.components())


def is_tree(s: Subgraph) -> bool:
    return is_forest(s) and len(s.components()) == 1


def contract_subgraph(g: Graph, s: Subgraph) -> Graph:
    """Gamma / Gamma': vertices are components of s, named by their minimal vertex."""
    if s.parent != g:
        raise GraphError("subgraph belongs to a different graph")
    if not s.is_spanning():
        raise NotSpanning("contract_subgraph needs a spanning subgraph; use Subgraph.completed()")
    name = {}
    for comp in s.components():
        m = min(comp)
        for v in comp:
            name[v] = m
    inner = {f for f, h in s.sub_involution.items() if f != h}
    flags = [f for f in g.flags if f not in inner]
    return Graph(flags, set(name.values()), {f: name[g.boundary[f]] for f in flags},
                 {f: g.involution[f] for f in flags})


def total_contraction(g: Graph) -> Graph:
    """Gamma / Gamma: one vertex per component carrying the tails."""
    return contract_subgraph(g, Subgraph.from_edges(g, g.edges))


def spanning_forests(g: Graph) -> list[Subgraph]:
    """All spanning forests, by brute force over edge subsets."""
    edges = [e for e in g.edges if g.boundary[e[0]] != g.boundary[e[1]]]
    out = []
    for k in range(len(edges) + 1):
        for sub in combinations(edges, k):
            s = Subgraph.from_edges(g, sub)
            if is_forest(s):
                out.append(s)
    return out


def spanning_trees(g: Graph) -> list[Subgraph]:
    if len(g.components()) != 1:
        raise NotConnected("spanning trees need a connected graph")
    n = len(g.vertices) - 1
    edges = [e for e in g.edges if g.boundary[e[0]] != g.boundary[e[1]]]
    out = []
    for sub in combinations(edges, n):
        s = Subgraph.from_edges(g, sub)
        if is_forest(s):
            out.append(s)
    return out
