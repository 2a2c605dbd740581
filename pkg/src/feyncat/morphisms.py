"""Graph morphisms (phi_V, phi_F, iota_phi), generators and factorizations.

phi_F is contravariant: it maps target flags to source flags. Vertices
produced by merging or contracting are named after the least source vertex
of their class, which makes the commutation relations hold on the nose.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .graph_core import (
    Graph,
    GraphError,
    Subgraph,
    agg,
    contract_subgraph,
    vertex_components,
)


class MorphismError(ValueError):
    pass


class NotSurjective(MorphismError):
    pass


class NotInjective(MorphismError):
    pass


class BadInvolution(MorphismError):
    pass


class ConstraintViolation(MorphismError):
    def __init__(self, which: int, where, detail: str = ""):
        self.which = which
        self.where = where
        super().__init__(f"constraint ({which}) violated at {where!r}" + (f": {detail}" if detail else ""))


class SourceTargetMismatch(MorphismError):
    pass


class NotATail(MorphismError):
    pass


class NotAnEdge(MorphismError):
    pass


class SameVertex(MorphismError):
    pass


class SizeLimitExceeded(MorphismError):
    pass


class NonCommutingSquare(MorphismError):
    pass


class EdgeDecompositionFailure(MorphismError):
    pass


class InterfaceMismatch(MorphismError):
    pass


def _frz(d):
    return tuple(sorted(d.items()))


class GraphMorphism:
    __slots__ = ("source", "target", "phi_V", "phi_F", "iota_phi", "_key")

    def __init__(self, source: Graph, target: Graph, phi_V: Mapping, phi_F: Mapping, iota_phi: Mapping | None = None,
                 check: bool = True):
        self.source = source
        self.target = target
        self.phi_V = dict(phi_V)
        self.phi_F = dict(phi_F)
        self.iota_phi = dict(iota_phi or {})
        if check:
            self._validate()
        self._key = (source, target, _frz(self.phi_V), _frz(self.phi_F), _frz(self.iota_phi))

    def __eq__(self, other):
        return isinstance(other, GraphMorphism) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return (f"GraphMorphism(phi_V={dict(sorted(self.phi_V.items()))}, "
                f"phi_F={dict(sorted(self.phi_F.items()))}, iota_phi={dict(sorted(self.iota_phi.items()))})")

    # -- validation ---------------------------------------------------------
    def _validate(self):
        S, T = self.source, self.target
        if set(self.phi_V) != set(S.vertices):
            raise MorphismError("phi_V must be defined exactly on the source vertices")
        for v, w in self.phi_V.items():
            if w not in T.vertices:
                raise MorphismError(f"phi_V({v!r}) = {w!r} is not a target vertex")
        missing = T.vertices - set(self.phi_V.values())
        if missing:
            raise NotSurjective(f"target vertices {sorted(missing)} not hit by phi_V")
        if set(self.phi_F) != set(T.flags):
            raise MorphismError("phi_F must be defined exactly on the target flags")
        for f, g in self.phi_F.items():
            if g not in S.flags:
                raise MorphismError(f"phi_F({f!r}) = {g!r} is not a source flag")
        if len(set(self.phi_F.values())) != len(self.phi_F):
            raise NotInjective("phi_F is not injective")
        image = set(self.phi_F.values())
        rest = S.flags - image
        if set(self.iota_phi) != rest:
            raise BadInvolution("iota_phi must be defined exactly on source flags outside the image of phi_F")
        for f, g in self.iota_phi.items():
            if g == f or g not in rest or self.iota_phi[g] != f:
                raise BadInvolution(f"iota_phi is not a fixed-point-free involution at {f!r}")
        # (1) compatibility with boundaries
        for f2, f in self.phi_F.items():
            if self.phi_V[S.boundary[f]] != T.boundary[f2]:
                raise ConstraintViolation(1, f2, "phi_V . d . phi_F != d'")
        for f, g in self.iota_phi.items():
            if self.phi_V[S.boundary[f]] != self.phi_V[S.boundary[g]]:
                raise ConstraintViolation(1, f, "ghost edge joins different fibers")
        # (2) non-image flags are contracted edges or ghost tail pairs
        for f, g in self.iota_phi.items():
            mate = S.involution[f]
            if mate == f:
                if S.involution[g] != g:
                    raise ConstraintViolation(2, f, "ghost partner is not a tail")
            elif mate != g:
                raise ConstraintViolation(2, f, "contracted edge flag must be paired with its edge mate")
        # (3) source edges meeting the image are preserved
        inv = {f: f2 for f2, f in self.phi_F.items()}
        for f2, f in self.phi_F.items():
            mate = S.involution[f]
            if mate == f:
                continue
            if mate not in inv:
                raise ConstraintViolation(3, f2, "edge mate left the image")
            if T.involution[f2] != inv[mate]:
                raise ConstraintViolation(3, f2, "edge not preserved")

    # -- derived data -------------------------------------------------------
    def image(self) -> frozenset:
        return frozenset(self.phi_F.values())

    def ghost_edges(self) -> list[tuple[str, str]]:
        return sorted((f, g) for f, g in self.iota_phi.items() if f < g)

    def flag_preimage(self) -> dict:
        return {f: f2 for f2, f in self.phi_F.items()}

    def is_identity(self) -> bool:
        return (self.source == self.target and all(k == v for k, v in self.phi_V.items())
                and all(k == v for k, v in self.phi_F.items()) and not self.iota_phi)


def new_morphism(source, target, phi_V, phi_F, iota_phi=None) -> GraphMorphism:
    return GraphMorphism(source, target, phi_V, phi_F, iota_phi)


def identity(g: Graph) -> GraphMorphism:
    return GraphMorphism(g, g, {v: v for v in g.vertices}, {f: f for f in g.flags}, {}, check=False)


def compose(psi: GraphMorphism, phi: GraphMorphism) -> GraphMorphism:
    """psi after phi."""
    if phi.target != psi.source:
        raise SourceTargetMismatch("target of phi differs from source of psi")
    V = {v: psi.phi_V[w] for v, w in phi.phi_V.items()}
    F = {f2: phi.phi_F[f1] for f2, f1 in psi.phi_F.items()}
    iota = dict(phi.iota_phi)
    for f1, g1 in psi.iota_phi.items():
        iota[phi.phi_F[f1]] = phi.phi_F[g1]
    return GraphMorphism(phi.source, psi.target, V, F, iota)


def compose_all(*morphisms: GraphMorphism) -> GraphMorphism:
    """compose_all(a, b, c) = a . b . c"""
    out = morphisms[-1]
    for m in reversed(morphisms[:-1]):
        out = compose(m, out)
    return out


def ghost_graph(phi: GraphMorphism) -> Graph:
    S = phi.source
    return Graph(S.flags, S.vertices, S.boundary, phi.iota_phi)


# -- simple generators ------------------------------------------------------

def _quotient_names(vertices, classes) -> dict:
    """Map each vertex to the least member of its class."""
    name = {v: v for v in vertices}
    for c in classes:
        m = min(c)
        for v in c:
            name[v] = m
    return name


def graft(g: Graph, s, t) -> GraphMorphism:
    for f in (s, t):
        if f not in g.flags or g.involution[f] != f:
            raise NotATail(f"{f!r} is not a tail")
    if s == t:
        raise NotATail("grafting needs two distinct tails")
    inv = dict(g.involution)
    inv[s], inv[t] = t, s
    tgt = Graph(g.flags, g.vertices, g.boundary, inv)
    return GraphMorphism(g, tgt, {v: v for v in g.vertices}, {f: f for f in g.flags}, {})


def _contract_pair(g: Graph, s, t, inv) -> GraphMorphism:
    a, b = g.boundary[s], g.boundary[t]
    name = _quotient_names(g.vertices, [{a, b}])
    flags = g.flags - {s, t}
    tgt = Graph(flags, set(name.values()), {f: name[g.boundary[f]] for f in flags},
                {f: inv[f] for f in flags})
    return GraphMorphism(g, tgt, name, {f: f for f in flags}, {s: t, t: s})


def contract_edge(g: Graph, e) -> GraphMorphism:
    if isinstance(e, str):
        s = e
        t = g.involution.get(s, s)
    else:
        s, t = e
    if s not in g.flags or t not in g.flags or s == t or g.involution[s] != t:
        raise NotAnEdge(f"{e!r} is not an edge")
    return _contract_pair(g, s, t, g.involution)


def merge(g: Graph, v, w) -> GraphMorphism:
    if v == w:
        raise SameVertex("merging a vertex with itself")
    for x in (v, w):
        if x not in g.vertices:
            raise GraphError(f"unknown vertex {x!r}")
    name = _quotient_names(g.vertices, [{v, w}])
    tgt = Graph(g.flags, set(name.values()), {f: name[x] for f, x in g.boundary.items()}, g.involution)
    return GraphMorphism(g, tgt, name, {f: f for f in g.flags}, {})


def virtual_contract(g: Graph, s, t) -> GraphMorphism:
    for f in (s, t):
        if f not in g.flags or g.involution[f] != f:
            raise NotATail(f"{f!r} is not a tail")
    if s == t:
        raise NotATail("virtual contraction needs two distinct tails")
    return _contract_pair(g, s, t, g.involution)


def isomorphism(g: Graph, flag_map: Mapping, vertex_map: Mapping) -> GraphMorphism:
    """The isomorphism g -> g renamed; maps are source name -> target name."""
    tgt = g.rename(flag_map, vertex_map)
    V = {v: vertex_map.get(v, v) for v in g.vertices}
    F = {flag_map.get(f, f): f for f in g.flags}
    return GraphMorphism(g, tgt, V, F, {})


def inclusion(g: Graph) -> GraphMorphism:
    """i_G: agg(G) -> G, a pure grafting."""
    return GraphMorphism(agg(g), g, {v: v for v in g.vertices}, {f: f for f in g.flags}, {})


def total_contraction_morphism(g: Graph) -> GraphMorphism:
    """c_G: G -> G/G."""
    sub = Subgraph.from_edges(g, g.edges)
    tgt = contract_subgraph(g, sub)
    name = _quotient_names(g.vertices, g.components())
    inner = {f: h for f, h in g.involution.items() if f != h}
    return GraphMorphism(g, tgt, name, {f: f for f in tgt.flags}, inner)


def virtual_contraction_of(g: Graph) -> GraphMorphism:
    """v_G = c_G . i_G : agg(G) -> G/G."""
    return compose(total_contraction_morphism(g), inclusion(g))


# -- classes of morphisms ---------------------------------------------------

def _edge_preserving_bijection(phi: GraphMorphism) -> bool:
    S, T = phi.source, phi.target
    for f2, f in phi.phi_F.items():
        if phi.phi_F[T.involution[f2]] != S.involution[f]:
            return False
    return True


def is_isomorphism(phi: GraphMorphism) -> bool:
    return (len(set(phi.phi_V.values())) == len(phi.phi_V) and len(phi.phi_F) == len(phi.source.flags)
            and not phi.iota_phi and _edge_preserving_bijection(phi))


def _fibers(phi: GraphMorphism) -> list[frozenset]:
    fib = {}
    for v, w in phi.phi_V.items():
        fib.setdefault(w, set()).add(v)
    return [frozenset(c) for c in fib.values()]


def _min_named(phi: GraphMorphism) -> bool:
    return all(w == min(c) for c in _fibers(phi) for w in [phi.phi_V[next(iter(c))]])


def is_pure_grafting(phi: GraphMorphism) -> bool:
    return (phi.source.vertices == phi.target.vertices and phi.source.flags == phi.target.flags
            and all(k == v for k, v in phi.phi_V.items()) and all(k == v for k, v in phi.phi_F.items())
            and not phi.iota_phi)


def is_pure_merger(phi: GraphMorphism) -> bool:
    return (phi.source.flags == phi.target.flags and all(k == v for k, v in phi.phi_F.items())
            and not phi.iota_phi and phi.source.involution == phi.target.involution and _min_named(phi))


def is_pure_contraction(phi: GraphMorphism) -> bool:
    S = phi.source
    if not all(k == v for k, v in phi.phi_F.items()):
        return False
    if any(S.involution[f] != g for f, g in phi.iota_phi.items()):
        return False
    comps = vertex_components(S.vertices, ((S.boundary[a], S.boundary[b]) for a, b in phi.ghost_edges()))
    return sorted(map(sorted, comps)) == sorted(map(sorted, _fibers(phi))) and _min_named(phi)


def is_loop_contraction(phi: GraphMorphism) -> bool:
    return is_pure_contraction(phi) and all(k == v for k, v in phi.phi_V.items())


# -- factorization ----------------------------------------------------------

@dataclass
class Factorization:
    """phi = sigma . phi_con . phi_gr . phi_m  (order "merge_first") or
    phi = sigma . phi_m . phi_con . phi_gr  (order "merge_last").

    merger_data maps each merged vertex to the ghost components sharing its fiber.
    """
    sigma: GraphMorphism
    phi_con: GraphMorphism
    phi_gr: GraphMorphism
    phi_m: GraphMorphism
    order: str = "merge_first"
    merger_data: dict = field(default_factory=dict)

    def composite(self) -> GraphMorphism:
        if self.order == "merge_first":
            return compose_all(self.sigma, self.phi_con, self.phi_gr, self.phi_m)
        return compose_all(self.sigma, self.phi_m, self.phi_con, self.phi_gr)


def _graft_involution(phi: GraphMorphism) -> dict:
    """iota_gr: target edges pulled back along phi_F plus the ghost edges."""
    inv = dict(phi.iota_phi)
    T = phi.target
    for f2, f in phi.phi_F.items():
        inv[f] = phi.phi_F[T.involution[f2]]
    return inv


def factorize(phi: GraphMorphism, order: str = "merge_first", aggregate: bool = False) -> Factorization:
    """Canonical factorization through a pure merger, grafting and contraction.

    With aggregate=True the grafting is folded into phi_con (virtual
    contractions) and phi_gr is an identity, as is natural on aggregates.
    """
    S, T = phi.source, phi.target
    fibers = _fibers(phi)
    pi = _quotient_names(S.vertices, fibers)
    sigma_V = {pi[v]: w for v, w in phi.phi_V.items()}
    image = sorted(phi.image())
    inv_gr = _graft_involution(phi)
    ghost_comps = vertex_components(S.vertices, ((S.boundary[a], S.boundary[b]) for a, b in phi.ghost_edges()))
    merger_data = {}
    for c in fibers:
        parts = [g for g in ghost_comps if g <= c]
        if len(parts) > 1:
            merger_data[min(c)] = parts

    bar_vertices = set(pi.values())
    bar = Graph(image, bar_vertices, {f: pi[S.boundary[f]] for f in image}, {f: inv_gr[f] for f in image})
    sigma = GraphMorphism(bar, T, sigma_V, dict(phi.phi_F), {})
    if order == "merge_first":
        g_m = Graph(S.flags, bar_vertices, {f: pi[v] for f, v in S.boundary.items()}, S.involution)
        phi_m = GraphMorphism(S, g_m, pi, {f: f for f in S.flags}, {})
        g_gr = Graph(S.flags, bar_vertices, g_m.boundary, inv_gr)
        ids_v = {v: v for v in bar_vertices}
        ids_f = {f: f for f in S.flags}
        if aggregate:
            phi_gr = identity(g_m)
            phi_con = GraphMorphism(g_m, bar, ids_v, {f: f for f in image}, phi.iota_phi)
        else:
            phi_gr = GraphMorphism(g_m, g_gr, ids_v, ids_f, {})
            phi_con = GraphMorphism(g_gr, bar, ids_v, {f: f for f in image}, phi.iota_phi)
        return Factorization(sigma, phi_con, phi_gr, phi_m, order, merger_data)
    if order != "merge_last":
        raise ValueError(f"unknown order {order!r}")
    g_gr = Graph(S.flags, S.vertices, S.boundary, inv_gr)
    ids_f = {f: f for f in S.flags}
    if aggregate:
        phi_gr = identity(S)
        con_src = S
    else:
        phi_gr = GraphMorphism(S, g_gr, {v: v for v in S.vertices}, ids_f, {})
        con_src = g_gr
    cname = _quotient_names(S.vertices, ghost_comps)
    cverts = set(cname.values())
    g_c = Graph(image, cverts, {f: cname[S.boundary[f]] for f in image}, {f: inv_gr[f] for f in image})
    phi_con = GraphMorphism(con_src, g_c, cname, {f: f for f in image}, phi.iota_phi)
    phi_m = GraphMorphism(g_c, bar, {v: pi[v] for v in cverts}, {f: f for f in image}, {})
    return Factorization(sigma, phi_con, phi_gr, phi_m, order, merger_data)


# -- isomorphism search -----------------------------------------------------

def _vertex_signature(g: Graph, v):
    fl = g.flags_at(v)
    tails = sum(1 for f in fl if g.involution[f] == f)
    loops = sum(1 for f in fl if g.involution[f] != f and g.boundary[g.involution[f]] == v)
    return (len(fl), tails, loops)


def _iso_search(g1: Graph, g2: Graph, fix_tails: bool = False, first_only: bool = False,
                max_nodes: int = 10**6):
    """Backtracking over flag bijections; yields (vertex map, flag map g1->g2)."""
    if len(g1.flags) != len(g2.flags) or len(g1.vertices) != len(g2.vertices):
        return
    if len(g1.edges) != len(g2.edges):
        return
    sig1 = {v: _vertex_signature(g1, v) for v in g1.vertices}
    sig2 = {v: _vertex_signature(g2, v) for v in g2.vertices}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return
    # order flags so that each vertex's flags are consecutive, edges followed quickly
    order = []
    seen_v = []
    for v in sorted(g1.vertices, key=lambda x: (-sig1[x][0], x)):
        if g1.flags_at(v):
            seen_v.append(v)
            order.extend(g1.flags_at(v))
    flagless1 = sorted(v for v in g1.vertices if not g1.flags_at(v))
    flagless2 = sorted(v for v in g2.vertices if not g2.flags_at(v))
    fmap: dict = {}
    used_f: set = set()
    vmap: dict = {}
    used_v: set = set()
    nodes = [0]

    def candidates(f):
        v = g1.boundary[f]
        mate = g1.involution[f]
        if mate != f and mate in fmap:
            yield g2.involution[fmap[mate]]
            return
        if fix_tails and mate == f:
            yield f
            return
        for f2 in sorted(g2.flags):
            yield f2

    def ok(f, f2):
        if f2 not in g2.flags or f2 in used_f:
            return False
        v = g1.boundary[f]
        w = g2.boundary[f2]
        mate, mate2 = g1.involution[f], g2.involution[f2]
        if (mate == f) != (mate2 == f2):
            return False
        if v in vmap:
            if vmap[v] != w:
                return False
        elif w in used_v or sig1[v] != sig2[w]:
            return False
        if mate != f and mate in fmap and fmap[mate] != mate2:
            return False
        if mate == f2 and mate != f:
            pass
        return True

    def rec(i):
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise SizeLimitExceeded(f"isomorphism search exceeded {max_nodes} nodes")
        if i == len(order):
            yield dict(vmap), dict(fmap)
            return
        f = order[i]
        v = g1.boundary[f]
        for f2 in candidates(f):
            if not ok(f, f2):
                continue
            new_v = v not in vmap
            if new_v:
                vmap[v] = g2.boundary[f2]
                used_v.add(vmap[v])
            fmap[f] = f2
            used_f.add(f2)
            yield from rec(i + 1)
            del fmap[f]
            used_f.discard(f2)
            if new_v:
                used_v.discard(vmap[v])
                del vmap[v]

    from itertools import permutations
    for vm, fm in rec(0):
        if first_only:
            vm.update(zip(flagless1, flagless2))
            yield vm, fm
            return
        for perm in permutations(flagless2):
            full = dict(vm)
            full.update(zip(flagless1, perm))
            yield full, fm


def _iso_morphism(g1, g2, vm, fm) -> GraphMorphism:
    return GraphMorphism(g1, g2, vm, {f2: f for f, f2 in fm.items()}, {})


def find_isomorphism(g1: Graph, g2: Graph, fix_tails: bool = False, max_nodes: int = 10**6):
    for vm, fm in _iso_search(g1, g2, fix_tails, first_only=True, max_nodes=max_nodes):
        return _iso_morphism(g1, g2, vm, fm)
    return None


def automorphisms(g: Graph, fix_tails: bool = False, max_nodes: int = 10**6) -> set:
    return {_iso_morphism(g, g, vm, fm) for vm, fm in _iso_search(g, g, fix_tails, max_nodes=max_nodes)}


def iso_equivalent(phi: GraphMorphism, psi: GraphMorphism) -> bool:
    """Isomorphic in the arrow category: beta . phi = psi . alpha for isos alpha, beta."""
    if find_isomorphism(phi.source, psi.source) is None or find_isomorphism(phi.target, psi.target) is None:
        return False
    for vm, fm in _iso_search(phi.source, psi.source):
        alpha = _iso_morphism(phi.source, psi.source, vm, fm)
        lhs_src = compose(psi, alpha)
        for vm2, fm2 in _iso_search(phi.target, psi.target):
            beta = _iso_morphism(phi.target, psi.target, vm2, fm2)
            if compose(beta, phi) == lhs_src:
                return True
    return False


def arrow_automorphisms(phi: GraphMorphism) -> list:
    """Pairs (alpha, beta) of automorphisms with beta . phi = phi . alpha."""
    out = []
    tgt_auts = list(automorphisms(phi.target))
    for alpha in automorphisms(phi.source):
        a = compose(phi, alpha)
        for beta in tgt_auts:
            if compose(beta, phi) == a:
                out.append((alpha, beta))
    return out


# -- double category --------------------------------------------------------

def source_functor(phi: GraphMorphism) -> GraphMorphism:
    """s(phi): agg(source) -> agg(target)."""
    return GraphMorphism(agg(phi.source), agg(phi.target), phi.phi_V, phi.phi_F, phi.iota_phi)


def target_functor(phi: GraphMorphism) -> GraphMorphism:
    """t(phi) between total contractions."""
    S, T = phi.source, phi.target
    cs = total_contraction_morphism(S)
    ct = total_contraction_morphism(T)
    V = {cs.phi_V[v]: ct.phi_V[phi.phi_V[v]] for v in S.vertices}
    F = {f2: phi.phi_F[f2] for f2 in ct.target.flags}
    image = set(F.values())
    iota = {}
    for f in cs.target.flags:
        if f in image:
            continue
        if f in phi.iota_phi:
            iota[f] = phi.iota_phi[f]
        else:
            f2 = phi.flag_preimage()[f]
            iota[f] = phi.phi_F[T.involution[f2]]
    return GraphMorphism(cs.target, ct.target, V, F, iota)


@dataclass(frozen=True)
class TwoCell:
    cell: GraphMorphism
    left: GraphMorphism
    right: GraphMorphism
    top: GraphMorphism
    bottom: GraphMorphism


def _ghost_edge_set(phi: GraphMorphism) -> set:
    return {frozenset(e) for e in phi.ghost_edges()}


def check_edge_decomposition(first: GraphMorphism, second: GraphMorphism) -> bool:
    """E(ghost(second . first)) = E(ghost(first)) disjoint-union first_F(E(ghost(second)))."""
    a = _ghost_edge_set(first)
    b = {frozenset(first.phi_F[f] for f in e) for e in _ghost_edge_set(second)}
    if a & b:
        return False
    return _ghost_edge_set(compose(second, first)) == a | b


def two_cell_square(phi: GraphMorphism) -> TwoCell:
    top = virtual_contraction_of(phi.source)
    bottom = virtual_contraction_of(phi.target)
    left = source_functor(phi)
    right = target_functor(phi)
    if compose(right, top) != compose(bottom, left):
        raise NonCommutingSquare("t(phi) . v_G != v_G' . s(phi)")
    if not (check_edge_decomposition(top, right) and check_edge_decomposition(left, bottom)):
        raise EdgeDecompositionFailure("ghost edges do not decompose")
    return TwoCell(phi, left, right, top, bottom)


def square_to_two_cell(left: GraphMorphism, right: GraphMorphism, src_graph: Graph, tgt_graph: Graph) -> GraphMorphism:
    top = virtual_contraction_of(src_graph)
    bottom = virtual_contraction_of(tgt_graph)
    if left.source != top.source or left.target != bottom.source or right.source != top.target \
            or right.target != bottom.target:
        raise NonCommutingSquare("square boundaries do not match")
    if compose(right, top) != compose(bottom, left):
        raise NonCommutingSquare("square does not commute")
    if not (check_edge_decomposition(top, right) and check_edge_decomposition(left, bottom)):
        raise EdgeDecompositionFailure("ghost edges do not decompose")
    try:
        phi = GraphMorphism(src_graph, tgt_graph, left.phi_V, left.phi_F, left.iota_phi)
    except MorphismError as exc:
        raise EdgeDecompositionFailure(f"square has no filler: {exc}") from exc
    if target_functor(phi) != right:
        raise NonCommutingSquare("right side is not t of the filler")
    return phi


def contraction_connection(phi: GraphMorphism) -> GraphMorphism:
    """The 2-cell c_ghost(phi) filling phi against id (phi pure, between aggregates)."""
    return total_contraction_morphism(ghost_graph(phi))


def grafting_connection(phi: GraphMorphism) -> GraphMorphism:
    """The 2-cell gr: source aggregate -> ghost(phi) filling id against phi."""
    return inclusion(ghost_graph(phi))


# -- graph insertion --------------------------------------------------------

def insert(outer: Graph, inner: Graph) -> Graph:
    """Insert inner into the vertices of outer.

    The total contraction of inner must agree flag-for-flag with the vertex
    corollas of outer.
    """
    if set(inner.tails) != set(outer.flags):
        raise InterfaceMismatch("tails of inner differ from flags of outer")
    used = set()
    flagless_outer = sorted(v for v in outer.vertices if not outer.flags_at(v))
    flagless_inner = []
    for comp in inner.components():
        tails = {f for f in inner.tails if inner.boundary[f] in comp}
        if not tails:
            flagless_inner.append(comp)
            continue
        vs = {outer.boundary[f] for f in tails}
        if len(vs) != 1:
            raise InterfaceMismatch(f"component {sorted(comp)} spans several outer vertices")
        v = vs.pop()
        if set(outer.flags_at(v)) != tails or v in used:
            raise InterfaceMismatch(f"component {sorted(comp)} does not match vertex {v!r}")
        used.add(v)
    if len(flagless_inner) != len(flagless_outer):
        raise InterfaceMismatch("flagless components do not match flagless vertices")
    if used | set(flagless_outer) != set(outer.vertices):
        raise InterfaceMismatch("some outer vertex is not filled")
    inv = dict(inner.involution)
    for f in outer.flags:
        inv[f] = outer.involution[f]
    return Graph(inner.flags, inner.vertices, inner.boundary, inv)


# -- decomposition into simple generators -----------------------------------

@dataclass(frozen=True)
class Step:
    """One simple generator; kind is one of graft, edge, loop, virtual_edge,
    virtual_loop, merge, iso."""
    kind: str
    data: tuple
    morphism: GraphMorphism


def classify_simple(m: GraphMorphism) -> str:
    S = m.source
    if is_isomorphism(m):
        return "iso"
    if is_pure_grafting(m):
        return "graft"
    if is_pure_merger(m):
        return "merge"
    pairs = m.ghost_edges()
    if len(pairs) == 1 and is_pure_contraction(m) or (len(pairs) == 1 and all(k == v for k, v in m.phi_F.items())):
        s, t = pairs[0]
        loop = S.boundary[s] == S.boundary[t]
        virtual = S.involution[s] == s
        return ("virtual_" if virtual else "") + ("loop" if loop else "edge")
    raise MorphismError("not a simple generator")


def simple_steps(phi: GraphMorphism) -> list[Step]:
    """Generators g_1, ..., g_k with phi = g_k ... g_1.

    Order: graftings, then ghost edges joining distinct components (sorted),
    then the remaining ghost edges as loops, then mergers, then the final
    isomorphism. Ghost pairs of tails are done as virtual contractions.
    """
    S, T = phi.source, phi.target
    steps: list[Step] = []
    cur = S
    # graftings of target edges whose source flags are tails
    for f2a, f2b in T.edges:
        a, b = phi.phi_F[f2a], phi.phi_F[f2b]
        if cur.involution[a] == a:
            m = graft(cur, a, b)
            steps.append(Step("graft", (a, b), m))
            cur = m.target
    ghost = phi.ghost_edges()
    # spanning forest first, loops afterwards
    from networkx.utils import UnionFind
    uf = UnionFind(S.vertices)
    forest, loops = [], []
    for a, b in ghost:
        va, vb = S.boundary[a], S.boundary[b]
        if uf[va] != uf[vb]:
            uf.union(va, vb)
            forest.append((a, b))
        else:
            loops.append((a, b))
    for a, b in forest + loops:
        if cur.involution[a] == a:
            m = virtual_contract(cur, a, b)
        else:
            m = contract_edge(cur, (a, b))
        steps.append(Step(classify_simple(m), (a, b), m))
        cur = m.target
    # mergers within fibers
    groups: dict = {}
    for v in sorted(cur.vertices):
        # every current vertex is named by a source vertex
        groups.setdefault(phi.phi_V[v], []).append(v)
    for w, vs in sorted(groups.items()):
        vs = sorted(vs)
        for x in vs[1:]:
            m = merge(cur, min(vs), x)
            steps.append(Step("merge", (min(vs), x), m))
            cur = m.target
    sigma = GraphMorphism(cur, T, {v: phi.phi_V[v] for v in cur.vertices}, dict(phi.phi_F), {})
    if not sigma.is_identity():
        steps.append(Step("iso", (), sigma))
    return steps


def recompose(steps: list[Step], source: Graph) -> GraphMorphism:
    out = identity(source)
    for st in steps:
        out = compose(st.morphism, out)
    return out
