"""Decorations: genus labels, polycyclic orders and surface types.

Actions on general morphisms run through ``simple_steps``; on graphs the
decorations are pulled back along the source aggregate functor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .graph_core import Graph, vertex_components
from .morphisms import GraphMorphism, simple_steps, source_functor


class DecorationError(ValueError):
    pass


class FlagNotInDomain(DecorationError):
    pass


class FlagNotInAnyPart(DecorationError):
    pass


class OddChiPlusN(DecorationError):
    pass


# -- polycyclic orders ------------------------------------------------------

class PolycyclicOrder:
    """A permutation of a finite flag set, read as its cycle decomposition."""

    __slots__ = ("perm", "_key")

    def __init__(self, perm: Mapping):
        perm = dict(perm)
        if sorted(perm.values()) != sorted(perm):
            raise DecorationError("not a bijection")
        self.perm = perm
        self._key = tuple(sorted(perm.items()))

    @classmethod
    def from_cycles(cls, cycles: Iterable[Iterable]) -> "PolycyclicOrder":
        perm = {}
        for c in cycles:
            c = list(c)
            for i, x in enumerate(c):
                if x in perm:
                    raise DecorationError(f"flag {x!r} repeated")
                perm[x] = c[(i + 1) % len(c)]
        return cls(perm)

    @classmethod
    def empty(cls) -> "PolycyclicOrder":
        return cls({})

    def __eq__(self, other):
        return isinstance(other, PolycyclicOrder) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"PolycyclicOrder({self})"

    def __str__(self):
        cs = self.cycles()
        return "".join("(" + " ".join(c) + ")" for c in cs) if cs else "∅"

    def __call__(self, x):
        return self.perm[x]

    @property
    def domain(self) -> frozenset:
        return frozenset(self.perm)

    def cycles(self) -> list[tuple]:
        """Cycles, each rotated to start at its least element, sorted."""
        seen = set()
        out = []
        for x in sorted(self.perm):
            if x in seen:
                continue
            c = [x]
            seen.add(x)
            y = self.perm[x]
            while y != x:
                c.append(y)
                seen.add(y)
                y = self.perm[y]
            out.append(tuple(c))
        return out

    def orbit_count(self) -> int:
        return len(self.cycles())

    def is_cyclic(self) -> bool:
        return self.orbit_count() == 1

    def inverse(self) -> "PolycyclicOrder":
        return PolycyclicOrder({v: k for k, v in self.perm.items()})

    def relabel(self, mapping: Mapping) -> "PolycyclicOrder":
        """Conjugate: the flag x is renamed mapping[x]."""
        m = lambda x: mapping.get(x, x)
        return PolycyclicOrder({m(k): m(v) for k, v in self.perm.items()})

    def union(self, other: "PolycyclicOrder") -> "PolycyclicOrder":
        if self.domain & other.domain:
            raise DecorationError("domains overlap")
        return PolycyclicOrder({**self.perm, **other.perm})

    def restrict(self, subset) -> "PolycyclicOrder":
        return PolycyclicOrder({k: v for k, v in self.perm.items() if k in subset})

    def same_orbit(self, a, b) -> bool:
        y = self.perm[a]
        while y != a:
            if y == b:
                return True
            y = self.perm[y]
        return a == b


def contract_pairs(perm: Mapping, pairs: Iterable[tuple]) -> dict:
    """Remove paired flags from a permutation by first return.

    x goes to sigma(x); while that lands on a removed flag y, continue with
    sigma(partner(y)). This is the splice of cycles along s,t (distinct
    orbits) and the self-gluing of one orbit, including the cases where s,t
    are fixed or adjacent.
    """
    partner = {}
    for a, b in pairs:
        partner[a], partner[b] = b, a
    out = {}
    for x in perm:
        if x in partner:
            continue
        y = perm[x]
        steps = 0
        while y in partner:
            y = perm[partner[y]]
            steps += 1
            if steps > 2 * len(perm) + 2:
                raise DecorationError("first-return map did not terminate")
        out[x] = y
    return out


def glue_poly(sigma_s: PolycyclicOrder, s, sigma_t: PolycyclicOrder, t) -> PolycyclicOrder:
    """Block composition along s, t."""
    if s not in sigma_s.domain or t not in sigma_t.domain:
        raise FlagNotInDomain(f"{s!r} or {t!r} not in the order's domain")
    return PolycyclicOrder(contract_pairs({**sigma_s.perm, **sigma_t.perm}, [(s, t)]))


def self_glue_poly(sigma: PolycyclicOrder, s, t) -> PolycyclicOrder:
    if s not in sigma.domain or t not in sigma.domain or s == t:
        raise FlagNotInDomain(f"{s!r} or {t!r} not in the order's domain")
    return PolycyclicOrder(contract_pairs(sigma.perm, [(s, t)]))


# -- ribbon and polycyclic graphs ------------------------------------------

class RibbonGraph:
    """A graph with a polycyclic order on the flags of every vertex."""

    __slots__ = ("graph", "orders")

    def __init__(self, graph: Graph, orders: Mapping):
        orders = {v: (o if isinstance(o, PolycyclicOrder) else PolycyclicOrder.from_cycles(o))
                  for v, o in orders.items()}
        for v in graph.vertices:
            o = orders.setdefault(v, PolycyclicOrder.empty())
            if set(o.domain) != set(graph.flags_at(v)):
                raise DecorationError(f"order at {v!r} is not on exactly the flags of {v!r}")
        if set(orders) != set(graph.vertices):
            raise DecorationError("orders given for unknown vertices")
        self.graph = graph
        self.orders = orders

    def __eq__(self, other):
        return isinstance(other, RibbonGraph) and self.graph == other.graph and self.orders == other.orders

    def __hash__(self):
        return hash((self.graph, tuple(sorted(self.orders.items()))))

    def __repr__(self):
        return f"RibbonGraph({self.graph!r}, {{{', '.join(f'{v}: {o}' for v, o in sorted(self.orders.items()))}}})"

    def sigma(self) -> dict:
        out = {}
        for o in self.orders.values():
            out.update(o.perm)
        return out

    def is_ribbon(self) -> bool:
        return all(o.orbit_count() == 1 for v, o in self.orders.items() if o.domain)


@dataclass(frozen=True)
class BoundaryCycle:
    flags: tuple
    marked: bool


def boundary_cycles(rg: RibbonGraph) -> list[BoundaryCycle]:
    """Orbits of f -> iota(sigma(f)), sigma applied first.

    A flagless vertex contributes one empty unmarked cycle.
    """
    g = rg.graph
    sigma = rg.sigma()
    step = {f: g.involution[sigma[f]] for f in g.flags}
    out = []
    for c in PolycyclicOrder(step).cycles():
        out.append(BoundaryCycle(c, any(g.involution[f] == f for f in c)))
    for v in sorted(g.vertices):
        if not g.flags_at(v):
            out.append(BoundaryCycle((), False))
    return out


@dataclass(frozen=True)
class SurfaceType:
    g: int
    p: int
    sigma: PolycyclicOrder = field(default_factory=PolycyclicOrder.empty)

    def __post_init__(self):
        if self.g < 0 or self.p < 0:
            raise DecorationError(f"negative surface type entries ({self.g},{self.p})")

    def __str__(self):
        return f"({self.g},{self.p},{self.sigma})"

    @property
    def b(self) -> int:
        return self.sigma.orbit_count()

    def euler_characteristic(self) -> int:
        return 2 - 2 * self.g - self.p - self.b


def _tail_order(cycles: list[BoundaryCycle], g: Graph) -> PolycyclicOrder:
    out = []
    for c in cycles:
        if c.marked:
            out.append([f for f in c.flags if g.involution[f] == f])
    return PolycyclicOrder.from_cycles(out)


def _split_component_counts(rg: RibbonGraph, comp) -> tuple[int, int]:
    """(sum of split genera, unmarked cycles) for one component.

    Polycyclic vertices are read as their orbits split into cyclic
    vertices; the genus is summed over the split pieces.
    """
    g = rg.graph
    # split vertices: one per orbit (flagless vertices stay)
    piece_of = {}
    nodes = []
    for v in sorted(comp):
        cyc = rg.orders[v].cycles()
        if not cyc:
            nodes.append((v, None))
        for i, c in enumerate(cyc):
            nodes.append((v, i))
            for f in c:
                piece_of[f] = (v, i)
    links = [(piece_of[a], piece_of[b]) for a, b in g.edges if g.boundary[a] in comp]
    pieces = vertex_components(nodes, links)
    sigma = rg.sigma()
    step = {f: g.involution[sigma[f]] for f in g.flags if g.boundary[f] in comp}
    cycles = PolycyclicOrder(step).cycles()
    genus = 0
    for piece in pieces:
        V = len(piece)
        E = sum(1 for a, b in links if a in piece)
        n = sum(1 for c in cycles if piece_of[c[0]] in piece) + sum(1 for x in piece if x[1] is None)
        chi = V - E
        if (chi + n) % 2:
            raise OddChiPlusN(f"chi + n = {chi + n} is odd")
        genus += 1 - (chi + n) // 2
    unmarked = sum(1 for c in cycles if all(g.involution[f] != f for f in c))
    unmarked += sum(1 for v in comp if not g.flags_at(v))
    return genus, unmarked


def surface_type(rg: RibbonGraph, genus_labels: Mapping | None = None,
                 puncture_labels: Mapping | None = None) -> dict:
    """SurfaceType of each component, keyed by the component's least vertex."""
    g = rg.graph
    genus_labels = _labels(genus_labels or {})
    puncture_labels = _labels(puncture_labels or {})
    cycles = boundary_cycles(rg)
    out = {}
    for comp in g.components():
        genus, unmarked = _split_component_counts(rg, comp)
        genus += sum(genus_labels.get(v, 0) for v in comp)
        p = unmarked + sum(puncture_labels.get(v, 0) for v in comp)
        mine = [c for c in cycles if c.flags and g.boundary[c.flags[0]] in comp]
        out[min(comp)] = SurfaceType(genus, p, _tail_order(mine, g))
    return out


# -- genus labels -----------------------------------------------------------

@dataclass(frozen=True)
class GenusLabeling:
    labels: dict

    @classmethod
    def from_user(cls, labels: Mapping) -> "GenusLabeling":
        for v, x in labels.items():
            if int(x) != x or x < 0:
                raise DecorationError(f"genus label at {v!r} must be a non-negative integer")
        return cls(dict(labels))

    def __getitem__(self, v):
        return self.labels[v]


def _labels(x) -> dict:
    return dict(x.labels) if isinstance(x, GenusLabeling) else dict(x)


def o_genus_apply(phi: GraphMorphism, labels) -> GenusLabeling:
    """Global formula: sum over the fiber of g(v) plus 1 - chi(ghost fiber)."""
    lab = _labels(labels)
    fib: dict = {}
    for v, w in phi.phi_V.items():
        fib.setdefault(w, []).append(v)
    edges_in: dict = {}
    for a, b in phi.ghost_edges():
        w = phi.phi_V[phi.source.boundary[a]]
        edges_in[w] = edges_in.get(w, 0) + 1
    out = {}
    for w, vs in fib.items():
        chi = len(vs) - edges_in.get(w, 0)
        out[w] = sum(lab.get(v, 0) for v in vs) + 1 - chi
    return GenusLabeling(out)


def o_genus_step(step, labels) -> GenusLabeling:
    """Generator table: glue adds, loop +1, merger m+n-1, iso/graft relabel."""
    lab = _labels(labels)
    m = step.morphism
    if step.kind in ("graft", "iso"):
        return GenusLabeling({m.phi_V[v]: x for v, x in lab.items()})
    if step.kind == "merge":
        v, w = step.data
        out = {m.phi_V[u]: x for u, x in lab.items() if u not in (v, w)}
        out[m.phi_V[v]] = lab.get(v, 0) + lab.get(w, 0) - 1
        return GenusLabeling(out)
    s, t = step.data
    a, b = m.source.boundary[s], m.source.boundary[t]
    out = {m.phi_V[u]: x for u, x in lab.items() if u not in (a, b)}
    if a == b:
        out[m.phi_V[a]] = lab.get(a, 0) + 1
    else:
        out[m.phi_V[a]] = lab.get(a, 0) + lab.get(b, 0)
    return GenusLabeling(out)


# -- polycyclic decorations -------------------------------------------------

def o_poly_step(step, dec: Mapping) -> dict:
    m = step.morphism
    if step.kind == "graft":
        return dict(dec)
    if step.kind == "iso":
        rename = {f: f2 for f2, f in m.phi_F.items()}
        return {m.phi_V[v]: o.relabel(rename) for v, o in dec.items()}
    if step.kind == "merge":
        v, w = step.data
        out = {m.phi_V[u]: o for u, o in dec.items() if u not in (v, w)}
        out[m.phi_V[v]] = dec[v].union(dec[w])
        return out
    s, t = step.data
    a, b = m.source.boundary[s], m.source.boundary[t]
    out = {m.phi_V[u]: o for u, o in dec.items() if u not in (a, b)}
    if a == b:
        out[m.phi_V[a]] = self_glue_poly(dec[a], s, t)
    else:
        out[m.phi_V[a]] = glue_poly(dec[a], s, dec[b], t)
    return out


def o_poly_apply(phi: GraphMorphism, dec: Mapping) -> dict:
    """Per-vertex polycyclic orders pushed along phi, generator by generator."""
    out = dict(dec)
    for st in simple_steps(source_functor(phi)):
        out = o_poly_step(st, out)
    return out


def o_poly_direct(phi: GraphMorphism, dec: Mapping) -> dict:
    """The same action in one go, by first return along all ghost edges."""
    perm = {}
    for o in dec.values():
        perm.update(o.perm)
    new = contract_pairs(perm, phi.ghost_edges())
    rename = phi.flag_preimage()
    out = {w: {} for w in phi.target.vertices}
    for x, y in new.items():
        out[phi.phi_V[phi.source.boundary[x]]][rename[x]] = rename[y]
    return {w: PolycyclicOrder(p) for w, p in out.items()}


# -- surface types ----------------------------------------------------------

def surf_glue(a: SurfaceType, s, b: SurfaceType, t) -> SurfaceType:
    if s not in a.sigma.domain or t not in b.sigma.domain:
        raise FlagNotInDomain(f"{s!r} or {t!r} not a marked point")
    both_fixed = a.sigma(s) == s and b.sigma(t) == t
    return SurfaceType(a.g + b.g, a.p + b.p + (1 if both_fixed else 0), glue_poly(a.sigma, s, b.sigma, t))


def surf_self_glue(a: SurfaceType, s, t) -> SurfaceType:
    sig = a.sigma
    if s not in sig.domain or t not in sig.domain or s == t:
        raise FlagNotInDomain(f"{s!r} or {t!r} not a marked point")
    new = self_glue_poly(sig, s, t)
    if sig(s) == s and sig(t) == t:
        return SurfaceType(a.g + 1, a.p + 1, new)
    if not sig.same_orbit(s, t):
        return SurfaceType(a.g + 1, a.p, new)
    adj = (sig(s) == t) + (sig(t) == s)
    return SurfaceType(a.g, a.p + adj, new)


def surf_merge(a: SurfaceType, b: SurfaceType) -> SurfaceType:
    return SurfaceType(a.g + b.g, a.p + b.p, a.sigma.union(b.sigma))


def o_surf_step(step, dec: Mapping) -> dict:
    m = step.morphism
    if step.kind == "graft":
        return dict(dec)
    if step.kind == "iso":
        rename = {f: f2 for f2, f in m.phi_F.items()}
        return {m.phi_V[v]: SurfaceType(x.g, x.p, x.sigma.relabel(rename)) for v, x in dec.items()}
    if step.kind == "merge":
        v, w = step.data
        out = {m.phi_V[u]: x for u, x in dec.items() if u not in (v, w)}
        out[m.phi_V[v]] = surf_merge(dec[v], dec[w])
        return out
    s, t = step.data
    a, b = m.source.boundary[s], m.source.boundary[t]
    out = {m.phi_V[u]: x for u, x in dec.items() if u not in (a, b)}
    if a == b:
        out[m.phi_V[a]] = surf_self_glue(dec[a], s, t)
    else:
        out[m.phi_V[a]] = surf_glue(dec[a], s, dec[b], t)
    return out


def o_surf_apply(phi: GraphMorphism, dec: Mapping) -> dict:
    """Surface types pushed along phi (pulled back to graphs along s).

    Ghost edges forming a spanning forest are glued first, then the
    remaining ones as self-gluings, then mergers.
    """
    out = dict(dec)
    for st in simple_steps(source_functor(phi)):
        out = o_surf_step(st, out)
    return out


def surf_to_genus(st: SurfaceType) -> int:
    return 2 * st.g + st.p + st.b - 1


def surf_to_euler_poly(st: SurfaceType) -> tuple:
    return (2 * st.g + st.p - 1, st.sigma)


def eulerpoly_to_genus(ep: tuple) -> int:
    l, sigma = ep
    return l + sigma.orbit_count()


def surf_to_npoly(st: SurfaceType) -> tuple:
    return (st.p, st.sigma)


def npoly_to_poly(np_: tuple) -> PolycyclicOrder:
    return np_[1]


def euler_poly_step(step, dec: Mapping) -> dict:
    """Generator action on (l, sigma) pairs, written without g and p."""
    m = step.morphism
    if step.kind == "graft":
        return dict(dec)
    if step.kind == "iso":
        rename = {f: f2 for f2, f in m.phi_F.items()}
        return {m.phi_V[v]: (l, o.relabel(rename)) for v, (l, o) in dec.items()}
    if step.kind == "merge":
        v, w = step.data
        out = {m.phi_V[u]: x for u, x in dec.items() if u not in (v, w)}
        out[m.phi_V[v]] = (dec[v][0] + dec[w][0] + 1, dec[v][1].union(dec[w][1]))
        return out
    s, t = step.data
    a, b = m.source.boundary[s], m.source.boundary[t]
    out = {m.phi_V[u]: x for u, x in dec.items() if u not in (a, b)}
    if a != b:
        (l1, o1), (l2, o2) = dec[a], dec[b]
        bump = 2 if (o1(s) == s and o2(t) == t) else 1
        out[m.phi_V[a]] = (l1 + l2 + bump, glue_poly(o1, s, o2, t))
        return out
    l, o = dec[a]
    if o(s) == s and o(t) == t:
        bump = 3
    elif not o.same_orbit(s, t):
        bump = 2
    else:
        bump = (o(s) == t) + (o(t) == s)
    out[m.phi_V[a]] = (l + bump, self_glue_poly(o, s, t))
    return out


def npoly_step(step, dec: Mapping) -> dict:
    """Generator action on (p, sigma) pairs."""
    m = step.morphism
    if step.kind == "graft":
        return dict(dec)
    if step.kind == "iso":
        rename = {f: f2 for f2, f in m.phi_F.items()}
        return {m.phi_V[v]: (p, o.relabel(rename)) for v, (p, o) in dec.items()}
    if step.kind == "merge":
        v, w = step.data
        out = {m.phi_V[u]: x for u, x in dec.items() if u not in (v, w)}
        out[m.phi_V[v]] = (dec[v][0] + dec[w][0], dec[v][1].union(dec[w][1]))
        return out
    s, t = step.data
    a, b = m.source.boundary[s], m.source.boundary[t]
    out = {m.phi_V[u]: x for u, x in dec.items() if u not in (a, b)}
    if a != b:
        (p1, o1), (p2, o2) = dec[a], dec[b]
        out[m.phi_V[a]] = (p1 + p2 + (o1(s) == s and o2(t) == t), glue_poly(o1, s, o2, t))
        return out
    p, o = dec[a]
    if o(s) == s and o(t) == t:
        bump = 1
    elif not o.same_orbit(s, t):
        bump = 0
    else:
        bump = (o(s) == t) + (o(t) == s)
    out[m.phi_V[a]] = (p + bump, self_glue_poly(o, s, t))
    return out


# -- nc decorations ---------------------------------------------------------

@dataclass(frozen=True)
class NCPart:
    """One entry (g, p, S_i with its polycyclic order) of a labelled partition."""
    g: int
    sigma: PolycyclicOrder
    p: int = 0

    @property
    def flags(self) -> frozenset:
        return self.sigma.domain

    def as_surface(self) -> SurfaceType:
        return SurfaceType(self.g, self.p, self.sigma)


def _sort_parts(parts) -> tuple:
    return tuple(sorted(parts, key=lambda x: (sorted(x.flags), x.g, x.p, str(x.sigma))))


def nc_from(parts: Iterable) -> tuple:
    out = []
    for x in parts:
        if isinstance(x, NCPart):
            out.append(x)
        elif isinstance(x, SurfaceType):
            out.append(NCPart(x.g, x.sigma, x.p))
        else:
            g, flags = x[0], x[1]
            out.append(NCPart(g, PolycyclicOrder({f: f for f in flags}) if not isinstance(flags, PolycyclicOrder)
                              else flags))
    return _sort_parts(out)


def _find(parts, f) -> int:
    for i, x in enumerate(parts):
        if f in x.flags:
            return i
    raise FlagNotInAnyPart(f"flag {f!r} lies in no part")


def nc_apply(generator: tuple, *decs, mode: str = "genus") -> tuple:
    """Action on labelled partitions.

    generator: ("merge",), ("glue", s, t), ("self_glue", s, t) or
    ("iso", flag_map). mode "genus" tracks (g, S_i); mode "surf" also
    tracks p and the polycyclic order of each part.
    """
    kind = generator[0]
    if kind == "merge":
        a, b = decs
        return _sort_parts(list(a) + list(b))
    if kind == "iso":
        (a,) = decs
        fm = generator[1]
        return _sort_parts(NCPart(x.g, x.sigma.relabel(fm), x.p) for x in a)
    s, t = generator[1], generator[2]
    if kind == "glue":
        a, b = decs
        i, j = _find(a, s), _find(b, t)
        rest = [x for k, x in enumerate(a) if k != i] + [x for k, x in enumerate(b) if k != j]
        return _sort_parts(rest + [_nc_glue(a[i], s, b[j], t, mode)])
    if kind == "self_glue":
        (a,) = decs
        i, j = _find(a, s), _find(a, t)
        if i == j:
            x = a[i]
            if mode == "genus":
                new = NCPart(x.g + 1, self_glue_poly(x.sigma, s, t), x.p)
            else:
                st = surf_self_glue(x.as_surface(), s, t)
                new = NCPart(st.g, st.sigma, st.p)
            return _sort_parts([y for k, y in enumerate(a) if k != i] + [new])
        rest = [y for k, y in enumerate(a) if k not in (i, j)]
        return _sort_parts(rest + [_nc_glue(a[i], s, a[j], t, mode)])
    raise DecorationError(f"unknown generator {kind!r}")


def _nc_glue(x: NCPart, s, y: NCPart, t, mode) -> NCPart:
    if mode == "genus":
        return NCPart(x.g + y.g, glue_poly(x.sigma, s, y.sigma, t), x.p + y.p)
    st = surf_glue(x.as_surface(), s, y.as_surface(), t)
    return NCPart(st.g, st.sigma, st.p)


def nc_to_genus(parts) -> int:
    """1 - n + sum of the g_i."""
    return 1 - len(parts) + sum(x.g for x in parts)


def nc_to_surf(parts) -> SurfaceType:
    sigma = PolycyclicOrder.empty()
    for x in parts:
        sigma = sigma.union(x.sigma)
    return SurfaceType(1 - len(parts) + sum(x.g for x in parts), sum(x.p for x in parts), sigma)


def b_plus(d1, d2=()) -> tuple:
    """Connected sum: one part with summed g, p and all cycles."""
    parts = list(d1) + list(d2)
    if not parts:
        return ()
    sigma = PolycyclicOrder.empty()
    for x in parts:
        sigma = sigma.union(x.sigma)
    return (NCPart(sum(x.g for x in parts), sigma, sum(x.p for x in parts)),)


# -- splitting polycyclic vertices -----------------------------------------

@dataclass
class SplitResult:
    ribbon: RibbonGraph
    vertex_class: dict      # new vertex -> original vertex
    class_genus: dict       # original vertex -> genus label


def split_polycyclic_vertex(rg: RibbonGraph, genus_labels: Mapping | None = None,
                            puncture_labels: Mapping | None = None) -> SplitResult:
    """Replace each vertex by one cyclic vertex per orbit plus p_v flagless ones.

    A vertex with no flags also keeps one extra flagless vertex so that it
    does not disappear.
    """
    g = rg.graph
    gl = dict(genus_labels or {})
    pl = dict(puncture_labels or {})
    boundary = {}
    vclass = {}
    orders = {}
    for v in sorted(g.vertices):
        cyc = rg.orders[v].cycles()
        for i, c in enumerate(cyc):
            name = f"{v}#{i}"
            vclass[name] = v
            orders[name] = PolycyclicOrder.from_cycles([c])
            for f in c:
                boundary[f] = name
        extra = pl.get(v, 0) + (0 if cyc else 1)
        for j in range(extra):
            name = f"{v}#p{j}"
            vclass[name] = v
            orders[name] = PolycyclicOrder.empty()
    graph = Graph(g.flags, vclass, boundary, g.involution)
    return SplitResult(RibbonGraph(graph, orders), vclass, {v: gl.get(v, 0) for v in g.vertices})


def merge_polycyclic_classes(split: SplitResult) -> tuple:
    """Inverse of split_polycyclic_vertex: (polycyclic graph, genus, punctures)."""
    rg = split.ribbon
    g = rg.graph
    members: dict = {}
    for new, old in split.vertex_class.items():
        members.setdefault(old, []).append(new)
    boundary = {f: split.vertex_class[v] for f, v in g.boundary.items()}
    orders = {}
    punct = {}
    for old, news in members.items():
        sig = PolycyclicOrder.empty()
        flagless = 0
        for n in news:
            if rg.orders[n].domain:
                sig = sig.union(rg.orders[n])
            else:
                flagless += 1
        orders[old] = sig
        punct[old] = flagless - (0 if sig.domain else 1)
    graph = Graph(g.flags, members, boundary, g.involution)
    return RibbonGraph(graph, orders), dict(split.class_genus), punct


# -- in/out cycles and rooted corollas -------------------------------------

def is_sullivan(rg: RibbonGraph, in_out: Mapping) -> bool:
    """No edge has both flags on in-cycles. in_out maps each cycle (tuple of
    flags, or its BoundaryCycle) to "in" or "out"."""
    cyc_of = {}
    for c in boundary_cycles(rg):
        key = c.flags
        tag = in_out.get(c, in_out.get(key))
        if tag is None and c.flags:
            raise DecorationError(f"cycle {key} is not tagged")
        for f in c.flags:
            cyc_of[f] = tag
    return not any(cyc_of[a] == "in" and cyc_of[b] == "in" for a, b in rg.graph.edges)


def cyclic_to_linear(root, cyclic: PolycyclicOrder) -> list:
    if not cyclic.is_cyclic() or root not in cyclic.domain:
        raise DecorationError("need a single cycle containing the root")
    out = []
    x = cyclic(root)
    while x != root:
        out.append(x)
        x = cyclic(x)
    return out


def linear_to_cyclic(root, order: list) -> PolycyclicOrder:
    return PolycyclicOrder.from_cycles([[root] + list(order)])
