"""Both sides of the defining relations among simple generators, on random instances.

Each builder returns a list of (relation name, lhs, rhs) with lhs and rhs
morphisms that must be literally equal.
"""
import random

from feyncat import morphisms as M
from feyncat.graph_core import Graph


def apply_gen(g: Graph, kind, data):
    if kind == "graft":
        return M.graft(g, *data)
    if kind == "edge":
        return M.contract_edge(g, data)
    if kind == "virtual":
        return M.virtual_contract(g, *data)
    if kind == "merge":
        return M.merge(g, *data)
    raise ValueError(kind)


def _random_gen(rng, g: Graph):
    opts = []
    if len(g.tails) >= 2:
        opts += ["graft", "virtual"]
    if g.edges:
        opts.append("edge")
    if len(g.vertices) >= 2:
        opts.append("merge")
    if not opts:
        return None
    kind = rng.choice(opts)
    if kind in ("graft", "virtual"):
        return kind, tuple(rng.sample(g.tails, 2))
    if kind == "edge":
        return kind, rng.choice(g.edges)
    return kind, tuple(rng.sample(sorted(g.vertices), 2))


def _transport(kind, data, m: M.GraphMorphism):
    """The same generator data seen in the target of m (names survive, merged
    vertices get their class name); None if it no longer applies."""
    if kind == "merge":
        v, w = (m.phi_V[x] for x in data)
        return None if v == w else (v, w)
    if any(f not in m.target.flags for f in data):
        return None
    return data


def commutation(rng: random.Random, g: Graph):
    """A then B equals B then A for generators with disjoint flag data."""
    a = _random_gen(rng, g)
    b = _random_gen(rng, g)
    if a is None or b is None:
        return []
    if a[0] != "merge" and b[0] != "merge" and set(a[1]) & set(b[1]):
        return []
    if a[0] == b[0] == "merge" and set(a[1]) == set(b[1]):
        return []
    A, B = apply_gen(g, *a), apply_gen(g, *b)
    b2, a2 = _transport(*b, A), _transport(*a, B)
    if b2 is None or a2 is None:
        return []
    lhs = M.compose(apply_gen(A.target, b[0], b2), A)
    rhs = M.compose(apply_gen(B.target, a[0], a2), B)
    return [(f"commute {a[0]}/{b[0]}", lhs, rhs)]


def mixed(rng: random.Random, g: Graph):
    """graft then contract is the virtual contraction; merging the two ends
    and then contracting virtually is the same virtual contraction."""
    if len(g.tails) < 2:
        return []
    s, t = rng.sample(g.tails, 2)
    out = []
    gl = M.graft(g, s, t)
    out.append(("contract after graft", M.compose(M.contract_edge(gl.target, (s, t)), gl),
                M.virtual_contract(g, s, t)))
    v, w = g.boundary[s], g.boundary[t]
    if v != w:
        mg = M.merge(g, v, w)
        out.append(("contract after merge", M.compose(M.virtual_contract(mg.target, s, t), mg),
                    M.virtual_contract(g, s, t)))
    return out


def crossed_iso(rng: random.Random, g: Graph):
    """sigma' . gen = gen^sigma . sigma for a renaming sigma."""
    gen = _random_gen(rng, g)
    if gen is None:
        return []
    kind, data = gen
    fs, vs = sorted(g.flags), sorted(g.vertices)
    fm = dict(zip(fs, rng.sample(fs, len(fs))))
    vm = dict(zip(vs, rng.sample(vs, len(vs))))
    sigma = M.isomorphism(g, fm, vm)
    G = apply_gen(g, kind, data)
    moved = tuple(vm[x] for x in data) if kind == "merge" else tuple(fm[x] for x in data)
    G2 = apply_gen(sigma.target, kind, moved)
    # sigma' on the target of G, read off from sigma
    V = {v: G2.phi_V[sigma.phi_V[v]] for v in G.target.vertices}
    F = {fm[f]: f for f in G.target.flags}
    sigma2 = M.GraphMorphism(G.target, G2.target, V, F, {})
    assert M.is_isomorphism(sigma2)
    return [(f"crossed iso {kind}", M.compose(sigma2, G), M.compose(G2, sigma))]


def all_relations(rng: random.Random, g: Graph):
    return commutation(rng, g) + mixed(rng, g) + crossed_iso(rng, g)
