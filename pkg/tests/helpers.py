"""Random instances shared by the test modules."""
import random

from feyncat.graph_core import Graph
from feyncat import morphisms as M
from feyncat.cyclic_words import parse
from feyncat.decorations import PolycyclicOrder, SurfaceType


def random_graph(rng: random.Random, max_vertices=4, max_flags=7, prefix="") -> Graph:
    nv = rng.randint(1, max_vertices)
    nf = rng.randint(0, max_flags)
    vs = [f"{prefix}v{i}" for i in range(nv)]
    fs = [f"{prefix}f{i}" for i in range(nf)]
    bd = {f: rng.choice(vs) for f in fs}
    pool = fs[:]
    rng.shuffle(pool)
    pairs = []
    while len(pool) >= 2 and rng.random() < 0.6:
        pairs.append((pool.pop(), pool.pop()))
    return Graph(fs, vs, bd, pairs)


def random_step(rng: random.Random, g: Graph, kinds=("graft", "edge", "virtual", "merge", "iso")):
    """One random simple generator out of g, or None if nothing applies."""
    options = []
    tails = g.tails
    if "graft" in kinds and len(tails) >= 2:
        options.append("graft")
    if "virtual" in kinds and len(tails) >= 2:
        options.append("virtual")
    if "edge" in kinds and g.edges:
        options.append("edge")
    if "merge" in kinds and len(g.vertices) >= 2:
        options.append("merge")
    if "iso" in kinds:
        options.append("iso")
    if not options:
        return None
    kind = rng.choice(options)
    if kind == "graft":
        return M.graft(g, *rng.sample(tails, 2))
    if kind == "virtual":
        return M.virtual_contract(g, *rng.sample(tails, 2))
    if kind == "edge":
        return M.contract_edge(g, rng.choice(g.edges))
    if kind == "merge":
        return M.merge(g, *rng.sample(sorted(g.vertices), 2))
    return random_iso(rng, g)


def random_iso(rng: random.Random, g: Graph) -> M.GraphMorphism:
    fs = sorted(g.flags)
    vs = sorted(g.vertices)
    fnew = rng.sample(fs, len(fs))
    vnew = rng.sample(vs, len(vs))
    return M.isomorphism(g, dict(zip(fs, fnew)), dict(zip(vs, vnew)))


def random_morphism(rng: random.Random, g: Graph | None = None, steps=None) -> M.GraphMorphism:
    g = g if g is not None else random_graph(rng)
    phi = M.identity(g)
    for _ in range(rng.randint(0, 4) if steps is None else steps):
        m = random_step(rng, phi.target)
        if m is not None:
            phi = M.compose(m, phi)
    return phi


def random_word(rng: random.Random, n_tails, n_loops, prefix=""):
    letters = [f"{prefix}T{i}" for i in range(n_tails)]
    letters += [x for i in range(n_loops) for x in (f"{prefix}x{i}", f"{prefix}x{i}*")]
    rng.shuffle(letters)
    return parse("(" + " ".join(letters) + ")")


def random_poly(rng: random.Random, flags) -> PolycyclicOrder:
    flags = list(flags)
    rng.shuffle(flags)
    cycles = []
    while flags:
        k = rng.randint(1, len(flags))
        cycles.append(flags[:k])
        flags = flags[k:]
    return PolycyclicOrder.from_cycles(cycles)


def random_surface(rng: random.Random, flags) -> SurfaceType:
    return SurfaceType(rng.randint(0, 2), rng.randint(0, 2), random_poly(rng, flags))


def rose(n: int) -> Graph:
    fs = [f"r{i}" for i in range(2 * n)]
    return Graph(fs, ["v"], {f: "v" for f in fs}, [(fs[2 * i], fs[2 * i + 1]) for i in range(n)])


def theta() -> Graph:
    fl = ["a1", "a2", "a3", "b1", "b2", "b3"]
    bd = {f: ("u" if f[0] == "a" else "v") for f in fl}
    return Graph(fl, ["u", "v"], bd, [("a1", "b1"), ("a2", "b2"), ("a3", "b3")])


def random_generator_application(rng: random.Random, kinds=("graft", "edge", "loop", "merge", "iso")):
    """(Step, surface decorations) for a random simple generator on an aggregate.

    "edge" and "loop" are the virtual contractions (operadic glue and self-glue).
    """
    two_only = not set(kinds) - {"edge", "merge"}
    nv = 2 if two_only or rng.random() < 0.6 else 1
    flags = [f"f{i}" for i in range(rng.randint(2, 6))]
    vs = [f"v{i}" for i in range(nv)]
    bd = {f: vs[i % nv] for i, f in enumerate(flags)}
    rng.shuffle(flags)
    g = Graph(flags, vs, bd, {})
    dec = {v: random_surface(rng, g.flags_at(v)) for v in vs}
    options = [k for k in kinds if k not in ("edge", "merge") or nv == 2]
    kind = rng.choice(options)
    if kind == "merge":
        m = M.merge(g, "v0", "v1")
        return M.Step("merge", ("v0", "v1"), m), dec
    if kind == "iso":
        return M.Step("iso", (), random_iso(rng, g)), dec
    if kind == "edge":
        s, t = rng.choice(g.flags_at("v0")), rng.choice(g.flags_at("v1"))
    else:
        v = rng.choice([v for v in vs if g.valency(v) >= 2] or vs)
        if g.valency(v) < 2:
            return random_generator_application(rng, kinds)
        s, t = rng.sample(g.flags_at(v), 2)
    if kind == "graft":
        return M.Step("graft", (s, t), M.graft(g, s, t)), dec
    m = M.virtual_contract(g, s, t)
    return M.Step(M.classify_simple(m), (s, t), m), dec
