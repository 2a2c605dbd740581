"""One-vertex ribbon graphs as cyclic words.

A word is a cyclic sequence of distinct letters plus a fixed-point-free
pairing on some of them (the loops). Unpaired letters are tails. In the
text format a loop partner is written with a trailing ``*``:
``(A t B C t* D)``. Words whose loop names do not follow that convention
print with an explicit pairing block: ``(1 2 3 4 | 1=2 3=4)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations

from .decorations import RibbonGraph, SurfaceType, surface_type as _rg_surface_type
from .graph_core import Graph


class WordError(ValueError):
    pass


class NotALoop(WordError):
    pass


class BadSplit(WordError):
    pass


class NotATail(WordError):
    pass


class MultipleVertices(WordError):
    pass


class NormalizationCapExceeded(RuntimeError):
    """The rewrite loop ran past its loop-count bound; always a bug."""


def _rotations(seq):
    n = len(seq)
    return [seq[i:] + seq[:i] for i in range(n)] or [seq]


class CyclicWord:
    """Cyclic word stored in its canonical (lex least) rotation.

    Tails sort before loop letters; ties are broken by identifier.
    """

    __slots__ = ("letters", "pairing", "_key")

    def __init__(self, letters, pairing=None):
        letters = tuple(letters)
        if len(set(letters)) != len(letters):
            raise WordError("letters must be distinct")
        pairs = {}
        items = pairing.items() if isinstance(pairing, dict) else (pairing or ())
        for a, b in items:
            if a == b:
                raise WordError(f"loop letter {a!r} paired with itself")
            if pairs.get(a, b) != b or pairs.get(b, a) != a:
                raise WordError(f"inconsistent pairing at {a!r}")
            pairs[a], pairs[b] = b, a
        for x in pairs:
            if x not in letters:
                raise WordError(f"paired letter {x!r} not in the word")
        self.pairing = pairs
        key = lambda x: (0 if x not in pairs else 1, x)
        self.letters = min(_rotations(letters), key=lambda r: [key(x) for x in r])
        self._key = (self.letters, tuple(sorted(pairs.items())))

    def __eq__(self, other):
        return isinstance(other, CyclicWord) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        return f"CyclicWord({self})"

    def __str__(self):
        return to_string(self)

    def is_tail(self, x) -> bool:
        return x in self.letters and x not in self.pairing

    @property
    def tails(self) -> list:
        return sorted(x for x in self.letters if x not in self.pairing)

    @property
    def loops(self) -> list[tuple]:
        """Loops as (opening, partner), opening = first in canonical order."""
        seen, out = set(), []
        for x in self.letters:
            if x in self.pairing and x not in seen:
                out.append((x, self.pairing[x]))
                seen.update((x, self.pairing[x]))
        return out

    def partner(self, x):
        return self.pairing[x]

    def rotated_to(self, x) -> list:
        i = self.letters.index(x)
        return list(self.letters[i:] + self.letters[:i])


def parse(text: str) -> CyclicWord:
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    explicit = None
    if "|" in s:
        s, tail = s.split("|", 1)
        explicit = [tuple(p.split("=")) for p in tail.split()]
    letters = s.split()
    if explicit is not None:
        return CyclicWord(letters, explicit)
    pairs = []
    present = set(letters)
    for x in letters:
        if x.endswith("*"):
            base = x[:-1]
            if base not in present:
                raise WordError(f"{x!r} has no partner {base!r}")
            pairs.append((base, x))
    return CyclicWord(letters, pairs)


def to_string(w: CyclicWord) -> str:
    body = " ".join(w.letters)
    starred = all(b == a + "*" or a == b + "*" for a, b in w.pairing.items())
    if starred:
        return f"({body})"
    pairs = " ".join(f"{a}={b}" for a, b in w.loops)
    return f"({body} | {pairs})"


# -- graphs -----------------------------------------------------------------

def graph_from_word(w: CyclicWord, vertex: str = "v") -> RibbonGraph:
    g = Graph(w.letters, [vertex], {x: vertex for x in w.letters}, w.pairing)
    return RibbonGraph(g, {vertex: [list(w.letters)] if w.letters else []})


def word_from_graph(rg: RibbonGraph) -> CyclicWord:
    g = rg.graph
    if len(g.vertices) != 1:
        raise MultipleVertices(f"expected one vertex, got {len(g.vertices)}")
    (v,) = g.vertices
    cyc = rg.orders[v].cycles()
    if len(cyc) > 1:
        raise WordError("vertex order is polycyclic, not cyclic")
    letters = cyc[0] if cyc else ()
    return CyclicWord(letters, {f: h for f, h in g.involution.items() if f != h})


def surface_type(w: CyclicWord) -> SurfaceType:
    """SurfaceType read off the boundary cycles of the one-vertex graph."""
    return _rg_surface_type(graph_from_word(w, "v"))["v"]


def boundary_profile(w: CyclicWord) -> tuple:
    """(chi, #marked cycles, #unmarked cycles)."""
    from .decorations import boundary_cycles

    rg = graph_from_word(w)
    cyc = boundary_cycles(rg)
    marked = sum(1 for c in cyc if c.marked)
    return (rg.graph.euler_characteristic(), marked, len(cyc) - marked)


# -- mutations --------------------------------------------------------------

@dataclass(frozen=True)
class Move:
    """Write the word as  t X t* Y; rotate X by ``inner`` and Y by ``outer``.

    In the four-block picture (A t B C t* D) -> (D t C B t* A) this is
    inner = len(B), outer = len(D).
    """
    loop: str
    inner: int
    outer: int

    def __str__(self):
        return f"{self.loop}:{self.inner},{self.outer}"


def _mutate_list(seq: list, pairing: dict, t, inner: int, outer: int) -> list:
    if t not in pairing:
        raise NotALoop(f"{t!r} is not a loop letter")
    i = seq.index(t)
    r = seq[i:] + seq[:i]
    j = r.index(pairing[t])
    X, Y = r[1:j], r[j + 1:]
    if not (0 <= inner <= len(X)) or not (0 <= outer <= len(Y)):
        raise BadSplit(f"cuts ({inner},{outer}) out of range for blocks of size {len(X)},{len(Y)}")
    X = X[inner:] + X[:inner]
    Y = Y[outer:] + Y[:outer]
    return [t] + X + [pairing[t]] + Y


def mutate(w: CyclicWord, loop, split=(0, 0)) -> CyclicWord:
    """Elementary mutation along ``loop`` (a letter, or a pair opening at its first entry).

    ``split`` = (inner, outer) cut positions, see ``Move``.
    """
    t = loop[0] if isinstance(loop, tuple) else loop
    if isinstance(loop, tuple) and w.pairing.get(loop[0]) != loop[1]:
        raise NotALoop(f"{loop!r} is not a loop of the word")
    inner, outer = split
    return CyclicWord(_mutate_list(list(w.letters), w.pairing, t, inner, outer), w.pairing)


def lemma_move(w: CyclicWord, t, len_b: int, len_d: int) -> CyclicWord:
    """(A t B C t* D) -> (D t C B t* A)."""
    return mutate(w, t, (len_b, len_d))


def inverse_move(w: CyclicWord, m: Move) -> Move:
    """Move undoing ``m`` when applied to ``mutate(w, m.loop, ...)``."""
    r = w.rotated_to(m.loop)
    j = r.index(w.pairing[m.loop])
    nx, ny = j - 1, len(r) - j - 1
    return Move(m.loop, (nx - m.inner) % nx if nx else 0, (ny - m.outer) % ny if ny else 0)


def replay(w: CyclicWord, trace) -> CyclicWord:
    for m in trace:
        w = mutate(w, m.loop, (m.inner, m.outer))
    return w


def neighbours(w: CyclicWord):
    """All (move, word) pairs reachable by one elementary mutation."""
    for t, _ in w.loops:
        r = w.rotated_to(t)
        j = r.index(w.pairing[t])
        nx, ny = j - 1, len(r) - j - 1
        for a in range(max(nx, 1)):
            for b in range(max(ny, 1)):
                if a == 0 and b == 0:
                    continue
                yield Move(t, a, b), mutate(w, t, (a, b))


# -- normal form ------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    word: CyclicWord
    g: int
    p_slots: int
    cycles: tuple = field(default=())

    def __str__(self):
        return str(self.word)


def _parse_linear(seq, pairing, has_tails):
    n = len(seq)
    pos = 0
    blocks = []
    if has_tails:
        while pos < n and seq[pos] not in pairing:
            pos += 1
        if pos == 0:
            return None
        blocks.append(tuple(seq[:pos]))
        while pos < n and seq[pos] in pairing:
            try:
                j = seq.index(pairing[seq[pos]], pos + 1)
            except ValueError:
                return None
            inside = seq[pos + 1:j]
            if not inside or any(x in pairing for x in inside):
                break
            blocks.append(tuple(inside))
            pos = j + 1
    e = 0
    while pos + 1 < n and seq[pos] in pairing and pairing[seq[pos]] == seq[pos + 1]:
        e += 1
        pos += 2
    g = 0
    while (pos + 3 < n and seq[pos] in pairing and seq[pos + 1] in pairing
           and pairing[seq[pos]] == seq[pos + 2] and pairing[seq[pos + 1]] == seq[pos + 3]):
        g += 1
        pos += 4
    if pos != n:
        return None
    # blocks start at their least tail and come sorted by (length, letters)
    for b in blocks:
        if b and b[0] != min(b):
            return None
    keys = [_block_key(b) for b in blocks]
    if keys != sorted(keys):
        return None
    return g, e, tuple(blocks)


def match_template(w: CyclicWord):
    """NormalForm if ``w`` already has template shape, else None.

    Ties left open by the template are fixed: every tail block starts at
    its least tail and the blocks are sorted by (length, letters).
    """
    has_tails = bool(w.tails)
    for r in _rotations(list(w.letters)):
        got = _parse_linear(r, w.pairing, has_tails)
        if got is not None:
            g, e, blocks = got
            return NormalForm(w, g, e, blocks)
    return None


def is_normal_form(w: CyclicWord) -> bool:
    return match_template(w) is not None


def _block_key(b):
    return (len(b), tuple(b))


class _Normalizer:
    """Drives a word into template shape, recording every move.

    The word is kept as  x0 P D  where x0 is the least tail of the
    boundary cycle that becomes S_1 and D a list of finished units
    (tail blocks in a loop, empty loops, handle quadruples), already in
    template order. Each round moves at least one loop out of P.
    """

    def __init__(self, letters, pairing, x0):
        self.seq = list(letters)
        self.pairing = pairing
        self.x0 = x0
        self.done: list[tuple] = []
        self.kinds: list[str] = []
        self.trace: list[Move] = []

    def move(self, t, inner, outer):
        if inner == 0 and outer == 0:
            return
        self.seq = _mutate_list(self.seq, self.pairing, t, inner, outer)
        self.trace.append(Move(t, inner, outer))

    def layout(self):
        i = self.seq.index(self.x0)
        r = self.seq[i:] + self.seq[:i]
        dl = sum(len(u) for u in self.done)
        body, tail = r[1:len(r) - dl], r[len(r) - dl:]
        assert tail == [x for u in self.done for x in u], "finished region disturbed"
        return body

    def _insert_at(self, kind, key=None):
        if kind == "handle":
            return len(self.done)
        n_l = self.kinds.count("l")
        n_e = self.kinds.count("e")
        if kind == "e":
            return n_l + n_e
        k = 0
        while k < n_l and _block_key(self.done[k][1:-1]) <= key:
            k += 1
        return k

    def extract_unit(self, P, i, j):
        # P[i] opens a loop whose inside P[i+1:j] holds tails only
        t = P[i]
        X = P[i + 1:j]
        kind = "l" if X else "e"
        if X:
            m = X.index(min(X))
            Xr = X[m:] + X[:m]
        else:
            m, Xr = 0, []
        k = self._insert_at(kind, _block_key(Xr))
        r1 = len(P) - j - 1
        self.move(t, m, r1 + sum(len(u) for u in self.done[:k]))
        self.done.insert(k, tuple([t] + Xr + [self.pairing[t]]))
        self.kinds.insert(k, kind)
        self.layout()

    def extract_handle(self, P, i, k):
        # t = P[i] crossed by s = P[k]; in the frame of t: t B s C t* D s* E
        pr = self.pairing
        t, s = P[i], P[k]
        jt, js = P.index(pr[t]), P.index(pr[s])
        lb, lc, ld = k - i - 1, jt - k - 1, js - jt - 1
        self.move(t, lb, 0)
        self.move(s, lc + lb, 0)
        self.move(t, 0, ld + lc + lb)
        # now  ... t s t* s* X x0 ...  with X = rest of P plus the finished region
        r = self.seq[self.seq.index(t):] + self.seq[:self.seq.index(t)]
        lx = r.index(self.x0) - 4
        a, b = t, s
        if lx:
            self.move(a, 0, 1 + lx)
            self.move(b, 1, lx)
            self.move(pr[a], 0, lx)
            quad = (pr[a], pr[b], a, b)
        else:
            quad = (a, b, pr[a], pr[b])
        self.done.append(quad)
        self.kinds.append("handle")
        self.layout()

    def run(self):
        cap = len(self.pairing) // 2 + 1
        for _ in range(cap + 1):
            P = self.layout()
            loops_in_p = [x for x in P if x in self.pairing]
            if not loops_in_p:
                return
            pos = {x: n for n, x in enumerate(P)}
            crossing = None
            for n, x in enumerate(P):
                if x not in self.pairing or pos[self.pairing[x]] < n:
                    continue
                jx = pos[self.pairing[x]]
                for k in range(n + 1, jx):
                    y = P[k]
                    if y in self.pairing and pos[self.pairing[y]] > jx:
                        crossing = (n, k)
                        break
                if crossing:
                    break
            if crossing:
                self.extract_handle(P, *crossing)
                continue
            for n, x in enumerate(P):
                if x in self.pairing and pos[self.pairing[x]] > n:
                    jx = pos[self.pairing[x]]
                    if all(y not in self.pairing for y in P[n + 1:jx]):
                        self.extract_unit(P, n, jx)
                        break
        raise NormalizationCapExceeded("normalization did not finish within its loop bound")


def _phantom_name(letters):
    name = "_"
    while name in letters:
        name += "_"
    return name


def _project_trace(seq, pairing, trace, phantom):
    """Rewrite moves on a word carrying an extra tail as moves without it."""
    out = []
    for m in trace:
        i = seq.index(m.loop)
        r = seq[i:] + seq[:i]
        j = r.index(pairing[m.loop])
        q = r.index(phantom)
        inner, outer = m.inner, m.outer
        if q < j:
            nx = j - 2
            if q - 1 < inner:
                inner -= 1
            inner = inner % nx if nx else 0
        else:
            ny = len(r) - j - 2
            if q - j - 1 < outer:
                outer -= 1
            outer = outer % ny if ny else 0
        if inner or outer:
            out.append(Move(m.loop, inner, outer))
        seq = _mutate_list(seq, pairing, m.loop, m.inner, m.outer)
    return out


def normalize(w: CyclicWord):
    """Return (NormalForm, SurfaceType, trace); ``replay(w, trace)`` is the normal form."""
    st = surface_type(w)
    found = match_template(w)
    if found is not None:
        return found, st, []
    pairing = dict(w.pairing)
    letters = list(w.letters)
    phantom = None
    if not w.tails:
        phantom = _phantom_name(letters)
        letters = [phantom] + letters
        x0 = phantom
    else:
        blocks = [tuple(c) for c in st.sigma.cycles()]
        x0 = min(min(blocks, key=_block_key))
    nz = _Normalizer(letters, pairing, x0)
    nz.run()
    trace = nz.trace
    final = nz.seq
    if phantom is not None:
        trace = _project_trace(letters, pairing, trace, phantom)
        final = [x for x in final if x != phantom]
    out = CyclicWord(final, pairing)
    nf = match_template(out)
    if nf is None:
        raise NormalizationCapExceeded(f"result {out} does not have template shape")
    return nf, st, trace


def normal_form_for(st: SurfaceType, names=None) -> CyclicWord:
    """The template word realizing a SurfaceType with nonempty marked set.

    Loop letters are l1.., e1.., a1.., b1.. with starred partners.
    """
    blocks = sorted((tuple(c) for c in st.sigma.cycles()), key=_block_key)
    if not blocks:
        if st.p == 0:
            raise WordError("no one-vertex word without tails has p = 0")
        letters = []
        for i in range(1, st.p):
            letters += [f"e{i}", f"e{i}*"]
    else:
        letters = list(blocks[0])
        for i, b in enumerate(blocks[1:], 1):
            letters += [f"l{i}", *b, f"l{i}*"]
        for i in range(1, st.p + 1):
            letters += [f"e{i}", f"e{i}*"]
    for i in range(1, st.g + 1):
        letters += [f"a{i}", f"b{i}", f"a{i}*", f"b{i}*"]
    return parse("(" + " ".join(letters) + ")")


# -- gluing -----------------------------------------------------------------

def glue_words(w1: CyclicWord, s, w2: CyclicWord, t) -> CyclicWord:
    """Glue tail s of w1 to tail t of w2 and contract the new edge.

    With w1 = (s U) and w2 = (t V) the result is (U V).
    """
    if not w1.is_tail(s):
        raise NotATail(f"{s!r} is not a tail of the first word")
    if not w2.is_tail(t):
        raise NotATail(f"{t!r} is not a tail of the second word")
    if set(w1.letters) & set(w2.letters):
        raise WordError("words share letters; rename first")
    u = w1.rotated_to(s)[1:]
    v = w2.rotated_to(t)[1:]
    return CyclicWord(u + v, {**w1.pairing, **w2.pairing})


def self_glue(w: CyclicWord, s, s2) -> CyclicWord:
    """Turn tails s, s2 into a loop; s2 is renamed to s* when that name is free."""
    if not w.is_tail(s) or not w.is_tail(s2) or s == s2:
        raise NotATail(f"{s!r}, {s2!r} are not two tails")
    new = s + "*"
    letters = list(w.letters)
    if new not in letters:
        letters = [new if x == s2 else x for x in letters]
    else:
        new = s2
    return CyclicWord(letters, {**w.pairing, s: new})


def rename(w: CyclicWord, mapping) -> CyclicWord:
    f = lambda x: mapping.get(x, x)
    return CyclicWord([f(x) for x in w.letters], {f(a): f(b) for a, b in w.pairing.items()})


# -- classes up to tail-fixing isomorphism ------------------------------------

def shape_key(w: CyclicWord) -> tuple:
    """Canonical form under relabelling and reorienting loops, tails fixed."""
    best = None
    for r in _rotations(list(w.letters)):
        names, out = {}, []
        for x in r:
            if x not in w.pairing:
                out.append((0, x))
            elif x in names:
                out.append(names[x])
            else:
                k = len(names) // 2
                names[x] = (1, k, 0)
                names[w.pairing[x]] = (1, k, 1)
                out.append(names[x])
        out = tuple(out)
        if best is None or out < best:
            best = out
    return best


def all_words(tails, n_loops: int):
    """Every word on the given tails and n loops, one per shape."""
    tails = list(tails)
    loop_letters = []
    pairs = []
    for i in range(n_loops):
        a = f"x{i}"
        loop_letters += [a, a + "*"]
        pairs.append((a, a + "*"))
    letters = tails + loop_letters
    if not letters:
        yield CyclicWord([], [])
        return
    first, rest = letters[0], letters[1:]
    seen = set()
    for perm in permutations(rest):
        w = CyclicWord((first,) + perm, pairs)
        k = shape_key(w)
        if k not in seen:
            seen.add(k)
            yield w


def mutation_class(w: CyclicWord, limit: int = 10 ** 6) -> set:
    """Shapes reachable from w by mutations (breadth first)."""
    start = shape_key(w)
    seen = {start}
    q = deque([w])
    while q:
        u = q.popleft()
        for _, v in neighbours(u):
            k = shape_key(v)
            if k not in seen:
                seen.add(k)
                if len(seen) > limit:
                    raise WordError("mutation class larger than the limit")
                q.append(v)
    return seen


def chord_diagram(w: CyclicWord) -> str:
    """Plain-text chord diagram: letter positions on a circle, chords as index pairs."""
    n = len(w.letters)
    lines = [f"points {n}"]
    for i, x in enumerate(w.letters):
        lines.append(f"{i} {x}" + (" tail" if x not in w.pairing else ""))
    for a, b in w.loops:
        lines.append(f"chord {w.letters.index(a)} {w.letters.index(b)}")
    return "\n".join(lines)
