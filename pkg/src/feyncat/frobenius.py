"""Frobenius data (Y1, Y3, P) with exact rational arithmetic.

Tensors live on the correlation-function side: Y_n[i1..in] is the value
on basis vectors e_i1..e_in, and P[i, j] are the propagator coordinates.
For data imported from an algebra with trace, Y_n(a1..an) = eps(a1...an)
and P is the inverse Gram matrix.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import sympy

from .cyclic_words import CyclicWord
from .morphisms import GraphMorphism

DEFAULT_TENSOR_CAP = 10 ** 7


class FrobeniusError(ValueError):
    pass


class ShapeMismatch(FrobeniusError):
    pass


class FlagOrderMismatch(FrobeniusError):
    pass


class MemoryCapExceeded(FrobeniusError):
    pass


class Degenerate(FrobeniusError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, sympy.Rational):
        return Fraction(int(x.p), int(x.q))
    return Fraction(str(x)) if isinstance(x, (str, float)) else Fraction(x)


def _array(data, dim=None) -> np.ndarray:
    a = np.array(data, dtype=object)
    flat = [_frac(x) for x in a.reshape(-1)]
    out = np.empty(len(flat), dtype=object)
    out[:] = flat
    return out.reshape(a.shape)


class DenseTensor:
    """dim**arity exact entries; arity 0 is a scalar."""

    __slots__ = ("arity", "dim", "entries")

    def __init__(self, entries, dim: int, arity: int | None = None):
        a = _array(entries)
        if arity is None:
            arity = a.ndim
        if a.shape != (dim,) * arity:
            raise ShapeMismatch(f"expected shape {(dim,) * arity}, got {a.shape}")
        self.arity = arity
        self.dim = dim
        self.entries = a

    def __eq__(self, other):
        return (isinstance(other, DenseTensor) and self.dim == other.dim and self.arity == other.arity
                and bool(np.all(self.entries == other.entries)))

    def __repr__(self):
        return f"DenseTensor(arity={self.arity}, dim={self.dim})"

    def scalar(self) -> Fraction:
        if self.arity:
            raise ShapeMismatch("not a scalar")
        return self.entries[()]

    def permuted(self, order) -> "DenseTensor":
        return DenseTensor(np.transpose(self.entries, order), self.dim, self.arity)

    def tolist(self):
        return _jsonable(self.entries)


def _jsonable(a):
    if isinstance(a, np.ndarray):
        if a.ndim == 0:
            return _jsonable(a[()])
        return [_jsonable(x) for x in a]
    x = _frac(a)
    return x.numerator if x.denominator == 1 else str(x)


def _zeros(shape):
    out = np.empty(shape, dtype=object)
    out[...] = Fraction(0)
    return out


@dataclass
class FrobeniusData:
    dim: int
    P: np.ndarray
    Y1: np.ndarray
    Y3: np.ndarray
    mode: str = "full"
    tensor_cap: int = DEFAULT_TENSOR_CAP

    def __post_init__(self):
        self.P = _array(self.P)
        self.Y1 = _array(self.Y1)
        self.Y3 = _array(self.Y3)
        d = self.dim
        for name, a, k in (("P", self.P, 2), ("Y1", self.Y1, 1), ("Y3", self.Y3, 3)):
            if a.shape != (d,) * k:
                raise ShapeMismatch(f"{name} has shape {a.shape}, expected {(d,) * k}")
        if self.mode not in ("cyclic", "full"):
            raise FrobeniusError(f"unknown symmetry mode {self.mode!r}")
        self._cache = {}

    # -- derived structure ----------------------------------------------------
    def Yn(self, n: int) -> np.ndarray:
        return build_Yn(self, n).entries

    def unit(self) -> np.ndarray:
        """u = sum eps(P1) P2."""
        return np.tensordot(self.Y1, self.P, axes=([0], [0]))

    def mul(self, a, b) -> np.ndarray:
        t = np.einsum("i,j,ijk->k", _array(a), _array(b), self.Y3)
        return np.tensordot(t, self.P, axes=([0], [0]))

    def eps(self, a) -> Fraction:
        return np.dot(self.Y1, _array(a))


def contract(x: np.ndarray, i: int, y: np.ndarray, j: int, P: np.ndarray) -> np.ndarray:
    """iota_{iPj}(x (x) y): slot i of x against slot j of y through P.

    Result slots: remaining x slots, then remaining y slots.
    """
    t = np.tensordot(x, P, axes=([i], [0]))  # new last slot = P's second index
    return np.asarray(np.tensordot(t, y, axes=([t.ndim - 1], [j])), dtype=object)


def self_contract(x: np.ndarray, i: int, j: int, P: np.ndarray) -> np.ndarray:
    """Contract slots i and j of x with P; other slots keep their order."""
    n = x.ndim
    letters = "abcdefghijklmnopqrstuvw"[:n]
    out = "".join(c for k, c in enumerate(letters) if k not in (i, j))
    return np.asarray(np.einsum(f"{letters},{letters[i]}{letters[j]}->{out}", x, P), dtype=object)


def build_Yn(fd: FrobeniusData, n: int) -> DenseTensor:
    """Y_n by the recursion Y_n = iota(Y_{n-1} (x) Y_3), Y_2 = iota(Y_1 (x) Y_3), Y_0 = iota_P(Y_2)."""
    if n < 0:
        raise FrobeniusError("n must be >= 0")
    if fd.dim ** n > fd.tensor_cap:
        raise MemoryCapExceeded(f"Y_{n} needs {fd.dim ** n} entries, cap is {fd.tensor_cap}")
    if n in fd._cache:
        return fd._cache[n]
    if n == 1:
        a = fd.Y1
    elif n == 2:
        a = contract(fd.Y1, 0, fd.Y3, 0, fd.P)
    elif n == 3:
        a = fd.Y3
    elif n == 0:
        a = self_contract(build_Yn(fd, 2).entries, 0, 1, fd.P)
    else:
        a = contract(build_Yn(fd, n - 1).entries, n - 2, fd.Y3, 0, fd.P)
    t = DenseTensor(a, fd.dim, n)
    fd._cache[n] = t
    return t


# -- checks -----------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    witness: tuple | None = None

    def __str__(self):
        w = "" if self.passed else f" witness {self.witness}"
        return f"{self.name}: {'pass' if self.passed else 'FAIL'}{w}"


def _first_diff(a: np.ndarray, b: np.ndarray):
    for idx in np.ndindex(a.shape):
        if a[idx] != b[idx]:
            return idx
    return None


def _compare(name, a, b) -> CheckResult:
    w = _first_diff(a, b)
    return CheckResult(name, w is None, w)


def check_compats(fd: FrobeniusData) -> list[CheckResult]:
    """The three compatibility identities, computed by explicit contraction."""
    P, Y1, Y3 = fd.P, fd.Y1, fd.Y3
    inner = contract(Y1, 0, Y3, 0, P)  # Y2
    c1 = contract(Y1, 0, inner, 0, P)
    c2 = contract(inner, 1, Y3, 0, P)
    z = contract(Y3, 2, Y3, 0, P)
    return [
        _compare("unit", c1, Y1),
        _compare("unit-on-Y3", c2, Y3),
        _compare("whitehead", z, np.transpose(z, (1, 2, 3, 0))),
    ]


def check_symmetry(fd: FrobeniusData) -> list[CheckResult]:
    out = [_compare("P-symmetric", fd.P, fd.P.T)]
    perms = [(1, 2, 0)] if fd.mode == "cyclic" else [(1, 2, 0), (1, 0, 2)]
    for p in perms:
        out.append(_compare(f"Y3-invariant{p}", fd.Y3, np.transpose(fd.Y3, p)))
    return out


def is_unital(fd: FrobeniusData) -> bool:
    Y2 = build_Yn(fd, 2).entries
    prod = np.dot(Y2, fd.P)
    return all(prod[i, j] == (1 if i == j else 0) for i in range(fd.dim) for j in range(fd.dim))


def quantum_dimension(fd: FrobeniusData) -> Fraction:
    Y2 = build_Yn(fd, 2).entries
    return sum((Y2[i, j] * fd.P[i, j] for i in range(fd.dim) for j in range(fd.dim)), Fraction(0))


def euler_element(fd: FrobeniusData) -> DenseTensor:
    """e = mu(P); coordinates e^l = sum P^ij Y3[i,j,k] P^kl."""
    t = np.einsum("ij,ijk,kl->l", fd.P, fd.Y3, fd.P)
    return DenseTensor(t, fd.dim, 1)


def propagator_Q(fd: FrobeniusData) -> np.ndarray:
    """Q = Delta(u), with Delta dual to the multiplication."""
    u = fd.unit()
    return np.einsum("i,ibc,bm,cn->mn", u, fd.Y3, fd.P, fd.P)


# -- naturality -------------------------------------------------------------

def _rotate_to_end(a: np.ndarray, i: int) -> np.ndarray:
    n = a.ndim
    order = [(k + i + 1) % n for k in range(n)]
    return np.transpose(a, order)


def check_naturality(fd: FrobeniusData, trials: int = 20, max_arity: int = 4, seed: int = 0) -> list[CheckResult]:
    """The generator conditions on the skeletal Y_n, over random slot choices.

    equivariance, gluing, self-gluing, merging; plus self-gluing with the
    Euler element inserted, which is what holds for surface-decorated data.
    """
    rng = random.Random(seed)
    res = {k: CheckResult(k, True) for k in ("equivariance", "glue", "self-glue", "merge", "self-glue-euler")}

    def fail(k, w):
        if res[k].passed:
            res[k] = CheckResult(k, False, w)

    e = euler_element(fd).entries
    for _ in range(trials):
        n = rng.randint(1, max_arity)
        Y = build_Yn(fd, n).entries
        if n > 1:
            if fd.mode == "cyclic":
                p = tuple(list(range(1, n)) + [0])
            else:
                p = tuple(rng.sample(range(n), n))
            if _first_diff(Y, np.transpose(Y, p)) is not None:
                fail("equivariance", (n, p))
        m = rng.randint(1, max_arity)
        Ym = build_Yn(fd, m).entries
        i, j = rng.randrange(n), rng.randrange(m)
        # rotate so the glued slots become last of the first and first of the second
        a = _rotate_to_end(Y, i)
        b = np.transpose(Ym, [(k + j) % m for k in range(m)])
        # target arity 0 is the tail-free corolla, excluded as for surface types
        if 1 <= n + m - 2 <= max_arity + 2:
            glued = contract(a, n - 1, b, 0, fd.P)
            if _first_diff(glued, build_Yn(fd, n + m - 2).entries) is not None:
                fail("glue", (n, i, m, j))
        if n + m <= max_arity + 2:
            merged = np.multiply.outer(Y, Ym)
            if _first_diff(merged, build_Yn(fd, n + m).entries) is not None:
                fail("merge", (n, m))
        if n >= 2:
            i = rng.randrange(n)
            a = _rotate_to_end(Y, i)  # slot i is now last; its cyclic successor first
            sg = self_contract(a, n - 1, 0, fd.P)
            if _first_diff(sg, build_Yn(fd, n - 2).entries) is not None:
                fail("self-glue", (n, i))
            # adjacent self-gluing inserts e into the surviving word
            Yn1 = build_Yn(fd, n - 1).entries
            ins = np.tensordot(Yn1, e, axes=([n - 2], [0]))
            if _first_diff(sg, ins) is not None:
                fail("self-glue-euler", (n, i))
    return list(res.values())


# -- correlators ------------------------------------------------------------

def correlator(fd: FrobeniusData, phi: GraphMorphism, tensor, source_order=None, target_order=None) -> DenseTensor:
    """Push a tensor over the source flags along phi.

    Ghost edges are contracted with P, surviving slots are relabelled by
    phi_F and put into ``target_order`` (default: sorted target flags).
    """
    src = list(source_order) if source_order is not None else sorted(phi.source.flags)
    tgt = list(target_order) if target_order is not None else sorted(phi.target.flags)
    if sorted(src) != sorted(phi.source.flags):
        raise FlagOrderMismatch("source order must list each source flag once")
    if sorted(tgt) != sorted(phi.target.flags):
        raise FlagOrderMismatch("target order must list each target flag once")
    a = tensor.entries if isinstance(tensor, DenseTensor) else _array(tensor)
    if a.shape != (fd.dim,) * len(src):
        raise ShapeMismatch(f"input has shape {a.shape}, expected arity {len(src)}")
    slots = list(src)
    for s, t in phi.ghost_edges():
        i, j = slots.index(s), slots.index(t)
        a = self_contract(a, i, j, fd.P)
        slots = [f for f in slots if f not in (s, t)]
    order = [slots.index(phi.phi_F[f]) for f in tgt]
    return DenseTensor(np.transpose(a, order) if order else a, fd.dim, len(tgt))


def graph_correlator(fd: FrobeniusData, g, order=None) -> DenseTensor:
    """Y on an aggregate: tensor product of Y_n over vertices (flags in each vertex's given order)."""
    order = list(order) if order is not None else sorted(g.flags)
    a = np.array(Fraction(1), dtype=object)
    slots = []
    for v in sorted(g.vertices):
        fl = g.flags_at(v)
        a = np.multiply.outer(a, build_Yn(fd, len(fl)).entries)
        slots += fl
    perm = [slots.index(f) for f in order]
    return DenseTensor(np.transpose(a, perm) if perm else a, fd.dim, len(order))


# -- words ------------------------------------------------------------------

def _chain(fd: FrobeniusData, w: CyclicWord, inputs):
    """Y_n on w for n >= 3 without building Y_n.

    Unrolling Y_n = iota(Y_{n-1} (x) Y_3) gives Y_3 followed by n - 3 copies
    of T = P.Y_3, so slots can be fed or closed as soon as they appear.
    """
    letters = list(w.letters)
    mate = {}
    for x, y in w.loops:
        mate[x], mate[y] = (y, True), (x, False)
    T = np.asarray(np.tensordot(fd.P, fd.Y3, axes=([1], [0])), dtype=object)
    R = fd.Y3
    labels = [letters[0], letters[1], None]  # None is the running slot

    def resolve(R, labels, x):
        if x not in labels:  # already closed together with its mate
            return R, labels
        i = labels.index(x)
        if x in mate:
            y, x_first = mate[x]
            if y not in labels:
                return R, labels
            j = labels.index(y)
            R = self_contract(R, i, j, fd.P) if x_first else self_contract(R, j, i, fd.P)
            return R, [l for l in labels if l not in (x, y)]
        if inputs is None:
            return R, labels
        R = np.asarray(np.tensordot(R, _array(inputs[x]), axes=([i], [0])), dtype=object)
        return R, labels[:i] + labels[i + 1:]

    R, labels = resolve(R, labels, letters[0])
    R, labels = resolve(R, labels, letters[1])
    for x in letters[2:-1]:
        k = labels.index(None)
        R = np.asarray(np.tensordot(R, T, axes=([k], [0])), dtype=object)
        labels = labels[:k] + labels[k + 1:] + [x, None]
        if fd.dim ** len(labels) > fd.tensor_cap:
            raise MemoryCapExceeded(f"word evaluation needs {fd.dim ** len(labels)} entries")
        R, labels = resolve(R, labels, x)
    labels[labels.index(None)] = letters[-1]
    return resolve(R, labels, letters[-1])


def evaluate_word(fd: FrobeniusData, w: CyclicWord, inputs=None):
    """Y_{|w|} on the letters of w, loops contracted with P.

    ``inputs`` maps each tail to a coordinate vector; without it the result
    is a DenseTensor over the tails in sorted order. The empty word gives
    eps(u), the value of a disk with no marked points.
    """
    letters = list(w.letters)
    if not letters:
        val = fd.eps(fd.unit())
        return val if inputs is not None else DenseTensor(val, fd.dim, 0)
    tails = sorted(w.tails)
    if inputs is not None:
        if set(inputs) != set(tails):
            raise ShapeMismatch("inputs must be given for exactly the tails")
        for t in tails:
            if _array(inputs[t]).shape != (fd.dim,):
                raise ShapeMismatch(f"input for {t!r} has shape {_array(inputs[t]).shape}")
    if len(letters) >= 3:
        a, slots = _chain(fd, w, inputs)
    else:
        a, slots = build_Yn(fd, len(letters)).entries, list(letters)
        for x, y in w.loops:
            a = self_contract(a, slots.index(x), slots.index(y), fd.P)
            slots = [f for f in slots if f not in (x, y)]
        if inputs is not None:
            for t in tails:
                a = np.asarray(np.tensordot(a, _array(inputs[t]), axes=([slots.index(t)], [0])), dtype=object)
                slots.remove(t)
    if inputs is not None:
        return a[()] if isinstance(a, np.ndarray) else a
    a = np.transpose(a, [slots.index(t) for t in tails]) if tails else a
    return DenseTensor(a, fd.dim, len(tails))


def closed_formula(fd: FrobeniusData, inputs, loops: int) -> Fraction:
    """eps(prod a_s * e^loops); for words with tails loops = 1 - chi(surface)."""
    x = fd.unit()
    for v in inputs:
        x = fd.mul(x, v)
    e = euler_element(fd).entries
    for _ in range(loops):
        x = fd.mul(x, e)
    return fd.eps(x)


# -- constructors and io ----------------------------------------------------

def from_algebra(structure, trace, mode: str = "full") -> FrobeniusData:
    """Build (Y1, Y3, P) from e_i e_j = sum_k structure[i][j][k] e_k and eps(e_k) = trace[k]."""
    c = _array(structure)
    eps = _array(trace)
    d = len(eps)
    if c.shape != (d, d, d):
        raise ShapeMismatch("structure constants must be dim x dim x dim")
    gram = np.tensordot(c, eps, axes=([2], [0]))
    G = sympy.Matrix(d, d, lambda i, j: sympy.Rational(gram[i, j].numerator, gram[i, j].denominator))
    if G.det() == 0:
        raise Degenerate("the trace pairing is degenerate")
    Pm = G.inv()
    P = _array([[_frac(Pm[i, j]) for j in range(d)] for i in range(d)])
    # Y3[i,j,k] = eps((e_i e_j) e_k)
    ij = np.tensordot(c, c, axes=([2], [0]))  # [i,j,k,l] = coeff of e_l in (e_i e_j) e_k
    Y3 = np.tensordot(ij, eps, axes=([3], [0]))
    return FrobeniusData(d, P, eps, Y3, mode)


def dual_numbers() -> FrobeniusData:
    """k[x]/(x^2), basis (1, x), eps(1) = 0, eps(x) = 1."""
    c = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return from_algebra(c, [0, 1], "full")


def matrix_algebra(n: int = 2) -> FrobeniusData:
    """n x n matrices with the trace pairing, basis E_ij in row-major order."""
    d = n * n
    c = [[[0] * d for _ in range(d)] for _ in range(d)]
    for (i, j), (k, l) in product(product(range(n), repeat=2), repeat=2):
        if j == k:
            c[i * n + j][k * n + l][i * n + l] = 1
    trace = [1 if i == j else 0 for i in range(n) for j in range(n)]
    return from_algebra(c, trace, "cyclic")


def zero_data(dim: int = 2, P=None) -> FrobeniusData:
    P = P if P is not None else np.eye(dim, dtype=int).tolist()
    return FrobeniusData(dim, P, [0] * dim, _zeros((dim,) * 3), "full")


def to_json(fd: FrobeniusData) -> str:
    return json.dumps({"dim": fd.dim, "P": _jsonable(fd.P), "Y1": _jsonable(fd.Y1),
                       "Y3": _jsonable(fd.Y3), "mode": fd.mode}, sort_keys=True)


def from_json(text: str) -> FrobeniusData:
    d = json.loads(text)
    try:
        return FrobeniusData(int(d["dim"]), d["P"], d["Y1"], d["Y3"], d.get("mode", "full"))
    except KeyError as exc:
        raise FrobeniusError(f"missing key {exc.args[0]!r}") from None


def perturb(fd: FrobeniusData, index, delta=1) -> FrobeniusData:
    Y3 = fd.Y3.copy()
    Y3[tuple(index)] += _frac(delta)
    return FrobeniusData(fd.dim, fd.P, fd.Y1, Y3, fd.mode)
