"""Command line front end.

Exit status: 0 on success, 1 on a validation or verification failure,
2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cyclic_words as cw
from . import envelope_oracle as env
from . import frobenius as fb
from .decorations import RibbonGraph, boundary_cycles, surface_type
from .graph_core import Graph, GraphError, topological_type
from .morphisms import (GraphMorphism, MorphismError, automorphisms, compose, factorize, ghost_graph,
                        insert)


class DocumentError(ValueError):
    """Malformed input document; ``where`` names the offending position."""

    def __init__(self, where, msg):
        super().__init__(f"{where}: {msg}")
        self.where = where


# -- documents --------------------------------------------------------------

def _load_json(src, base: Path | None = None):
    if isinstance(src, (dict, list)):
        return src
    p = Path(src)
    if base is not None and not p.is_absolute():
        p = base / p
    try:
        text = p.read_text()
    except OSError as exc:
        raise DocumentError(str(p), exc.strerror or "cannot read") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{p}:{exc.lineno}:{exc.colno}", exc.msg) from None


def _need(doc, key, kind, where):
    if key not in doc:
        raise DocumentError(f"{where}.{key}", "missing")
    val = doc[key]
    if not isinstance(val, kind):
        raise DocumentError(f"{where}.{key}", f"expected {kind.__name__}")
    return val


def graph_from_document(doc, where="graph"):
    """Returns (Graph, decorations dict)."""
    if not isinstance(doc, dict):
        raise DocumentError(where, "expected an object")
    flags = _need(doc, "flags", list, where)
    verts = _need(doc, "vertices", list, where)
    boundary = _need(doc, "boundary", dict, where)
    inv = doc.get("involution", [])
    for i, pair in enumerate(inv):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise DocumentError(f"{where}.involution[{i}]", "expected a pair")
    if len(set(flags)) != len(flags):
        raise DocumentError(f"{where}.flags", "repeated flag")
    if len(set(verts)) != len(verts):
        raise DocumentError(f"{where}.vertices", "repeated vertex")
    seen = set()
    for i, (a, b) in enumerate(inv):
        if a in seen or b in seen or a == b:
            raise DocumentError(f"{where}.involution[{i}]", "flag used twice")
        seen.update((a, b))
    try:
        g = Graph(flags, verts, boundary, [tuple(p) for p in inv])
    except GraphError as exc:
        raise DocumentError(where, str(exc)) from None
    return g, doc.get("decorations") or {}


def graph_to_document(g: Graph, decorations=None) -> dict:
    doc = {
        "flags": sorted(g.flags),
        "vertices": sorted(g.vertices),
        "boundary": dict(sorted(g.boundary.items())),
        "involution": [list(e) for e in g.edges],
    }
    if decorations:
        doc["decorations"] = decorations
    return doc


def ribbon_from_document(doc, where="graph") -> tuple:
    g, dec = graph_from_document(doc, where)
    cyclic = dec.get("cyclic")
    if cyclic is None:
        raise DocumentError(f"{where}.decorations.cyclic", "missing")
    try:
        rg = RibbonGraph(g, {v: cyc for v, cyc in cyclic.items()})
    except ValueError as exc:
        raise DocumentError(f"{where}.decorations.cyclic", str(exc)) from None
    return rg, dec


def morphism_from_document(doc, base: Path | None = None, where="morphism") -> GraphMorphism:
    if not isinstance(doc, dict):
        raise DocumentError(where, "expected an object")
    src, _ = graph_from_document(_load_json(_need(doc, "source", (dict, str), where), base), f"{where}.source")
    tgt, _ = graph_from_document(_load_json(_need(doc, "target", (dict, str), where), base), f"{where}.target")
    iota = {}
    for i, pair in enumerate(doc.get("iota_phi", [])):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise DocumentError(f"{where}.iota_phi[{i}]", "expected a pair")
        a, b = pair
        iota[a], iota[b] = b, a
    try:
        return GraphMorphism(src, tgt, _need(doc, "phi_V", dict, where), _need(doc, "phi_F", dict, where), iota)
    except (MorphismError, GraphError) as exc:
        raise DocumentError(where, str(exc)) from None


def morphism_to_document(m: GraphMorphism) -> dict:
    return {
        "source": graph_to_document(m.source),
        "target": graph_to_document(m.target),
        "phi_V": dict(sorted(m.phi_V.items())),
        "phi_F": dict(sorted(m.phi_F.items())),
        "iota_phi": [list(e) for e in m.ghost_edges()],
    }


# -- commands ---------------------------------------------------------------

def _graph_arg(path):
    p = Path(path)
    return graph_from_document(_load_json(p), str(p))


def _morphism_arg(path):
    p = Path(path)
    return morphism_from_document(_load_json(p), p.parent, str(p))


def cmd_validate(a):
    doc = _load_json(a.file)
    if isinstance(doc, dict) and "phi_F" in doc:
        m = morphism_from_document(doc, Path(a.file).parent, a.file)
        return {"kind": "morphism", "valid": True, "ghost_edges": len(m.ghost_edges())}, 0
    g, dec = graph_from_document(doc, a.file)
    if dec.get("cyclic") is not None:
        ribbon_from_document(doc, a.file)
    return {"kind": "graph", "valid": True, "flags": len(g.flags), "vertices": len(g.vertices)}, 0


def cmd_invariants(a):
    g, _ = _graph_arg(a.file)
    t = topological_type(g)
    return {"vertices": len(g.vertices), "edges": len(g.edges), "tails": g.tails,
            "components": len(g.components()), "b0": t.b0, "b1": t.b1, "chi": t.chi,
            "surface_chi": g.surface_euler_characteristic()}, 0


def cmd_compose(a):
    phi = _morphism_arg(a.first)
    psi = _morphism_arg(a.second)
    return morphism_to_document(compose(psi, phi)), 0


def cmd_ghost(a):
    return graph_to_document(ghost_graph(_morphism_arg(a.file))), 0


def cmd_factorize(a):
    phi = _morphism_arg(a.file)
    fz = factorize(phi, order=a.order, aggregate=a.aggregate)
    ok = fz.composite() == phi
    out = {"order": fz.order, "roundtrip": ok}
    for k in ("phi_m", "phi_gr", "phi_con", "sigma"):
        out[k] = morphism_to_document(getattr(fz, k))
    return out, 0 if ok else 1


def cmd_automorphisms(a):
    g, _ = _graph_arg(a.file)
    auts = automorphisms(g, fix_tails=a.fix_tails, max_nodes=a.max_nodes)
    return {"order": len(auts)}, 0


def cmd_boundary_cycles(a):
    rg, _ = ribbon_from_document(_load_json(a.file), a.file)
    cyc = boundary_cycles(rg)
    return {"boundary_cycles": len(cyc),
            "cycles": [{"flags": list(c.flags), "marked": c.marked} for c in cyc]}, 0


def cmd_surface_type(a):
    rg, dec = ribbon_from_document(_load_json(a.file), a.file)
    types = surface_type(rg, dec.get("genus"), dec.get("punctures"))
    out = {"boundary_cycles": len(boundary_cycles(rg)),
           "types": {v: str(t) for v, t in sorted(types.items())}}
    if len(types) == 1:
        out["type"] = str(next(iter(types.values())))
    return out, 0


def cmd_normalize_word(a):
    w = cw.parse(a.word)
    nf, st, trace = cw.normalize(w)
    return {"input": str(w), "normal_form": str(nf.word), "type": str(st), "g": nf.g,
            "p_slots": nf.p_slots, "cycles": [list(c) for c in nf.cycles],
            "trace": [str(m) for m in trace]}, 0


def cmd_mutate(a):
    w = cw.parse(a.word)
    out = cw.mutate(w, a.loop, (a.inner, a.outer))
    return {"input": str(w), "output": str(out), "type": str(cw.surface_type(out))}, 0


def cmd_insert(a):
    outer, _ = _graph_arg(a.outer)
    inner, _ = _graph_arg(a.inner)
    return graph_to_document(insert(outer, inner)), 0


def _tailset(n):
    return [str(i) for i in range(1, n + 1)]


def cmd_enumerate(a):
    S = _tailset(a.tails)
    if a.ribbon:
        objs = env.enumerate_ribbon_graphs(S, a.max_edges)
        return {"tails": S, "max_edges": a.max_edges, "ribbon": True, "count": len(objs)}, 0
    objs = env.enumerate_connected_graphs(S, a.max_edges)
    by_b1: dict = {}
    for g in objs:
        by_b1[1 - g.euler_characteristic()] = by_b1.get(1 - g.euler_characteristic(), 0) + 1
    return {"tails": S, "max_edges": a.max_edges, "ribbon": False, "count": len(objs),
            "by_loop_number": {str(k): v for k, v in sorted(by_b1.items())}}, 0


def cmd_verify_pushforward(a):
    S = _tailset(a.tails)
    if a.mode == "genus":
        r = env.genus_bijection(S, a.max_edges)
    else:
        r = env.ribbon_bijection(S, a.max_edges)
        r["invariants"] = [str(t) for t in r["invariants"]]
    ok = r["injective"] and r["surjective"] is not False
    r.update({"mode": a.mode, "tails": S, "bijection": ok})
    return r, 0 if ok else 1


def _frobenius_arg(a):
    if a.builtin == "dual":
        return fb.dual_numbers()
    if a.builtin == "matrix2":
        return fb.matrix_algebra(2)
    if a.builtin == "zero":
        return fb.zero_data()
    if not a.data:
        raise DocumentError("frobenius", "give a data file or --builtin")
    try:
        fd = fb.from_json(Path(a.data).read_text())
    except OSError as exc:
        raise DocumentError(a.data, exc.strerror or "cannot read") from None
    fd.tensor_cap = a.tensor_cap
    return fd


def cmd_frobenius_check(a):
    fd = _frobenius_arg(a)
    comp = fb.check_compats(fd)
    sym = fb.check_symmetry(fd)
    ok = all(c.passed for c in comp + sym)
    return {"compats": [str(c) for c in comp], "symmetry": [str(c) for c in sym],
            "unital": fb.is_unital(fd), "quantum_dimension": str(fb.quantum_dimension(fd)),
            "euler_element": [str(x) for x in fb.euler_element(fd).entries], "pass": ok}, 0 if ok else 1


def cmd_correlator(a):
    fd = _frobenius_arg(a)
    phi = _morphism_arg(a.morphism)
    y = fb.graph_correlator(fd, phi.source)
    out = fb.correlator(fd, phi, y)
    return {"target_flags": sorted(phi.target.flags), "tensor": out.tolist()}, 0


def cmd_evaluate_word(a):
    fd = _frobenius_arg(a)
    w = cw.parse(a.word)
    inputs = json.loads(a.inputs) if a.inputs else None
    val = fb.evaluate_word(fd, w, inputs)
    if isinstance(val, fb.DenseTensor):
        return {"word": str(w), "tails": w.tails, "tensor": val.tolist()}, 0
    return {"word": str(w), "value": str(val)}, 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="feyncat", description="Graphs, morphisms, surfaces and Frobenius data.")
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    sp = add("validate", cmd_validate, "check a graph or morphism document")
    sp.add_argument("file")
    sp = add("invariants", cmd_invariants, "topological invariants of a graph")
    sp.add_argument("file")
    sp = add("compose", cmd_compose, "compose two morphisms (second after first)")
    sp.add_argument("first")
    sp.add_argument("second")
    sp = add("ghost", cmd_ghost, "ghost graph of a morphism")
    sp.add_argument("file")
    sp = add("factorize", cmd_factorize, "canonical factorization of a morphism")
    sp.add_argument("file")
    sp.add_argument("--order", choices=["merge_first", "merge_last"], default="merge_first")
    sp.add_argument("--aggregate", action="store_true")
    sp = add("automorphisms", cmd_automorphisms, "count graph automorphisms")
    sp.add_argument("file")
    sp.add_argument("--fix-tails", action="store_true")
    sp.add_argument("--max-nodes", type=int, default=10 ** 6)
    sp = add("boundary-cycles", cmd_boundary_cycles, "boundary cycles of a ribbon graph")
    sp.add_argument("file")
    sp = add("surface-type", cmd_surface_type, "surface type of each component")
    sp.add_argument("file")
    sp = add("normalize-word", cmd_normalize_word, "normal form of a cyclic word")
    sp.add_argument("word")
    sp = add("mutate", cmd_mutate, "apply one elementary mutation")
    sp.add_argument("word")
    sp.add_argument("loop")
    sp.add_argument("inner", type=int)
    sp.add_argument("outer", type=int)
    sp = add("insert", cmd_insert, "insert a graph into the vertices of another")
    sp.add_argument("outer")
    sp.add_argument("inner")
    sp = add("enumerate", cmd_enumerate, "enumerate connected graphs with tails 1..n")
    sp.add_argument("--tails", type=int, default=1)
    sp.add_argument("--max-edges", type=int, default=2)
    sp.add_argument("--ribbon", action="store_true")
    sp = add("verify-pushforward", cmd_verify_pushforward, "check pi_0 against loop numbers or surface types")
    sp.add_argument("--mode", choices=["genus", "surf"], default="genus")
    sp.add_argument("--tails", type=int, default=1)
    sp.add_argument("--max-edges", type=int, default=2, help="edge bound (genus) or loop bound (surf)")
    for name, fn, help_ in (("frobenius-check", cmd_frobenius_check, "compatibility report for Frobenius data"),
                            ("correlator", cmd_correlator, "push the vertex correlators along a morphism"),
                            ("evaluate-word", cmd_evaluate_word, "evaluate Frobenius data on a cyclic word")):
        sp = add(name, fn, help_)
        if name == "correlator":
            sp.add_argument("morphism")
        if name == "evaluate-word":
            sp.add_argument("word")
            sp.add_argument("--inputs", help='JSON object tail -> coordinate list, e.g. {"A": [0, 1]}')
        sp.add_argument("--data", help="FrobeniusData JSON file")
        sp.add_argument("--builtin", choices=["dual", "matrix2", "zero"])
        sp.add_argument("--tensor-cap", type=int, default=fb.DEFAULT_TENSOR_CAP)
    return p


def _emit(obj, as_json, out):
    if as_json:
        out.write(json.dumps(obj, sort_keys=True) + "\n")
        return
    for k, v in obj.items():
        if isinstance(v, (dict, list)):
            v = json.dumps(v, sort_keys=True, ensure_ascii=False)
        out.write(f"{k}: {v}\n")


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        obj, code = a.fn(a)
    except (DocumentError, GraphError, MorphismError, cw.WordError, fb.FrobeniusError, ValueError) as exc:
        obj, code = {"error": type(exc).__name__, "message": str(exc)}, 1
    _emit(obj, a.json, out)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
