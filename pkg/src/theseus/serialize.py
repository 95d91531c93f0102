"""Graph serialization: JSON documents and DOT renderings."""

from __future__ import annotations

import json
import math

from .errors import SchemaError
from .graphs import ColoredGraph, Edge

#: Endpoint colors map to this palette in DOT output (mode 0 first).
PALETTE = ("blue", "red", "green", "orange", "purple",
           "brown", "cyan", "magenta", "gold", "gray")


def _canonical_edges(g: ColoredGraph):
    return sorted(g.edges, key=lambda e: e.key)


def graph_to_json(g: ColoredGraph) -> str:
    doc = {
        "n": g.n_vertices,
        "d": g.d_modes,
        "edges": [
            {"u": e.u, "v": e.v, "cu": e.cu, "cv": e.cv,
             "re": e.weight.real, "im": e.weight.imag}
            for e in _canonical_edges(g)
        ],
    }
    if g.virtual_vertices:
        doc["virtual"] = sorted(g.virtual_vertices)
    return json.dumps(doc, indent=2)


def _need(obj, key, kind, path):
    if key not in obj:
        raise SchemaError(f"missing field", f"{path}.{key}")
    val = obj[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise SchemaError("expected an integer", f"{path}.{key}")
    if kind is float and not isinstance(val, (int, float)) or isinstance(val, bool):
        raise SchemaError("expected a number", f"{path}.{key}")
    return val


def json_to_graph(text: str) -> ColoredGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", "$")
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", "$")
    n = _need(doc, "n", int, "$")
    d = _need(doc, "d", int, "$")
    edges_doc = doc.get("edges")
    if not isinstance(edges_doc, list):
        raise SchemaError("expected an array", "$.edges")
    edges = []
    for i, e in enumerate(edges_doc):
        path = f"$.edges[{i}]"
        if not isinstance(e, dict):
            raise SchemaError("expected an object", path)
        u = _need(e, "u", int, path)
        v = _need(e, "v", int, path)
        cu = _need(e, "cu", int, path)
        cv = _need(e, "cv", int, path)
        re = _need(e, "re", float, path)
        im = _need(e, "im", float, path)
        edges.append(Edge(u, v, cu, cv, complex(re, im)))
    virtual = doc.get("virtual", [])
    if not isinstance(virtual, list) or not all(isinstance(x, int) for x in virtual):
        raise SchemaError("expected an array of integers", "$.virtual")
    try:
        return ColoredGraph(n, d, tuple(edges), frozenset(virtual))
    except Exception as exc:
        raise SchemaError(str(exc), "$")


def _weight_label(w: complex) -> str:
    if abs(w.imag) < 5e-4:
        return f"{w.real:.3f}"
    if abs(w.real) < 5e-4:
        return f"{w.imag:.3f}i"
    return f"{w.real:.3f}{w.imag:+.3f}i"


def graph_to_dot(g: ColoredGraph) -> str:
    """DOT text: paths as nodes, one styled edge per colored edge.

    Bi-colored edges render as a two-stop color gradient; edges whose
    amplitude points into the negative half-plane are dashed.
    """
    lines = ["graph experiment {", "  node [shape=circle];"]
    for v in range(g.n_vertices):
        shape = ' [shape=box, label="V%d"]' % v if v in g.virtual_vertices else ""
        lines.append(f"  v{v}{shape};")
    for e in _canonical_edges(g):
        cu, cv = PALETTE[e.cu % len(PALETTE)], PALETTE[e.cv % len(PALETTE)]
        color = cu if cu == cv else f"{cu};0.5:{cv}"
        style = "dashed" if e.weight.real < -1e-12 else "solid"
        lines.append(
            f'  v{e.u} -- v{e.v} [color="{color}", label="{_weight_label(e.weight)}", style={style}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
