"""File formats: graph JSON, edge lists, rotation JSON, CSV and JSON lines."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .embeddings import RotationSystem, rotation_system
from .graphs import BipartiteGraph, edge_key, from_edge_list, two_coloring


def _label(x):
    # JSON keys are strings; keep integer-looking labels as ints
    if isinstance(x, str) and x.lstrip("-").isdigit():
        return int(x)
    return x


def graph_from_json(data: dict, name: str | None = None, designated: str = "B") -> BipartiteGraph:
    """``{"partA": [...], "partB": [...], "edges": [[a, b], ...]}``.

    With ``"ordered": true`` the edge order in the file is the state order;
    otherwise edges are sorted canonically.
    """
    try:
        pa, pb, edges = data["partA"], data["partB"], data["edges"]
    except KeyError as e:
        raise ValueError(f"graph JSON is missing the {e.args[0]!r} field") from None
    return from_edge_list(
        [_label(x) for x in pa],
        [_label(x) for x in pb],
        [tuple(_label(x) for x in e) for e in edges],
        name=data.get("name", name),
        designated=data.get("designated", designated),
        keep_order=bool(data.get("ordered", False)),
    )


def graph_to_json(g: BipartiteGraph) -> dict:
    out = g.to_json()
    if list(g.edges) != sorted(g.edges, key=edge_key):
        out["ordered"] = True
    if g.designated != "B":
        out["designated"] = g.designated
    return out


def parse_edge_list(text: str, name: str | None = None, designated: str = "B") -> BipartiteGraph:
    """One ``u v`` pair per line; ``#`` starts a comment. Parts come from a 2-colouring."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.replace(",", " ").split()
        if len(toks) != 2:
            raise ValueError(f"line {lineno}: expected two vertex labels, got {line!r}")
        edges.append(tuple(_label(t) for t in toks))
    vertices = list(dict.fromkeys(x for e in edges for x in e))
    pa, pb = two_coloring(vertices, edges)
    return from_edge_list(pa, pb, edges, name=name, designated=designated)


def read_graph(path, designated: str = "B") -> BipartiteGraph:
    p = Path(path)
    text = p.read_text()
    if p.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return graph_from_json(json.loads(text), name=p.stem, designated=designated)
    return parse_edge_list(text, name=p.stem, designated=designated)


def read_rotation(path) -> RotationSystem:
    data = json.loads(Path(path).read_text())
    rot = data.get("rotations", data)
    return rotation_system({_label(v): [_label(x) for x in nbrs] for v, nbrs in rot.items()})


def fmt_float(x: float) -> str:
    """Shortest round-trip decimal; ``-0.0`` is written as ``0.0``."""
    x = float(x)
    return repr(0.0 if x == 0 else x)


def fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return fmt_float(z.real)
    sign = "+" if z.imag >= 0 else "-"
    return f"{fmt_float(z.real)}{sign}{fmt_float(abs(z.imag))}j"


def matrix_to_csv(M) -> str:
    M = np.asarray(M)
    fmt = fmt_complex if np.iscomplexobj(M) and np.any(M.imag != 0) else fmt_float
    if np.iscomplexobj(M) and fmt is fmt_float:
        M = M.real
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in M:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def read_csv_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    vals = [[complex(x) for x in r] for r in rows]
    M = np.array(vals)
    return M.real if np.all(M.imag == 0) else M


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=_default)


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def json_lines(records) -> str:
    return "".join(dumps(r) + "\n" for r in records)
