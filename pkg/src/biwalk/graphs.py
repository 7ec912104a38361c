"""Bipartite graphs, their two edge partitions and the derived incidence matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import BadSizeError, DuplicateEdgeError, IsolatedVertexError, NotBipartiteError

Label = Hashable


def label_key(x):
    """Sort key that orders ints numerically, then strings, then anything else."""
    if isinstance(x, bool):
        return (2, repr(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    return (2, repr(x))


def edge_key(e):
    ka, kb = label_key(e[0]), label_key(e[1])
    return (ka, kb) if ka <= kb else (kb, ka)


def _components(vertices: Iterable[Label], pairs: Iterable[tuple]) -> list[list[Label]]:
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups: dict = {}
    for v in parent:
        groups.setdefault(find(v), []).append(v)
    return sorted((sorted(g, key=label_key) for g in groups.values()),
                  key=lambda g: label_key(g[0]))


@dataclass(frozen=True)
class BipartiteGraph:
    """A simple bipartite graph with a fixed edge order.

    ``edges`` holds ``(a, b)`` pairs with ``a`` in ``part_a``; edge ``i`` is
    state ``i`` of the walk. ``designated`` names the part whose vertices
    group the edges for the reflection ``P`` (the other part drives ``Q``).
    """

    part_a: tuple
    part_b: tuple
    edges: tuple
    name: str | None = None
    designated: str = "B"

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> tuple:
        return self.part_a + self.part_b

    def degree(self, v) -> int:
        return sum(1 for a, b in self.edges if v in (a, b))

    @property
    def degrees(self) -> dict:
        deg = {v: 0 for v in self.vertices}
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return max(self.degrees.values(), default=0)

    @property
    def connected(self) -> bool:
        return len(_components(self.vertices, self.edges)) <= 1

    @property
    def biregularity(self) -> tuple[int, int] | None:
        deg = self.degrees
        da = {deg[v] for v in self.part_a}
        db = {deg[v] for v in self.part_b}
        if len(da) == 1 and len(db) == 1:
            return da.pop(), db.pop()
        return None

    def adjacency(self) -> np.ndarray:
        """Adjacency matrix with vertices ordered part A then part B."""
        idx = {v: i for i, v in enumerate(self.vertices)}
        n = len(idx)
        a = np.zeros((n, n), dtype=int)
        for u, v in self.edges:
            a[idx[u], idx[v]] = a[idx[v], idx[u]] = 1
        return a

    def to_json(self) -> dict:
        return {
            "partA": list(self.part_a),
            "partB": list(self.part_b),
            "edges": [list(e) for e in self.edges],
        }


def from_edge_list(
    part_a: Sequence,
    part_b: Sequence,
    edges: Iterable[Sequence],
    name: str | None = None,
    designated: str = "B",
    keep_order: bool = False,
) -> BipartiteGraph:
    """Validate a bipartite graph and put its edges into canonical order.

    Canonical order sorts edges by ``(smaller label, larger label)`` with
    :func:`label_key`; ``keep_order=True`` keeps the given order instead
    (used by families with a fixed edge labelling).
    """
    if designated not in ("A", "B"):
        raise ValueError("designated must be 'A' or 'B'")
    pa = tuple(sorted(dict.fromkeys(part_a), key=label_key))
    pb = tuple(sorted(dict.fromkeys(part_b), key=label_key))
    set_a, set_b = set(pa), set(pb)
    if set_a & set_b:
        raise NotBipartiteError(f"labels in both parts: {sorted(set_a & set_b, key=label_key)}")
    oriented = []
    seen = set()
    for e in edges:
        u, v = e
        if u in set_a and v in set_b:
            a, b = u, v
        elif v in set_a and u in set_b:
            a, b = v, u
        elif {u, v} <= set_a or {u, v} <= set_b:
            raise NotBipartiteError(f"edge ({u}, {v}) lies inside one part")
        else:
            raise NotBipartiteError(f"edge ({u}, {v}) uses an unknown vertex")
        if (a, b) in seen:
            raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
        seen.add((a, b))
        oriented.append((a, b))
    touched = {x for e in oriented for x in e}
    isolated = [v for v in pa + pb if v not in touched]
    if isolated:
        raise IsolatedVertexError(f"degree-0 vertices are not allowed: {isolated}")
    if not keep_order:
        oriented.sort(key=edge_key)
    return BipartiteGraph(pa, pb, tuple(oriented), name, designated)


def two_coloring(vertices: Sequence, edges: Sequence[tuple]) -> tuple[list, list]:
    """Split vertices into two colour classes; the smallest label of each
    component goes to the first class."""
    adj: dict = {v: [] for v in vertices}
    for u, v in edges:
        if u == v:
            raise NotBipartiteError(f"loop at {u}")
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    colour: dict = {}
    for comp in _components(adj, edges):
        root = comp[0]
        colour[root] = 0
        stack = [root]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
                elif colour[y] == colour[x]:
                    raise NotBipartiteError(f"odd cycle through edge ({x}, {y})")
    a = [v for v in adj if colour[v] == 0]
    b = [v for v in adj if colour[v] == 1]
    return a, b


@dataclass(frozen=True)
class EdgePartitionPair:
    """Edge cells grouped by the designated part (``cells_p``) and by the other
    part (``cells_q``). ``keys_*`` are the grouping vertices, in cell order."""

    cells_p: tuple
    cells_q: tuple
    keys_p: tuple
    keys_q: tuple
    designated: str


def _group(edges, pick) -> tuple[tuple, tuple]:
    groups: dict = {}
    for i, e in enumerate(edges):
        groups.setdefault(pick(e), []).append(i)
    keys = tuple(sorted(groups, key=label_key))
    return tuple(tuple(groups[k]) for k in keys), keys


def build_partitions(g: BipartiteGraph, designated: str | None = None) -> EdgePartitionPair:
    designated = designated or g.designated
    if designated not in ("A", "B"):
        raise ValueError("designated must be 'A' or 'B'")
    if designated == "B":
        cp, kp = _group(g.edges, lambda e: e[1])
        cq, kq = _group(g.edges, lambda e: e[0])
    else:
        cp, kp = _group(g.edges, lambda e: e[0])
        cq, kq = _group(g.edges, lambda e: e[1])
    return EdgePartitionPair(cp, cq, kp, kq, designated)


def characteristic_matrix(m: int, cells: Sequence[Sequence[int]]) -> np.ndarray:
    out = np.zeros((m, len(cells)))
    for j, cell in enumerate(cells):
        out[list(cell), j] = 1.0
    return out


def normalize_columns(a: np.ndarray) -> np.ndarray:
    return a / np.linalg.norm(a, axis=0)


@dataclass(frozen=True)
class IncidenceBundle:
    """Everything the walk needs: states, the two cell families and their matrices.

    ``C = P1^T P0`` has rows indexed by the Q-cells and columns by the P-cells.
    """

    labels: tuple
    cells_p: tuple
    cells_q: tuple
    keys_p: tuple
    keys_q: tuple
    P0: np.ndarray = field(repr=False)
    P1: np.ndarray = field(repr=False)
    P0hat: np.ndarray = field(repr=False)
    P1hat: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    Chat: np.ndarray = field(repr=False)
    Abip: np.ndarray = field(repr=False)
    connected: bool = True
    source: object = field(default=None, repr=False, compare=False)

    @property
    def num_states(self) -> int:
        return len(self.labels)


def bundle_from_cells(
    labels: Sequence,
    cells_p: Sequence[Sequence[int]],
    cells_q: Sequence[Sequence[int]],
    keys_p: Sequence | None = None,
    keys_q: Sequence | None = None,
    source=None,
) -> IncidenceBundle:
    """Build an :class:`IncidenceBundle` from two partitions of ``range(len(labels))``."""
    m = len(labels)
    for name, cells in (("P", cells_p), ("Q", cells_q)):
        flat = sorted(i for c in cells for i in c)
        if flat != list(range(m)):
            raise ValueError(f"{name}-cells do not partition the {m} states")
        if any(len(c) == 0 for c in cells):
            raise IsolatedVertexError(f"empty {name}-cell")
    P0 = characteristic_matrix(m, cells_p)
    P1 = characteristic_matrix(m, cells_q)
    P0hat, P1hat = normalize_columns(P0), normalize_columns(P1)
    C = (P1.T @ P0).round().astype(int)
    Chat = P1hat.T @ P0hat
    nq, np_ = C.shape
    Abip = np.zeros((nq + np_, nq + np_), dtype=int)
    Abip[:nq, nq:] = C
    Abip[nq:, :nq] = C.T
    pairs = [(("p", j), ("q", k)) for j, cp in enumerate(cells_p) for k, cq in enumerate(cells_q)
             if set(cp) & set(cq)]
    nodes = [("p", j) for j in range(len(cells_p))] + [("q", k) for k in range(len(cells_q))]
    connected = len(_components(nodes, pairs)) <= 1
    return IncidenceBundle(
        labels=tuple(labels),
        cells_p=tuple(tuple(c) for c in cells_p),
        cells_q=tuple(tuple(c) for c in cells_q),
        keys_p=tuple(keys_p) if keys_p is not None else tuple(range(len(cells_p))),
        keys_q=tuple(keys_q) if keys_q is not None else tuple(range(len(cells_q))),
        P0=P0, P1=P1, P0hat=P0hat, P1hat=P1hat, C=C, Chat=Chat, Abip=Abip,
        connected=connected, source=source,
    )


def incidence_bundle(g: BipartiteGraph, partitions: EdgePartitionPair | None = None) -> IncidenceBundle:
    if partitions is None:
        partitions = build_partitions(g)
    return bundle_from_cells(
        g.edges, partitions.cells_p, partitions.cells_q,
        partitions.keys_p, partitions.keys_q, source=g,
    )


# ---------------------------------------------------------------- families

def path_graph(n: int) -> BipartiteGraph:
    """P_n on v_0..v_{n-1}; edge i joins v_i and v_{i+1}."""
    if n < 2:
        raise BadSizeError(f"path needs n >= 2, got {n}")
    edges = [(i, i + 1) for i in range(n - 1)]
    return from_edge_list(range(0, n, 2), range(1, n, 2), edges, name=f"path:{n}")


def cycle_graph(n: int) -> BipartiteGraph:
    """Even cycle C_n; the wrap edge (v_0, v_{n-1}) is edge n-1."""
    if n < 4 or n % 2:
        raise BadSizeError(f"cycle needs even n >= 4, got {n}")
    edges = [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)]
    return from_edge_list(range(0, n, 2), range(1, n, 2), edges,
                          name=f"cycle:{n}", keep_order=True)


def crown_graph(n: int) -> BipartiteGraph:
    """K_{n,n} minus the matching {(i, n+i)}; part A is 0..n-1, part B n..2n-1."""
    if n < 3:
        raise BadSizeError(f"crown graph needs n >= 3, got {n}")
    edges = [(i, n + j) for i in range(n) for j in range(n) if i != j]
    return from_edge_list(range(n), range(n, 2 * n), edges, name=f"crown:{n}")


@dataclass(frozen=True)
class SimpleGraph:
    vertices: tuple
    edges: tuple

    def neighbors(self, v) -> list:
        out = [b for a, b in self.edges if a == v] + [a for a, b in self.edges if b == v]
        return sorted(out, key=label_key)

    @property
    def connected(self) -> bool:
        return len(_components(self.vertices, self.edges)) <= 1

    def arcs(self) -> list[tuple]:
        arcs = [(a, b) for a, b in self.edges] + [(b, a) for a, b in self.edges]
        return sorted(arcs, key=lambda e: (label_key(e[0]), label_key(e[1])))


def simple_graph(vertices: Iterable | None, edges: Iterable[Sequence]) -> SimpleGraph:
    es = []
    seen = set()
    for u, v in edges:
        if u == v:
            raise ValueError(f"loop at {u}")
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge ({u}, {v})")
        seen.add(key)
        es.append((u, v) if label_key(u) <= label_key(v) else (v, u))
    vs = set(vertices or ()) | {x for e in es for x in e}
    es.sort(key=edge_key)
    return SimpleGraph(tuple(sorted(vs, key=label_key)), tuple(es))


def complete_graph(n: int) -> SimpleGraph:
    if n < 2:
        raise BadSizeError(f"K_n needs n >= 2, got {n}")
    return simple_graph(range(n), [(i, j) for i in range(n) for j in range(i + 1, n)])


def subdivision(g: SimpleGraph) -> tuple[BipartiteGraph, dict]:
    """Subdivide every edge of ``g``.

    Part A holds the new midpoint vertices ``"m{a}-{b}"`` and is designated
    (it drives P); part B holds the original vertices. The returned
    ``arc_bijection`` maps bipartite edge index -> arc ``(a, b)`` of ``g``,
    where the bipartite edge joins ``a`` to the midpoint of ``ab``.
    """
    mids = {}
    bip_edges = []
    for a, b in g.edges:
        m = f"m{a}-{b}"
        mids[m] = (a, b)
        bip_edges += [(m, a), (m, b)]
    bg = from_edge_list(list(mids), list(g.vertices), bip_edges,
                        name="subdivision", designated="A")
    bijection = {}
    for i, (m, x) in enumerate(bg.edges):
        a, b = mids[m]
        bijection[i] = (x, b if x == a else a)
    return bg, bijection
