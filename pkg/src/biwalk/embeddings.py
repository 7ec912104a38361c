"""Rotation systems, facial walks and the vertex-face walk input.

Face tracing rule: after arc ``(a, b)`` the walk continues with ``(b, c)``
where ``c`` is the neighbour *preceding* ``a`` in the cyclic order at ``b``.
With this rule the GF(4) rotation system reproduces the K4 faces
``(0,1)(1,2)(2,0)``, ``(1,3)(3,2)(2,1)``, ``(0,2)(2,3)(3,0)``,
``(0,3)(3,1)(1,0)`` verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InvalidRotationError, NotPrimePowerError
from .finite_field import gf_order
from .graphs import IncidenceBundle, SimpleGraph, bundle_from_cells, label_key, simple_graph


@dataclass(frozen=True)
class RotationSystem:
    """Cyclic neighbour order at every vertex (``rotations[v]`` is one cycle)."""

    rotations: Mapping

    @property
    def vertices(self) -> list:
        return sorted(self.rotations, key=label_key)

    def graph(self) -> SimpleGraph:
        edges = {frozenset((u, v)) for u, nbrs in self.rotations.items() for v in nbrs}
        return simple_graph(self.rotations.keys(), [tuple(e) for e in edges])

    def predecessor(self, at, of):
        cyc = self.rotations[at]
        return cyc[cyc.index(of) - 1]

    def successor(self, at, of):
        cyc = self.rotations[at]
        return cyc[(cyc.index(of) + 1) % len(cyc)]

    def to_json(self) -> dict:
        return {"rotations": {str(v): list(self.rotations[v]) for v in self.vertices}}


def rotation_system(rotations: Mapping, graph: SimpleGraph | None = None) -> RotationSystem:
    rot = {v: tuple(nbrs) for v, nbrs in rotations.items()}
    for v, nbrs in rot.items():
        if len(set(nbrs)) != len(nbrs):
            raise InvalidRotationError(f"rotation at {v} repeats a neighbour")
        if v in nbrs:
            raise InvalidRotationError(f"rotation at {v} contains {v} itself")
        for w in nbrs:
            if w not in rot or v not in rot[w]:
                raise InvalidRotationError(f"{w} is in the rotation at {v} but not vice versa")
    if graph is not None:
        for v in graph.vertices:
            if sorted(rot.get(v, ()), key=label_key) != graph.neighbors(v):
                raise InvalidRotationError(f"rotation at {v} is not a permutation of its neighbours")
    return RotationSystem(rot)


def kn_rotation_system(n: int, primitive: int | None = None) -> RotationSystem:
    """Rotation ``(u+g^0, u+g^1, ..., u+g^{n-2})`` at each vertex ``u`` of K_n.

    Vertices are the integer encodings of the elements of GF(n); ``primitive``
    picks a specific generator (default: the field's smallest one).
    """
    if n < 3:
        raise NotPrimePowerError(f"K_n rotation system needs a prime power n >= 3, got {n}")
    F = gf_order(n)
    g = F.primitive if primitive is None else primitive
    if F.mult_order(g) != n - 1:
        raise ValueError(f"{g} is not a primitive element of GF({n})")
    powers = [F.pow(g, i) for i in range(n - 1)]
    return RotationSystem({u: tuple(F.add(u, x) for x in powers) for u in range(n)})


@dataclass(frozen=True)
class EmbeddedGraph:
    graph: SimpleGraph
    rotation: RotationSystem
    faces: tuple  # each face: tuple of arcs (a, b) in walk order

    @property
    def num_vertices(self) -> int:
        return len(self.graph.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.graph.edges)

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        return self.num_vertices - self.num_edges + self.num_faces

    @property
    def genus(self) -> int:
        chi = self.euler_characteristic
        if (2 - chi) % 2:
            raise InvalidRotationError(f"odd Euler characteristic {chi}")
        return (2 - chi) // 2

    def face_of_arc(self) -> dict:
        return {arc: i for i, face in enumerate(self.faces) for arc in face}

    def face_vertices(self, i: int) -> list:
        return sorted({a for a, _ in self.faces[i]}, key=label_key)

    def missed_vertices(self) -> list:
        """For each face, the vertices it does not touch."""
        vs = set(self.graph.vertices)
        return [sorted(vs - set(self.face_vertices(i)), key=label_key) for i in range(self.num_faces)]

    def faces_json(self) -> list:
        return [[list(arc) for arc in face] for face in self.faces]


def trace_faces(rotation: RotationSystem, graph: SimpleGraph | None = None) -> EmbeddedGraph:
    """Trace every facial walk of the embedding given by ``rotation``."""
    if graph is not None:
        rotation = rotation_system(rotation.rotations, graph)
    else:
        rotation = rotation_system(rotation.rotations)
        graph = rotation.graph()
    arcs = graph.arcs()
    used = set()
    faces = []
    for start in arcs:
        if start in used:
            continue
        face = []
        arc = start
        while arc not in used:
            used.add(arc)
            face.append(arc)
            a, b = arc
            arc = (b, rotation.predecessor(b, a))
        if arc != start:
            raise InvalidRotationError(f"facial walk from {start} does not close")
        faces.append(tuple(face))
    return EmbeddedGraph(graph, rotation, tuple(faces))


def kn_embedding(n: int, primitive: int | None = None) -> EmbeddedGraph:
    return trace_faces(kn_rotation_system(n, primitive))


def cycle_embedding(n: int) -> EmbeddedGraph:
    """Planar embedding of the cycle C_n (every rotation is trivial)."""
    rot = {i: ((i - 1) % n, (i + 1) % n) for i in range(n)}
    return trace_faces(RotationSystem(rot))


def vertex_face_walk_input(emb: EmbeddedGraph) -> IncidenceBundle:
    """States are the arcs; P-cells group arcs by face, Q-cells by tail."""
    arcs = emb.graph.arcs()
    index = {arc: i for i, arc in enumerate(arcs)}
    cells_p = [sorted(index[a] for a in face) for face in emb.faces]
    tails: dict = {}
    for i, (a, _) in enumerate(arcs):
        tails.setdefault(a, []).append(i)
    keys_q = sorted(tails, key=label_key)
    cells_q = [tails[v] for v in keys_q]
    keys_p = [f"f{i}" for i in range(emb.num_faces)]
    return bundle_from_cells(arcs, cells_p, cells_q, keys_p, keys_q, source=emb)


def self_dual_report(emb: EmbeddedGraph) -> dict:
    """Check the n faces / length n-1 / unique-missed-vertex pattern."""
    n = emb.num_vertices
    missed = emb.missed_vertices()
    lengths = sorted({len(f) for f in emb.faces})
    unique = all(len(m) == 1 for m in missed)
    bijective = unique and sorted((m[0] for m in missed), key=label_key) == list(emb.graph.vertices)
    return {
        "faces": emb.num_faces,
        "face_lengths": lengths,
        "each_face_misses_one_vertex": unique,
        "missed_vertex_bijection": bijective,
        "self_dual": emb.num_faces == n and lengths == [n - 1] and bijective,
    }
