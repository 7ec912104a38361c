"""Bipartite walk operator U = (2P - I)(2Q - I), its spectrum and evolution."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .embeddings import EmbeddedGraph, vertex_face_walk_input
from .errors import (
    DisconnectedError,
    InternalInconsistencyError,
    MismatchError,
    NotUnitError,
    SpectralMismatchError,
)
from .graphs import (
    IncidenceBundle,
    SimpleGraph,
    build_partitions,
    from_edge_list,
    incidence_bundle,
    label_key,
    subdivision,
)
from .numkit import CLUSTER_TOL, cluster_values, eigh_symmetric, exact_rank_det, max_abs

MU_WINDOW = 1e-9
KERNEL_TOL = 1e-9
SPECTRAL_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class WalkOperator:
    U: np.ndarray = field(repr=False)
    P: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)
    bundle: IncidenceBundle = field(repr=False)

    @property
    def size(self) -> int:
        return self.U.shape[0]


def _cell_projection(char: np.ndarray) -> np.ndarray:
    # Phat Phat^T, formed as P D^{-1} P^T so that dyadic cell sizes stay exact
    return (char / char.sum(axis=0)) @ char.T


def build_walk(bundle: IncidenceBundle) -> WalkOperator:
    P = _cell_projection(bundle.P0.astype(float))
    Q = _cell_projection(bundle.P1.astype(float))
    eye = np.eye(bundle.num_states)
    U = (2 * P - eye) @ (2 * Q - eye)
    return WalkOperator(U, P, Q, bundle)


def walk_from_graph(g, designated: str | None = None) -> WalkOperator:
    return build_walk(incidence_bundle(g, build_partitions(g, designated)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-angles in (-pi, pi] (ascending) paired with eigenprojectors of U."""

    angles: tuple
    projectors: tuple = field(repr=False)
    dim_minus_one: int = 0
    walk: WalkOperator | None = field(default=None, repr=False, compare=False)

    @property
    def has_zero(self) -> bool:
        return any(t == 0.0 for t in self.angles)

    @property
    def has_pi(self) -> bool:
        return any(t == math.pi for t in self.angles)

    def ranks(self) -> list[int]:
        return [int(round(np.trace(E).real)) for E in self.projectors]

    def power(self, k: float) -> np.ndarray:
        return sum(np.exp(1j * k * t) * E for t, E in zip(self.angles, self.projectors))

    def eigenvalue_angles(self) -> np.ndarray:
        """Angles repeated by multiplicity, ascending."""
        return np.array([t for t, r in zip(self.angles, self.ranks()) for _ in range(r)])

    def to_json(self) -> list[dict]:
        return [
            {
                "theta": float(t),
                "projector_real": E.real.tolist(),
                "projector_imag": E.imag.tolist(),
            }
            for t, E in zip(self.angles, self.projectors)
        ]


def check_decomposition(
    U: np.ndarray, angles, projectors, tol: float = SPECTRAL_CHECK_TOL
) -> dict:
    """Max-abs residuals of the spectral-decomposition identities."""
    m = U.shape[0]
    eye = np.eye(m)
    res = {
        "sum_to_identity": max_abs(sum(projectors) - eye) if projectors else max_abs(eye),
        "reconstruction": max_abs(sum(np.exp(1j * t) * E for t, E in zip(angles, projectors)) - U),
        "idempotent": max((max_abs(E @ E - E) for E in projectors), default=0.0),
        "orthogonal": 0.0,
        "hermitian": max((max_abs(E - E.conj().T) for E in projectors), default=0.0),
    }
    for i, Ei in enumerate(projectors):
        for Ej in projectors[i + 1:]:
            res["orthogonal"] = max(res["orthogonal"], max_abs(Ei @ Ej))
    res["ok"] = all(v < tol for v in res.values())
    return res


def spectral_decomposition(
    w: WalkOperator,
    cluster_tol: float = CLUSTER_TOL,
    mu_window: float = MU_WINDOW,
    check_tol: float = SPECTRAL_CHECK_TOL,
) -> SpectralDecomposition:
    """Eigenprojectors of U assembled from the spectrum of Chat Chat^T.

    Each eigenvalue ``mu`` of ``Chat Chat^T`` strictly inside (0, 1) gives the
    conjugate pair ``e^{+-i theta}`` with ``cos theta = 2 mu - 1``. The
    1-eigenspace is ``span{1}`` plus ``ker P ∩ ker Q``; the (-1)-eigenspace is
    whatever remains, and its dimension is checked against the exact rank of C.
    """
    b = w.bundle
    if not b.connected:
        raise DisconnectedError("spectral decomposition needs a connected graph")
    m = w.size
    eye = np.eye(m)
    P = w.P
    chat = b.Chat
    gram = chat @ chat.T
    dec = eigh_symmetric((gram + gram.T) / 2)
    pairs = []
    for group in cluster_values(dec.values, cluster_tol):
        mu = float(np.mean(dec.values[group]))
        if not (mu_window < mu < 1 - mu_window):
            continue
        v = dec.vectors[:, group]
        W = b.P1hat @ (v @ v.T) @ b.P1hat.T
        theta = math.acos(2 * mu - 1)
        s2 = math.sin(theta) ** 2
        ep = np.exp(1j * theta)
        PW, WP = P @ W, W @ P
        E = ((math.cos(theta) + 1) * W - (ep + 1) * PW - (ep.conjugate() + 1) * WP + 2 * P @ WP) / s2
        pairs.append((theta, E))
        pairs.append((-theta, E.conj()))

    kern = eigh_symmetric(P + w.Q)
    kvec = kern.vectors[:, kern.values < KERNEL_TOL]
    E0 = np.full((m, m), 1.0 / m) + kvec @ kvec.T
    pairs.append((0.0, E0.astype(complex)))

    C = b.C
    dim_pi = C.shape[0] + C.shape[1] - 2 * exact_rank_det(C).rank
    Epi = eye - sum(E for _, E in pairs)
    trace_pi = float(np.trace(Epi).real)
    if abs(trace_pi - dim_pi) > 1e-6:
        raise SpectralMismatchError(
            f"(-1)-eigenspace has trace {trace_pi:.6g}, expected {dim_pi} from rank(C)"
        )
    if dim_pi:
        pairs.append((math.pi, Epi.real.astype(complex)))
    elif max_abs(Epi) > check_tol:
        raise SpectralMismatchError(f"residual projector of size {max_abs(Epi):.3e} with dim E_pi = 0")

    pairs.sort(key=lambda p: p[0])
    angles = tuple(p[0] for p in pairs)
    projs = tuple(p[1] for p in pairs)
    res = check_decomposition(w.U, angles, projs, check_tol)
    if not res["ok"]:
        raise SpectralMismatchError(f"spectral identities fail: {res}")
    return SpectralDecomposition(angles, projs, dim_pi, w)


def evolve(w: WalkOperator, state, k: int, norm_tol: float = 1e-10) -> np.ndarray:
    z = np.asarray(state, dtype=complex)
    if abs(np.linalg.norm(z) - 1) > norm_tol:
        raise NotUnitError(f"state has norm {np.linalg.norm(z):.12g}")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return np.linalg.matrix_power(w.U, k) @ z


@dataclass(frozen=True)
class PermutationReport:
    is_permutation: bool
    cycles: tuple = ()
    order: int | None = None
    mapping: tuple = ()  # mapping[i] = j  when  U e_i = e_j


def permutation_report(w: WalkOperator, tol: float = 1e-9) -> PermutationReport:
    U = w.U
    m = w.size
    mapping = []
    ok = True
    for i in range(m):
        col = U[:, i]
        ones = np.flatnonzero(np.abs(col - 1) < tol)
        if len(ones) != 1 or np.any(np.abs(np.delete(col, ones[0])) >= tol):
            ok = False
            break
        mapping.append(int(ones[0]))
    if ok and sorted(mapping) != list(range(m)):
        ok = False
    # a walk is a permutation iff every cell has at most two states
    small_cells = max(len(c) for c in w.bundle.cells_p + w.bundle.cells_q) <= 2
    if w.bundle.connected and ok != small_cells:
        raise InternalInconsistencyError(
            f"permutation test ({ok}) disagrees with the degree criterion ({small_cells})"
        )
    if not ok:
        return PermutationReport(False)
    seen = set()
    cycles = []
    for s in range(m):
        if s in seen:
            continue
        cyc = [s]
        seen.add(s)
        j = mapping[s]
        while j != s:
            cyc.append(j)
            seen.add(j)
            j = mapping[j]
        cycles.append(tuple(cyc))
    order = 1
    for c in cycles:
        order = order * len(c) // math.gcd(order, len(c))
    return PermutationReport(True, tuple(cycles), order, tuple(mapping))


@dataclass(frozen=True)
class EquivalenceReport:
    deviation: float
    tol: float
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.deviation < self.tol


def grover_coin(d: int) -> np.ndarray:
    return np.full((d, d), 2.0 / d) - np.eye(d)


def arc_reversal_walk(g: SimpleGraph) -> tuple[np.ndarray, list]:
    """``R · (⊕_v Grover(deg v))`` on the arcs of ``g`` sorted by (tail, head)."""
    arcs = g.arcs()
    idx = {a: i for i, a in enumerate(arcs)}
    m = len(arcs)
    coin = np.zeros((m, m))
    by_tail: dict = {}
    for a in arcs:
        by_tail.setdefault(a[0], []).append(idx[a])
    for members in by_tail.values():
        coin[np.ix_(members, members)] = grover_coin(len(members))
    R = np.zeros((m, m))
    for (a, b), i in idx.items():
        R[idx[(b, a)], i] = 1.0
    return R @ coin, arcs


def check_arc_reversal_equivalence(g: SimpleGraph, tol: float = 1e-12) -> EquivalenceReport:
    """Compare the subdivision bipartite walk with the Grover arc-reversal walk."""
    if not g.connected:
        raise DisconnectedError("arc-reversal check needs a connected graph")
    bg, bij = subdivision(g)
    u_bip = walk_from_graph(bg).U
    u_arc, arcs = arc_reversal_walk(g)
    idx = {a: i for i, a in enumerate(arcs)}
    m = len(arcs)
    perm = np.zeros((m, m))
    for e, arc in bij.items():
        perm[idx[arc], e] = 1.0
    dev = max_abs(perm @ u_bip @ perm.T - u_arc)
    report = EquivalenceReport(dev, tol, {"states": m, "arcs": arcs})
    if not report.ok:
        raise MismatchError(f"arc-reversal walks differ by {dev:.3e}", dev)
    return report


def _unit_columns(mat: np.ndarray) -> np.ndarray:
    return mat / np.linalg.norm(mat, axis=0)


def check_vertex_face_equivalence(emb: EmbeddedGraph, tol: float = 1e-12) -> EquivalenceReport:
    """Vertex-face walk built three ways must give the same matrix.

    1. directly from the arc-face and arc-tail incidence matrices;
    2. via :func:`vertex_face_walk_input` and :func:`build_walk`;
    3. as the bipartite walk on the vertex-face incidence graph (only when
       that graph is simple, i.e. no face visits a vertex twice).
    """
    arcs = emb.graph.arcs()
    m = len(arcs)
    face_of = emb.face_of_arc()
    tails = sorted({a for a, _ in arcs}, key=label_key)
    M = np.zeros((m, emb.num_faces))
    N = np.zeros((m, len(tails)))
    for i, arc in enumerate(arcs):
        M[i, face_of[arc]] = 1.0
        N[i, tails.index(arc[0])] = 1.0
    Mh, Nh = _unit_columns(M), _unit_columns(N)
    eye = np.eye(m)
    u_direct = (2 * Mh @ Mh.T - eye) @ (2 * Nh @ Nh.T - eye)
    u_bundle = build_walk(vertex_face_walk_input(emb)).U
    dev = max_abs(u_direct - u_bundle)
    details = {"states": m, "direct_vs_bundle": dev}

    incidence = [(a, f"face{face_of[(a, b)]}") for a, b in arcs]
    if len(set(incidence)) == m:
        ig = from_edge_list(tails, [f"face{i}" for i in range(emb.num_faces)], incidence,
                            name="vertex-face incidence", designated="B")
        u_ig = walk_from_graph(ig).U
        where = {e: i for i, e in enumerate(incidence)}
        perm = np.zeros((m, m))
        for j, e in enumerate(ig.edges):
            perm[where[e], j] = 1.0
        d3 = max_abs(perm @ u_ig @ perm.T - u_direct)
        details["direct_vs_incidence_graph"] = d3
        dev = max(dev, d3)
    report = EquivalenceReport(dev, tol, details)
    if not report.ok:
        raise MismatchError(f"vertex-face constructions differ by {dev:.3e}", dev)
    return report
