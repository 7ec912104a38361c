"""Principal Hamiltonians of walk operators and the digraphs they induce."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InternalInconsistencyError,
    MinusOnePersistsError,
    NoGammaError,
    NotIsomorphicError,
)
from .graphs import IncidenceBundle, _components, label_key
from .numkit import (
    CLUSTER_TOL,
    cluster_values,
    eigh_hermitian,
    eigh_symmetric,
    exact_rank_det,
    max_abs,
)
from .walk import SpectralDecomposition, WalkOperator

REAL_TOL = 1e-8
WEIGHT_TOL = 1e-8
GAMMA_TOL = 1e-7
ENTRY_TOL = 1e-9


@dataclass(frozen=True)
class Hamiltonian:
    """Hermitian ``H`` with ``exp(iH) = U**source_power`` and spectrum in (-pi, pi]."""

    H: np.ndarray = field(repr=False)
    source_power: int
    angles: tuple
    projectors: tuple = field(repr=False)
    walk: WalkOperator | None = field(default=None, repr=False, compare=False)
    dim_minus_one: int = 0
    principal: bool = True

    @property
    def size(self) -> int:
        return self.H.shape[0]

    def unitary(self) -> np.ndarray:
        return sum(np.exp(1j * t) * E for t, E in zip(self.angles, self.projectors))

    def target(self) -> np.ndarray:
        if self.walk is None:
            raise ValueError("Hamiltonian carries no walk operator")
        return np.linalg.matrix_power(self.walk.U, self.source_power)


def _reduce_angle(t: float) -> float:
    # representative in (-pi, pi]
    r = math.remainder(t, 2 * math.pi)
    return math.pi if r == -math.pi else r


def principal_hamiltonian(
    sd: SpectralDecomposition,
    power: int = 1,
    cluster_tol: float = CLUSTER_TOL,
    pi_tol: float = 1e-9,
) -> Hamiltonian:
    """Principal Hamiltonian of ``U`` (power 1) or of ``U^2`` (power 2).

    For power 2 the angles are doubled, reduced into (-pi, pi] and the
    projectors of coinciding doubled angles are summed. This is only done when
    -1 is an eigenvalue of U; if some doubled angle lands on pi again the walk
    still has -1 in its spectrum and :class:`MinusOnePersistsError` is raised.
    """
    if power not in (1, 2):
        raise ValueError(f"power must be 1 or 2, got {power}")
    if power == 1:
        angles, projs = list(sd.angles), list(sd.projectors)
        dim_pi = sd.dim_minus_one
    else:
        if not sd.has_pi:
            raise ValueError("power 2 is only used when -1 is an eigenvalue of U")
        doubled = sorted(
            ((_reduce_angle(2 * t), E) for t, E in zip(sd.angles, sd.projectors)),
            key=lambda p: p[0],
        )
        hit = [t for t, _ in doubled if abs(abs(t) - math.pi) < pi_tol]
        if hit:
            raise MinusOnePersistsError(
                "-1 is still an eigenvalue of U^2; no Hamiltonian of the form iS exists"
            )
        vals = [t for t, _ in doubled]
        angles, projs = [], []
        for group in cluster_values(vals, cluster_tol):
            t = float(np.mean([vals[i] for i in group]))
            angles.append(0.0 if abs(t) < cluster_tol else t)
            projs.append(sum(doubled[i][1] for i in group))
        dim_pi = 0
    m = projs[0].shape[0]
    H = np.zeros((m, m), dtype=complex)
    for t, E in zip(angles, projs):
        if t == 0.0:
            continue
        H += t * E
    H = (H + H.conj().T) / 2
    return Hamiltonian(H, power, tuple(angles), tuple(projs), sd.walk, dim_pi)


@dataclass(frozen=True)
class FormReport:
    """Whether ``H = iS`` with ``S`` real skew-symmetric."""

    is_form: bool
    S: np.ndarray | None = field(repr=False)
    real_residual: float
    dim_minus_one: int
    exact: bool | None = None  # Bareiss verdict, when computed


def is_form(ham: Hamiltonian, tol: float = REAL_TOL, exact_check: bool = True) -> FormReport:
    """Test ``H = iS`` numerically and, for power 1, against invertibility of C."""
    re = max_abs(ham.H.real)
    yes = re < tol
    exact = None
    if exact_check and ham.source_power == 1 and ham.walk is not None:
        C = ham.walk.bundle.C
        exact = C.shape[0] == C.shape[1] and exact_rank_det(C).rank == C.shape[0]
        if exact != yes:
            raise InternalInconsistencyError(
                f"numeric test says {yes} (max|Re H| = {re:.3e}) but C invertible is {exact}"
            )
    S = None
    if yes:
        S = ham.H.imag.copy()
        S = (S - S.T) / 2
        np.fill_diagonal(S, 0.0)
    return FormReport(yes, S, re, ham.dim_minus_one, exact)


@dataclass(frozen=True)
class HDigraph:
    """Weighted oriented graph with skew-adjacency matrix ``S``."""

    S: np.ndarray = field(repr=False)
    arcs: tuple  # (u, v, weight) with weight > threshold
    components: tuple
    threshold: float
    labels: tuple = ()

    @property
    def size(self) -> int:
        return self.S.shape[0]

    def out_degrees(self) -> list[int]:
        deg = [0] * self.size
        for u, _, _ in self.arcs:
            deg[u] += 1
        return deg

    def to_json(self) -> dict:
        lab = self.labels or tuple(range(self.size))
        return {
            "vertices": [_jsonable(x) for x in lab],
            "arcs": [{"source": _jsonable(lab[u]), "target": _jsonable(lab[v]), "weight": w}
                     for u, v, w in self.arcs],
        }

    def to_dot(self, name: str = "H") -> str:
        lab = self.labels or tuple(range(self.size))
        lines = [f"digraph {name} {{"]
        for x in lab:
            lines.append(f'  "{x}";')
        for u, v, w in self.arcs:
            lines.append(f'  "{lab[u]}" -> "{lab[v]}" [label="{w:.6g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _jsonable(x):
    return x if isinstance(x, (int, str)) else str(x)


def h_digraph(S, weight_tol: float = WEIGHT_TOL, labels=None) -> HDigraph:
    """Arcs ``u -> v`` for every ``S[u, v]`` above ``weight_tol * max|S|``."""
    S = np.asarray(S, dtype=float)
    S = (S - S.T) / 2
    np.fill_diagonal(S, 0.0)
    big = max_abs(S)
    thr = weight_tol * big
    m = S.shape[0]
    arcs = []
    support = []
    if big > 0:
        for u in range(m):
            for v in range(m):
                if S[u, v] > thr:
                    arcs.append((u, v, float(S[u, v])))
                    support.append((u, v))
    comps = tuple(tuple(c) for c in _components(range(m), support))
    return HDigraph(S, tuple(arcs), comps, thr, tuple(labels) if labels is not None else ())


@dataclass(frozen=True)
class StructureReport:
    components: tuple  # dicts: size, complete, q
    copies: dict  # q -> number of oriented K_q components (q >= 2)
    isolated: int
    num_arcs: int
    out_degree_counts: dict
    weight_range: tuple

    def summary(self) -> str:
        parts = [f"{c} x oriented K_{q}" for q, c in sorted(self.copies.items())]
        others = sum(1 for c in self.components if not c["complete"])
        if others:
            parts.append(f"{others} other component(s)")
        if self.isolated:
            parts.append(f"{self.isolated} isolated vertex(es)")
        return ", ".join(parts) or "empty"

    def to_json(self) -> dict:
        return {
            "components": list(self.components),
            "copies": {str(q): c for q, c in sorted(self.copies.items())},
            "isolated": self.isolated,
            "num_arcs": self.num_arcs,
            "out_degree_counts": {str(d): c for d, c in sorted(self.out_degree_counts.items())},
            "weight_range": list(self.weight_range),
            "summary": self.summary(),
        }


def classify(hd: HDigraph) -> StructureReport:
    """Split the H-digraph into components and flag the oriented complete ones."""
    present = {(min(u, v), max(u, v)) for u, v, _ in hd.arcs}
    comps = []
    copies: Counter = Counter()
    isolated = 0
    for comp in hd.components:
        q = len(comp)
        if q == 1:
            isolated += 1
            continue
        pairs = sum(1 for i, a in enumerate(comp) for b in comp[i + 1:]
                    if (min(a, b), max(a, b)) in present)
        complete = pairs == q * (q - 1) // 2
        comps.append({"vertices": list(comp), "size": q, "pairs": pairs, "complete": complete})
        if complete:
            copies[q] += 1
    weights = [w for _, _, w in hd.arcs]
    return StructureReport(
        tuple(comps),
        dict(copies),
        isolated,
        len(hd.arcs),
        dict(Counter(hd.out_degrees())),
        (min(weights), max(weights)) if weights else (0.0, 0.0),
    )


def missed_vertex_map(bundle: IncidenceBundle) -> dict:
    """Map each state to ``(u, a)``.

    ``a`` is the key of the state's Q-cell and ``u`` the unique Q-key whose
    cell shares no state with the state's P-cell. For the vertex-face walk
    of an arc ``(a, b)`` this is ``(vertex missed by its face, a)``.
    """
    q_of = {}
    for key, cell in zip(bundle.keys_q, bundle.cells_q):
        for s in cell:
            q_of[s] = key
    allq = set(bundle.keys_q)
    out = {}
    for cell in bundle.cells_p:
        missed = allq - {q_of[s] for s in cell}
        if len(missed) != 1:
            raise NotIsomorphicError(
                f"P-cell {list(cell)} misses {len(missed)} Q-cells, expected exactly one"
            )
        (u,) = missed
        for s in cell:
            out[s] = (u, q_of[s])
    return out


@dataclass(frozen=True)
class LineDigraphReport:
    n: int
    vertices: int
    arcs: int
    out_degree: int
    orientation: str  # "forward" or "converse"
    mapping: dict = field(repr=False)


def _ld_violation(arcs, image, converse: bool):
    for u, v, _ in arcs:
        if converse:
            u, v = v, u
        (x, y), (y2, z) = image[u], image[v]
        if y != y2 or z == x:
            return (u, v, image[u], image[v])
    return None


def line_digraph_iso_check(
    hd: HDigraph, n: int, missed_map: dict, labels=None, orientation: str = "auto"
) -> LineDigraphReport:
    """Verify that ``missed_map`` is an isomorphism from the H-digraph onto LD(K_n).

    LD(K_n) has the ordered pairs ``(x, y)``, ``x != y``, as vertices and arcs
    ``(x, y) -> (y, z)`` with ``z != x``. With ``orientation="converse"`` every
    H-digraph arc is reversed before comparing; ``"auto"`` tries the forward
    direction first. Since ``(x, y) -> (y, x)`` maps LD(K_n) onto its converse,
    either outcome proves the H-digraph is isomorphic to LD(K_n).

    ``labels`` is the vertex set of K_n (default: the distinct labels that
    occur in ``missed_map``).
    """
    if orientation not in ("auto", "forward", "converse"):
        raise ValueError(f"unknown orientation {orientation!r}")
    if labels is None:
        labels = sorted({x for pair in missed_map.values() for x in pair}, key=label_key)
    labels = list(labels)
    if len(labels) != n:
        raise NotIsomorphicError(f"map uses {len(labels)} vertex labels, expected {n}")
    ld_vertices = {(x, y) for x in labels for y in labels if x != y}
    if set(missed_map) != set(range(hd.size)):
        raise NotIsomorphicError("map does not cover every state")
    image = [missed_map[s] for s in range(hd.size)]
    if len(set(image)) != len(image) or set(image) != ld_vertices:
        raise NotIsomorphicError("map is not a bijection onto the ordered pairs of K_n")
    expected = n * (n - 1) * (n - 2)
    if len(hd.arcs) != expected:
        raise NotIsomorphicError(f"{len(hd.arcs)} arcs, LD(K_{n}) has {expected}")
    tries = ["forward", "converse"] if orientation == "auto" else [orientation]
    first = None
    for o in tries:
        bad = _ld_violation(hd.arcs, image, o == "converse")
        if bad is None:
            # arc counts agree and every arc is an LD arc, so the arc sets coincide
            return LineDigraphReport(n, hd.size, len(hd.arcs), n - 2, o, dict(missed_map))
        first = first or (o, bad)
    o, (u, v, a, b) = first
    raise NotIsomorphicError(f"{o} arc {u}->{v} maps to {a}->{b}, not a line-digraph arc")


@dataclass(frozen=True)
class SkewIdentityReport:
    gamma: float
    residual: float
    variant: str
    entry_rule_ok: bool | None
    distinct_eigenvalues: int
    skew: np.ndarray | None = field(repr=False, default=None)
    kl: int | None = None


def _cell_sizes(cells) -> int | None:
    sizes = {len(c) for c in cells}
    return sizes.pop() if len(sizes) == 1 else None


def _entry_rule(bundle: IncidenceBundle) -> np.ndarray:
    # c0 = Q-cell (applied first), c1 = P-cell
    m = bundle.num_states
    q_of = np.empty(m, dtype=int)
    p_of = np.empty(m, dtype=int)
    for idx, cell in enumerate(bundle.cells_q):
        q_of[list(cell)] = idx
    for idx, cell in enumerate(bundle.cells_p):
        p_of[list(cell)] = idx
    cells_q = [set(c) for c in bundle.cells_q]
    cells_p = [set(c) for c in bundle.cells_p]
    R = np.zeros((m, m), dtype=int)
    for i in range(m):
        for j in range(m):
            a = len(cells_q[q_of[i]] & cells_p[p_of[j]])
            b = len(cells_p[p_of[i]] & cells_q[q_of[j]])
            if a == 1 and b == 0:
                R[i, j] = 1
            elif a == 0 and b == 1:
                R[i, j] = -1
    return R


def skew_identity_check(
    w: WalkOperator,
    k: int | None = None,
    l: int | None = None,
    variant: str = "square",
    tol: float = GAMMA_TOL,
    entry_tol: float = ENTRY_TOL,
    branches: int = 4,
) -> SkewIdentityReport:
    """Find real ``gamma`` with ``U^2 = exp(gamma K)`` or ``U = exp(gamma K)``.

    ``variant="square"`` uses ``K = U - U^T`` and target ``U^2``;
    ``variant="single"`` uses ``K = U^T - U`` and target ``U``. ``gamma`` is
    read off from the phase of the target on the eigenspace of ``iK`` with
    the largest eigenvalue; the ``2 pi`` branches within ``branches`` of the
    base solution are tried and the one with smallest residual is kept.
    """
    if variant not in ("square", "single"):
        raise ValueError(f"unknown variant {variant!r}")
    U = w.U
    if variant == "square":
        K, target = U - U.T, U @ U
    else:
        K, target = U.T - U, U
    dec = eigh_hermitian(1j * K)
    lam = dec.values
    top = float(lam[-1])
    cands = []
    if top > 1e-12:
        V = dec.vectors[:, np.abs(lam - top) < 1e-8 * max(1.0, top)]
        block = V.conj().T @ target @ V
        phi = math.atan2(np.trace(block).imag, np.trace(block).real)
        # exp(gamma K) = exp(-i gamma (iK)) acts as exp(-i gamma top) there
        cands = [(-phi + 2 * math.pi * j) / top for j in range(-branches, branches + 1)]
    else:
        cands = [0.0]
    vecs = dec.vectors
    best = (math.inf, 0.0)
    for g in cands:
        E = (vecs * np.exp(-1j * g * lam)) @ vecs.conj().T
        r = max_abs(E - target)
        if r < best[0] - 1e-15:
            best = (r, g)
    residual, gamma = best

    b = w.bundle
    if k is None:
        k = _cell_sizes(b.cells_p)
    if l is None:
        l = _cell_sizes(b.cells_q)
    entry_ok = None
    skew = None
    kl = None
    if k is not None and l is not None:
        kl = k * l
        skew = kl / 4 * (U.T - U)
        rounded = np.rint(skew)
        entry_ok = bool(
            max_abs(skew - rounded) < entry_tol
            and np.all(np.isin(rounded, (-1, 0, 1)))
            and np.array_equal(rounded.astype(int), _entry_rule(b))
        )
    adj = b.Abip
    ev = eigh_symmetric(adj).values
    distinct = len(cluster_values(ev, 1e-8 * max(1.0, max_abs(ev))))
    if residual > tol:
        raise NoGammaError(
            f"no real gamma found (best residual {residual:.3e}); "
            f"the graph has {distinct} distinct eigenvalues",
            residual,
        )
    return SkewIdentityReport(gamma, residual, variant, entry_ok, distinct, skew, kl)
