"""Perfect state transfer: discrete scans, continuous evolution, universal PST."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BadSizeError, DriftExceededError, NotUniversalError
from .numkit import eigh_hermitian, expm_hermitian, max_abs
from .walk import SpectralDecomposition, WalkOperator, spectral_decomposition

PST_TOL = 1e-6
PERM_PST_TOL = 1e-9
DRIFT_TOL = 1e-7
DRIFT_EVERY = 1000


@dataclass(frozen=True, order=True)
class PSTEvent:
    """Transfer ``source -> target`` at step ``k`` (or time ``k`` when continuous)."""

    k: float
    source: int
    target: int
    fidelity: float = field(compare=False)

    def to_json(self) -> dict:
        return {"source": self.source, "target": self.target, "k": self.k, "fidelity": self.fidelity}


@dataclass(frozen=True)
class ScanReport:
    events: tuple
    suprema: dict = field(repr=False)  # (a, b) -> (max fidelity, first step attaining it)
    one_directional: tuple  # (a, b) with an event a -> b but none b -> a
    k_max: int
    method: str

    def pairs(self) -> set:
        return {(e.source, e.target) for e in self.events}


def _chunk_eigen(angles, flat, m, k0, k1, thr):
    ks = np.arange(k0, k1, dtype=float)
    phases = np.exp(1j * np.outer(ks, angles))
    mods = np.abs(phases @ flat).reshape(len(ks), m, m)  # mods[k, b, a] = |U^k_{b,a}|
    best = mods.max(axis=0)
    arg = mods.argmax(axis=0) + k0
    hits = np.argwhere(mods >= thr)
    events = [(k0 + int(i), int(a), int(b), float(mods[i, b, a])) for i, b, a in hits]
    return best, arg, events


def _scan_eigen(sd: SpectralDecomposition, m, k_max, thr, chunk, workers):
    angles = np.array(sd.angles)
    flat = np.stack([E.reshape(-1) for E in sd.projectors])
    bounds = [(k, min(k + chunk, k_max + 1)) for k in range(1, k_max + 1, chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(lambda b: _chunk_eigen(angles, flat, m, b[0], b[1], thr), bounds))
    else:
        parts = [_chunk_eigen(angles, flat, m, a, b, thr) for a, b in bounds]
    best = np.zeros((m, m))
    arg = np.zeros((m, m), dtype=int)
    events = []
    for b, a, ev in parts:
        better = b > best + 1e-15
        best = np.where(better, b, best)
        arg = np.where(better, a, arg)
        events.extend(ev)
    return best, arg, events


def _scan_multiply(U, k_max, thr, drift_tol):
    m = U.shape[0]
    eye = np.eye(m)
    M = eye.copy()
    best = np.zeros((m, m))
    arg = np.zeros((m, m), dtype=int)
    events = []
    for k in range(1, k_max + 1):
        M = U @ M
        mods = np.abs(M)
        better = mods > best + 1e-15
        best = np.where(better, mods, best)
        arg = np.where(better, k, arg)
        for b, a in np.argwhere(mods >= thr):
            events.append((k, int(a), int(b), float(mods[b, a])))
        if k % DRIFT_EVERY == 0:
            drift = max_abs(M @ M.conj().T - eye)
            if drift >= drift_tol:
                raise DriftExceededError(
                    f"orthogonality drift {drift:.3e} at step {k}; use the eigen method"
                )
    return best, arg, events


def discrete_pst_scan(
    w: WalkOperator,
    k_max: int,
    pst_tol: float = PST_TOL,
    method: str = "eigen",
    chunk: int = 20000,
    workers: int = 1,
    sd: SpectralDecomposition | None = None,
    drift_tol: float = DRIFT_TOL,
) -> ScanReport:
    """Report every ``a -> b``, ``a != b``, with ``|U^k[b, a]| >= 1 - pst_tol``, ``1 <= k <= k_max``.

    ``method="eigen"`` evaluates ``U^k = sum_r exp(i k theta_r) E_r`` in
    vectorized blocks of ``chunk`` steps (optionally on ``workers``
    threads); ``method="multiply"`` multiplies by U repeatedly and checks
    orthogonality drift every 1000 steps.
    """
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    m = w.size
    thr = 1.0 - pst_tol
    if method == "eigen":
        if sd is None:
            sd = spectral_decomposition(w)
        best, arg, raw = _scan_eigen(sd, m, k_max, thr, chunk, workers)
    elif method == "multiply":
        best, arg, raw = _scan_multiply(w.U, k_max, thr, drift_tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    events = sorted(PSTEvent(k, a, b, f) for k, a, b, f in raw if a != b)
    suprema = {
        (a, b): (float(best[b, a]), int(arg[b, a]))
        for a in range(m) for b in range(m) if a != b
    }
    pairs = {(e.source, e.target) for e in events}
    one_way = tuple(sorted((a, b) for a, b in pairs if (b, a) not in pairs))
    return ScanReport(tuple(events), suprema, one_way, k_max, method)


def continuous_evolve(H, t: float) -> np.ndarray:
    """``exp(i t H)`` for Hermitian ``H``."""
    return expm_hermitian(H, t)


def upst_alpha(s: int, t: int) -> float:
    """Argument of the sine sum for the weight of ``(s, t)``."""
    if s % 2 and t % 2:
        return (t - s) / 2
    if s % 2 == 0 and t % 2:
        return (s + t + 1) / 2
    if s % 2 and t % 2 == 0:
        return (-t - s - 1) / 2
    return (s - t) / 2


def upst_weights(n: int) -> np.ndarray:
    """Weight matrix of the oriented complete graph on ``n - 1`` vertices."""
    if n < 4 or n % 2:
        raise BadSizeError(f"n must be even and at least 4, got {n}")
    m = n - 1
    lam = 2 * math.pi * np.arange(1, n // 2) / m
    W = np.zeros((m, m))
    for s in range(m):
        for t in range(m):
            if s != t:
                W[s, t] = 2 / m * float(np.sum(lam * np.sin(lam * upst_alpha(s, t))))
    return W


@dataclass(frozen=True)
class UPSTGraph:
    n: int
    H: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.H.shape[0]


def upst_generate(n: int) -> UPSTGraph:
    w = upst_weights(n)
    return UPSTGraph(n, 1j * w, w)


@dataclass(frozen=True)
class UPSTReport:
    schedule: dict  # (a, b) -> first k with exp(ikH)[b, a] of modulus 1
    permutation_steps: tuple  # k values where exp(ikH) is a permutation matrix
    max_fidelity_excess: float

    def to_rows(self) -> list[tuple]:
        return [(a, b, k) for (a, b), k in sorted(self.schedule.items())]


def upst_verify(G: UPSTGraph, pst_tol: float = PERM_PST_TOL) -> UPSTReport:
    """Check that ``exp(ikH)``, ``k = 1..n-1``, realize every ordered transfer."""
    m = G.size
    dec = eigh_hermitian(G.H)
    schedule: dict = {}
    perm_steps = []
    excess = 0.0
    for k in range(1, m + 1):
        mods = np.abs(expm_hermitian(G.H, k, dec))
        excess = max(excess, float(mods.max()) - 1.0)
        near = (np.abs(mods - 1) < pst_tol) | (mods < pst_tol)
        ones = np.abs(mods - 1) < pst_tol
        if near.all() and (ones.sum(axis=0) == 1).all() and (ones.sum(axis=1) == 1).all():
            perm_steps.append(k)
        for b, a in np.argwhere(mods >= 1 - pst_tol):
            if a != b:
                schedule.setdefault((int(a), int(b)), k)
    missing = [(a, b) for a in range(m) for b in range(m) if a != b and (a, b) not in schedule]
    if missing:
        raise NotUniversalError(
            f"{len(missing)} ordered pairs never transfer within k <= {m}: {missing[:5]}",
            missing,
        )
    return UPSTReport(schedule, tuple(perm_steps), excess)
