import numpy as np
import pytest

from biwalk.errors import BadSizeError, DriftExceededError, NotUniversalError
from biwalk.graphs import path_graph
from biwalk.hamiltonian import principal_hamiltonian
from biwalk.numkit import max_abs
from biwalk.pst import (
    UPSTGraph,
    continuous_evolve,
    discrete_pst_scan,
    upst_alpha,
    upst_generate,
    upst_verify,
    upst_weights,
)
from biwalk.walk import WalkOperator, permutation_report, spectral_decomposition, walk_from_graph


def test_ex8_first_step(ex8):
    rep = discrete_pst_scan(walk_from_graph(ex8), 1)
    assert [(e.source, e.target, e.k) for e in rep.events] == [(0, 5, 1), (2, 4, 1), (5, 6, 1), (6, 1, 1)]
    assert rep.events[0].fidelity == pytest.approx(1.0, abs=1e-12)


def test_ex8_methods_agree(ex8):
    w = walk_from_graph(ex8)
    a = discrete_pst_scan(w, 3000, method="eigen")
    b = discrete_pst_scan(w, 3000, method="multiply")
    assert [(e.k, e.source, e.target) for e in a.events] == [(e.k, e.source, e.target) for e in b.events]
    for pair in a.suprema:
        assert a.suprema[pair][0] == pytest.approx(b.suprema[pair][0], abs=1e-9)


def test_ex8_scan_deterministic_and_threaded(ex8):
    w = walk_from_graph(ex8)
    a = discrete_pst_scan(w, 50000, chunk=7000)
    b = discrete_pst_scan(w, 50000, chunk=5000, workers=3)
    assert a.events == b.events and a.one_directional == b.one_directional
    assert (5, 0) not in a.pairs() and (0, 5) in a.one_directional


def test_fidelity_bound(ex8):
    rep = discrete_pst_scan(walk_from_graph(ex8), 20000)
    assert max(f for f, _ in rep.suprema.values()) <= 1 + 1e-9


def test_path8_covers_all_pairs():
    rep = discrete_pst_scan(walk_from_graph(path_graph(8)), 7, pst_tol=1e-9)
    pairs = [(e.source, e.target) for e in rep.events]
    assert len(pairs) == 42 and len(set(pairs)) == 42
    assert rep.one_directional == ()


def test_drift_detected():
    w = walk_from_graph(path_graph(6))
    leaky = WalkOperator(w.U * (1 + 1e-9), w.P, w.Q, w.bundle)
    with pytest.raises(DriftExceededError):
        discrete_pst_scan(leaky, 2000, method="multiply")


def test_scan_arguments(ex8):
    w = walk_from_graph(ex8)
    with pytest.raises(ValueError):
        discrete_pst_scan(w, 0)
    with pytest.raises(ValueError):
        discrete_pst_scan(w, 5, method="guess")


def test_discrete_continuous_consistency():
    w = walk_from_graph(path_graph(8))
    ham = principal_hamiltonian(spectral_decomposition(w))
    order = permutation_report(w).order
    for k in range(1, order + 1):
        assert max_abs(continuous_evolve(ham.H, k) - np.linalg.matrix_power(w.U, k)) < 1e-8


def test_upst_alpha_cases():
    assert upst_alpha(1, 3) == 1 and upst_alpha(0, 3) == 2
    assert upst_alpha(3, 0) == -2 and upst_alpha(4, 0) == 2


@pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
def test_upst_weights_antisymmetric(n):
    w = upst_weights(n)
    assert np.all(np.diag(w) == 0)
    assert max_abs(w + w.T) < 1e-12


@pytest.mark.parametrize("n", [4, 6, 8])
def test_upst_matches_path_walk(n):
    G = upst_generate(n)
    U = walk_from_graph(path_graph(n)).U
    assert max_abs(continuous_evolve(G.H, 1.0) - U) < 1e-9
    rep = upst_verify(G)
    assert len(rep.schedule) == (n - 1) * (n - 2)
    assert rep.permutation_steps == tuple(range(1, n))
    assert rep.max_fidelity_excess < 1e-9


def test_upst_schedule_rows():
    rep = upst_verify(upst_generate(4))
    assert rep.to_rows()[:2] == [(0, 1, 1), (0, 2, 2)]


def test_upst_perturbed_not_universal():
    G = upst_generate(8)
    w = G.w.copy()
    w[0, 1] += 0.01
    w[1, 0] -= 0.01
    with pytest.raises(NotUniversalError) as exc:
        upst_verify(UPSTGraph(8, 1j * w, w), 1e-6)
    assert exc.value.missing


@pytest.mark.parametrize("n", [3, 7, 2])
def test_upst_bad_size(n):
    with pytest.raises(BadSizeError):
        upst_generate(n)
