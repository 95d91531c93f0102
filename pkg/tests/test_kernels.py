import numpy as np
import pytest

from theseus.kernels import (
    MonomialTable,
    _amps_numpy,
    _grad_numpy,
    compute_amps,
    compute_grad,
)


def random_table(rng, n_edges=10, n_terms=60, deg=3, n_groups=7):
    coeffs = rng.normal(size=n_terms) + 1j * rng.normal(size=n_terms)
    edges = rng.integers(0, n_edges, size=(n_terms, deg))
    groups = rng.integers(0, n_groups, size=n_terms)
    return MonomialTable(coeffs, edges, groups, n_groups, n_edges)


def test_amps_numba_matches_numpy(rng):
    t = random_table(rng)
    w = rng.normal(size=t.n_edges) + 1j * rng.normal(size=t.n_edges)
    fast = compute_amps(w, t.coeffs, t.edges, t.groups, t.n_groups)
    slow = _amps_numpy(w, t.coeffs, t.edges, t.groups, t.n_groups)
    assert np.allclose(fast, slow, atol=1e-12)


def test_grad_numba_matches_numpy(rng):
    t = random_table(rng)
    w = rng.normal(size=t.n_edges) + 1j * rng.normal(size=t.n_edges)
    lam = rng.normal(size=t.n_groups) + 1j * rng.normal(size=t.n_groups)
    fast = compute_grad(w, t.coeffs, t.edges, t.groups, lam, t.n_edges)
    slow = _grad_numpy(w, t.coeffs, t.edges, t.groups, lam, t.n_edges)
    assert np.allclose(fast, slow, atol=1e-12)


def test_gradient_matches_directional_difference(rng):
    t = random_table(rng, deg=2)
    w = rng.normal(size=t.n_edges) + 1j * rng.normal(size=t.n_edges)
    lam = rng.normal(size=t.n_groups) + 1j * rng.normal(size=t.n_groups)
    g = t.gradient(w, lam)
    h = 1e-7
    for e in range(t.n_edges):
        wp = w.copy()
        wp[e] += h
        diff = (np.sum(lam * t.amplitudes(wp)) - np.sum(lam * t.amplitudes(w))) / h
        assert g[e] == pytest.approx(diff, rel=1e-5, abs=1e-7)


def test_repeated_edge_indices_differentiate_correctly(rng):
    # d/dw of w^2 is 2w when the same edge index appears twice in a monomial
    t = MonomialTable(np.array([1.0 + 0j]), np.array([[0, 0]]), np.array([0]), 1, 1)
    w = np.array([0.7 + 0.2j])
    lam = np.array([1.0 + 0j])
    assert t.amplitudes(w)[0] == pytest.approx(w[0] ** 2)
    assert t.gradient(w, lam)[0] == pytest.approx(2 * w[0])


def test_degree_zero_table():
    t = MonomialTable(np.array([2.5 + 0j]), np.zeros((1, 0), np.int64), np.array([0]), 1, 3)
    w = np.array([1j, 2.0, 0.5])
    assert t.amplitudes(w)[0] == pytest.approx(2.5)
    assert np.allclose(t.gradient(w, np.array([1.0 + 0j])), 0.0)


def test_env_flag_selects_numpy(tmp_path):
    import subprocess
    import sys

    code = (
        "import theseus.kernels as k; print(k.USING_NUMBA)"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True,
        env={"PATH": "/usr/bin:/bin", "THESEUS_NO_NUMBA": "1",
             "PYTHONPATH": ":".join(__import__("sys").path)},
    )
    assert out.stdout.strip() == "False"
