"""Hot numeric kernels: polynomial amplitude sums and their gradients.

Amplitudes are grouped monomials over complex edge weights: term t is
coeff_t * prod_k w[edges[t, k]].  The same tables serve fidelity values
(amps) and analytic gradients (leave-one-out products scattered back
onto edges).

Numba-compiled versions are used when available; set THESEUS_NO_NUMBA=1
to force the pure-numpy path (benchmarks/compare_kernels.py measures the
gap).
"""

from __future__ import annotations

import os

import numpy as np


def _amps_numpy(w, coeffs, edges, groups, n_groups):
    out = np.zeros(n_groups, dtype=np.complex128)
    prods = coeffs * np.prod(w[edges], axis=1)
    np.add.at(out, groups, prods)
    return out


def _grad_numpy(w, coeffs, edges, groups, lam, n_edges):
    grad = np.zeros(n_edges, dtype=np.complex128)
    factors = w[edges]
    m, deg = edges.shape
    prefix = np.ones((m, deg), dtype=np.complex128)
    suffix = np.ones((m, deg), dtype=np.complex128)
    for k in range(1, deg):
        prefix[:, k] = prefix[:, k - 1] * factors[:, k - 1]
        suffix[:, deg - 1 - k] = suffix[:, deg - k] * factors[:, deg - k]
    contrib = (coeffs * lam[groups])[:, None] * prefix * suffix
    np.add.at(grad, edges, contrib)
    return grad


def _make_numba_kernels():
    import numba

    @numba.njit(cache=True)
    def amps(w, coeffs, edges, groups, n_groups):
        out = np.zeros(n_groups, dtype=np.complex128)
        m, deg = edges.shape
        for t in range(m):
            p = coeffs[t]
            for k in range(deg):
                p *= w[edges[t, k]]
            out[groups[t]] += p
        return out

    @numba.njit(cache=True)
    def grad(w, coeffs, edges, groups, lam, n_edges):
        out = np.zeros(n_edges, dtype=np.complex128)
        m, deg = edges.shape
        for t in range(m):
            base = coeffs[t] * lam[groups[t]]
            for k in range(deg):
                p = base
                for j in range(deg):
                    if j != k:
                        p *= w[edges[t, j]]
                out[edges[t, k]] += p
        return out

    return amps, grad


USING_NUMBA = False
compute_amps = _amps_numpy
compute_grad = _grad_numpy

if not os.environ.get("THESEUS_NO_NUMBA"):
    try:
        compute_amps, compute_grad = _make_numba_kernels()
        USING_NUMBA = True
    except ImportError:
        pass


class MonomialTable:
    """Monomials of one uniform degree feeding a vector of group amplitudes."""

    def __init__(self, coeffs, edges, groups, n_groups, n_edges):
        self.coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        self.edges = np.ascontiguousarray(edges, dtype=np.int64)
        self.groups = np.ascontiguousarray(groups, dtype=np.int64)
        self.n_groups = int(n_groups)
        self.n_edges = int(n_edges)
        if self.edges.ndim != 2 or len(self.coeffs) != len(self.edges) != len(self.groups):
            raise ValueError("inconsistent monomial table shapes")

    @classmethod
    def from_terms(cls, terms, n_groups, n_edges):
        """terms: iterable of (group_id, coeff, edge_index_tuple), same degree."""
        terms = list(terms)
        if not terms:
            return cls(np.zeros(0, complex), np.zeros((0, 1), np.int64),
                       np.zeros(0, np.int64), n_groups, n_edges)
        deg = len(terms[0][2])
        groups = np.array([t[0] for t in terms], dtype=np.int64)
        coeffs = np.array([t[1] for t in terms], dtype=np.complex128)
        edges = np.array([t[2] for t in terms], dtype=np.int64)
        if edges.shape != (len(terms), deg):
            raise ValueError("monomial degrees differ within one table")
        return cls(coeffs, edges, groups, n_groups, n_edges)

    def amplitudes(self, w: np.ndarray) -> np.ndarray:
        if len(self.coeffs) == 0:
            return np.zeros(self.n_groups, dtype=np.complex128)
        return compute_amps(w, self.coeffs, self.edges, self.groups, self.n_groups)

    def gradient(self, w: np.ndarray, lam: np.ndarray) -> np.ndarray:
        """d(sum_g lam_g * amp_g)/dw, holomorphic part."""
        if len(self.coeffs) == 0:
            return np.zeros(self.n_edges, dtype=np.complex128)
        return compute_grad(w, self.coeffs, self.edges, self.groups, lam, self.n_edges)
