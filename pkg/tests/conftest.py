"""Shared fixtures and independent oracles.

The oracles deliberately avoid the library's own code paths: the
multinomial oracle expands (sum_e w_e E_e)^m / m! term by term, and the
operator oracle applies creation operators one at a time with explicit
bosonic factors.  Both are slow and trusted.
"""

import itertools
import math

import numpy as np
import pytest

from theseus.graphs import ColoredGraph, Edge, complete_graph


def random_weighted_graph(rng, n, d, keep=1.0):
    """Complete graph with random complex weights, optionally thinned."""
    g = complete_graph(n, d)
    edges = []
    for e in g.edges:
        if rng.uniform() > keep:
            continue
        w = rng.normal() + 1j * rng.normal()
        edges.append(Edge(e.u, e.v, e.cu, e.cv, w))
    if not edges:
        edges = [Edge(0, 1, 0, 0, 1.0)]
    return ColoredGraph(n, d, tuple(edges))


def multinomial_postselected_oracle(g):
    """Expand (sum_e w_e E_e)^(n/2) / (n/2)! and project on single occupation."""
    n = len(g.real_vertices)
    assert n % 2 == 0
    m = n // 2
    amps = {}
    for multiset in itertools.combinations_with_replacement(range(g.n_edges), m):
        coeff = 1.0 + 0j
        counts = {}
        prev, mult = -1, 1
        for idx in multiset:
            e = g.edges[idx]
            coeff *= e.weight
            if idx == prev:
                mult += 1
                coeff /= mult
            else:
                prev, mult = idx, 1
            counts[(e.u, e.cu)] = counts.get((e.u, e.cu), 0) + 1
            counts[(e.v, e.cv)] = counts.get((e.v, e.cv), 0) + 1
        per_vertex = {}
        for (v, _), k in counts.items():
            per_vertex[v] = per_vertex.get(v, 0) + k
        if any(k != 1 for k in per_vertex.values()) or len(per_vertex) != n:
            continue
        ket = tuple(c for (_, c), _ in sorted(counts.items()))
        amps[ket] = amps.get(ket, 0j) + coeff
    return {k: a for k, a in amps.items() if abs(a) > 1e-14}


def operator_phi_oracle(g, max_pairs):
    """Phi via explicit normal-ordered operator application.

    state maps occupation (sorted ((v, c), count) tuple) -> amplitude.
    """
    def apply_pair(state, edge):
        out = {}
        for occ, amp in state.items():
            counts = dict(occ)
            new_amp = amp * edge.weight
            for (v, c) in ((edge.u, edge.cu), (edge.v, edge.cv)):
                k = counts.get((v, c), 0)
                new_amp *= math.sqrt(k + 1)
                counts[(v, c)] = k + 1
            key = tuple(sorted(counts.items()))
            out[key] = out.get(key, 0j) + new_amp
        return out

    vacuum = {(): 1.0 + 0j}
    total = dict(vacuum)
    power = dict(vacuum)
    for order in range(1, max_pairs + 1):
        nxt = {}
        for e in g.edges:
            if e.weight == 0:
                continue
            contrib = apply_pair(power, e)
            for k, a in contrib.items():
                nxt[k] = nxt.get(k, 0j) + a
        power = nxt
        for k, a in power.items():
            total[k] = total.get(k, 0j) + a / math.factorial(order)
    return {k: a for k, a in total.items() if abs(a) > 1e-14}


def occupation_photon_list(occ_counts):
    """((v,c),k) tuples -> sorted photon list representation."""
    photons = []
    for (v, c), k in occ_counts:
        photons.extend([(v, c)] * k)
    return tuple(sorted(photons))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
