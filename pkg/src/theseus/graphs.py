"""Colored weighted graphs and their combinatorial primitives.

A graph vertex is a photonic path; an edge is a probabilistic photon-pair
source whose endpoints carry independent mode colors and a single complex
amplitude.  Virtual vertices stand for incoming single photons and never
pair with each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import GraphError

#: A perfect matching, stored as a sorted tuple of edge indices.
Matching = tuple[int, ...]


@dataclass(frozen=True)
class Edge:
    """An undirected colored edge.  Canonical form keeps ``u < v``."""

    u: int
    v: int
    cu: int
    cv: int
    weight: complex = 0j

    def __post_init__(self):
        if self.u == self.v:
            raise GraphError(f"loop edge on vertex {self.u} is not allowed")
        if self.u > self.v:
            u, v, cu, cv = self.u, self.v, self.cu, self.cv
            object.__setattr__(self, "u", v)
            object.__setattr__(self, "v", u)
            object.__setattr__(self, "cu", cv)
            object.__setattr__(self, "cv", cu)
        object.__setattr__(self, "weight", complex(self.weight))

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.u, self.v, self.cu, self.cv)

    def color_at(self, vertex: int) -> int:
        if vertex == self.u:
            return self.cu
        if vertex == self.v:
            return self.cv
        raise GraphError(f"vertex {vertex} is not an endpoint of {self.key}")

    def other(self, vertex: int) -> int:
        if vertex == self.u:
            return self.v
        if vertex == self.v:
            return self.u
        raise GraphError(f"vertex {vertex} is not an endpoint of {self.key}")


@dataclass(frozen=True)
class ColoredGraph:
    """Immutable collection of colored edges over ``n_vertices`` paths.

    ``virtual_vertices`` marks input photons (gate discovery); they are
    ordinary vertices for matching purposes but carry exactly one photon
    per event and never connect to each other.
    """

    n_vertices: int
    d_modes: int
    edges: tuple[Edge, ...]
    virtual_vertices: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.n_vertices < 1 or self.d_modes < 1:
            raise GraphError("need n_vertices >= 1 and d_modes >= 1")
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "virtual_vertices", frozenset(self.virtual_vertices))
        seen = set()
        for e in self.edges:
            if not (0 <= e.u < self.n_vertices and 0 <= e.v < self.n_vertices):
                raise GraphError(f"edge {e.key} leaves the vertex range 0..{self.n_vertices - 1}")
            if not (0 <= e.cu < self.d_modes and 0 <= e.cv < self.d_modes):
                raise GraphError(f"edge {e.key} uses a color >= d_modes={self.d_modes}")
            if e.key in seen:
                raise GraphError(f"duplicate edge {e.key}")
            seen.add(e.key)
        for vv in self.virtual_vertices:
            if not 0 <= vv < self.n_vertices:
                raise GraphError(f"virtual vertex {vv} out of range")
        for e in self.edges:
            if e.u in self.virtual_vertices and e.v in self.virtual_vertices:
                raise GraphError(f"edge {e.key} connects two virtual vertices")

    # -- basic queries -------------------------------------------------

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def real_vertices(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n_vertices) if v not in self.virtual_vertices)

    @cached_property
    def _adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for i, e in enumerate(self.edges):
            adj[e.u].append(i)
            adj[e.v].append(i)
        return tuple(tuple(a) for a in adj)

    def incident_edges(self, vertex: int) -> tuple[int, ...]:
        return self._adjacency[vertex]

    def edge_index(self, key: tuple[int, int, int, int]) -> int:
        u, v, cu, cv = key
        if u > v:
            u, v, cu, cv = v, u, cv, cu
        for i in self._adjacency[u]:
            if self.edges[i].key == (u, v, cu, cv):
                return i
        raise GraphError(f"no edge {key} in graph")

    # -- weight handling -----------------------------------------------

    def weights(self) -> np.ndarray:
        return np.array([e.weight for e in self.edges], dtype=np.complex128)

    def with_weights(self, w: Sequence[complex] | np.ndarray) -> "ColoredGraph":
        w = np.asarray(w, dtype=np.complex128)
        if w.shape != (self.n_edges,):
            raise GraphError(f"expected {self.n_edges} weights, got {w.shape}")
        new_edges = tuple(replace(e, weight=complex(wi)) for e, wi in zip(self.edges, w))
        return replace(self, edges=new_edges)

    def flat_weights(self) -> np.ndarray:
        """Real parameter vector of length 2|E|: real parts then imaginary parts."""
        w = self.weights()
        return np.concatenate([w.real, w.imag])

    def with_flat_weights(self, x: Sequence[float] | np.ndarray) -> "ColoredGraph":
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (2 * self.n_edges,):
            raise GraphError(f"expected flat vector of length {2 * self.n_edges}")
        return self.with_weights(x[: self.n_edges] + 1j * x[self.n_edges :])


def complete_graph(n: int, d: int) -> ColoredGraph:
    """Complete real-vertex graph: every pair, every color pair, weight zero.

    Yields exactly ``d**2 * n*(n-1)/2`` edges; initial weights are set by
    the optimizer, not here.
    """
    if n < 2 or d < 1:
        raise GraphError(f"complete_graph needs n >= 2 and d >= 1, got n={n}, d={d}")
    edges = [
        Edge(u, v, cu, cv)
        for u, v in itertools.combinations(range(n), 2)
        for cu in range(d)
        for cv in range(d)
    ]
    return ColoredGraph(n, d, tuple(edges))


def complete_gate_graph(n_real: int, n_virtual: int, d: int) -> ColoredGraph:
    """Initial graph for transformation discovery.

    Real vertices 0..n_real-1 are fully connected; virtual vertices (input
    photons, indices n_real..n_real+n_virtual-1) connect to every real
    vertex but not to each other.
    """
    if n_real < 2 or n_virtual < 1 or d < 1:
        raise GraphError("complete_gate_graph needs n_real >= 2, n_virtual >= 1, d >= 1")
    n = n_real + n_virtual
    edges = [
        Edge(u, v, cu, cv)
        for u, v in itertools.combinations(range(n_real), 2)
        for cu in range(d)
        for cv in range(d)
    ]
    for vv in range(n_real, n):
        edges.extend(
            Edge(u, vv, cu, cv) for u in range(n_real) for cu in range(d) for cv in range(d)
        )
    return ColoredGraph(n, d, tuple(edges), frozenset(range(n_real, n)))


def enumerate_perfect_matchings(
    g: ColoredGraph, cover: Iterable[int] | None = None
) -> list[Matching]:
    """Every edge subset covering each vertex of ``cover`` exactly once.

    Returns matchings as sorted edge-index tuples, in lexicographic order.
    An odd cover has no matchings and yields the empty list (a valid
    outcome, not an error).  Pure function: identical graphs produce
    identical sequences.
    """
    if cover is None:
        cover_set = set(range(g.n_vertices))
    else:
        cover_set = set(cover)
        for v in cover_set:
            if not 0 <= v < g.n_vertices:
                raise GraphError(f"cover vertex {v} out of range")
    if len(cover_set) % 2 == 1:
        return []
    if not cover_set:
        return [()]

    out: list[Matching] = []
    chosen: list[int] = []

    def recurse(uncovered: set[int]):
        if not uncovered:
            out.append(tuple(sorted(chosen)))
            return
        v0 = min(uncovered)
        for i in g.incident_edges(v0):
            e = g.edges[i]
            w = e.other(v0)
            if w in uncovered and w != v0:
                uncovered.discard(v0)
                uncovered.discard(w)
                chosen.append(i)
                recurse(uncovered)
                chosen.pop()
                uncovered.add(v0)
                uncovered.add(w)

    recurse(cover_set)
    out.sort()
    return out


def remove_edge(g: ColoredGraph, e: int) -> ColoredGraph:
    """A new graph with edge index ``e`` absent; the input is untouched."""
    if not 0 <= e < g.n_edges:
        raise GraphError(f"edge index {e} out of range 0..{g.n_edges - 1}")
    return replace(g, edges=g.edges[:e] + g.edges[e + 1 :])


def add_edge(g: ColoredGraph, edge: Edge) -> ColoredGraph:
    """A new graph with ``edge`` inserted (used by the search to backtrack)."""
    return replace(g, edges=g.edges + (edge,))
