"""Reference graphs distilled from discovery runs.

Each constructor returns the idealized weight setting of a solution the
search produces, reduced to its conceptual core: the four-photon GHZ
cycle, the six-photon three-dimensional GHZ family with a tunable small
weight, the heralded three-dimensional Bell construction, and the
post-selected qubit CNOT.
"""

from __future__ import annotations

import numpy as np

from .graphs import ColoredGraph, Edge

#: vertices a..h of the heralded Bell construction
_A, _B, _C, _D, _E, _F, _G, _H = range(8)


def ghz4_cycle_graph() -> ColoredGraph:
    """Four-vertex cycle whose two perfect matchings carry modes 0 and 1.

    Post-selecting one photon per path yields (|0000> + |1111>)/sqrt(2)
    exactly.
    """
    return ColoredGraph(4, 2, (
        Edge(0, 1, 0, 0, 1.0),
        Edge(2, 3, 0, 0, 1.0),
        Edge(1, 2, 1, 1, 1.0),
        Edge(0, 3, 1, 1, 1.0),
    ))


#: edges carrying the tunable small weight in ghz63_graph
GHZ63_SMALL_CLASS = ((0, 5, 1, 1), (1, 3, 2, 2), (2, 4, 0, 0))


def ghz63_graph(omega: float = 0.5) -> ColoredGraph:
    """Six-photon three-dimensional GHZ solution with scaling weight ``omega``.

    Three disjoint monochromatic matchings produce the three GHZ terms,
    each with amplitude ``omega``; their union admits exactly one mixed
    matching, whose edges are the three small ones, so the single unwanted
    term carries omega**3.  Fidelity approaches one like 1 - omega**4 / 3
    while the post-selected counts scale like 3 * omega**2.
    """
    small = set(GHZ63_SMALL_CLASS)
    matchings = {
        0: ((1, 5), (0, 3), (2, 4)),
        1: ((2, 3), (1, 4), (0, 5)),
        2: ((0, 2), (4, 5), (1, 3)),
    }
    edges = []
    for color, pairs in matchings.items():
        for u, v in pairs:
            key = (min(u, v), max(u, v), color, color)
            weight = omega if key in small else 1.0
            edges.append(Edge(u, v, color, color, weight))
    return ColoredGraph(6, 3, tuple(edges))


def cnot_graph() -> ColoredGraph:
    """Post-selected qubit CNOT: inputs V4 (control) and V5 (target).

    Outputs emerge in paths 0 and 1, conditioned on one photon in each of
    the trigger paths 2 and 3.  The -1 weight on the control's mode-1 pass
    makes the unwanted term of each control-1 input interfere away, so the
    truth table |i,j> -> |i, i xor j> holds with unit amplitude.
    """
    return ColoredGraph(6, 2, (
        Edge(0, 4, 0, 0, 1.0),    # control 0 passes to output a
        Edge(0, 4, 1, 1, -1.0),   # control 1 interference route
        Edge(2, 4, 0, 1, 1.0),    # control 1 to trigger c
        Edge(3, 4, 0, 1, 1.0),    # control 1 to trigger d
        Edge(2, 5, 0, 0, 1.0),    # target 0 to trigger c
        Edge(3, 5, 1, 1, 1.0),    # target 1 to trigger d
        Edge(0, 1, 1, 1, 1.0),    # ancilla pair, both outputs mode 1
        Edge(0, 1, 1, 0, 1.0),    # ancilla pair, flipped target
        Edge(1, 2, 1, 0, 1.0),    # ancilla partner for trigger c
        Edge(1, 3, 0, 0, 1.0),    # ancilla partner for trigger d
    ), frozenset((4, 5)))


#: (u, v, cu, cv, phase exponent k with phase = i**k) for the heralded Bell
_BELL_TOPO = (
    (_A, _C, 0, 0, 0), (_A, _D, 1, 1, 0), (_A, _E, 2, 2, 0),
    (_B, _F, 0, 0, 3), (_B, _G, 1, 1, 1), (_B, _H, 2, 2, 1),
    (_A, _C, 1, 0, 3), (_A, _D, 2, 1, 1), (_A, _E, 0, 2, 3),
    (_B, _F, 2, 0, 2), (_B, _G, 0, 1, 0), (_B, _H, 1, 2, 0),
    (_C, _F, 0, 0, 0), (_D, _G, 1, 1, 0), (_E, _H, 2, 2, 0),
    (_C, _H, 0, 2, 0), (_D, _F, 1, 0, 0), (_E, _G, 2, 1, 2),
)

HERALDED_BELL_OUTPUTS = (_A, _B)
HERALDED_BELL_HERALDS = (_C, _D, _E, _F, _G, _H)


def heralded_bell3_graph(v: float = 0.16, w: float = 0.07) -> ColoredGraph:
    """Heralded three-dimensional Bell construction on paths a, b.

    Every edge touching an output carries modulus ``v``; ancilla-ancilla
    edges carry ``w``; the quarter-turn phase setting makes

    * the heralded-vacuum amplitude of the leading trigger pattern vanish
      exactly (its two ancilla matchings interfere destructively),
    * all cross terms |i,j>, i != j, vanish in that pattern, and
    * the Bell amplitudes come out proportional to
      2 v^2 w^2 (|0,0> - |1,1> - |2,2>).
    """
    edges = []
    for s, (u, vv, cu, cv, k) in enumerate(_BELL_TOPO):
        mod = v if s < 12 else w
        edges.append(Edge(u, vv, cu, cv, mod * (1j ** k)))
    return ColoredGraph(8, 3, tuple(edges))
