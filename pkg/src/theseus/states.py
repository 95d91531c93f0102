"""Quantum states generated by a colored graph.

Post-selected amplitudes are sums over perfect matchings; the full weight
function is the multi-pair expansion sum_n (1/n!) (sum_e w_e u+ v+)^n |0>
with bosonic normalization a+^m |0> = sqrt(m!) |m>.  Heralded states are
projections of that expansion conditioned on detector outcomes in the
trigger paths, grouped into mutually incoherent branches by the full
herald outcome.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateStateError, GraphError
from .graphs import ColoredGraph, Matching, enumerate_perfect_matchings

#: One photon per real vertex, listed as the mode at each vertex in
#: canonical (ascending) vertex order.
KetTerm = tuple[int, ...]

#: A Fock occupation: sorted tuple of (vertex, mode) with one entry per photon.
Occupation = tuple[tuple[int, int], ...]

NUMBER_RESOLVING = "number_resolving_one"
THRESHOLD = "threshold_at_least_one"

#: Amplitudes below this magnitude are dropped from sparse maps.
AMPLITUDE_FLOOR = 1e-14


def occupation_from_counts(counts: Mapping[tuple[int, int], int]) -> Occupation:
    photons: list[tuple[int, int]] = []
    for (v, m), k in counts.items():
        photons.extend([(v, m)] * k)
    return tuple(sorted(photons))


def photons_at(occ: Occupation, vertex: int) -> int:
    return sum(1 for v, _ in occ if v == vertex)


@dataclass(frozen=True)
class ConditioningSpec:
    """Which vertices carry the state, which herald it, and how deep to expand.

    ``max_pairs`` counts pair-creation events among real-real edges; ``None``
    means the leading order (exactly enough pairs for one photon per real
    vertex), which is the post-selected regime of Fig.-style coincidence
    counting.  Anything beyond the leading order switches to the full
    multi-pair expansion with the detector model applied to the heralds.
    """

    output_vertices: tuple[int, ...]
    herald_vertices: tuple[int, ...] = ()
    detector_model: str = THRESHOLD
    max_pairs: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "output_vertices", tuple(self.output_vertices))
        object.__setattr__(self, "herald_vertices", tuple(self.herald_vertices))
        if set(self.output_vertices) & set(self.herald_vertices):
            raise GraphError("output and herald vertex sets must be disjoint")
        if self.detector_model not in (NUMBER_RESOLVING, THRESHOLD):
            raise GraphError(f"unknown detector model {self.detector_model!r}")
        if self.max_pairs is not None and self.max_pairs < 0:
            raise GraphError("max_pairs must be >= 0")

    def validate_for(self, g: ColoredGraph):
        union = set(self.output_vertices) | set(self.herald_vertices)
        if union != set(g.real_vertices):
            raise GraphError(
                "output + herald vertices must cover exactly the real vertices "
                f"(got {sorted(union)}, graph has {list(g.real_vertices)})"
            )

    def effective_max_pairs(self, g: ColoredGraph) -> int:
        if self.max_pairs is not None:
            return self.max_pairs
        return leading_pairs(g)

    def is_postselected(self, g: ColoredGraph) -> bool:
        if self.max_pairs is None:
            return True
        try:
            return self.max_pairs <= leading_pairs(g)
        except GraphError:
            return False


def postselected(
    outputs: Sequence[int], heralds: Sequence[int] = ()
) -> ConditioningSpec:
    """Leading-order conditioning: one photon in every real vertex."""
    return ConditioningSpec(tuple(outputs), tuple(heralds), NUMBER_RESOLVING, None)


def leading_pairs(g: ColoredGraph) -> int:
    """Real-real pair events needed to land one photon on every real vertex."""
    free = len(g.real_vertices) - len(g.virtual_vertices)
    if free < 0 or free % 2:
        raise GraphError(
            "graph has no leading-order event covering each real vertex once "
            f"({len(g.real_vertices)} real vertices, {len(g.virtual_vertices)} inputs)"
        )
    return free // 2


# ---------------------------------------------------------------------------
# Post-selected states (perfect matchings)
# ---------------------------------------------------------------------------


def _matching_term(g: ColoredGraph, m: Matching, vertices: Sequence[int]) -> KetTerm:
    mode: dict[int, int] = {}
    for i in m:
        e = g.edges[i]
        mode[e.u] = e.cu
        mode[e.v] = e.cv
    return tuple(mode[v] for v in vertices)


def _matching_weight(g: ColoredGraph, m: Matching) -> complex:
    w = 1.0 + 0j
    for i in m:
        w *= g.edges[i].weight
    return w


def term_amplitude(g: ColoredGraph, t: KetTerm) -> complex:
    """Sum over perfect matchings whose colors reproduce ``t`` at each vertex."""
    verts = g.real_vertices
    if g.virtual_vertices:
        raise GraphError("term_amplitude expects a graph without virtual vertices")
    if len(t) != len(verts):
        raise GraphError(f"term length {len(t)} != {len(verts)} real vertices")
    total = 0j
    for m in enumerate_perfect_matchings(g, verts):
        if _matching_term(g, m, verts) == tuple(t):
            total += _matching_weight(g, m)
    return total


def postselected_state(
    g: ColoredGraph, floor: float = AMPLITUDE_FLOOR
) -> tuple[dict[KetTerm, complex], float]:
    """All nonzero single-photon-per-vertex terms plus the normalization N.

    Amplitudes are unnormalized; N = sqrt(sum |w_t|^2).  Raises
    DegenerateStateError when every amplitude vanishes.
    """
    if g.virtual_vertices:
        raise GraphError("postselected_state expects a graph without virtual vertices")
    verts = g.real_vertices
    amps: dict[KetTerm, complex] = {}
    for m in enumerate_perfect_matchings(g, verts):
        w = _matching_weight(g, m)
        if w == 0:
            continue
        t = _matching_term(g, m, verts)
        amps[t] = amps.get(t, 0j) + w
    amps = {t: a for t, a in amps.items() if abs(a) >= floor}
    if not amps:
        raise DegenerateStateError("post-selected state has zero norm")
    norm = math.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    return amps, norm


# ---------------------------------------------------------------------------
# Multi-pair expansion
# ---------------------------------------------------------------------------


def expand_phi(
    g: ColoredGraph, max_pairs: int, floor: float = AMPLITUDE_FLOOR
) -> dict[Occupation, complex]:
    """Fock amplitudes of every occupation reachable with <= max_pairs pairs.

    The amplitude of an edge multiset {e_i^k_i} is
    prod_i w_i^k_i / k_i!  *  prod_(v,c) sqrt(n_vc!),
    and amplitudes of coinciding occupations add.  The vacuum (zero pairs)
    has amplitude 1.
    """
    if g.virtual_vertices:
        raise GraphError("expand_phi expects a graph without virtual vertices")
    if max_pairs < 0:
        raise GraphError("max_pairs must be >= 0")
    live = [e for e in g.edges if e.weight != 0]
    amps: dict[Occupation, complex] = {(): 1.0 + 0j}
    for n in range(1, max_pairs + 1):
        for multiset in itertools.combinations_with_replacement(range(len(live)), n):
            coeff = 1.0 + 0j
            counts: dict[tuple[int, int], int] = {}
            prev = -1
            mult = 1
            for idx in multiset:
                e = live[idx]
                coeff *= e.weight
                if idx == prev:
                    mult += 1
                    coeff /= mult
                else:
                    prev, mult = idx, 1
                counts[(e.u, e.cu)] = counts.get((e.u, e.cu), 0) + 1
                counts[(e.v, e.cv)] = counts.get((e.v, e.cv), 0) + 1
            for k in counts.values():
                if k > 1:
                    coeff *= math.sqrt(math.factorial(k))
            occ = occupation_from_counts(counts)
            amps[occ] = amps.get(occ, 0j) + coeff
    return {occ: a for occ, a in amps.items() if abs(a) >= floor}


def _herald_passes(count: int, detector_model: str) -> bool:
    if detector_model == NUMBER_RESOLVING:
        return count == 1
    return count >= 1


def _split_occupation(
    occ: Occupation, heralds: frozenset[int]
) -> tuple[Occupation, Occupation]:
    h = tuple(p for p in occ if p[0] in heralds)
    o = tuple(p for p in occ if p[0] not in heralds)
    return h, o


@dataclass
class HeraldedState:
    """Conditioned state grouped by full herald outcome.

    Distinct herald outcomes are distinguishable detector records, hence
    mutually incoherent; interference happens only within one branch.
    """

    branches: dict[Occupation, dict[Occupation, complex]]
    norm_sq: float

    def branch_norms(self) -> dict[Occupation, float]:
        return {
            h: sum(abs(a) ** 2 for a in out.values()) for h, out in self.branches.items()
        }

    def dominant_branch(self) -> Occupation:
        norms = self.branch_norms()
        return max(sorted(norms), key=lambda h: norms[h])


def heralded_state(g: ColoredGraph, c: ConditioningSpec) -> HeraldedState:
    """Project the expansion onto herald-satisfying occupations.

    Output vertices are left unprojected: heralded vacuum and multi-photon
    contaminants stay in the state, which is what makes destructive
    interference of the heralded vacuum meaningful.
    """
    c.validate_for(g)
    heralds = frozenset(c.herald_vertices)
    amps = expand_phi(g, c.effective_max_pairs(g))
    branches: dict[Occupation, dict[Occupation, complex]] = {}
    for occ, a in amps.items():
        counts: dict[int, int] = {}
        for v, _ in occ:
            counts[v] = counts.get(v, 0) + 1
        if not all(_herald_passes(counts.get(h, 0), c.detector_model) for h in heralds):
            continue
        h_part, o_part = _split_occupation(occ, heralds)
        branches.setdefault(h_part, {})[o_part] = a
    norm_sq = sum(abs(a) ** 2 for out in branches.values() for a in out.values())
    if not branches or norm_sq == 0:
        raise DegenerateStateError(
            "no herald-satisfying amplitude at this truncation order"
        )
    return HeraldedState(branches, norm_sq)


# ---------------------------------------------------------------------------
# Transformations (virtual vertices)
# ---------------------------------------------------------------------------


def _virtual_edge_choices(
    g: ColoredGraph, assignment: Sequence[int]
) -> list[list[int]]:
    """Per virtual vertex, the edge indices whose virtual-side color matches."""
    virtuals = sorted(g.virtual_vertices)
    if len(assignment) != len(virtuals):
        raise GraphError(
            f"input assignment length {len(assignment)} != {len(virtuals)} virtual vertices"
        )
    choices = []
    for vv, mode in zip(virtuals, assignment):
        edges = [i for i in g.incident_edges(vv) if g.edges[i].color_at(vv) == mode]
        if not edges:
            raise GraphError(f"virtual vertex {vv} has no edge for input mode {mode}")
        choices.append(edges)
    return choices


def _restrict_to_input(g: ColoredGraph, assignment: Sequence[int]) -> ColoredGraph:
    """Drop virtual edges whose color differs from the assigned input mode."""
    virtuals = sorted(g.virtual_vertices)
    mode = dict(zip(virtuals, assignment))
    kept = []
    for e in g.edges:
        vs = [x for x in (e.u, e.v) if x in g.virtual_vertices]
        if vs and e.color_at(vs[0]) != mode[vs[0]]:
            continue
        kept.append(e)
    return ColoredGraph(g.n_vertices, g.d_modes, tuple(kept), g.virtual_vertices)


def transformation_outputs(
    g: ColoredGraph,
    input_basis: Sequence[Sequence[int]],
    c: ConditioningSpec,
) -> list[HeraldedState]:
    """Conditioned output state for each input assignment.

    Each virtual vertex is covered exactly once by an edge matching its
    assigned mode; heralds must satisfy the detector model; remaining
    photons land on output vertices.  Real-real pair events are bounded
    by ``c.max_pairs``.
    """
    c.validate_for(g)
    if not g.virtual_vertices:
        raise GraphError("transformation_outputs needs virtual vertices")
    heralds = frozenset(c.herald_vertices)
    results = []
    for assignment in input_basis:
        _virtual_edge_choices(g, assignment)
        if c.is_postselected(g):
            restricted = _restrict_to_input(g, assignment)
            branches: dict[Occupation, dict[Occupation, complex]] = {}
            for m in enumerate_perfect_matchings(restricted, range(g.n_vertices)):
                w = _matching_weight(restricted, m)
                if w == 0:
                    continue
                occ_counts: dict[tuple[int, int], int] = {}
                for i in m:
                    e = restricted.edges[i]
                    for vert in (e.u, e.v):
                        if vert not in g.virtual_vertices:
                            key = (vert, e.color_at(vert))
                            occ_counts[key] = occ_counts.get(key, 0) + 1
                occ = occupation_from_counts(occ_counts)
                h_part, o_part = _split_occupation(occ, heralds)
                branch = branches.setdefault(h_part, {})
                branch[o_part] = branch.get(o_part, 0j) + w
        else:
            branches = _transformation_multi_pair(g, assignment, c)
        branches = {
            h: {o: a for o, a in out.items() if abs(a) >= AMPLITUDE_FLOOR}
            for h, out in branches.items()
        }
        branches = {h: out for h, out in branches.items() if out}
        norm_sq = sum(abs(a) ** 2 for out in branches.values() for a in out.values())
        results.append(HeraldedState(branches, norm_sq))
    if all(not r.branches for r in results):
        raise DegenerateStateError("every input produced a degenerate output")
    return results


def _transformation_multi_pair(
    g: ColoredGraph, assignment: Sequence[int], c: ConditioningSpec
) -> dict[Occupation, dict[Occupation, complex]]:
    heralds = frozenset(c.herald_vertices)
    real_edges = tuple(
        e
        for e in g.edges
        if e.u not in g.virtual_vertices and e.v not in g.virtual_vertices
    )
    real_graph = ColoredGraph(g.n_vertices, g.d_modes, real_edges)
    phi = expand_phi(real_graph, c.effective_max_pairs(g))
    choices = _virtual_edge_choices(g, assignment)
    branches: dict[Occupation, dict[Occupation, complex]] = {}
    for combo in itertools.product(*choices):
        w_in = 1.0 + 0j
        in_counts: dict[tuple[int, int], int] = {}
        for i in combo:
            e = g.edges[i]
            w_in *= e.weight
            real_end = e.v if e.u in g.virtual_vertices else e.u
            key = (real_end, e.color_at(real_end))
            in_counts[key] = in_counts.get(key, 0) + 1
        if w_in == 0:
            continue
        for occ, a in phi.items():
            counts = dict(in_counts)
            for v, m in occ:
                counts[(v, m)] = counts.get((v, m), 0) + 1
            # extra bosonic factor when an input photon stacks on a pair photon
            boost = 1.0
            for key, k in counts.items():
                if k > 1:
                    base = k - in_counts.get(key, 0)
                    boost *= math.sqrt(math.factorial(k) / math.factorial(base))
            vert_counts: dict[int, int] = {}
            for (v, _), k in counts.items():
                vert_counts[v] = vert_counts.get(v, 0) + k
            if not all(
                _herald_passes(vert_counts.get(h, 0), c.detector_model) for h in heralds
            ):
                continue
            total_occ = occupation_from_counts(counts)
            h_part, o_part = _split_occupation(total_occ, heralds)
            branch = branches.setdefault(h_part, {})
            branch[o_part] = branch.get(o_part, 0j) + w_in * a * boost
    return branches


# ---------------------------------------------------------------------------
# Event rates
# ---------------------------------------------------------------------------


def event_probability(g: ColoredGraph, c: ConditioningSpec) -> float:
    """Squared norm of every herald-satisfying branch at the truncation order.

    In the post-selected regime this is N(w)^2, the n-fold coincidence
    probability; otherwise it is the total norm of the heralded state.
    """
    c.validate_for(g)
    if c.is_postselected(g):
        try:
            _, norm = postselected_state(g)
        except DegenerateStateError:
            return 0.0
        return norm**2
    try:
        return heralded_state(g, c).norm_sq
    except DegenerateStateError:
        return 0.0


def count_rate(p: float, rep_rate: float) -> float:
    """Events per second at probability ``p`` per pump cycle."""
    if not 0 <= p <= 1:
        raise GraphError(f"probability {p} outside [0, 1]")
    return p * rep_rate
