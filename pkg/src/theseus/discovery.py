"""Topological search: optimize weights, prune an edge, re-optimize, backtrack.

The search starts from the complete graph, keeps a topology only while a
qualifying weight assignment exists (fidelity above the limit, weights
within bounds), and distills the smallest graph it can.  Failed prunes are
restored and the edge marked untriable for the current topology.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateStateError, GraphError, SearchFailedError, UndefinedFidelityError
from .graphs import ColoredGraph, complete_gate_graph, complete_graph, remove_edge
from .objective import TargetGate, TargetState, build_loss, ghz_state
from .optimize import OptimizerConfig, optimize_with_restarts
from .states import ConditioningSpec, event_probability, postselected, postselected_state

PRUNE_KINDS = ("uniform_random", "greedy_min_weight", "boltzmann")


@dataclass(frozen=True)
class PrunePolicy:
    kind: str = "greedy_min_weight"
    temperature: float = 1.0

    def __post_init__(self):
        if self.kind not in PRUNE_KINDS:
            raise GraphError(f"unknown prune policy {self.kind!r}")
        if self.kind == "boltzmann" and self.temperature <= 0:
            raise GraphError("boltzmann policy needs temperature > 0")


@dataclass(frozen=True)
class TraceRecord:
    step: int
    edge: tuple[int, int, int, int] | None
    accepted: bool
    restarts: int
    fidelity: float
    loss: float

    def as_dict(self):
        return {
            "step": self.step,
            "edge": list(self.edge) if self.edge else None,
            "accepted": self.accepted,
            "restarts": self.restarts,
            "fidelity": self.fidelity,
            "loss": self.loss,
        }


@dataclass
class Solution:
    graph: ColoredGraph
    fidelity: float
    loss: float
    qualified: bool
    trace: tuple[TraceRecord, ...]
    wall_time: float
    seed: int


def select_edge_to_prune(weights, policy: PrunePolicy, rng: np.random.Generator) -> int:
    """Pick an index into ``weights`` (per-edge moduli) according to the policy."""
    moduli = np.asarray(weights, dtype=np.float64)
    if moduli.size == 0:
        raise GraphError("no edges left to prune")
    if policy.kind == "uniform_random":
        return int(rng.integers(moduli.size))
    if policy.kind == "greedy_min_weight":
        return int(np.argmin(moduli))
    scaled = -(moduli - moduli.min()) / policy.temperature
    p = np.exp(scaled)
    p /= p.sum()
    return int(rng.choice(moduli.size, p=p))


def _canonical_scale(x: np.ndarray, cfg: OptimizerConfig) -> np.ndarray:
    """Fidelity is invariant under global rescaling; the L1 term shrinks
    solutions toward zero, so qualified points are reported at the largest
    in-bounds scale."""
    peak = float(np.max(np.abs(x)))
    if peak <= 0:
        return x
    return x * (min(1.0, cfg.omega_limit) / peak)


def _initial_graph(target, c: ConditioningSpec, d_modes: int | None) -> ColoredGraph:
    n_real = len(c.output_vertices) + len(c.herald_vertices)
    if isinstance(target, TargetGate):
        d = d_modes
        if d is None:
            d = max(
                max(s.dimension for s in target.outputs),
                1 + max(m for a in target.input_basis for m in a),
            )
        return complete_gate_graph(n_real, len(target.input_basis[0]), d)
    d = d_modes if d_modes is not None else target.dimension
    return complete_graph(n_real, d)


def theseus(
    target,
    conditioning: ConditioningSpec,
    config: OptimizerConfig | None = None,
    policy: PrunePolicy | None = None,
    d_modes: int | None = None,
    initial_graph: ColoredGraph | None = None,
    max_steps: int | None = None,
) -> Solution:
    """Discover a small graph producing ``target`` under ``conditioning``.

    Alternates continuous optimization with single-edge pruning; a prune
    that cannot re-qualify within ``config.c_limit`` restarts is undone and
    that edge becomes untriable at the current topology.  Raises
    SearchFailedError (with the best effort attached) when even the
    complete graph does not qualify.
    """
    cfg = config or OptimizerConfig()
    policy = policy or PrunePolicy()
    t_start = time.perf_counter()
    g0 = initial_graph if initial_graph is not None else _initial_graph(target, conditioning, d_modes)
    budget = max_steps if max_steps is not None else 5 * g0.n_edges

    fun = build_loss(g0, target, conditioning, cfg.alpha)
    res = optimize_with_restarts(fun, 2 * g0.n_edges, cfg, seed_salt=0)
    trace = [TraceRecord(0, None, res.qualified, res.restarts_used, res.fidelity, res.loss)]
    if not res.qualified:
        best = Solution(
            g0.with_flat_weights(res.x), res.fidelity, res.loss, False, tuple(trace),
            time.perf_counter() - t_start, cfg.seed,
        )
        raise SearchFailedError(
            f"no qualified solution on the complete graph (best F={res.fidelity:.4f})",
            solution=best,
        )
    x = _canonical_scale(res.x, cfg)
    current = g0.with_flat_weights(x)
    current_f, current_loss = res.fidelity, fun.value(x)

    untriable: set[tuple[int, int, int, int]] = set()
    step = 0
    while step < budget:
        candidates = [i for i in range(current.n_edges) if current.edges[i].key not in untriable]
        if not candidates:
            break
        step += 1
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, 104729, step)))
        moduli = np.abs(current.weights())[candidates]
        edge_idx = candidates[select_edge_to_prune(moduli, policy, rng)]
        edge_key = current.edges[edge_idx].key
        pruned = remove_edge(current, edge_idx)
        try:
            fun = build_loss(pruned, target, conditioning, cfg.alpha)
            res = optimize_with_restarts(
                fun, 2 * pruned.n_edges, cfg,
                warm_start=pruned.flat_weights(), seed_salt=step,
            )
        except (DegenerateStateError, UndefinedFidelityError):
            untriable.add(edge_key)
            trace.append(TraceRecord(step, edge_key, False, 0, 0.0, math.inf))
            continue
        if res.qualified:
            x = _canonical_scale(res.x, cfg)
            current = pruned.with_flat_weights(x)
            current_f, current_loss = res.fidelity, fun.value(x)
            untriable = set()
            trace.append(TraceRecord(step, edge_key, True, res.restarts_used, res.fidelity, current_loss))
        else:
            untriable.add(edge_key)
            trace.append(TraceRecord(step, edge_key, False, res.restarts_used, res.fidelity, res.loss))
    return Solution(
        current, current_f, current_loss, True, tuple(trace),
        time.perf_counter() - t_start, cfg.seed,
    )


# ---------------------------------------------------------------------------
# Schmidt-rank-vector benchmark
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchmidtRankVector:
    ranks: tuple[int, int, int]

    def __post_init__(self):
        r = tuple(int(x) for x in self.ranks)
        if len(r) != 3 or any(x < 1 for x in r):
            raise GraphError("an SRV is a triple of positive integers")
        object.__setattr__(self, "ranks", tuple(sorted(r, reverse=True)))

    def __str__(self):
        return f"({self.ranks[0]},{self.ranks[1]},{self.ranks[2]})"


def srv_of_state(state, dims: tuple[int, int, int], tol: float = 1e-10) -> SchmidtRankVector:
    """Ranks of the three single-party reductions of a normalized pure state.

    ``state`` is a dict ket -> coefficient or an ndarray of shape ``dims``;
    singular values below ``tol`` do not count toward the rank.
    """
    from .errors import InvalidStateError

    if isinstance(state, dict):
        psi = np.zeros(dims, dtype=np.complex128)
        for ket, coef in state.items():
            psi[tuple(ket)] = coef
    else:
        psi = np.asarray(state, dtype=np.complex128).reshape(dims)
    norm = float(np.sum(np.abs(psi) ** 2))
    if abs(norm - 1.0) > 1e-8:
        raise InvalidStateError(f"state norm {norm} != 1")
    ranks = []
    for axis in range(3):
        mat = np.moveaxis(psi, axis, 0).reshape(dims[axis], -1)
        s = np.linalg.svd(mat, compute_uv=False)
        ranks.append(int(np.sum(s > tol)))
    return SchmidtRankVector(tuple(ranks))


def srv_target(ranks: tuple[int, int, int]) -> TargetState:
    """A maximally-entangled-style state with the requested Schmidt ranks."""
    a, b, c = SchmidtRankVector(ranks).ranks
    if a > b * c:
        raise GraphError(f"SRV ({a},{b},{c}) violates the rank bound a <= b*c")
    terms = {}
    for i in range(a):
        j = i % b
        k = (j + i // b) % c
        terms[(i, j, k)] = 1.0
    return TargetState.from_terms(terms)


def candidate_srv_classes(max_dim: int) -> list[SchmidtRankVector]:
    """Genuinely tripartite SRV classes with ranks up to ``max_dim``."""
    if max_dim > 10:
        raise GraphError("max_dim above 10 is out of scope")
    out = []
    for a in range(2, max_dim + 1):
        for b in range(2, a + 1):
            for c in range(2, b + 1):
                if a <= b * c:
                    out.append(SchmidtRankVector((a, b, c)))
    out.sort(key=lambda s: (sum(s.ranks), s.ranks))
    return out


def _srv_initial_graph(dims: tuple[int, int, int]) -> ColoredGraph:
    """Complete 6-vertex graph with output colors capped at each party's rank."""
    d = dims[0]
    g = complete_graph(6, d)
    caps = {0: dims[0], 1: dims[1], 2: dims[2]}
    keep = []
    for e in g.edges:
        if e.u in caps and e.cu >= caps[e.u]:
            continue
        if e.v in caps and e.cv >= caps[e.v]:
            continue
        keep.append(e)
    return ColoredGraph(6, d, tuple(keep))


@dataclass
class SrvResult:
    srv: SchmidtRankVector
    solution: Solution
    verified: bool
    elapsed: float


def dominant_postselected_output(g: ColoredGraph, outputs, heralds):
    """Output-state dict of the highest-norm herald branch."""
    amps, _ = postselected_state(g)
    verts = g.real_vertices
    out_pos = [verts.index(v) for v in outputs]
    her_pos = [verts.index(v) for v in heralds]
    branches: dict[tuple, dict] = {}
    for ket, amp in amps.items():
        h = tuple(ket[p] for p in her_pos)
        branches.setdefault(h, {})[tuple(ket[p] for p in out_pos)] = amp
    best = max(
        sorted(branches), key=lambda h: sum(abs(a) ** 2 for a in branches[h].values())
    )
    out = branches[best]
    norm = math.sqrt(sum(abs(a) ** 2 for a in out.values()))
    return {k: a / norm for k, a in out.items()}


def srv_benchmark(
    max_dim: int,
    budget: float,
    cfg: OptimizerConfig | None = None,
    policy: PrunePolicy | None = None,
    max_steps_per_class: int = 12,
) -> list[SrvResult]:
    """Try each SRV class on the 3-photon + triggers construction.

    Runs the topological search per class on 6-vertex graphs (outputs 0-2,
    heralding detectors 3-5) until the wall-clock ``budget`` (seconds) is
    spent; every reported class is re-verified with ``srv_of_state`` on the
    dominant herald branch.
    """
    cfg = cfg or OptimizerConfig()
    policy = policy or PrunePolicy()
    results = []
    t0 = time.perf_counter()
    conditioning = postselected((0, 1, 2), (3, 4, 5))
    for srv in candidate_srv_classes(max_dim):
        if time.perf_counter() - t0 > budget:
            break
        target = srv_target(srv.ranks)
        g0 = _srv_initial_graph(srv.ranks)
        class_cfg = OptimizerConfig(
            alpha=cfg.alpha, f_limit=cfg.f_limit, omega_limit=cfg.omega_limit,
            c_limit=cfg.c_limit, max_iterations=cfg.max_iterations,
            gradient_tolerance=cfg.gradient_tolerance, init_range=cfg.init_range,
            seed=cfg.seed + 1009 * sum(srv.ranks) + srv.ranks[0],
        )
        t_class = time.perf_counter()
        try:
            sol = theseus(
                target, conditioning, class_cfg, policy,
                initial_graph=g0, max_steps=max_steps_per_class,
            )
        except SearchFailedError:
            continue
        try:
            out = dominant_postselected_output(sol.graph, (0, 1, 2), (3, 4, 5))
            d = srv.ranks[0]
            seen = srv_of_state(out, (d, d, d))
            verified = seen.ranks == srv.ranks
        except (DegenerateStateError, ValueError):
            verified = False
        results.append(SrvResult(srv, sol, verified, time.perf_counter() - t_class))
    return results


# ---------------------------------------------------------------------------
# Scaling study for the six-photon three-dimensional GHZ solution
# ---------------------------------------------------------------------------


def ghz63_scaling_study(
    g: ColoredGraph, omega_values, small_edges: list[int] | None = None
):
    """Rescale the designated small-weight edge class and tabulate
    (omega, 1 - F, event probability) for log-log fitting.

    Without an explicit ``small_edges`` list, edges whose modulus falls
    below the geometric midpoint between the smallest and largest moduli
    are treated as the scaling class.
    """
    target = ghz_state(6, 3)
    cond = postselected(range(6))
    moduli = np.abs(g.weights())
    if small_edges is None:
        lo, hi = moduli[moduli > 0].min(), moduli.max()
        cut = math.sqrt(lo * hi)
        small_edges = [i for i, m in enumerate(moduli) if 0 < m < cut]
    if not small_edges:
        raise GraphError("no small-weight edge class to rescale")
    rows = []
    for omega in omega_values:
        w = g.weights()
        for i in small_edges:
            w[i] = w[i] / abs(w[i]) * omega
        gi = g.with_weights(w)
        from .objective import fidelity as _fid

        f = _fid(gi, target, cond)
        p = event_probability(gi, cond)
        rows.append((float(omega), 1.0 - f, p))
    return rows
