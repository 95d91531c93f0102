"""Fidelity and loss over edge weights, with analytic gradients.

The compiled evaluator turns a graph topology plus target and conditioning
into monomial tables once, so that repeated loss/gradient evaluations
inside the optimizer are table lookups.  Post-selected targets compile to
perfect-matching monomials; heralded targets compile to the multi-pair
expansion truncated at ``max_pairs``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, GraphError, UndefinedFidelityError
from .graphs import ColoredGraph, enumerate_perfect_matchings
from .kernels import MonomialTable
from .states import (
    ConditioningSpec,
    KetTerm,
    _herald_passes,
    _matching_term,
    _restrict_to_input,
    heralded_state,
    leading_pairs,
    postselected_state,
    transformation_outputs,
)

NORM_TOL = 1e-12


@dataclass(frozen=True)
class TargetState:
    """Normalized target ket over the output vertices."""

    terms: tuple[tuple[KetTerm, complex], ...]

    def __post_init__(self):
        try:
            normalized = tuple((tuple(k), complex(c)) for k, c in self.terms)
        except (TypeError, ValueError):
            raise GraphError("terms must be (ket, coefficient) pairs")
        object.__setattr__(self, "terms", normalized)
        if not self.terms:
            raise GraphError("target state needs at least one term")
        lengths = {len(k) for k, _ in self.terms}
        if len(lengths) != 1:
            raise GraphError(f"inconsistent ket lengths {sorted(lengths)}")
        norm = sum(abs(c) ** 2 for _, c in self.terms)
        if abs(norm - 1.0) > 1e-9:
            raise GraphError(f"target state norm {norm} != 1")

    @classmethod
    def from_terms(cls, terms: dict[KetTerm, complex]) -> "TargetState":
        norm = math.sqrt(sum(abs(c) ** 2 for c in terms.values()))
        if norm == 0:
            raise GraphError("zero-norm target expression")
        return cls(tuple(sorted((k, c / norm) for k, c in terms.items())))

    @property
    def n_parties(self) -> int:
        return len(self.terms[0][0])

    @property
    def dimension(self) -> int:
        return 1 + max(m for k, _ in self.terms for m in k)

    def as_dict(self) -> dict[KetTerm, complex]:
        return dict(self.terms)


@dataclass(frozen=True)
class TargetGate:
    """Truth table: per input assignment, the normalized target output."""

    input_basis: tuple[tuple[int, ...], ...]
    outputs: tuple[TargetState, ...]

    def __post_init__(self):
        object.__setattr__(self, "input_basis", tuple(tuple(i) for i in self.input_basis))
        if len(self.input_basis) != len(self.outputs):
            raise GraphError("one target output per input required")
        if len(set(self.input_basis)) != len(self.input_basis):
            raise GraphError("duplicate input assignments")

    @property
    def n_inputs(self) -> int:
        return len(self.input_basis)


def ghz_state(n: int, d: int) -> TargetState:
    """(1/sqrt d) sum_i |i,i,...,i> on n parties."""
    if n < 2 or d < 1:
        raise GraphError("ghz needs n >= 2 and d >= 1")
    return TargetState.from_terms({(i,) * n: 1.0 for i in range(d)})


def bell_state(d: int) -> TargetState:
    return ghz_state(2, d)


def cnot_gate(d_control: int = 2, d_target: int = 2) -> TargetGate:
    """|i, j> -> |i, (i + j) mod d_target> truth table."""
    inputs, outs = [], []
    for i in range(d_control):
        for j in range(d_target):
            inputs.append((i, j))
            outs.append(TargetState.from_terms({(i, (i + j) % d_target): 1.0}))
    return TargetGate(tuple(inputs), tuple(outs))


# ---------------------------------------------------------------------------
# Direct (uncompiled) fidelity
# ---------------------------------------------------------------------------


def _state_overlap(target: TargetState, out_map, out_vertices) -> complex:
    ov = 0j
    for ket, coef in target.terms:
        occ = tuple(sorted(zip(out_vertices, ket)))
        ov += np.conj(coef) * out_map.get(occ, 0j)
    return ov


def fidelity(g: ColoredGraph, t, c: ConditioningSpec) -> float:
    """State or gate fidelity under the given conditioning, in [0, 1]."""
    if isinstance(t, TargetGate):
        return gate_fidelity(g, t, c)
    c.validate_for(g)
    if c.is_postselected(g):
        try:
            amps, norm = postselected_state(g)
        except DegenerateStateError as exc:
            raise UndefinedFidelityError(str(exc))
        verts = g.real_vertices
        out_pos = [verts.index(v) for v in c.output_vertices]
        her_pos = [verts.index(v) for v in c.herald_vertices]
        tdict = t.as_dict()
        branches: dict[tuple, complex] = {}
        for ket, amp in amps.items():
            out_part = tuple(ket[p] for p in out_pos)
            coef = tdict.get(out_part)
            if coef is None:
                continue
            h = tuple(ket[p] for p in her_pos)
            branches[h] = branches.get(h, 0j) + np.conj(coef) * amp
        return sum(abs(o) ** 2 for o in branches.values()) / norm**2
    try:
        hs = heralded_state(g, c)
    except DegenerateStateError as exc:
        raise UndefinedFidelityError(str(exc))
    num = sum(
        abs(_state_overlap(t, out_map, c.output_vertices)) ** 2
        for out_map in hs.branches.values()
    )
    return num / hs.norm_sq


def gate_fidelity(g: ColoredGraph, t: TargetGate, c: ConditioningSpec) -> float:
    """Coherent-average post-selected gate fidelity over the input basis."""
    outs = transformation_outputs(g, t.input_basis, c)
    s = 0j
    q = 0.0
    for target, res in zip(t.outputs, outs):
        for out_map in res.branches.values():
            s += _state_overlap(target, out_map, c.output_vertices)
        q += res.norm_sq
    if q == 0:
        raise UndefinedFidelityError("all conditioned outputs are degenerate")
    return abs(s) ** 2 / (t.n_inputs * q)


def l1_norm(x: np.ndarray) -> float:
    return float(np.sum(np.abs(x)))


def loss(g: ColoredGraph, t, c: ConditioningSpec, alpha: float) -> float:
    """(1 - F) + alpha * componentwise L1 of the flat weight vector."""
    if not 0 <= alpha < 1:
        raise GraphError(f"alpha {alpha} outside [0, 1)")
    return (1.0 - fidelity(g, t, c)) + alpha * l1_norm(g.flat_weights())


def loss_gradient(g: ColoredGraph, t, c: ConditioningSpec, alpha: float) -> np.ndarray:
    """Analytic gradient of ``loss`` w.r.t. (Re w, Im w); sign(0) = 0 on the L1 part."""
    return build_loss(g, t, c, alpha).value_and_grad(g.flat_weights())[1]


# ---------------------------------------------------------------------------
# Compiled loss
# ---------------------------------------------------------------------------


def _phi_monomials(edges, max_pairs):
    """Multisets of edge indices with expansion coefficients and occupations."""
    out = []
    n = len(edges)
    for npairs in range(max_pairs + 1):
        for multiset in itertools.combinations_with_replacement(range(n), npairs):
            coeff = 1.0
            counts: dict[tuple[int, int], int] = {}
            prev, mult = -1, 1
            for idx in multiset:
                e = edges[idx]
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
            out.append((multiset, coeff, counts))
    return out


class CompiledLoss:
    """Loss, fidelity and gradient for one topology, target and conditioning.

    Parameters are the flat real vector x = (Re w, Im w); the tables stay
    valid as long as the edge list (topology and ordering) is unchanged.
    """

    def __init__(self, g: ColoredGraph, target, c: ConditioningSpec, alpha: float):
        if not 0 <= alpha < 1:
            raise GraphError(f"alpha {alpha} outside [0, 1)")
        c.validate_for(g)
        self.alpha = float(alpha)
        self.n_edges = g.n_edges
        self.is_gate = isinstance(target, TargetGate)
        self.k_inputs = target.n_inputs if self.is_gate else 1
        terms, coefs, branch_of, group_keys = self._compile(g, target, c)
        self.target_coef = coefs
        self.branch_of = branch_of
        #: one key per amplitude group: the ket (post-selected), the
        #: occupation (heralded), or the (input, modes) pair (gates)
        self.group_keys = group_keys
        self.n_branches = int(branch_of.max()) + 1 if len(branch_of) else 0
        by_deg: dict[int, list] = {}
        for gid, coeff, slots in terms:
            by_deg.setdefault(len(slots), []).append((gid, coeff, slots))
        self.tables = [
            MonomialTable.from_terms(ts, len(coefs), g.n_edges)
            for _, ts in sorted(by_deg.items())
        ]

    # -- compilation -----------------------------------------------------

    def _compile(self, g, target, c):
        if self.is_gate:
            return self._compile_gate(g, target, c)
        if c.is_postselected(g):
            return self._compile_postselected(g, target, c)
        return self._compile_heralded(g, target, c)

    def _compile_postselected(self, g, target, c):
        verts = g.real_vertices
        out_pos = [verts.index(v) for v in c.output_vertices]
        her_pos = [verts.index(v) for v in c.herald_vertices]
        tdict = target.as_dict()
        group_ids: dict[tuple, int] = {}
        branch_ids: dict[tuple, int] = {}
        terms, coefs, branch_of = [], [], []
        for m in enumerate_perfect_matchings(g, verts):
            ket = _matching_term(g, m, verts)
            if ket not in group_ids:
                group_ids[ket] = len(coefs)
                out_part = tuple(ket[p] for p in out_pos)
                h = tuple(ket[p] for p in her_pos)
                bid = branch_ids.setdefault(h, len(branch_ids))
                coefs.append(np.conj(tdict.get(out_part, 0j)))
                branch_of.append(bid)
            terms.append((group_ids[ket], 1.0, tuple(m)))
        keys = tuple(group_ids)
        return terms, np.array(coefs, complex), np.array(branch_of, np.int64), keys

    def _compile_heralded(self, g, target, c):
        heralds = frozenset(c.herald_vertices)
        tdict = target.as_dict()
        target_occ = {
            tuple(sorted(zip(c.output_vertices, ket))): coef for ket, coef in tdict.items()
        }
        group_ids: dict[tuple, int] = {}
        branch_ids: dict[tuple, int] = {}
        terms, coefs, branch_of = [], [], []
        for multiset, coeff, counts in _phi_monomials(g.edges, c.effective_max_pairs(g)):
            vert_counts: dict[int, int] = {}
            for (v, _), k in counts.items():
                vert_counts[v] = vert_counts.get(v, 0) + k
            if not all(
                _herald_passes(vert_counts.get(h, 0), c.detector_model) for h in heralds
            ):
                continue
            occ = tuple(sorted(counts.items()))
            if occ not in group_ids:
                group_ids[occ] = len(coefs)
                h_part = tuple(p for p in occ if p[0][0] in heralds)
                o_part = tuple(
                    (v, m) for (v, m), k in occ if v not in heralds for _ in range(k)
                )
                bid = branch_ids.setdefault(h_part, len(branch_ids))
                coefs.append(np.conj(target_occ.get(tuple(sorted(o_part)), 0j)))
                branch_of.append(bid)
            terms.append((group_ids[occ], coeff, tuple(multiset)))
        if not terms:
            raise UndefinedFidelityError("no herald-satisfying terms at this order")
        keys = tuple(group_ids)
        return terms, np.array(coefs, complex), np.array(branch_of, np.int64), keys

    def _compile_gate(self, g, target, c):
        if not c.is_postselected(g):
            raise GraphError("gate objectives support leading-order conditioning only")
        her = [v for v in c.herald_vertices]
        terms, coefs, branch_of = [], [], []
        group_ids: dict[tuple, int] = {}
        branch_ids: dict[tuple, int] = {}
        for idx, (assignment, tstate) in enumerate(zip(target.input_basis, target.outputs)):
            restricted = _restrict_to_input(g, assignment)
            keep = [g.edge_index(e.key) for e in restricted.edges]
            tdict = tstate.as_dict()
            for m in enumerate_perfect_matchings(restricted, range(g.n_vertices)):
                mode: dict[int, int] = {}
                for i in m:
                    e = restricted.edges[i]
                    for vert in (e.u, e.v):
                        if vert not in g.virtual_vertices:
                            mode[vert] = e.color_at(vert)
                key = (idx, tuple(sorted(mode.items())))
                if key not in group_ids:
                    group_ids[key] = len(coefs)
                    out_part = tuple(mode[v] for v in c.output_vertices)
                    h = (idx, tuple(mode[v] for v in her))
                    bid = branch_ids.setdefault(h, len(branch_ids))
                    coefs.append(np.conj(tdict.get(out_part, 0j)))
                    branch_of.append(bid)
                terms.append((group_ids[key], 1.0, tuple(keep[i] for i in m)))
        keys = tuple(group_ids)
        return terms, np.array(coefs, complex), np.array(branch_of, np.int64), keys

    # -- evaluation --------------------------------------------------------

    def _weights(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return x[: self.n_edges] + 1j * x[self.n_edges :]

    def amplitudes(self, x: np.ndarray) -> np.ndarray:
        w = self._weights(x)
        amps = np.zeros(len(self.target_coef), dtype=np.complex128)
        for t in self.tables:
            amps += t.amplitudes(w)
        return amps

    def _fidelity_lam(self, amps):
        q = float(np.sum(np.abs(amps) ** 2))
        if q <= 0:
            raise UndefinedFidelityError("conditioned state has zero norm")
        if self.is_gate:
            s = np.sum(self.target_coef * amps)
            p = abs(s) ** 2
            f = p / (self.k_inputs * q)
            lam = (self.target_coef * np.conj(s) * q - p * np.conj(amps)) / (
                self.k_inputs * q * q
            )
            return f, lam
        o = np.zeros(self.n_branches, dtype=np.complex128)
        np.add.at(o, self.branch_of, self.target_coef * amps)
        p = float(np.sum(np.abs(o) ** 2))
        f = p / q
        lam = (self.target_coef * np.conj(o[self.branch_of]) * q - p * np.conj(amps)) / (q * q)
        return f, lam

    def fidelity(self, x: np.ndarray) -> float:
        return self._fidelity_lam(self.amplitudes(x))[0]

    def value(self, x: np.ndarray) -> float:
        f = self.fidelity(x)
        return (1.0 - f) + self.alpha * l1_norm(np.asarray(x))

    def value_and_grad(self, x: np.ndarray):
        x = np.asarray(x, dtype=np.float64)
        w = self._weights(x)
        amps = np.zeros(len(self.target_coef), dtype=np.complex128)
        per_table = []
        for t in self.tables:
            a = t.amplitudes(w)
            per_table.append(a)
            amps += a
        f, lam = self._fidelity_lam(amps)
        gw = np.zeros(self.n_edges, dtype=np.complex128)
        for t in self.tables:
            gw += t.gradient(w, lam)
        df = np.concatenate([2.0 * gw.real, -2.0 * gw.imag])
        grad = -df + self.alpha * np.sign(x)
        val = (1.0 - f) + self.alpha * l1_norm(x)
        return val, grad

    def __call__(self, x: np.ndarray):
        return self.value_and_grad(x)


def build_loss(g: ColoredGraph, target, c: ConditioningSpec, alpha: float) -> CompiledLoss:
    """Compile the loss for ``g``'s topology; weights come from the x vector."""
    return CompiledLoss(g, target, c, alpha)
