import numpy as np
import pytest

from conftest import random_weighted_graph
from theseus.catalog import cnot_graph, ghz4_cycle_graph
from theseus.errors import GraphError, UndefinedFidelityError
from theseus.graphs import ColoredGraph, Edge, complete_graph
from theseus.objective import (
    TargetGate,
    TargetState,
    bell_state,
    build_loss,
    cnot_gate,
    fidelity,
    gate_fidelity,
    ghz_state,
    loss,
    loss_gradient,
)
from theseus.states import NUMBER_RESOLVING, ConditioningSpec, postselected


def test_target_state_normalization():
    t = TargetState.from_terms({(0, 0): 1.0, (1, 1): 1.0})
    assert dict(t.terms)[(0, 0)] == pytest.approx(1 / np.sqrt(2))
    with pytest.raises(GraphError):
        TargetState(((0, 0), 1.0),)  # malformed terms
    with pytest.raises(GraphError):
        TargetState.from_terms({(0, 0): 1.0, (1, 1, 1): 1.0})


def test_ghz_constructor_matches_definition():
    t = ghz_state(4, 2)
    assert dict(t.terms) == {
        (0, 0, 0, 0): pytest.approx(1 / np.sqrt(2)),
        (1, 1, 1, 1): pytest.approx(1 / np.sqrt(2)),
    }
    assert bell_state(3).n_parties == 2


def test_fidelity_ghz_cycle_is_one():
    f = fidelity(ghz4_cycle_graph(), ghz_state(4, 2), postselected(range(4)))
    assert f == pytest.approx(1.0, abs=1e-12)


def test_fidelity_orthogonal_target_is_zero():
    g = ColoredGraph(2, 2, (Edge(0, 1, 0, 0, 1.0),))
    t = TargetState.from_terms({(1, 1): 1.0})
    assert fidelity(g, t, postselected(range(2))) == pytest.approx(0.0)


def test_fidelity_phase_invariance(rng):
    g = random_weighted_graph(rng, 4, 2, keep=0.7)
    t = ghz_state(4, 2)
    c = postselected(range(4))
    f1 = fidelity(g, t, c)
    f2 = fidelity(g.with_weights(g.weights() * np.exp(0.9j)), t, c)
    assert f1 == pytest.approx(f2, abs=1e-12)


def test_fidelity_one_implies_target_state(rng):
    # F = 1 only when the normalized conditioned state equals the target
    g = ghz4_cycle_graph()
    from theseus.states import postselected_state

    amps, norm = postselected_state(g)
    t = ghz_state(4, 2).as_dict()
    phase = None
    for ket, coef in t.items():
        ratio = amps[ket] / norm / coef
        if phase is None:
            phase = ratio
        assert ratio == pytest.approx(phase, abs=1e-10)


def test_loss_arithmetic():
    g = ColoredGraph(4, 2, (
        Edge(0, 1, 0, 0, 1.0), Edge(2, 3, 0, 0, 1.0),
        Edge(1, 2, 1, 1, 1.0), Edge(0, 3, 1, 1, 1.0)))
    t = ghz_state(4, 2)
    c = postselected(range(4))
    # F = 1, four unit weights -> L = alpha * 4
    assert loss(g, t, c, 0.1) == pytest.approx(0.4, abs=1e-9)
    assert loss(g, t, c, 0.0) == pytest.approx(1.0 - fidelity(g, t, c), abs=1e-12)
    with pytest.raises(GraphError):
        loss(g, t, c, 1.0)


def test_loss_bit_identical(rng):
    g = random_weighted_graph(rng, 4, 2, keep=0.8)
    t = ghz_state(4, 2)
    c = postselected(range(4))
    assert loss(g, t, c, 0.03) == loss(g, t, c, 0.03)


def test_gradient_matches_finite_differences(rng):
    g = complete_graph(4, 2)
    t = ghz_state(4, 2)
    c = postselected(range(4))
    L = build_loss(g, t, c, 0.07)
    h = 1e-6
    for _ in range(20):
        x = rng.uniform(-1, 1, 2 * g.n_edges)
        if np.min(np.abs(x)) < 1e-7:  # stay away from the L1 kink
            continue
        _, grad = L.value_and_grad(x)
        for i in rng.choice(len(x), size=6, replace=False):
            xp, xm = x.copy(), x.copy()
            xp[i] += h
            xm[i] -= h
            fd = (L.value(xp) - L.value(xm)) / (2 * h)
            assert grad[i] == pytest.approx(fd, rel=1e-5, abs=1e-9)


def test_gradient_l1_part_at_complex_unit():
    # alpha-only piece: d(alpha * |x|_1)/dx = alpha * sign(x)
    g = ColoredGraph(2, 1, (Edge(0, 1, 0, 0, 0),))
    t = TargetState.from_terms({(0, 0): 1.0})
    c = postselected(range(2))
    L = build_loss(g, t, c, 0.25)
    x = np.array([1.0, 1.0])  # w = 1 + 1i
    _, grad = L.value_and_grad(x)
    # fidelity is constant (= 1) wherever the amplitude is nonzero
    assert grad == pytest.approx(np.array([0.25, 0.25]), abs=1e-12)


def test_single_edge_gradient_vanishes_without_l1():
    g = ColoredGraph(2, 1, (Edge(0, 1, 0, 0, 0),))
    t = TargetState.from_terms({(0, 0): 1.0})
    L = build_loss(g, t, postselected(range(2)), 0.0)
    for x in ([0.4, 0.0], [0.2, -0.7], [-1.0, 0.3]):
        val, grad = L.value_and_grad(np.array(x))
        assert val == pytest.approx(0.0, abs=1e-12)
        assert np.allclose(grad, 0.0, atol=1e-10)


def test_heralded_gradient_matches_finite_differences(rng):
    g = ColoredGraph(3, 2, (
        Edge(0, 1, 0, 0, 0), Edge(0, 1, 1, 1, 0), Edge(0, 2, 0, 0, 0),
        Edge(0, 2, 1, 1, 0), Edge(1, 2, 0, 0, 0), Edge(1, 2, 1, 0, 0)))
    t = TargetState.from_terms({(0,): 1.0, (1,): 1.0})
    c = ConditioningSpec((0,), (1, 2), "threshold_at_least_one", 2)
    L = build_loss(g, t, c, 0.02)
    h = 1e-6
    x = rng.uniform(0.2, 0.9, 2 * g.n_edges)
    _, grad = L.value_and_grad(x)
    for i in range(len(x)):
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        fd = (L.value(xp) - L.value(xm)) / (2 * h)
        assert grad[i] == pytest.approx(fd, rel=2e-5, abs=1e-9)


def test_undefined_fidelity_for_zero_graph():
    g = complete_graph(4, 2)
    with pytest.raises(UndefinedFidelityError):
        fidelity(g, ghz_state(4, 2), postselected(range(4)))


# -- gates --------------------------------------------------------------------


def test_cnot_gate_constructor():
    t = cnot_gate(2, 2)
    table = {inp: s.terms[0][0] for inp, s in zip(t.input_basis, t.outputs)}
    assert table == {(0, 0): (0, 0), (0, 1): (0, 1), (1, 0): (1, 1), (1, 1): (1, 0)}


def test_cnot_graph_has_unit_gate_fidelity():
    f = gate_fidelity(cnot_graph(), cnot_gate(2, 2), postselected((0, 1), (2, 3)))
    assert f == pytest.approx(1.0, abs=1e-12)


def test_identity_wiring_gate_fidelity():
    # two virtual vertices wired straight through with unit weights
    g = ColoredGraph(4, 2, (
        Edge(0, 2, 0, 0, 1.0), Edge(0, 2, 1, 1, 1.0),
        Edge(1, 3, 0, 0, 1.0), Edge(1, 3, 1, 1, 1.0)), frozenset((2, 3)))
    identity = TargetGate(
        tuple((i, j) for i in range(2) for j in range(2)),
        tuple(TargetState.from_terms({(i, j): 1.0}) for i in range(2) for j in range(2)),
    )
    f = gate_fidelity(g, identity, postselected((0, 1), ()))
    assert f == pytest.approx(1.0, abs=1e-12)


def test_sign_flip_breaks_cnot():
    g = cnot_graph()
    flipped = g.with_weights(g.weights() * np.where(np.arange(g.n_edges) == 6, -1, 1))
    f = gate_fidelity(flipped, cnot_gate(2, 2), postselected((0, 1), (2, 3)))
    assert f < 1.0 - 1e-6


def test_compiled_gate_loss_matches_direct(rng):
    from theseus.graphs import complete_gate_graph

    g = complete_gate_graph(4, 2, 2)
    t = cnot_gate(2, 2)
    c = postselected((0, 1), (2, 3))
    L = build_loss(g, t, c, 0.0)
    x = rng.uniform(-0.8, 0.8, 2 * g.n_edges)
    f_compiled = L.fidelity(x)
    f_direct = gate_fidelity(g.with_flat_weights(x), t, c)
    assert f_compiled == pytest.approx(f_direct, abs=1e-10)
