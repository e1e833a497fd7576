import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbqc_gauge.compiler import Circuit, RotationGate, compile, compile_clifford_gauge_rx
from mbqc_gauge.graph_state import GraphStatePattern, MeasurementSpec, Plane, Vertex, VertexRole
from mbqc_gauge.pauli import CliffordGate
from mbqc_gauge.simulator import (
    NondeterministicPatternError,
    SimulatorError,
    StateVector,
    apply_circuit,
    enumerate_branches,
    fidelity_up_to_phase,
    prepare,
    prepare_by_generators,
    run_pattern,
    verify_compiled,
)

from conftest import random_pair, random_pattern

H = np.array([[1, 1], [1, -1]]) / math.sqrt(2)


def two_vertex(psi, plane=Plane.XY, angle=0.0, edge=True):
    verts = (
        Vertex(1, VertexRole.INPUT, *psi, MeasurementSpec(plane, angle)),
        Vertex(2, VertexRole.OUTPUT),
    )
    return GraphStatePattern(verts, frozenset({(1, 2)}) if edge else frozenset())


def test_prepare_single_edge():
    p = two_vertex((2**-0.5, 2**-0.5))
    np.testing.assert_allclose(prepare(p).amps, [0.5, 0.5, 0.5, -0.5])


def test_prepare_matches_generators(rng):
    for _ in range(10):
        p = random_pattern(rng, 6, 3)
        np.testing.assert_allclose(prepare(p).amps, prepare_by_generators(p).amps, atol=1e-12)


def test_prepare_too_large():
    p = compile(Circuit(5))
    with pytest.raises(SimulatorError, match="limited"):
        prepare(p)


def test_rx_on_zero():
    theta = 0.7
    circuit = Circuit(1, (RotationGate.parse("X1", theta),))
    out, record = run_pattern(None, compile(circuit))
    assert fidelity_up_to_phase(out, [math.cos(theta), 1j * math.sin(theta)]) == pytest.approx(1, abs=1e-12)
    assert record.outcomes == {1: 0, 2: 0}


def test_xy_zero_on_plus_is_deterministic():
    p = two_vertex((2**-0.5, 2**-0.5), edge=False)
    out, record = run_pattern(None, p)
    assert record.probability == pytest.approx(1.0)
    np.testing.assert_allclose(out.amps, [2**-0.5, 2**-0.5])


@pytest.mark.parametrize("k", range(16))
def test_xy_measurement_applies_h_phase(k):
    """Measuring the input in XY(theta) leaves H diag(1, e^{-i theta}) psi."""
    theta = 2 * math.pi * k / 16
    psi = (0.6, 0.8j)
    out, _ = run_pattern(None, two_vertex(psi, angle=theta))
    expect = H @ np.array([psi[0], np.exp(-1j * theta) * psi[1]])
    assert fidelity_up_to_phase(out, expect) == pytest.approx(1, abs=1e-12)


def test_rx_branches_exhaustive(rng):
    psi = random_pair(rng)
    theta = 1.2
    circuit = Circuit(1, (RotationGate.parse("X1", theta),))
    branches = enumerate_branches(compile(circuit), [psi])
    assert len(branches) == 4
    assert sum(r.probability for _, r in branches) == pytest.approx(1.0)
    expect = apply_circuit(StateVector.product([psi]), circuit)
    for state, _ in branches:
        assert fidelity_up_to_phase(state, expect) == pytest.approx(1, abs=1e-12)


def test_branch_probabilities_sum_to_one(rng):
    p = compile_clifford_gauge_rx(0.4)
    for _ in range(3):
        branches = enumerate_branches(p, [random_pair(rng)])
        assert sum(r.probability for _, r in branches) == pytest.approx(1.0)


def test_sampled_byproduct_runs_are_seeded(rng):
    circuit = Circuit(2, (RotationGate.parse("Z1 Z2", 0.3), RotationGate.parse("X2", 0.9)))
    coeffs = [random_pair(rng), random_pair(rng)]
    p = compile(circuit, coeffs)
    a, ra = run_pattern(None, p, "byproduct", seed=5)
    b, rb = run_pattern(None, p, "byproduct", seed=5)
    assert ra.outcomes == rb.outcomes
    np.testing.assert_array_equal(a.amps, b.amps)
    expect = apply_circuit(StateVector.product(coeffs), circuit)
    assert fidelity_up_to_phase(a, expect) == pytest.approx(1, abs=1e-12)


def test_forced_outcomes(rng):
    circuit = Circuit(1, (RotationGate.parse("X1", 0.5),))
    p = compile(circuit)
    out, record = run_pattern(None, p, "byproduct", outcomes={1: 1, 2: 1})
    assert record.outcomes == {1: 1, 2: 1}
    assert fidelity_up_to_phase(out, apply_circuit(StateVector.product([(1, 0)]), circuit)) > 1 - 1e-12


def test_prepared_state_route():
    p = two_vertex((0.6, 0.8))
    lazy, _ = run_pattern(None, p)
    dense, _ = run_pattern(prepare(p), p)
    np.testing.assert_allclose(lazy.amps, dense.amps, atol=1e-12)
    with pytest.raises(SimulatorError, match="labelled"):
        run_pattern(StateVector(np.ones(4) / 2, (5, 6)), p)


def test_missing_correction_is_nondeterministic():
    p = compile(Circuit(1, (RotationGate.parse("X1", 0.5),)))
    stripped = GraphStatePattern(p.vertices, p.edges, p.byproducts[1:])
    with pytest.raises(NondeterministicPatternError) as exc:
        run_pattern(None, stripped, "byproduct")
    assert exc.value.vertex == p.byproducts[0].trigger


def test_unknown_mode():
    with pytest.raises(SimulatorError, match="mode"):
        run_pattern(None, two_vertex((1, 0)), "magic")


@pytest.mark.parametrize(
    "theta,expect", [(0.0, [1, 0]), (math.pi / 2, [0, 1j]), (math.pi, [-1, 0]), (math.pi / 4, [2**-0.5, 1j * 2**-0.5])]
)
def test_apply_circuit_examples(theta, expect):
    out = apply_circuit(StateVector.product([(1, 0)]), Circuit(1, (RotationGate.parse("X1", theta),)))
    np.testing.assert_allclose(out.amps, expect, atol=1e-15)


def test_apply_circuit_matches_unitary(rng):
    circuit = Circuit(
        3,
        (RotationGate.parse("Z1 Z3", 0.2), RotationGate.parse("X2 X3", -1.1)),
        (CliffordGate.h(2), CliffordGate.cx(2, 1)),
    )
    coeffs = [random_pair(rng) for _ in range(3)]
    state = StateVector.product(coeffs)
    np.testing.assert_allclose(apply_circuit(state, circuit).amps, circuit.unitary() @ state.amps, atol=1e-12)


def test_fidelity_examples():
    assert fidelity_up_to_phase([1, 0], [1j, 0]) == pytest.approx(1)
    assert fidelity_up_to_phase([1, 0], [0, 1]) == 0
    assert fidelity_up_to_phase([1, 1], [1, 0]) == pytest.approx(2**-0.5)
    with pytest.raises(SimulatorError, match="zero"):
        fidelity_up_to_phase([0, 0], [1, 0])
    with pytest.raises(SimulatorError, match="differ"):
        fidelity_up_to_phase([1, 0], [1, 0, 0, 0])


def test_statevector_validation():
    with pytest.raises(SimulatorError, match="power of two"):
        StateVector(np.ones(3))
    assert StateVector.product([(1, 0), (0, 1)]).amps.tolist() == [0, 1, 0, 0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_circuits_all_branches(seed):
    rng = np.random.default_rng(seed)
    axes = ["X1", "Z1", "Z1 Z2", "X1 X2", "Z2", "X2"]
    gates = tuple(RotationGate.parse(axes[k], rng.uniform(-3, 3)) for k in rng.integers(0, len(axes), size=2))
    circuit = Circuit(2, gates)
    coeffs = [random_pair(rng), random_pair(rng)]
    p = compile(circuit, coeffs)
    assert verify_compiled(circuit, p, coeffs, "byproduct") > 1 - 1e-10
