"""Compile Pauli-rotation circuits into graph-state measurement patterns."""

from .compiler import (
    Circuit,
    GraphFragment,
    ResourceReport,
    RotationGate,
    analyze_residual,
    compile,
    compile_clifford_gauge_rx,
    count_resources,
)
from .graph_state import GraphStatePattern, MeasurementSpec, Plane, Vertex, VertexRole, build_state, export
from .pauli import CliffordGate, Generator, PauliOp, PauliTerm, commutes, conjugate, entangle, multiply
from .residual import MeasGenerator, Residual, crosscheck, measure_one, residual_by_rules
from .simulator import StateVector, apply_circuit, fidelity_up_to_phase, prepare, run_pattern
from .tensor_gauge import TransferTensor, UnitarySupplement, apply_fully_symmetric, check_symmetry, circ

__version__ = "0.1.0"
