"""Statevector oracle for graph-state patterns and rotation circuits.

Amplitude order: the first listed qubit is the most significant bit.

Patterns run lazily: a vertex joins the register only when it or one of its
neighbours is about to be measured, and leaves it once measured, so chains
far longer than the dense limit stay cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .compiler import Circuit
from .graph_state import GraphStatePattern, build_state, neighborhoods
from .pauli import PauliTerm

MAX_DENSE = 12
MAX_LIVE = 22
BRANCH_ENUM_LIMIT = 12


class SimulatorError(ValueError):
    pass


class NondeterministicPatternError(SimulatorError):
    def __init__(self, vertex: int, reason: str):
        super().__init__(f"nondeterministic pattern at vertex {vertex}: {reason}")
        self.vertex = vertex


@dataclass
class StateVector:
    amps: np.ndarray
    qubits: tuple = ()

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        n = int(round(math.log2(self.amps.size))) if self.amps.size else 0
        if 2**n != self.amps.size:
            raise SimulatorError(f"amplitude count {self.amps.size} is not a power of two")
        if not self.qubits:
            self.qubits = tuple(range(1, n + 1))
        self.qubits = tuple(self.qubits)
        if len(self.qubits) != n:
            raise SimulatorError(f"{len(self.qubits)} labels for {n} qubits")

    @property
    def n(self) -> int:
        return len(self.qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise SimulatorError("cannot normalize the zero vector")
        return StateVector(self.amps / nrm, self.qubits)

    @classmethod
    def product(cls, coeffs: Sequence[tuple[complex, complex]]) -> "StateVector":
        amps = np.ones(1, dtype=complex)
        for a, b in coeffs:
            amps = np.kron(amps, np.array([a, b], dtype=complex))
        return cls(amps)


@dataclass
class OutcomeRecord:
    outcomes: dict = field(default_factory=dict)
    probability: float = 1.0


# --- preparation ---------------------------------------------------------------


def _with_inputs(pattern: GraphStatePattern, input_coeffs) -> GraphStatePattern:
    return pattern if input_coeffs is None else pattern.with_inputs(input_coeffs)


def prepare(pattern: GraphStatePattern, input_coeffs=None) -> StateVector:
    """``prod CZ_edges (x) (a|0> + b|1>)`` over the vertices in listing order."""
    pattern = _with_inputs(pattern, input_coeffs)
    ids = pattern.ids
    if len(ids) > MAX_DENSE:
        raise SimulatorError(f"dense preparation limited to {MAX_DENSE} vertices, pattern has {len(ids)}")
    reg = _Register()
    for v in pattern.vertices:
        reg.add(v.id, v.a, v.b)
    for i, j in sorted(pattern.edges):
        reg.cz(i, j)
    return StateVector(reg.amps.reshape(-1), tuple(reg.labels))


def prepare_by_generators(pattern: GraphStatePattern, input_coeffs=None) -> StateVector:
    """Independent route: ``prod G_i |0...0>`` with dense generator matrices."""
    pattern = _with_inputs(pattern, input_coeffs)
    ids = pattern.ids
    if len(ids) > MAX_DENSE:
        raise SimulatorError(f"dense preparation limited to {MAX_DENSE} vertices, pattern has {len(ids)}")
    vec = np.zeros(2 ** len(ids), dtype=complex)
    vec[0] = 1
    for g in build_state(pattern):
        vec = g.matrix(ids) @ vec
    return StateVector(vec, tuple(ids))


# --- register ------------------------------------------------------------------


class _Register:
    """Tensor of shape (2,)*k with one axis per live vertex."""

    def __init__(self, amps: np.ndarray | None = None, labels: Sequence[int] = ()):
        self.amps = np.ones((), dtype=complex) if amps is None else amps
        self.labels = list(labels)

    def copy(self) -> "_Register":
        return _Register(self.amps.copy(), self.labels)

    def add(self, label: int, a: complex, b: complex) -> None:
        if len(self.labels) >= MAX_LIVE:
            raise SimulatorError(f"more than {MAX_LIVE} simultaneously live qubits")
        self.amps = np.multiply.outer(self.amps, np.array([a, b], dtype=complex))
        self.labels.append(label)

    def cz(self, i: int, j: int) -> None:
        idx = [slice(None)] * len(self.labels)
        idx[self.labels.index(i)] = 1
        idx[self.labels.index(j)] = 1
        self.amps[tuple(idx)] *= -1

    def apply1(self, label: int, mat: np.ndarray) -> None:
        k = self.labels.index(label)
        self.amps = np.moveaxis(np.tensordot(mat, self.amps, axes=(1, k)), 0, k)

    def project(self, label: int, bra: np.ndarray) -> None:
        k = self.labels.index(label)
        self.amps = np.tensordot(bra, self.amps, axes=(0, k))
        del self.labels[k]

    def vector(self, order: Sequence[int]) -> np.ndarray:
        perm = [self.labels.index(q) for q in order]
        return self.amps.transpose(perm).reshape(-1)


class _Lazy:
    """Adds vertices and their edges on demand."""

    def __init__(self, pattern: GraphStatePattern):
        self.pattern = pattern
        self.nbrs = neighborhoods(pattern)
        self.reg = _Register()
        self.live: set[int] = set()
        self.done: set[int] = set()

    def copy(self) -> "_Lazy":
        other = _Lazy.__new__(_Lazy)
        other.pattern, other.nbrs = self.pattern, self.nbrs
        other.reg, other.live, other.done = self.reg.copy(), set(self.live), set(self.done)
        return other

    def ensure(self, vid: int) -> None:
        if vid in self.live or vid in self.done:
            return
        v = self.pattern.vertex(vid)
        self.reg.add(vid, v.a, v.b)
        self.live.add(vid)
        for u in sorted(self.nbrs[vid] & self.live):
            self.reg.cz(u, vid)

    def ready(self, vid: int) -> None:
        self.ensure(vid)
        # a measured neighbour was live at its own measurement, so the edge is in
        for u in sorted(self.nbrs[vid]):
            self.ensure(u)

    def measure(self, vid: int, bra: np.ndarray) -> None:
        self.reg.project(vid, bra)
        self.live.discard(vid)
        self.done.add(vid)

    def finish(self, outputs: Sequence[int]) -> np.ndarray:
        for o in outputs:
            self.ensure(o)
        return self.reg.vector(outputs)


# --- running patterns ------------------------------------------------------------


def _frame_matrix(frame: PauliTerm, vid: int) -> np.ndarray:
    return frame.op(vid).matrix() if vid in frame.support else np.eye(2)


def _check_corrections(pattern: GraphStatePattern, order: Sequence[int]) -> dict[int, PauliTerm]:
    corr = pattern.corrections()
    pos = {v: k for k, v in enumerate(order)}
    for v in order:
        if v not in corr:
            raise NondeterministicPatternError(v, "no byproduct correction declared")
        early = [u for u in corr[v].support if u in pos and pos[u] <= pos[v]]
        if early:
            raise NondeterministicPatternError(v, f"correction touches already measured vertices {sorted(early)}")
        v_meta = pattern.vertex(v)
        if v_meta.measure.plane.value == "YZ" and abs(abs(v_meta.a) - abs(v_meta.b)) > 1e-12:
            raise NondeterministicPatternError(v, "YZ correction needs a vertex prepared with |a| = |b|")
    return corr


def _finish(sim: _Lazy, pattern: GraphStatePattern, frame: PauliTerm | None) -> np.ndarray:
    outs = pattern.outputs
    vec = sim.finish(outs)
    if frame is not None:
        live = PauliTerm(1.0, frame.xs & set(outs), frame.zs & set(outs))
        if live.support:
            vec = live.matrix(outs) @ vec
    for c in pattern.output_cliffords():
        vec = c.matrix(outs) @ vec
    return vec


def _restrict(frame: PauliTerm, drop: int) -> PauliTerm:
    return PauliTerm(1.0, frame.xs - {drop}, frame.zs - {drop})


def _run(pattern, sim: _Lazy, order, mode, forced: Mapping[int, int] | None, rng):
    corr = _check_corrections(pattern, order) if mode == "byproduct" else {}
    frame = PauliTerm(1.0)
    outcomes: dict[int, int] = {}
    for v in order:
        sim.ready(v)
        spec = pattern.vertex(v).measure
        fm = _frame_matrix(frame, v).conj().T if mode == "byproduct" else np.eye(2)
        bras = [spec.bra(s) @ fm for s in (0, 1)]
        if mode == "postselect":
            s = 0
        elif forced is not None and v in forced:
            s = int(forced[v])
        else:
            probs = []
            for bra in bras:
                trial = sim.reg.copy()
                trial.project(v, bra)
                probs.append(float(np.linalg.norm(trial.amps)) ** 2)
            total = sum(probs)
            s = int(rng.random() * total >= probs[0]) if total > 0 else 0
        sim.measure(v, bras[s])
        outcomes[v] = s
        if mode == "byproduct":
            frame = _restrict(frame, v)
            if s:
                frame = PauliTerm(1.0, frame.xs ^ corr[v].xs, frame.zs ^ corr[v].zs)
    vec = _finish(sim, pattern, frame if mode == "byproduct" else None)
    norm0 = 1.0
    for vv in pattern.vertices:
        norm0 *= abs(vv.a) ** 2 + abs(vv.b) ** 2
    prob = float(np.linalg.norm(vec)) ** 2 / norm0
    return vec, OutcomeRecord(outcomes, prob)


def run_pattern(
    state: StateVector | None,
    pattern: GraphStatePattern,
    mode: str = "postselect",
    input_coeffs=None,
    outcomes: Mapping[int, int] | None = None,
    seed: int | None = None,
) -> tuple[StateVector, OutcomeRecord]:
    """Measure every non-output vertex in pattern order.

    ``state`` is an already prepared register over ``pattern.ids`` or None to
    build the graph state lazily.  ``postselect`` keeps the s=0 branch;
    ``byproduct`` samples outcomes (or takes ``outcomes``) and applies the
    declared corrections through a Pauli frame.  The output is normalized;
    the record's probability is the branch weight.
    """
    if mode not in ("postselect", "byproduct"):
        raise SimulatorError(f"unknown mode {mode!r} (expected postselect or byproduct)")
    pattern = _with_inputs(pattern, input_coeffs)
    order = pattern.measurement_order()
    sim = _Lazy(pattern)
    if state is not None:
        if tuple(state.qubits) != tuple(pattern.ids):
            raise SimulatorError("prepared state must be labelled by the pattern's vertex ids")
        sim.reg = _Register(state.amps.reshape((2,) * state.n).copy(), state.qubits)
        sim.live = set(state.qubits)
    rng = np.random.default_rng(seed)
    vec, record = _run(pattern, sim, order, mode, outcomes, rng)
    if np.linalg.norm(vec) == 0:
        raise SimulatorError("branch has zero amplitude")
    return StateVector(vec, tuple(pattern.outputs)).normalized(), record


def enumerate_branches(
    pattern: GraphStatePattern, input_coeffs=None, limit: int = BRANCH_ENUM_LIMIT
) -> list[tuple[StateVector | None, OutcomeRecord]]:
    """Every outcome branch in byproduct mode; zero-weight branches give None."""
    pattern = _with_inputs(pattern, input_coeffs)
    order = pattern.measurement_order()
    if len(order) > limit:
        raise SimulatorError(f"{len(order)} measurements exceed the enumeration limit {limit}")
    corr = _check_corrections(pattern, order)
    results = []

    def descend(k: int, sim: _Lazy, frame: PauliTerm, outcomes: dict) -> None:
        if k == len(order):
            vec = _finish(sim, pattern, frame)
            nrm = float(np.linalg.norm(vec))
            state = StateVector(vec / nrm, tuple(pattern.outputs)) if nrm > 1e-14 else None
            results.append((state, OutcomeRecord(dict(outcomes), nrm**2)))
            return
        v = order[k]
        sim.ready(v)
        fm = _frame_matrix(frame, v).conj().T
        rest = _restrict(frame, v)
        for s in (0, 1):
            branch = sim.copy() if s == 0 else sim
            branch.measure(v, pattern.vertex(v).measure.bra(s) @ fm)
            nxt = PauliTerm(1.0, rest.xs ^ corr[v].xs, rest.zs ^ corr[v].zs) if s else rest
            descend(k + 1, branch, nxt, {**outcomes, v: s})

    descend(0, _Lazy(pattern), PauliTerm(1.0), {})
    return results


# --- circuits ------------------------------------------------------------------


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Clifford prefix first, then each ``cos theta + i sin theta sigma`` in order."""
    if state.n != circuit.n:
        raise SimulatorError(f"state has {state.n} qubits, circuit {circuit.n}")
    qubits = list(range(1, circuit.n + 1))
    vec = state.amps.copy()
    for c in circuit.clifford_prefix:
        vec = c.matrix(qubits) @ vec
    for g in circuit.gates:
        vec = math.cos(g.theta) * vec + 1j * math.sin(g.theta) * (g.axis.matrix(qubits) @ vec)
    return StateVector(vec, state.qubits)


def fidelity_up_to_phase(s1, s2) -> float:
    v1 = np.asarray(s1.amps if isinstance(s1, StateVector) else s1, dtype=complex).reshape(-1)
    v2 = np.asarray(s2.amps if isinstance(s2, StateVector) else s2, dtype=complex).reshape(-1)
    if v1.shape != v2.shape:
        raise SimulatorError(f"state sizes differ: {v1.size} vs {v2.size}")
    n1, n2 = np.linalg.norm(v1), np.linalg.norm(v2)
    if n1 == 0 or n2 == 0:
        raise SimulatorError("fidelity of a zero vector is undefined")
    return float(abs(np.vdot(v1, v2)) / (n1 * n2))


def verify_compiled(
    circuit: Circuit, pattern: GraphStatePattern, input_coeffs, mode: str = "postselect", seed: int = 0
) -> float:
    """Worst fidelity between the pattern output and the direct circuit.

    Byproduct mode checks every branch when few enough, else one sampled run.
    """
    expect = apply_circuit(StateVector.product(input_coeffs), circuit)
    if mode == "postselect":
        out, _ = run_pattern(None, pattern, "postselect", input_coeffs)
        return fidelity_up_to_phase(out, expect)
    if len(pattern.measurement_order()) <= BRANCH_ENUM_LIMIT:
        fids = [fidelity_up_to_phase(s, expect) for s, _ in enumerate_branches(pattern, input_coeffs) if s is not None]
        return min(fids)
    out, _ = run_pattern(None, pattern, "byproduct", input_coeffs, seed=seed)
    return fidelity_up_to_phase(out, expect)

