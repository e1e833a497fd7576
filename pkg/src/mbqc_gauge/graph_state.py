"""Graph-state patterns: vertices, entanglement edges, measurements, byproducts.

Measurement bras follow the generator form ``<0|[alpha* + beta* X]`` with

    XY(t):  <0|[I + e^{-it} X] Z^s / sqrt2
    YZ(t):  <0|[cos(t/2) - i sin(t/2) X] X^s
    XZ(t):  <0|[cos(t/2) + sin(t/2) X] X^s Z^s
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pauli import CliffordGate, Generator, PauliTerm, commutes, parse_term

NORM_TOL = 1e-9
SQRT_HALF = 1 / math.sqrt(2)


class PatternError(ValueError):
    pass


class VertexRole(enum.Enum):
    INPUT = "input"
    SOURCE = "source"
    OUTPUT = "output"


class Plane(enum.Enum):
    XY = "XY"
    YZ = "YZ"
    XZ = "XZ"


@dataclass(frozen=True)
class MeasurementSpec:
    plane: Plane
    angle: float
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "plane", Plane(self.plane))
        object.__setattr__(self, "angle", float(self.angle))
        if self.order < 0:
            raise PatternError(f"measurement order must be nonnegative, got {self.order}")

    def bra(self, outcome: int = 0) -> np.ndarray:
        """Row vector ``(<b|0>, <b|1>)`` of the normalized projector bra."""
        t = self.angle
        if self.plane is Plane.XY:
            row = np.array([1, np.exp(-1j * t)]) / math.sqrt(2)
            z_pow = np.diag([1, -1]) if outcome else np.eye(2)
            return row @ z_pow
        c, s = math.cos(t / 2), math.sin(t / 2)
        if self.plane is Plane.YZ:
            row = np.array([c, -1j * s])
            return row @ (_X if outcome else np.eye(2))
        row = np.array([c, s], dtype=complex)
        return row @ (_X @ _Z if outcome else np.eye(2))

    def alpha_beta(self) -> tuple[complex, complex]:
        """(alpha, beta) of the s=0 bra, so that bra = alpha*<0| + beta*<1|."""
        r = self.bra(0)
        return complex(np.conj(r[0])), complex(np.conj(r[1]))


_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)


@dataclass(frozen=True)
class Vertex:
    id: int
    role: VertexRole
    a: complex = SQRT_HALF
    b: complex = SQRT_HALF
    measure: MeasurementSpec | None = None

    def __post_init__(self):
        object.__setattr__(self, "role", VertexRole(self.role))
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    @property
    def measured(self) -> bool:
        return self.role is not VertexRole.OUTPUT


@dataclass(frozen=True)
class Byproduct:
    """Outcome-conditioned Pauli correction, or an unconditional output Clifford.

    ``trigger=None`` marks a Clifford applied to the outputs after every
    measurement (for example the closing Hadamard of the Clifford gauge).
    """

    trigger: int | None
    correction: PauliTerm | None = None
    clifford: CliffordGate | None = None

    def __post_init__(self):
        if (self.correction is None) == (self.clifford is None):
            raise PatternError("byproduct needs exactly one of correction / clifford")
        if self.clifford is not None and self.trigger is not None:
            raise PatternError("Clifford byproducts are unconditional (trigger must be null)")
        if self.correction is not None and self.trigger is None:
            raise PatternError("Pauli byproducts need a trigger vertex")


def _edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class GraphStatePattern:
    vertices: tuple
    edges: frozenset = field(default_factory=frozenset)
    byproducts: tuple = ()

    def __post_init__(self):
        verts = tuple(self.vertices)
        ids = [v.id for v in verts]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise PatternError(f"duplicate vertex ids {dup}")
        edges = set()
        for e in self.edges:
            i, j = tuple(e)
            if i == j:
                raise PatternError(f"self-loop on vertex {i}")
            edges.add(_edge(i, j))
        known = set(ids)
        for i, j in edges:
            if i not in known or j not in known:
                raise PatternError(f"edge ({i}, {j}) references an unknown vertex")
        for v in verts:
            if abs(abs(v.a) ** 2 + abs(v.b) ** 2 - 1) > NORM_TOL:
                raise PatternError(f"vertex {v.id}: |a|^2+|b|^2 != 1")
            if v.role is VertexRole.OUTPUT and v.measure is not None:
                raise PatternError(f"output vertex {v.id} must not be measured")
            if v.role is not VertexRole.OUTPUT and v.measure is None:
                raise PatternError(f"vertex {v.id} ({v.role.value}) lacks a measurement")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", frozenset(edges))
        object.__setattr__(self, "byproducts", tuple(self.byproducts))

    # --- lookups ---------------------------------------------------------

    def vertex(self, vid: int) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    @property
    def ids(self) -> list[int]:
        return [v.id for v in self.vertices]

    def ids_with_role(self, role: VertexRole) -> list[int]:
        return [v.id for v in self.vertices if v.role is role]

    @property
    def inputs(self) -> list[int]:
        return self.ids_with_role(VertexRole.INPUT)

    @property
    def outputs(self) -> list[int]:
        return self.ids_with_role(VertexRole.OUTPUT)

    @property
    def measured(self) -> list[int]:
        return [v.id for v in self.vertices if v.measured]

    def measurement_order(self) -> list[int]:
        """Measured vertices sorted by round, ties broken by listing order."""
        rank = {v.id: k for k, v in enumerate(self.vertices)}
        meas = [v for v in self.vertices if v.measured]
        return [v.id for v in sorted(meas, key=lambda v: (v.measure.order, rank[v.id]))]

    def corrections(self) -> dict[int, PauliTerm]:
        return {bp.trigger: bp.correction for bp in self.byproducts if bp.correction is not None}

    def output_cliffords(self) -> list[CliffordGate]:
        return [bp.clifford for bp in self.byproducts if bp.clifford is not None]

    # --- edits -----------------------------------------------------------

    def toggle_edge(self, i: int, j: int) -> "GraphStatePattern":
        return replace(self, edges=self.edges ^ {_edge(i, j)})

    def with_inputs(self, coeffs: Sequence[tuple[complex, complex]]) -> "GraphStatePattern":
        """Replace the (a, b) of the input vertices, in listing order."""
        ins = self.inputs
        if len(coeffs) != len(ins):
            raise PatternError(f"expected {len(ins)} input coefficient pairs, got {len(coeffs)}")
        new = dict(zip(ins, coeffs))
        verts = tuple(
            replace(v, a=new[v.id][0], b=new[v.id][1]) if v.id in new else v for v in self.vertices
        )
        return replace(self, vertices=verts)


def neighborhoods(pattern: GraphStatePattern) -> dict[int, frozenset]:
    nbrs: dict[int, set] = {vid: set() for vid in pattern.ids}
    for i, j in pattern.edges:
        nbrs[i].add(j)
        nbrs[j].add(i)
    return {k: frozenset(v) for k, v in nbrs.items()}


def pair_neighborhood(nbrs: Mapping[int, frozenset], i: int, j: int, measured: Iterable[int] = ()) -> frozenset:
    """N(i,j) = (N(i) Δ N(j)) minus the measured set."""
    return (nbrs[i] ^ nbrs[j]) - set(measured)


def build_state(pattern: GraphStatePattern) -> list[Generator]:
    nbrs = neighborhoods(pattern)
    return [Generator(v.a, v.b, v.id, nbrs[v.id]) for v in pattern.vertices]


def stabilizers_commute(gens: Sequence[Generator]) -> bool:
    stabs = [g.stabilizer for g in gens]
    return all(commutes(p, q) for k, p in enumerate(stabs) for q in stabs[k + 1 :])


# --- serialization -----------------------------------------------------------


def _cpx(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def pattern_to_dict(pattern: GraphStatePattern) -> dict:
    verts = []
    for v in pattern.vertices:
        m = None
        if v.measure is not None:
            m = {"plane": v.measure.plane.value, "angle": v.measure.angle, "order": v.measure.order}
        verts.append({"id": v.id, "role": v.role.value, "a": _cpx(v.a), "b": _cpx(v.b), "measure": m})
    bps = []
    for bp in pattern.byproducts:
        if bp.clifford is not None:
            bps.append({"trigger": None, "clifford": bp.clifford.to_json()})
        else:
            entry = {"trigger": bp.trigger, "correction": bp.correction.to_text()}
            if bp.correction.coeff != 1:
                entry["coeff"] = _cpx(bp.correction.coeff)
            bps.append(entry)
    return {"vertices": verts, "edges": [list(e) for e in sorted(pattern.edges)], "byproducts": bps}


def pattern_from_dict(obj: Mapping) -> GraphStatePattern:
    verts = []
    for d in obj["vertices"]:
        m = d.get("measure")
        spec = None if m is None else MeasurementSpec(Plane(m["plane"]), m["angle"], int(m.get("order", 0)))
        verts.append(Vertex(int(d["id"]), VertexRole(d["role"]), complex(*d["a"]), complex(*d["b"]), spec))
    bps = []
    for d in obj.get("byproducts", []):
        if d.get("clifford") is not None:
            bps.append(Byproduct(None, clifford=CliffordGate.from_json(d["clifford"])))
        else:
            coeff = complex(*d["coeff"]) if "coeff" in d else 1.0
            bps.append(Byproduct(int(d["trigger"]), correction=parse_term(d["correction"], coeff)))
    return GraphStatePattern(tuple(verts), frozenset(tuple(e) for e in obj.get("edges", [])), tuple(bps))


_ROLE_COLORS = {VertexRole.INPUT: "lightblue", VertexRole.SOURCE: "lightgray", VertexRole.OUTPUT: "salmon"}


def _dot(pattern: GraphStatePattern) -> str:
    lines = ["graph pattern {"]
    for v in pattern.vertices:
        label = f"{v.id}/{v.role.value}"
        if v.measure is not None:
            label += f"/{v.measure.plane.value}({v.measure.angle:.6g})"
        lines.append(f'  {v.id} [label="{label}", style=filled, fillcolor={_ROLE_COLORS[v.role]}];')
    for i, j in sorted(pattern.edges):
        lines.append(f"  {i} -- {j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(pattern: GraphStatePattern, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(pattern_to_dict(pattern), indent=2, sort_keys=True) + "\n"
    if fmt == "dot":
        return _dot(pattern)
    raise ValueError(f"unknown export format {fmt!r} (expected json or dot)")


def import_json(text: str) -> GraphStatePattern:
    return pattern_from_dict(json.loads(text))
