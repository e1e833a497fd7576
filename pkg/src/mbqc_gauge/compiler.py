"""From Pauli-rotation circuits to graph-state measurement patterns.

Each logical qubit owns a chain of vertices.  The newest vertex of a chain
holds ``H^f psi`` where ``f`` is the qubit's frame bit.  Every logical gate is
mapped to an operation that is diagonal on the held states:

* Z-string rotation (needs f=0 on its support): one |+> ancilla joined to the
  current vertices and measured YZ(-2 theta);
* X-string rotation (needs f=1): weight one is folded into the XY angle of the
  current vertex, longer strings get a YZ(-2 theta) ancilla;
* H flips the frame; CZ toggles an edge between current vertices (f=0);
  CX is H_t CZ H_t.

Advancing a chain measures the current vertex in XY(phi) and appends a fresh
|+> vertex, which applies ``H P(-phi)`` and flips the frame.  A finished chain
has at least three vertices (input, middle, output) and frame 0, so a circuit
of Z-string rotations uses exactly ``3 n + #rotations`` vertices.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

import numpy as np
import sympy as sp

from .graph_state import (
    Byproduct,
    GraphStatePattern,
    MeasurementSpec,
    Plane,
    SQRT_HALF,
    Vertex,
    VertexRole,
    neighborhoods,
)
from .pauli import CliffordGate, PauliTerm, parse_term
from .residual import rule_terms
from .tensor_gauge import TransferTensor, check_symmetry


class CompileError(ValueError):
    pass


class AnalysisError(ValueError):
    pass


# --- circuits ----------------------------------------------------------------


@dataclass(frozen=True)
class RotationGate:
    """``cos(theta) + i sin(theta) axis`` with a pure X- or Z-string axis."""

    axis: PauliTerm
    theta: float

    def __post_init__(self):
        if not self.axis.support:
            raise CompileError("rotation axis must act on at least one qubit")
        if self.axis.coeff != 1:
            raise CompileError(f"rotation axis must have coefficient 1, got {self.axis.coeff}")
        if not (self.axis.is_z_only or self.axis.is_x_only):
            raise CompileError(f"mixed X/Z axis {self.axis.to_text()!r} is not supported")
        object.__setattr__(self, "theta", float(self.theta))

    @classmethod
    def parse(cls, axis: str, theta: float) -> "RotationGate":
        return cls(parse_term(axis), theta)

    @property
    def kind(self) -> str:
        return "Z" if self.axis.is_z_only else "X"

    def matrix(self, n: int) -> np.ndarray:
        sigma = self.axis.matrix(list(range(1, n + 1)))
        return math.cos(self.theta) * np.eye(2**n) + 1j * math.sin(self.theta) * sigma


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple = ()
    clifford_prefix: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise CompileError(f"circuit needs at least one qubit, got n={self.n}")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "clifford_prefix", tuple(self.clifford_prefix))
        for g in self.gates:
            bad = [q for q in g.axis.support if not 1 <= q <= self.n]
            if bad:
                raise CompileError(f"gate {g.axis.to_text()} acts outside qubits 1..{self.n}")
        for c in self.clifford_prefix:
            if any(not 1 <= q <= self.n for q in c.qubits):
                raise CompileError(f"Clifford {c.kind}{c.qubits} acts outside qubits 1..{self.n}")

    def unitary(self) -> np.ndarray:
        qubits = list(range(1, self.n + 1))
        u = np.eye(2**self.n, dtype=complex)
        for c in self.clifford_prefix:
            u = c.matrix(qubits) @ u
        for g in self.gates:
            u = g.matrix(self.n) @ u
        return u

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "convention": "theta",
            "gates": [{"axis": g.axis.to_text(), "theta": g.theta} for g in self.gates],
            "clifford": [c.to_json() for c in self.clifford_prefix],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Circuit":
        conv = obj.get("convention", "theta")
        if conv not in ("theta", "half-theta"):
            raise CompileError(f"unknown angle convention {conv!r} (expected theta or half-theta)")
        scale = 0.5 if conv == "half-theta" else 1.0
        gates = tuple(RotationGate.parse(g["axis"], scale * float(g["theta"])) for g in obj.get("gates", []))
        cliffs = tuple(CliffordGate.from_json(c) for c in obj.get("clifford", []) or [])
        return cls(int(obj["n"]), gates, cliffs)


# --- compiler ----------------------------------------------------------------


@dataclass
class _Node:
    key: int
    kind: str  # input | chain | ancilla
    a: complex = SQRT_HALF
    b: complex = SQRT_HALF
    plane: Plane | None = None
    angle: float = 0.0


@dataclass
class _Builder:
    n: int
    coeffs: Sequence[tuple[complex, complex]]
    nodes: list = field(default_factory=list)
    edges: set = field(default_factory=set)
    chains: dict = field(default_factory=dict)
    frame: dict = field(default_factory=dict)
    pending: dict = field(default_factory=dict)
    succ: dict = field(default_factory=dict)

    def __post_init__(self):
        for q in range(1, self.n + 1):
            a, b = self.coeffs[q - 1]
            key = self._new("input", a, b)
            self.chains[q] = [key]
            self.frame[q] = 0
            self.pending[q] = 0.0

    def _new(self, kind: str, a=SQRT_HALF, b=SQRT_HALF) -> int:
        node = _Node(len(self.nodes), kind, a, b)
        self.nodes.append(node)
        return node.key

    def _toggle(self, i: int, j: int) -> None:
        self.edges ^= {(min(i, j), max(i, j))}

    def current(self, q: int) -> int:
        return self.chains[q][-1]

    def advance(self, q: int) -> None:
        cur = self.current(q)
        self.nodes[cur].plane = Plane.XY
        self.nodes[cur].angle = self.pending[q]
        w = self._new("chain")
        self._toggle(cur, w)
        self.succ[cur] = w
        self.chains[q].append(w)
        self.frame[q] ^= 1
        self.pending[q] = 0.0

    def ensure(self, q: int, f: int) -> None:
        if self.frame[q] != f:
            self.advance(q)

    def ancilla(self, support, theta: float) -> None:
        g = self._new("ancilla")
        self.nodes[g].plane = Plane.YZ
        self.nodes[g].angle = -2 * theta
        for q in sorted(support):
            self._toggle(g, self.current(q))

    def rotation(self, gate: RotationGate) -> None:
        support = gate.axis.support
        if gate.kind == "Z":
            for q in sorted(support):
                self.ensure(q, 0)
            self.ancilla(support, gate.theta)
            return
        for q in sorted(support):
            self.ensure(q, 1)
        if len(support) == 1:
            (q,) = support
            self.pending[q] += 2 * gate.theta
        else:
            self.ancilla(support, gate.theta)

    def clifford(self, gate: CliffordGate) -> None:
        if gate.kind == "H":
            self.frame[gate.qubits[0]] ^= 1
        elif gate.kind == "CZ":
            i, j = gate.qubits
            self.ensure(i, 0)
            self.ensure(j, 0)
            self._toggle(self.current(i), self.current(j))
        else:
            c, t = gate.qubits
            self.frame[t] ^= 1
            self.clifford(CliffordGate.cz(c, t))
            self.frame[t] ^= 1

    def finalize(self) -> None:
        for q in range(1, self.n + 1):
            while self.frame[q] or len(self.chains[q]) < 3:
                self.advance(q)


def _corrections(pattern: GraphStatePattern, succ: Mapping[int, int]) -> dict[int, PauliTerm]:
    """Outcome-1 corrections: chain vertices use their successor's stabilizer."""
    nbrs = neighborhoods(pattern)
    out = {}
    for v in pattern.vertices:
        if v.measure is None:
            continue
        if v.measure.plane is Plane.XY:
            w = succ[v.id]
            out[v.id] = PauliTerm(1.0, {w}, nbrs[w] - {v.id})
        elif v.measure.plane is Plane.YZ:
            out[v.id] = PauliTerm(1.0, (), nbrs[v.id])
        else:
            w = succ[v.id]
            out[v.id] = PauliTerm(1.0, {w}, (nbrs[w] - {v.id}) ^ nbrs[v.id])
    return out


def flow_order(measured: Sequence[int], corrections: Mapping[int, PauliTerm]) -> list[int]:
    """Measure u before every measured vertex its correction touches.

    Kahn's algorithm with the smallest id first; falls back to ``measured``
    order when the constraints are cyclic.
    """
    mset = set(measured)
    after = {u: sorted((corrections[u].support & mset) - {u}) for u in measured}
    indeg = {u: 0 for u in measured}
    for u in measured:
        for x in after[u]:
            indeg[x] += 1
    heap = [u for u in measured if indeg[u] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        u = heapq.heappop(heap)
        order.append(u)
        for x in after[u]:
            indeg[x] -= 1
            if indeg[x] == 0:
                heapq.heappush(heap, x)
    return order if len(order) == len(measured) else list(measured)


def _assemble(b: _Builder) -> GraphStatePattern:
    outputs = {b.current(q) for q in range(1, b.n + 1)}
    inputs = [b.chains[q][0] for q in range(1, b.n + 1)]
    middle = [nd.key for nd in b.nodes if nd.key not in outputs and nd.key not in inputs]
    tail = [b.current(q) for q in range(1, b.n + 1)]
    renum = {old: k + 1 for k, old in enumerate(inputs + middle + tail)}

    def vertex(key: int, order: int = 0) -> Vertex:
        nd = b.nodes[key]
        role = VertexRole.OUTPUT if key in outputs else (
            VertexRole.INPUT if nd.kind == "input" else VertexRole.SOURCE
        )
        spec = None if key in outputs else MeasurementSpec(nd.plane, nd.angle, order)
        return Vertex(renum[key], role, nd.a, nd.b, spec)

    verts = [vertex(k) for k in inputs + middle + tail]
    edges = frozenset((renum[i], renum[j]) for i, j in b.edges)
    succ = {renum[u]: renum[w] for u, w in b.succ.items()}
    draft = GraphStatePattern(tuple(verts), edges)
    corr = _corrections(draft, succ)
    order = flow_order(draft.measured, corr)
    rank = {v: k for k, v in enumerate(order)}
    inv = {new: old for old, new in renum.items()}
    verts = [vertex(inv[v.id], rank.get(v.id, 0)) for v in verts]
    byproducts = tuple(Byproduct(u, correction=corr[u]) for u in order)
    return GraphStatePattern(tuple(verts), edges, byproducts)


def _input_coeffs(n: int, input_coeffs) -> list[tuple[complex, complex]]:
    if input_coeffs is None:
        return [(1.0, 0.0)] * n
    coeffs = [(complex(a), complex(b)) for a, b in input_coeffs]
    if len(coeffs) != n:
        raise CompileError(f"expected {n} input coefficient pairs, got {len(coeffs)}")
    for k, (a, b) in enumerate(coeffs, start=1):
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-9:
            raise CompileError(f"input {k}: |a|^2+|b|^2 != 1")
    return coeffs


def compile(circuit: Circuit, input_coeffs=None) -> GraphStatePattern:  # noqa: A001
    """Compile a rotation circuit; inputs default to |0>.

    Input vertices get ids 1..n, measured ancillas and chain vertices follow
    in creation order, outputs come last in qubit order.
    """
    b = _Builder(circuit.n, _input_coeffs(circuit.n, input_coeffs))
    for c in circuit.clifford_prefix:
        b.clifford(c)
    for g in circuit.gates:
        b.rotation(g)
    b.finalize()
    return _assemble(b)


def compile_clifford_gauge_rx(theta: float, input_coeffs=None) -> GraphStatePattern:
    """Rx through the Clifford gauge: H [c + s Z][a + b Z] H on a 3-vertex star.

    Vertex 1 is a |+> source measured YZ(theta), vertex 2 the input measured
    XY(0), vertex 3 the output, followed by an unconditional H.  The pattern
    implements ``cos(theta/2) - i sin(theta/2) X``.
    """
    ((a, b),) = _input_coeffs(1, input_coeffs)
    verts = (
        Vertex(1, VertexRole.SOURCE, measure=MeasurementSpec(Plane.YZ, theta, 1)),
        Vertex(2, VertexRole.INPUT, a, b, MeasurementSpec(Plane.XY, 0.0, 0)),
        Vertex(3, VertexRole.OUTPUT),
    )
    edges = frozenset({(1, 3), (2, 3)})
    byproducts = (
        Byproduct(2, correction=parse_term("X3 Z1")),
        Byproduct(1, correction=parse_term("Z3")),
        Byproduct(None, clifford=CliffordGate.h(3)),
    )
    return GraphStatePattern(verts, edges, byproducts)


def vertex_count_law(circuit: Circuit) -> int:
    return 3 * circuit.n + len(circuit.gates)


# --- analysis of the residual ----------------------------------------------------


@dataclass(frozen=True)
class GraphFragment:
    measured: tuple
    outputs: tuple
    edges: frozenset
    output_coeffs: Mapping[Any, tuple]


def _z_supports(outputs: Sequence, entries: np.ndarray):
    n = len(outputs)
    for caps in np.ndindex(*(2,) * n):
        idx = tuple(2 * c for c in caps)
        yield frozenset(o for o, c in zip(outputs, caps) if c), entries[idx]


def _is_symmetric(tprime: TransferTensor, symbols, seed: int = 7) -> bool:
    rng = np.random.default_rng(seed)
    subs = {s: complex(*rng.normal(size=2)) for s in symbols}
    num = np.vectorize(lambda e: complex(sp.sympify(e).subs(subs)), otypes=[complex])(tprime.entries)
    return check_symmetry(TransferTensor(num))


def residual_tensor(
    pattern: GraphStatePattern,
    factors: Mapping[int, tuple[Any, Any]],
    output_coeffs: Mapping[int, tuple[Any, Any]],
) -> TransferTensor:
    """Symbolic transfer tensor of ``R * prod G'_out`` for a pattern.

    ``factors`` gives (A_i, B_i) per measured vertex and ``output_coeffs``
    (a_o, b_o) per output, typically sympy symbols.
    """
    outs = pattern.outputs
    nbrs = neighborhoods(pattern)
    if any(nbrs[o] & set(outs) for o in outs):
        raise AnalysisError("edges between output vertices are not supported")
    res: dict[frozenset, Any] = {}
    for t in rule_terms(nbrs, pattern.measured, factors):
        res[t.zs] = res.get(t.zs, 0) + t.coeff
    n = len(outs)
    ent = np.empty((4,) * n, dtype=object)
    for idx in np.ndindex(*(4,) * n):
        zs = frozenset(o for o, i in zip(outs, idx) if i >> 1)
        val = res.get(zs, 0)
        for o, i in zip(outs, idx):
            val = val * output_coeffs[o][i & 1]
        ent[idx] = sp.expand(val)
    return TransferTensor(ent)


def dress_symmetric(
    tprime: TransferTensor, residual_syms: Sequence[tuple[Any, Any]], output_syms: Sequence[tuple[Any, Any]]
) -> TransferTensor:
    """Attach (A, B) by capital bit and (a, b) by lower bit to each position.

    This is the reading of a fully symmetric tensor in which each output
    carries a generator (a, b) and a residual partner with factors (A, B).
    """
    ent = np.empty(tprime.entries.shape, dtype=object)
    for idx in np.ndindex(*tprime.entries.shape):
        val = sp.sympify(tprime.entries[idx])
        for k, i in enumerate(idx):
            val = val * residual_syms[k][i >> 1] * output_syms[k][i & 1]
        ent[idx] = sp.expand(val)
    return TransferTensor(ent)


def analyze_residual(
    tprime: TransferTensor,
    measured: Mapping[Any, tuple[Any, Any]],
    outputs: Sequence[tuple[Any, tuple[Any, Any]]],
) -> GraphFragment:
    """Read a graph off a symmetric transfer tensor written in factor symbols.

    ``measured`` maps each measured label to its (idle, interactive) symbols,
    ``outputs`` lists (label, (a, b)) per tensor axis.  Each monomial of a
    first-column entry picks one factor per measured label; single-interactive
    monomials give measured-output edges through their Z-support, pairs give
    measured-measured edges through their sign.  Every monomial is then checked
    against the graph so obtained.
    """
    out_labels = tuple(lbl for lbl, _ in outputs)
    if tprime.n != len(out_labels):
        raise AnalysisError(f"tensor rank {tprime.n} != {len(out_labels)} outputs")
    all_syms = set()
    for e in tprime.entries.flat:
        all_syms |= sp.sympify(e).free_symbols
    if not _is_symmetric(tprime, all_syms):
        raise AnalysisError("transfer tensor violates the index-group symmetry")

    idle_of = {s[0]: lbl for lbl, s in measured.items()}
    inter_of = {s[1]: lbl for lbl, s in measured.items()}
    a_prod = sp.Mul(*[ab[0] for _, ab in outputs])

    terms = []  # (interactive set, z support, value without label factors, monomial)
    for zs, entry in _z_supports(out_labels, tprime.entries):
        expr = sp.expand(sp.sympify(entry) / a_prod)
        if expr == 0:
            continue
        for mono in sp.Add.make_args(expr):
            powers = mono.as_powers_dict()
            seen: dict[Any, str] = {}
            rest = mono
            for sym, power in powers.items():
                lbl = idle_of.get(sym, inter_of.get(sym))
                if lbl is None:
                    continue
                if power != 1 or lbl in seen:
                    raise AnalysisError(f"monomial {mono} uses label {lbl!r} more than once")
                seen[lbl] = "B" if sym in inter_of else "A"
                rest = rest / sym
            missing = set(measured) - set(seen)
            if missing:
                raise AnalysisError(f"monomial {mono} lacks a factor for {sorted(map(str, missing))}")
            inter = frozenset(l for l, k in seen.items() if k == "B")
            terms.append((inter, zs, sp.simplify(rest), mono))

    ref = [t for t in terms if not t[0]]
    if len(ref) != 1 or ref[0][1]:
        raise AnalysisError("expected exactly one all-idle monomial on the identity entry")
    ref_val = ref[0][2]

    def sign_of(term) -> int:
        ratio = complex(sp.nsimplify(sp.simplify(term[2] / ref_val)))
        if abs(ratio - 1) < 1e-9:
            return 1
        if abs(ratio + 1) < 1e-9:
            return -1
        raise AnalysisError(f"monomial {term[3]} is not +-1 times the all-idle term")

    out_nbrs: dict[Any, frozenset] = {}
    for t in terms:
        if len(t[0]) == 1:
            (lbl,) = t[0]
            if sign_of(t) != 1:
                raise AnalysisError(f"single-interactive monomial {t[3]} carries a minus sign")
            out_nbrs[lbl] = t[1]
    if set(out_nbrs) != set(measured):
        raise AnalysisError(f"no single-interactive monomial for {sorted(map(str, set(measured) - set(out_nbrs)))}")
    edges = set()
    for t in terms:
        if len(t[0]) == 2 and sign_of(t) == -1:
            edges.add(frozenset(t[0]))

    labels = list(measured)
    bad = []
    for t in terms:
        inter = sorted(t[0], key=labels.index)
        n_inside = sum(1 for k, i in enumerate(inter) for j in inter[k + 1 :] if frozenset((i, j)) in edges)
        expect_zs = frozenset()
        for i in inter:
            expect_zs = expect_zs ^ out_nbrs[i]
        if sign_of(t) != (-1) ** n_inside or t[1] != expect_zs:
            bad.append(str(t[3]))
    if len(terms) != 2 ** len(labels):
        bad.append(f"expected {2 ** len(labels)} monomials, found {len(terms)}")
    if bad:
        raise AnalysisError(f"sign pattern inconsistent with a simple graph: {bad}")

    for lbl, zs in out_nbrs.items():
        for o in zs:
            edges.add(frozenset((lbl, o)))
    return GraphFragment(
        measured=tuple(labels),
        outputs=out_labels,
        edges=frozenset(edges),
        output_coeffs={lbl: ab for lbl, ab in outputs},
    )


# --- resources ---------------------------------------------------------------

ALGOS = ("qft", "qaoa-cyclic", "qaoa-complete", "generic")
METHODS = ("mcalculus", "fully-symmetric")


@dataclass(frozen=True)
class ResourceReport:
    method: str
    algo: str
    n: int
    p: int
    qubit_count: int | Fraction
    table_value: int | Fraction | None = None

    def to_json(self) -> dict:
        def num(x):
            if x is None:
                return None
            return int(x) if Fraction(x).denominator == 1 else str(x)

        return {
            "method": self.method,
            "algo": self.algo,
            "n": self.n,
            "p": self.p,
            "qubit_count": num(self.qubit_count),
            "table_value": num(self.table_value),
        }


def _norm(x: Fraction) -> int | Fraction:
    return int(x) if x.denominator == 1 else x


def count_resources(algo: str, n: int, p: int = 1, method: str = "fully-symmetric") -> ResourceReport:
    """Qubit counts for M-Calculus and the fully symmetric gauge.

    ``generic`` reads ``p`` as the number of rotation gates.  For the complete
    Max-Cut graph the tabulated fully symmetric value differs from the
    derivation; ``qubit_count`` follows the derivation and ``table_value``
    carries the tabulated number.
    """
    if algo not in ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {', '.join(ALGOS)}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if n < 1 or p < 1:
        raise ValueError(f"need n >= 1 and p >= 1, got n={n}, p={p}")
    N, P = Fraction(n), Fraction(p)
    table = None
    if algo == "qft":
        count = 5 * N + 3 * N * (N - 1) if method == "mcalculus" else 3 * N + Fraction(3, 2) * N * (N - 1)
        table = 3 * N**2 + 2 * N if method == "mcalculus" else Fraction(3, 2) * N**2 + Fraction(3, 2) * N
    elif algo == "qaoa-cyclic":
        count = N * (1 + 7 * P) if method == "mcalculus" else 2 * N * (1 + P)
        table = count
    elif algo == "qaoa-complete":
        if method == "mcalculus":
            count = N + 2 * P * N * (N - 1) + 3 * P * N
            table = 2 * P * N**2 + N * (1 + P)
        else:
            count = 2 * N + Fraction(1, 2) * P * N * (N - 1) + N * P
            table = Fraction(1, 2) * P * N**2 + N * (Fraction(3, 2) * P - 2)
    else:
        if method == "mcalculus":
            raise ValueError("M-Calculus counts are only tabulated for qft, qaoa-cyclic, qaoa-complete")
        count = 3 * N + P
    return ResourceReport(method, algo, n, p, _norm(count), None if table is None else _norm(table))
