"""Pauli terms over the {I, X, Z, ZX} basis, with generators and Clifford conjugation.

A single-site operator is written as Z^z X^x, so ``ZX`` always means the
ordered product Z·X.  Y never appears as a label: Y = i·ZX is carried by the
complex coefficient.  Multiplying two terms only ever produces a sign, since
(Z^z1 X^x1)(Z^z2 X^x2) = (-1)^(x1 z2) Z^(z1+z2) X^(x1+x2).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

TOL = 1e-12


class PauliOp(enum.Enum):
    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    ZX = (1, 1)

    @property
    def x(self) -> int:
        return self.value[0]

    @property
    def z(self) -> int:
        return self.value[1]

    @classmethod
    def from_bits(cls, x: int, z: int) -> "PauliOp":
        return _FROM_BITS[(x & 1, z & 1)]

    def matrix(self) -> np.ndarray:
        return _MATRICES[self]


_FROM_BITS = {op.value: op for op in PauliOp}
_MATRICES = {
    PauliOp.I: np.eye(2, dtype=complex),
    PauliOp.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliOp.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    PauliOp.ZX: np.array([[0, 1], [-1, 0]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """``coeff · ⊗_q Z_q^{z_q} X_q^{x_q}`` stored sparsely as X- and Z-supports."""

    coeff: complex = 1.0
    xs: frozenset = field(default_factory=frozenset)
    zs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "xs", frozenset(self.xs))
        object.__setattr__(self, "zs", frozenset(self.zs))

    @classmethod
    def from_ops(cls, ops: Mapping[int, PauliOp], coeff: complex = 1.0) -> "PauliTerm":
        xs = {q for q, op in ops.items() if op.x}
        zs = {q for q, op in ops.items() if op.z}
        return cls(coeff, xs, zs)

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "PauliTerm":
        return cls(coeff)

    @property
    def support(self) -> frozenset:
        return self.xs | self.zs

    @property
    def ops(self) -> dict[int, PauliOp]:
        return {q: self.op(q) for q in sorted(self.support)}

    def op(self, qubit: int) -> PauliOp:
        return PauliOp.from_bits(qubit in self.xs, qubit in self.zs)

    @property
    def is_z_only(self) -> bool:
        return not self.xs

    @property
    def is_x_only(self) -> bool:
        return not self.zs

    def with_coeff(self, coeff: complex) -> "PauliTerm":
        return PauliTerm(coeff, self.xs, self.zs)

    def same_ops(self, other: "PauliTerm") -> bool:
        return self.xs == other.xs and self.zs == other.zs

    def isclose(self, other: "PauliTerm", tol: float = TOL) -> bool:
        return self.same_ops(other) and abs(self.coeff - other.coeff) <= tol

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        return self.with_coeff(self.coeff * other)

    def __rmul__(self, other) -> "PauliTerm":
        return self.with_coeff(self.coeff * other)

    def __neg__(self) -> "PauliTerm":
        return self.with_coeff(-self.coeff)

    def dagger(self) -> "PauliTerm":
        # (Z^z X^x)† = X^x Z^z = (-1)^(xz) Z^z X^x
        sign = (-1) ** len(self.xs & self.zs)
        return PauliTerm(np.conj(self.coeff) * sign, self.xs, self.zs)

    def matrix(self, qubits: Sequence[int]) -> np.ndarray:
        """Dense matrix on ``qubits`` (first entry is the most significant bit)."""
        extra = self.support - set(qubits)
        if extra:
            raise ValueError(f"term acts on qubits {sorted(extra)} outside {list(qubits)}")
        mats = [self.op(q).matrix() for q in qubits]
        return self.coeff * reduce(np.kron, mats, np.eye(1, dtype=complex))

    def to_text(self) -> str:
        return " ".join(f"{op.name}{q}" for q, op in self.ops.items())

    def __str__(self) -> str:
        body = self.to_text() or "I"
        return f"({self.coeff:.6g}) {body}"


_TOKEN = re.compile(r"^(ZX|X|Z|I)(\d+)$")


def parse_term(text: str, coeff: complex = 1.0) -> PauliTerm:
    """Parse ``"X1 Z2 ZX4"``; the empty string is the identity."""
    ops: dict[int, PauliOp] = {}
    for tok in text.split():
        m = _TOKEN.match(tok)
        if m is None:
            raise ValueError(f"bad Pauli token {tok!r}")
        q = int(m.group(2))
        if q < 1:
            raise ValueError(f"qubit ids are 1-based, got {tok!r}")
        if q in ops:
            raise ValueError(f"qubit {q} repeated in {text!r}")
        op = PauliOp[m.group(1)]
        if op is not PauliOp.I:
            ops[q] = op
    return PauliTerm.from_ops(ops, coeff)


def term_to_json(term: PauliTerm) -> dict:
    return {"coeff": [term.coeff.real, term.coeff.imag], "ops": term.to_text()}


def term_from_json(obj) -> PauliTerm:
    if isinstance(obj, str):
        return parse_term(obj)
    re_, im = obj.get("coeff", [1.0, 0.0])
    return parse_term(obj["ops"], complex(re_, im))


def multiply(lhs: PauliTerm, rhs: PauliTerm) -> PauliTerm:
    sign = -1 if len(lhs.xs & rhs.zs) % 2 else 1
    return PauliTerm(lhs.coeff * rhs.coeff * sign, lhs.xs ^ rhs.xs, lhs.zs ^ rhs.zs)


def commutes(k1: PauliTerm, k2: PauliTerm) -> bool:
    anti = len(k1.xs & k2.zs) + len(k1.zs & k2.xs)
    return anti % 2 == 0


def product(terms: Iterable[PauliTerm]) -> PauliTerm:
    return reduce(multiply, terms, PauliTerm.identity())


# --- Clifford gates --------------------------------------------------------


@dataclass(frozen=True)
class CliffordGate:
    """H(i), CZ(i, j) or CX(control i, target j)."""

    kind: str
    qubits: tuple

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = {"H": 1, "CZ": 2, "CX": 2}.get(kind)
        if arity is None:
            raise ValueError(f"unknown Clifford gate {self.kind!r}")
        if len(self.qubits) != arity:
            raise ValueError(f"{kind} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{kind} needs two distinct qubits")

    @classmethod
    def h(cls, q: int) -> "CliffordGate":
        return cls("H", (q,))

    @classmethod
    def cz(cls, i: int, j: int) -> "CliffordGate":
        return cls("CZ", (i, j))

    @classmethod
    def cx(cls, control: int, target: int) -> "CliffordGate":
        return cls("CX", (control, target))

    def to_json(self) -> dict:
        if self.kind == "H":
            return {"kind": "H", "qubit": self.qubits[0]}
        return {"kind": self.kind, "control": self.qubits[0], "target": self.qubits[1]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "CliffordGate":
        kind = str(obj["kind"]).upper()
        if kind == "H":
            return cls.h(obj["qubit"])
        if "qubits" in obj:
            return cls(kind, tuple(obj["qubits"]))
        return cls(kind, (obj["control"], obj["target"]))

    def matrix(self, qubits: Sequence[int]) -> np.ndarray:
        """Dense unitary on ``qubits`` (first entry most significant)."""
        n = len(qubits)
        pos = {q: n - 1 - k for k, q in enumerate(qubits)}
        dim = 2**n
        if self.kind == "H":
            p = pos[self.qubits[0]]
            h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
            left = np.eye(2 ** (n - 1 - p))
            right = np.eye(2**p)
            return np.kron(np.kron(left, h), right)
        i, j = (pos[q] for q in self.qubits)
        u = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            ci, cj = (col >> i) & 1, (col >> j) & 1
            if self.kind == "CZ":
                u[col, col] = -1 if ci and cj else 1
            else:
                u[col ^ (ci << j), col] = 1
        return u


def _conj_x(gate: CliffordGate, q: int) -> PauliTerm:
    """gate · X_q · gate†."""
    k = gate.kind
    if k == "H":
        return PauliTerm(1, (), (q,)) if q == gate.qubits[0] else PauliTerm(1, (q,))
    i, j = gate.qubits
    if k == "CZ":
        if q == i:
            return PauliTerm(1, (i,), (j,))
        if q == j:
            return PauliTerm(1, (j,), (i,))
        return PauliTerm(1, (q,))
    # CX with control i, target j
    if q == i:
        return PauliTerm(1, (i, j))
    return PauliTerm(1, (q,))


def _conj_z(gate: CliffordGate, q: int) -> PauliTerm:
    """gate · Z_q · gate†."""
    k = gate.kind
    if k == "H":
        return PauliTerm(1, (q,)) if q == gate.qubits[0] else PauliTerm(1, (), (q,))
    if k == "CX" and q == gate.qubits[1]:
        return PauliTerm(1, (), gate.qubits)
    return PauliTerm(1, (), (q,))


def conjugate(gate: CliffordGate, term: PauliTerm) -> PauliTerm:
    """Return ``gate · term · gate†`` as a single Pauli term."""
    # term = coeff · ∏_q Z_q^z ∏_q X_q^x ; conjugation is a homomorphism
    factors = [_conj_z(gate, q) for q in sorted(term.zs)]
    factors += [_conj_x(gate, q) for q in sorted(term.xs)]
    return product(factors) * term.coeff


def conjugate_all(gates: Iterable[CliffordGate], term: PauliTerm) -> PauliTerm:
    """Conjugate by the circuit that applies ``gates`` in order (first gate first)."""
    for g in gates:
        term = conjugate(g, term)
    return term


# --- generators ------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """One qubit housed as the operator ``a·I + b·K`` with ``K = X_q ⊗_{j∈N} Z_j``."""

    a: complex
    b: complex
    qubit: int
    neighborhood: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "neighborhood", frozenset(self.neighborhood))
        if self.qubit in self.neighborhood:
            raise ValueError(f"qubit {self.qubit} cannot neighbor itself")

    @property
    def stabilizer(self) -> PauliTerm:
        return PauliTerm(1, (self.qubit,), self.neighborhood)

    def terms(self) -> tuple[PauliTerm, PauliTerm]:
        return PauliTerm.identity(self.a), self.stabilizer * self.b

    def matrix(self, qubits: Sequence[int]) -> np.ndarray:
        idle, inter = self.terms()
        return idle.matrix(qubits) + inter.matrix(qubits)

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return bool(abs(abs(self.a) ** 2 + abs(self.b) ** 2 - 1) <= tol)

    def gram_cross(self) -> complex:
        """``a*b + b*a``: G†G = |a|²+|b|² + (a*b + b*a)·K."""
        return complex(np.conj(self.a) * self.b + np.conj(self.b) * self.a)

    def is_unitary(self, tol: float = TOL) -> bool:
        return self.is_normalized(tol) and bool(abs(self.gram_cross()) <= tol)

    def without(self, qubits: Iterable[int]) -> "Generator":
        return Generator(self.a, self.b, self.qubit, self.neighborhood - set(qubits))


def entangle(g: Generator, other: int) -> Generator:
    """Apply CZ(g.qubit, other) to the stabilizer; a second call undoes the first."""
    if other == g.qubit:
        raise ValueError("cannot entangle a qubit with itself")
    return Generator(g.a, g.b, g.qubit, g.neighborhood ^ {other})
