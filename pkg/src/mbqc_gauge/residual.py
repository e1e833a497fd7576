"""Residual operator left on the unmeasured qubits after measuring sources.

Three independent routes compute the same object:

* ``measure_one`` folds the exact recursion
  ``R <- alpha* a R' + beta* b <0|X R K|0>`` one measurement at a time;
* ``residual_by_rules`` enumerates interactive subsets directly: each term
  picks A_i = alpha_i* a_i or B_i = beta_i* b_i per measured qubit, carries Z on
  the symmetric difference of the interactive neighborhoods (minus measured
  qubits) and a sign (-1)^(edges inside the interactive subset);
* ``residual_dense`` contracts dense matrices and reads off Z-string
  coefficients by trace.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .graph_state import GraphStatePattern, build_state, neighborhoods
from .pauli import Generator, PauliTerm

TOL = 1e-12


class ResidualError(ValueError):
    pass


def _conj(x):
    return x.conjugate()


@dataclass(frozen=True)
class MeasGenerator:
    """Measurement bra ``<0|[alpha* + beta* X_q]``."""

    alpha: Any
    beta: Any
    qubit: int

    @classmethod
    def from_spec(cls, spec, qubit: int) -> "MeasGenerator":
        a, b = spec.alpha_beta()
        return cls(a, b, qubit)


@dataclass(frozen=True)
class Residual:
    """Linear combination of Z-strings, keyed by the set of qubits carrying Z."""

    terms: Mapping[frozenset, Any] = field(default_factory=lambda: {frozenset(): 1})

    def __post_init__(self):
        object.__setattr__(self, "terms", {frozenset(k): v for k, v in dict(self.terms).items()})

    def coeff(self, zs: Iterable[int]) -> Any:
        return self.terms.get(frozenset(zs), 0)

    @property
    def support(self) -> frozenset:
        return frozenset().union(*self.terms) if self.terms else frozenset()

    def pruned(self, tol: float = 0.0) -> "Residual":
        return Residual({k: v for k, v in self.terms.items() if abs(v) > tol})

    def isclose(self, other: "Residual", tol: float = TOL) -> bool:
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= tol for k in keys)

    def max_deviation(self, other: "Residual") -> float:
        keys = set(self.terms) | set(other.terms)
        return max((abs(self.coeff(k) - other.coeff(k)) for k in keys), default=0.0)

    def as_terms(self) -> list[PauliTerm]:
        return [PauliTerm(c, (), zs) for zs, c in sorted(self.terms.items(), key=_term_key)]

    def matrix(self, qubits: Sequence[int]) -> np.ndarray:
        dim = 2 ** len(qubits)
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.as_terms():
            out += t.matrix(qubits)
        return out

    def to_json(self) -> list[dict]:
        return [
            {"zs": sorted(zs), "coeff": [float(complex(c).real), float(complex(c).imag)]}
            for zs, c in sorted(self.terms.items(), key=_term_key)
        ]

    @classmethod
    def from_json(cls, items: Iterable[Mapping]) -> "Residual":
        return cls({frozenset(d["zs"]): complex(*d["coeff"]) for d in items})


def _term_key(item):
    zs = item[0]
    return (len(zs), sorted(zs))


# --- recursion -------------------------------------------------------------


def measure_one(
    state: Sequence[Generator], residual: Residual, m: MeasGenerator
) -> tuple[list[Generator], Residual]:
    """Measure ``m.qubit``: drop its generator, sever its Z from the others, update R."""
    l = m.qubit
    found = [g for g in state if g.qubit == l]
    if not found:
        raise ResidualError(f"qubit {l} is not among the unmeasured generators")
    g = found[0]
    nl = g.neighborhood - {l}
    idle = _conj(m.alpha) * g.a
    inter = _conj(m.beta) * g.b
    terms: dict[frozenset, Any] = {}
    for zs, c in residual.terms.items():
        rest = zs - {l}
        terms[rest] = terms.get(rest, 0) + idle * c
        # <0|X Z_l X|0> = -1
        sign = -1 if l in zs else 1
        key = rest ^ nl
        terms[key] = terms.get(key, 0) + sign * inter * c
    remaining = [h.without((l,)) for h in state if h.qubit != l]
    return remaining, Residual(terms)


def residual_by_recursion(
    state: Sequence[Generator], measgens: Sequence[MeasGenerator]
) -> tuple[list[Generator], Residual]:
    gens, res = list(state), Residual()
    for m in measgens:
        gens, res = measure_one(gens, res, m)
    return gens, res


# --- graphical rules ---------------------------------------------------------


@dataclass(frozen=True)
class RuleTerm:
    interactive: frozenset
    sign: int
    zs: frozenset
    coeff: Any


def rule_terms(
    nbrs: Mapping[int, frozenset], measured: Sequence[int], factors: Mapping[int, tuple[Any, Any]]
) -> Iterator[RuleTerm]:
    """One term per interactive subset of ``measured``; ``factors[i] = (A_i, B_i)``."""
    mset = frozenset(measured)
    for r in range(len(measured) + 1):
        for subset in itertools.combinations(measured, r):
            inter = frozenset(subset)
            edges_inside = sum(1 for i, j in itertools.combinations(subset, 2) if j in nbrs[i])
            sign = -1 if edges_inside % 2 else 1
            zs = frozenset()
            for i in subset:
                zs = zs ^ nbrs[i]
            coeff = sign
            for i in measured:
                coeff = coeff * factors[i][1 if i in inter else 0]
            yield RuleTerm(inter, sign, zs - mset, coeff)


def _factors(pattern: GraphStatePattern, measgens: Sequence[MeasGenerator]) -> dict[int, tuple]:
    out = {}
    for m in measgens:
        v = pattern.vertex(m.qubit)
        out[m.qubit] = (_conj(m.alpha) * v.a, _conj(m.beta) * v.b)
    return out


def residual_by_rules(
    pattern: GraphStatePattern,
    measured: Sequence[int],
    measgens: Sequence[MeasGenerator],
    factors: Mapping[int, tuple[Any, Any]] | None = None,
) -> Residual:
    """Residual from the Coefficient/Sign theorems and the Operator corollary.

    ``factors`` overrides the (A_i, B_i) pairs, e.g. with sympy symbols.
    """
    by_qubit = {m.qubit: m for m in measgens}
    if factors is None:
        missing = [q for q in measured if q not in by_qubit]
        if missing:
            raise ResidualError(f"no measurement generator for qubits {missing}")
        factors = _factors(pattern, [by_qubit[q] for q in measured])
    nbrs = neighborhoods(pattern)
    terms: dict[frozenset, Any] = {}
    for t in rule_terms(nbrs, list(measured), factors):
        terms[t.zs] = terms.get(t.zs, 0) + t.coeff
    return Residual(terms)


# --- dense oracle ------------------------------------------------------------


def residual_dense(pattern: GraphStatePattern, measgens: Sequence[MeasGenerator]) -> Residual:
    """Contract ``(<gamma_M| ⊗ I) prod_M G_m (|0_M> ⊗ I)`` with dense matrices."""
    qubits = pattern.ids
    n = len(qubits)
    if n > 12:
        raise ResidualError(f"dense oracle limited to 12 qubits, pattern has {n}")
    gens = {g.qubit: g for g in build_state(pattern)}
    measured = [m.qubit for m in measgens]
    op = np.eye(2**n, dtype=complex)
    for q in measured:
        op = op @ gens[q].matrix(qubits)
    pos = {q: k for k, q in enumerate(qubits)}
    t = op.reshape((2,) * (2 * n))
    # contract bra on row axes and |0> on column axes of measured qubits
    for m in measgens:
        row = np.array([np.conj(m.alpha), np.conj(m.beta)])
        k = pos[m.qubit]
        t = np.moveaxis(t, [k, n + k], [0, 1])
        t = np.tensordot(row, t[:, 0], axes=(0, 0))
        t = np.expand_dims(np.expand_dims(t, 0), 0)
        t = np.moveaxis(t, [0, 1], [k, n + k])
    keep = [q for q in qubits if q not in set(measured)]
    idx_rows = tuple(0 if q in set(measured) else slice(None) for q in qubits)
    u = len(keep)
    mat = t[idx_rows + idx_rows].reshape(2**u, 2**u)
    off = mat - np.diag(np.diag(mat))
    if np.max(np.abs(off), initial=0.0) > 1e-10:
        raise ResidualError("contracted residual is not diagonal (X terms survived)")
    diag = np.diag(mat)
    terms = {}
    for r in range(u + 1):
        for subset in itertools.combinations(range(u), r):
            zdiag = np.ones(2**u)
            for k in subset:
                bit = (np.arange(2**u) >> (u - 1 - k)) & 1
                zdiag = zdiag * (1 - 2 * bit)
            terms[frozenset(keep[k] for k in subset)] = complex(np.dot(zdiag, diag) / 2**u)
    return Residual(terms)


def crosscheck(
    pattern: GraphStatePattern, measgens: Sequence[MeasGenerator], tol: float = TOL
) -> bool:
    """Recursion and graphical rules agree termwise."""
    _, rec = residual_by_recursion(build_state(pattern), measgens)
    rules = residual_by_rules(pattern, [m.qubit for m in measgens], measgens)
    return rec.isclose(rules, tol)


def pattern_measgens(pattern: GraphStatePattern, order: Sequence[int] | None = None) -> list[MeasGenerator]:
    """s=0 measurement generators of every measured vertex, in measurement order."""
    order = pattern.measurement_order() if order is None else order
    return [MeasGenerator.from_spec(pattern.vertex(q).measure, q) for q in order]


def output_state(pattern: GraphStatePattern) -> np.ndarray:
    """Post-selected output vector ``R prod G'_out |0>`` built from the recursion.

    Amplitudes follow the listing order of the output vertices; output
    Cliffords declared as byproducts are applied last.  Not normalized.
    """
    gens, res = residual_by_recursion(build_state(pattern), pattern_measgens(pattern))
    outs = pattern.outputs
    dim = 2 ** len(outs)
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1
    for g in gens:
        vec = g.matrix(outs) @ vec
    vec = res.matrix(outs) @ vec
    for c in pattern.output_cliffords():
        vec = c.matrix(outs) @ vec
    return vec
