import numpy as np
import pytest
from hypothesis import strategies as st

from mbqc_gauge.graph_state import GraphStatePattern, MeasurementSpec, Plane, Vertex, VertexRole
from mbqc_gauge.pauli import PauliTerm


def random_pair(rng) -> tuple[complex, complex]:
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return complex(v[0]), complex(v[1])


def two_source_pattern(s: int, coeffs=None) -> GraphStatePattern:
    """Five vertices, 4 and 5 measured; 4-5 edge present iff s=1."""
    coeffs = coeffs or {}
    verts = []
    for i in (1, 2, 3, 4, 5):
        a, b = coeffs.get(i, (2**-0.5, 2**-0.5))
        role = VertexRole.SOURCE if i in (4, 5) else VertexRole.OUTPUT
        spec = MeasurementSpec(Plane.XY, 0.0) if i in (4, 5) else None
        verts.append(Vertex(i, role, a, b, spec))
    edges = {(1, 4), (1, 5), (2, 4), (3, 5)}
    if s:
        edges.add((4, 5))
    return GraphStatePattern(tuple(verts), frozenset(edges))


def random_pattern(rng, n: int, n_measured: int, p_edge: float = 0.5) -> GraphStatePattern:
    verts = []
    for i in range(1, n + 1):
        a, b = random_pair(rng)
        measured = i <= n_measured
        role = VertexRole.SOURCE if measured else VertexRole.OUTPUT
        spec = MeasurementSpec(Plane.XY, float(rng.uniform(-np.pi, np.pi))) if measured else None
        verts.append(Vertex(i, role, a, b, spec))
    edges = {(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1) if rng.random() < p_edge}
    return GraphStatePattern(tuple(verts), frozenset(edges))


@st.composite
def pauli_terms(draw, n: int = 4):
    xs = draw(st.sets(st.integers(1, n)))
    zs = draw(st.sets(st.integers(1, n)))
    phase = draw(st.sampled_from([1, -1, 1j, -1j]))
    return PauliTerm(phase, xs, zs)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
