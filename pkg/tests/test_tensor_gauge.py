import itertools

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from mbqc_gauge.pauli import Generator
from mbqc_gauge.tensor_gauge import (
    M,
    M_INV,
    S_F,
    GaugeError,
    GaugeTensor,
    TransferTensor,
    UnitarySupplement,
    apply_fully_symmetric,
    apply_gauge,
    check_symmetry,
    check_symmetry_pairwise,
    circ,
    circ_table,
    factorize,
    gauge_shift,
    m_backward,
    m_forward,
    reconstruct,
    symmetrizing_shifts,
    tensor_from_json,
    tensor_to_json,
    transfer_tensor,
    vector_supplement,
)

# Index-group table as printed, rows i, columns j
PRINTED_TABLE = [[0, 1, 0, 1], [0, 1, 0, 1], [2, 3, 2, 3], [2, 3, 2, 3]]

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)


def random_tensor(rng, n):
    return TransferTensor(rng.normal(size=(4,) * n) + 1j * rng.normal(size=(4,) * n))


def test_m_times_inverse_exact():
    assert np.array_equal(M @ M_INV, np.eye(4))
    assert np.array_equal(M_INV @ M, np.eye(4))


def test_single_qubit_supplement_to_transfer():
    A, B, a, b = 0.3 + 0.1j, -0.7j, 0.6, 0.8j
    op = (A * np.eye(2) + B * Z) @ (a * np.eye(2) + b * X)
    eta = UnitarySupplement.from_matrix(op)
    expected_eta = [[A * a + B * a, A * b + B * b], [A * b - B * b, A * a - B * a]]
    np.testing.assert_allclose(eta.matrix(), expected_eta)
    np.testing.assert_allclose(m_forward(eta).entries, [A * a, A * b, B * a, B * b], atol=1e-15)
    np.testing.assert_allclose(vector_supplement(eta), [A * a + B * a, A * b - B * b])


def test_identity_circuit_on_generator():
    g = Generator(0.6, 0.8j, 1)
    t = transfer_tensor(g.matrix([1]))
    np.testing.assert_allclose(t.entries, [0.6, 0.8j, 0, 0])


def test_vector_supplement_examples():
    eta = UnitarySupplement.from_matrix(np.eye(2))
    np.testing.assert_allclose(vector_supplement(eta), [1, 0])
    th = 0.9
    rx = np.cos(th / 2) * np.eye(2) + 1j * np.sin(th / 2) * X
    np.testing.assert_allclose(vector_supplement(UnitarySupplement.from_matrix(rx)), [np.cos(th / 2), 1j * np.sin(th / 2)])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_round_trip(n, rng):
    eta = UnitarySupplement(rng.normal(size=(4,) * n) + 1j * rng.normal(size=(4,) * n))
    np.testing.assert_allclose(m_backward(m_forward(eta)).entries, eta.entries, atol=1e-14)
    mat = eta.matrix()
    np.testing.assert_allclose(UnitarySupplement.from_matrix(mat).entries, eta.entries)


def test_transfer_tensor_is_pauli_expansion(rng):
    """T_i = Tr(P_i^dagger U) / 2^n for the Pauli basis I, X, Z, ZX."""
    basis = [np.eye(2), X, Z, Z @ X]
    u = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    t = transfer_tensor(u)
    for i, j in itertools.product(range(4), repeat=2):
        p = np.kron(basis[i], basis[j])
        assert abs(t.entries[i, j] - np.trace(p.conj().T @ u) / 4) < 1e-12


def test_circ_table_matches_printed():
    assert circ_table().tolist() == PRINTED_TABLE
    assert (circ(0, 3), circ(1, 2), circ(2, 1), circ(3, 0)) == (1, 0, 3, 2)
    assert all(circ(i, i) == i for i in range(4))
    with pytest.raises(ValueError):
        circ(4, 0)


def test_check_symmetry_examples():
    A, B, a, b = 0.3, 0.5j, 0.6, 0.8
    assert check_symmetry(TransferTensor(np.array([A * a, A * b, B * a, B * b])))
    assert not check_symmetry(TransferTensor(np.array([1, 0, 0, 1])))
    assert check_symmetry(TransferTensor(np.zeros((4, 4))))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 2), st.booleans())
def test_check_symmetry_matches_pairwise(seed, n, symmetric):
    rng = np.random.default_rng(seed)
    t = random_tensor(rng, n)
    if symmetric:
        t = apply_fully_symmetric(t)
    assert check_symmetry(t) == check_symmetry_pairwise(t)
    assert check_symmetry(t) or not symmetric


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_fully_symmetric_properties(seed, n):
    rng = np.random.default_rng(seed)
    t = random_tensor(rng, n)
    out = apply_fully_symmetric(t)
    assert check_symmetry(out)
    np.testing.assert_allclose(vector_supplement(m_backward(out)), vector_supplement(m_backward(t)), atol=1e-12)
    # all matrix-format columns equal
    mf = out.matrix_format()
    np.testing.assert_allclose(mf, np.repeat(mf[:, :1], mf.shape[1], axis=1), atol=1e-12)
    # applying it again changes nothing
    np.testing.assert_allclose(apply_fully_symmetric(out).entries, out.entries, atol=1e-12)


def test_fully_symmetric_single_qubit_formula():
    t00, t01, t10, t11 = sp.symbols("T00 T01 T10 T11")
    out = S_F.astype(object) @ np.array([t00, t01, t10, t11], dtype=object)
    top = sp.Rational(1, 2) * (t00 + t01 + t10 - t11)
    bottom = sp.Rational(1, 2) * (t00 - t01 + t10 + t11)
    assert [sp.simplify(e - f) for e, f in zip(out, [top, top, bottom, bottom])] == [0] * 4


def test_fully_symmetric_leaves_symmetric_columns():
    t = TransferTensor(np.array([0.4, 0.4, -0.2j, -0.2j]))
    assert symmetrizing_shifts(t) == (0, 0)
    np.testing.assert_allclose(apply_fully_symmetric(t).entries, t.entries)


def test_fully_symmetric_rx_identity_input():
    th = 1.1
    c, s = np.cos(th / 2), np.sin(th / 2)
    out = apply_fully_symmetric(TransferTensor(np.array([c, 1j * s, 0, 0])))
    np.testing.assert_allclose(out.entries[:2], [0.5 * np.exp(1j * th / 2)] * 2)
    np.testing.assert_allclose(out.entries[2:], [0.5 * np.exp(-1j * th / 2)] * 2)


def test_fully_symmetric_rx_symbolic():
    C, S, a, b = sp.symbols("C S a b")
    t = np.array([C * a + sp.I * S * b, C * b + sp.I * S * a, 0, 0], dtype=object)
    out = (S_F.astype(object) @ t).tolist()
    top = sp.Rational(1, 2) * (C * a + sp.I * S * b + C * b + sp.I * S * a)
    bottom = sp.Rational(1, 2) * (C * a + sp.I * S * b - C * b - sp.I * S * a)
    assert [sp.simplify(x - y) for x, y in zip(out, [top, top, bottom, bottom])] == [0] * 4


def test_gauge_shift_preserves_supplement(rng):
    for n in (1, 2, 3):
        t = random_tensor(rng, n)
        for k in range(n):
            shape = (4,) * (n - 1)
            g1 = rng.normal(size=shape) + 1j * rng.normal(size=shape)
            g2 = rng.normal(size=shape) + 1j * rng.normal(size=shape)
            moved = gauge_shift(t, k, g1, g2)
            np.testing.assert_allclose(
                vector_supplement(m_backward(moved)), vector_supplement(m_backward(t)), atol=1e-12
            )


def test_apply_gauge_identity_and_rejection(rng):
    t = random_tensor(rng, 2)
    np.testing.assert_array_equal(apply_gauge(GaugeTensor.identity(2), t).entries, t.entries)
    with pytest.raises(GaugeError, match="max deviation"):
        apply_gauge(GaugeTensor(factors=(2 * np.eye(4), np.eye(4))), t)
    dense = GaugeTensor(dense=np.kron(S_F, S_F))
    np.testing.assert_allclose(apply_gauge(dense, t).entries, apply_fully_symmetric(t).entries, atol=1e-12)


def test_singular_gauge():
    assert abs(np.linalg.det(S_F)) < 1e-15


@pytest.mark.parametrize("n", [1, 2, 3])
def test_factorization_recovery(n, rng):
    t = apply_fully_symmetric(random_tensor(rng, n))
    caps, lows = factorize(t)
    np.testing.assert_allclose(reconstruct(caps, lows).entries, t.entries, atol=1e-12)
    with pytest.raises(GaugeError):
        factorize(TransferTensor(np.array([1, 0, 0, 1])))


def test_forward_symmetrize_backward(rng):
    """eta -> T -> T' -> eta' keeps the first column; T' satisfies the symmetry."""
    for n in (1, 2, 3):
        eta = UnitarySupplement(rng.normal(size=(4,) * n) + 1j * rng.normal(size=(4,) * n))
        tp = apply_fully_symmetric(m_forward(eta))
        eta2 = m_backward(tp)
        np.testing.assert_allclose(eta2.matrix()[:, 0], eta.matrix()[:, 0], atol=1e-12)
        assert check_symmetry(tp)


def test_json_round_trip(rng):
    t = random_tensor(rng, 2)
    back = tensor_from_json(tensor_to_json(t))
    assert isinstance(back, TransferTensor)
    np.testing.assert_array_equal(back.entries, t.entries)
    eta = m_backward(t)
    assert isinstance(tensor_from_json(tensor_to_json(eta)), UnitarySupplement)
    with pytest.raises(ValueError):
        tensor_from_json({"n": 2, "basis": "pauli", "entries": [[0, 0]] * 3})
