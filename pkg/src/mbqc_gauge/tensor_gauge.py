"""Unitary supplements, transfer tensors and gauge transformations.

Every tensor has shape ``(4,) * n``; axis k belongs to qubit k+1.

* canonical basis (unitary supplement): index ``2*row + col`` of the matrix
  unit e_{row,col}, so 0<->e00, 1<->e01, 2<->e10, 3<->e11;
* Pauli basis (transfer tensor): 0<->I, 1<->X, 2<->Z, 3<->ZX with ZX = Z.X.

The per-index change of basis is ``T = M eta``.  The single-qubit "matrix
format" ``(T00, T01; T10, T11)`` is the flat Pauli order read row by row, so
the high bit of an index is its capital part and the low bit its lower part.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

# canonical -> Pauli.  M is exactly representable in binary floating point.
M = 0.5 * np.array([[1, 0, 0, 1], [0, 1, 1, 0], [1, 0, 0, -1], [0, 1, -1, 0]], dtype=float)
M_INV = np.array([[1, 0, 1, 0], [0, 1, 0, 1], [0, 1, 0, -1], [1, 0, -1, 0]], dtype=float)

S_F = 0.5 * np.array([[1, 1, 1, -1], [1, 1, 1, -1], [1, -1, 1, 1], [1, -1, 1, 1]], dtype=float)

SYMMETRY_TOL = 1e-10
GAUGE_TOL = 1e-12
MAX_QUBITS = 8


class GaugeError(ValueError):
    pass


def _check_shape(entries: np.ndarray) -> int:
    n = entries.ndim
    if entries.shape != (4,) * n:
        raise ValueError(f"tensor must have shape (4,)*n, got {entries.shape}")
    if n > MAX_QUBITS:
        raise ValueError(f"dense 4^n storage limited to n <= {MAX_QUBITS}, got {n}")
    return n


@dataclass(frozen=True)
class UnitarySupplement:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        _check_shape(arr)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.ndim

    def matrix(self) -> np.ndarray:
        n = self.n
        t = self.entries.reshape((2, 2) * n)
        t = t.transpose([2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])
        return t.reshape(2**n, 2**n)

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "UnitarySupplement":
        mat = np.asarray(mat, dtype=complex)
        n = int(round(np.log2(mat.shape[0])))
        if mat.shape != (2**n, 2**n):
            raise ValueError(f"expected a square 2^n matrix, got {mat.shape}")
        t = mat.reshape((2,) * (2 * n))
        order = [ax for k in range(n) for ax in (k, n + k)]
        return cls(t.transpose(order).reshape((4,) * n))


@dataclass(frozen=True)
class TransferTensor:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries)
        if arr.dtype != object:
            arr = arr.astype(complex)
        _check_shape(arr)
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.ndim

    def matrix_format(self) -> np.ndarray:
        """Rows indexed by capital bits, columns by lower bits (both qubit-1 major)."""
        n = self.n
        t = self.entries.reshape((2, 2) * n)
        t = t.transpose([2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])
        return t.reshape(2**n, 2**n)

    def isclose(self, other: "TransferTensor", tol: float = GAUGE_TOL) -> bool:
        return bool(np.max(np.abs(self.entries - other.entries), initial=0.0) <= tol)


def _apply_per_index(mat: np.ndarray, entries: np.ndarray) -> np.ndarray:
    out = entries
    for k in range(entries.ndim):
        out = np.moveaxis(np.tensordot(mat, out, axes=(1, k)), 0, k)
    return out


def m_forward(eta: UnitarySupplement) -> TransferTensor:
    return TransferTensor(_apply_per_index(M, eta.entries))


def m_backward(t: TransferTensor) -> UnitarySupplement:
    return UnitarySupplement(_apply_per_index(M_INV, t.entries))


def transfer_tensor(mat: np.ndarray) -> TransferTensor:
    """Transfer tensor of a dense operator, e.g. ``U @ prod G``."""
    return m_forward(UnitarySupplement.from_matrix(mat))


def vector_supplement(eta: UnitarySupplement) -> np.ndarray:
    """``eta |0...0>``: the first column of the reconstructed matrix."""
    return eta.matrix()[:, 0].copy()


# --- index group -------------------------------------------------------------


def circ(i: int, j: int) -> int:
    """Capital part of i, lower part of j."""
    if not (0 <= i < 4 and 0 <= j < 4):
        raise ValueError(f"indices must lie in 0..3, got ({i}, {j})")
    return 2 * (i >> 1) + (j & 1)


def circ_table() -> np.ndarray:
    return np.array([[circ(i, j) for j in range(4)] for i in range(4)], dtype=int)


def check_symmetry(t: TransferTensor, tol: float = SYMMETRY_TOL) -> bool:
    """Per position, the two slices selected by the lower bit are proportional."""
    ent = t.entries.astype(complex)
    n = t.n
    for k in range(n):
        moved = np.moveaxis(ent, k, 0).reshape(2, 2, -1)
        # rows: lower bit; columns: capital bit of k together with every other index
        mat = moved.transpose(1, 0, 2).reshape(2, -1)
        scale = np.max(np.abs(mat), initial=0.0)
        if scale == 0:
            continue
        sv = np.linalg.svd(mat, compute_uv=False)
        if len(sv) > 1 and sv[1] > tol * sv[0]:
            return False
    return True


def check_symmetry_pairwise(t: TransferTensor, tol: float = SYMMETRY_TOL) -> bool:
    """Brute force over all index pairs and position subsets; small n only."""
    ent = t.entries.astype(complex)
    n = t.n
    scale = max(np.max(np.abs(ent), initial=0.0), 1.0) ** 2
    idx = list(itertools.product(range(4), repeat=n))
    for subset in itertools.product((False, True), repeat=n):
        for a in idx:
            for b in idx:
                a2 = tuple(circ(x, y) if s else x for x, y, s in zip(a, b, subset))
                b2 = tuple(circ(y, x) if s else y for x, y, s in zip(a, b, subset))
                if abs(ent[a] * ent[b] - ent[a2] * ent[b2]) > tol * scale:
                    return False
    return True


def factorize(t: TransferTensor, tol: float = SYMMETRY_TOL):
    """Recover ``T = C[capitals] * prod_k c_k[lower_k]`` for a symmetric tensor.

    Returns ``(C, [c_1, ..., c_n])`` with C of shape ``(2,)*n`` and each c_k a
    2-vector, or raises GaugeError when no such factorization exists.
    """
    if not check_symmetry(t, tol):
        raise GaugeError("tensor does not satisfy the index-group symmetry")
    n = t.n
    # axes (cap_1, low_1, ..., cap_n, low_n) -> (cap..., low...)
    rest = t.entries.astype(complex).reshape((2, 2) * n)
    rest = rest.transpose([2 * k for k in range(n)] + [2 * k + 1 for k in range(n)])
    lows = []
    for _ in range(n):
        ax = n  # earlier lower axes are already divided out
        mat = np.moveaxis(rest, ax, 0).reshape(2, -1)
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        if s[0] == 0:
            lows.append(np.array([1.0, 0.0], dtype=complex))
            rest = np.zeros(rest.shape[:ax] + rest.shape[ax + 1 :], dtype=complex)
            continue
        vec = u[:, 0]
        lows.append(vec)
        rest = (s[0] * vh[0]).reshape(np.moveaxis(rest, ax, 0).shape[1:])
    return rest, lows


def reconstruct(caps: np.ndarray, lows: Sequence[np.ndarray]) -> TransferTensor:
    n = len(lows)
    full = caps
    for vec in lows:
        full = np.multiply.outer(full, vec)
    order = [ax for k in range(n) for ax in (k, n + k)]
    return TransferTensor(full.transpose(order).reshape((4,) * n))


# --- gauges ----------------------------------------------------------------


@dataclass(frozen=True)
class GaugeTensor:
    """Linear map on transfer tensors: per-qubit 4x4 factors or one dense 4^n matrix."""

    factors: tuple | None = None
    dense: np.ndarray | None = None

    def __post_init__(self):
        if (self.factors is None) == (self.dense is None):
            raise ValueError("give exactly one of factors / dense")
        if self.factors is not None:
            object.__setattr__(self, "factors", tuple(np.asarray(f) for f in self.factors))

    @classmethod
    def identity(cls, n: int) -> "GaugeTensor":
        return cls(factors=tuple(np.eye(4) for _ in range(n)))

    def apply_raw(self, t: TransferTensor) -> TransferTensor:
        ent = t.entries
        if self.factors is not None:
            if len(self.factors) != t.n:
                raise ValueError(f"gauge acts on {len(self.factors)} qubits, tensor has {t.n}")
            out = ent
            for k, f in enumerate(self.factors):
                out = np.moveaxis(np.tensordot(f, out, axes=(1, k)), 0, k)
            return TransferTensor(out)
        flat = self.dense @ ent.reshape(-1)
        return TransferTensor(flat.reshape(ent.shape))


def fully_symmetric_gauge(n: int) -> GaugeTensor:
    return GaugeTensor(factors=tuple(S_F for _ in range(n)))


def apply_gauge(s: GaugeTensor, t: TransferTensor, tol: float = GAUGE_TOL) -> TransferTensor:
    """``T' = S T``; rejects gauges that move the vector supplement."""
    out = s.apply_raw(t)
    before = vector_supplement(m_backward(t))
    after = vector_supplement(m_backward(out))
    dev = float(np.max(np.abs(before - after), initial=0.0))
    if dev > tol:
        raise GaugeError(f"gauge changes the vector supplement (max deviation {dev:.3e})")
    return out


def apply_fully_symmetric(t: TransferTensor) -> TransferTensor:
    return apply_gauge(fully_symmetric_gauge(t.n), t)


def gauge_shift(t: TransferTensor, k: int, gamma, gamma_p) -> TransferTensor:
    """Add ``gamma (1,0,-1,0) + gamma' (0,1,0,1)`` along position k.

    ``gamma`` and ``gamma_p`` are scalars or tensors over the remaining axes;
    the vector supplement is unchanged by construction.
    """
    ent = np.moveaxis(t.entries.astype(complex).copy(), k, 0)
    ent[0] += gamma
    ent[2] -= gamma
    ent[1] += gamma_p
    ent[3] += gamma_p
    return TransferTensor(np.moveaxis(ent, 0, k))


def symmetrizing_shifts(t: TransferTensor) -> tuple[complex, complex]:
    """(gamma, gamma') that make a single-qubit tensor's columns equal."""
    if t.n != 1:
        raise ValueError("defined for single-qubit tensors")
    t0, t1, t2, t3 = t.entries
    return 0.5 * (t1 + t2 - t0 - t3), 0.5 * (t0 + t2 - t1 - t3)


# --- serialization -------------------------------------------------------------


def tensor_to_json(t: TransferTensor | UnitarySupplement) -> dict:
    basis = "pauli" if isinstance(t, TransferTensor) else "canonical"
    flat = np.asarray(t.entries, dtype=complex).reshape(-1)
    return {"n": t.n, "basis": basis, "entries": [[float(z.real), float(z.imag)] for z in flat]}


def tensor_from_json(obj: dict) -> TransferTensor | UnitarySupplement:
    n = int(obj["n"])
    flat = np.array([complex(re, im) for re, im in obj["entries"]], dtype=complex)
    if flat.size != 4**n:
        raise ValueError(f"expected {4**n} entries for n={n}, got {flat.size}")
    ent = flat.reshape((4,) * n)
    if obj.get("basis", "pauli") == "pauli":
        return TransferTensor(ent)
    if obj["basis"] == "canonical":
        return UnitarySupplement(ent)
    raise ValueError(f"unknown basis {obj['basis']!r}")
