"""Pauli correlation tensor, 3x9 folding and singular-value bounds.

The correlation tensor of a three-qubit state holds the 27 expectations
``t[i, j, k] = Tr[rho (sigma_i (x) sigma_j (x) sigma_k)]``. Folding flattens
it to a 3x9 matrix whose row is the middle-party index j and whose column is
3*i + k (i outer, k inner, all zero-based), so a product vector a (x) c has
component a_i * c_k at column 3*i + k.

The Mermin expectation of any state is bounded by 2*sqrt(2) times the top
singular value of the folded matrix. The bound is attained when the top
singular value is (at least) doubly degenerate with product-form singular
vectors; degeneracy is decided here, attainment is certified by the
:mod:`tribell.oracle` module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import qalg

# Relative gap below which the top two singular values count as a degenerate pair.
PAIR_DEGENERACY_TOL = 1e-7

_ENTRY_BOUND = 1.0 + 1e-9


def pauli_product_tensor(rho, ops_a, ops_b, ops_c) -> np.ndarray:
    """Real 3x3x3 tensor of expectations Tr[rho (A_i (x) B_j (x) C_k)].

    ``ops_a``, ``ops_b``, ``ops_c`` are (3, 2, 2) stacks of Hermitian
    single-qubit operators. Imaginary residues beyond IMAG_TOL raise.
    """
    rho6 = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2, 2, 2)
    t = np.einsum(
        "abcdef,ida,jeb,kfc->ijk",
        rho6,
        np.asarray(ops_a, dtype=complex),
        np.asarray(ops_b, dtype=complex),
        np.asarray(ops_c, dtype=complex),
    )
    residue = float(np.max(np.abs(t.imag)))
    if residue > qalg.IMAG_TOL:
        raise ValueError(f"correlation tensor has imaginary residue {residue:.3e}")
    return np.ascontiguousarray(t.real)


def correlation_tensor(rho) -> np.ndarray:
    """Pauli correlation tensor t[i, j, k] of an 8x8 density matrix."""
    t = pauli_product_tensor(rho, qalg.PAULI, qalg.PAULI, qalg.PAULI)
    top = float(np.max(np.abs(t)))
    if top > _ENTRY_BOUND:
        raise ValueError(f"correlation entry out of range: |t| = {top}")
    return t


def fold(t: np.ndarray) -> np.ndarray:
    """Fold a 3x3x3 tensor to the 3x9 matrix with rows indexed by j."""
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3, 3):
        raise ValueError(f"expected a 3x3x3 tensor, got {t.shape}")
    return np.ascontiguousarray(t.transpose(1, 0, 2).reshape(3, 9))


def unfold(m: np.ndarray) -> np.ndarray:
    """Inverse of :func:`fold`."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 9):
        raise ValueError(f"expected a 3x9 matrix, got {m.shape}")
    return np.ascontiguousarray(m.reshape(3, 3, 3).transpose(1, 0, 2))


@dataclass(frozen=True, eq=False)
class SingularTriple:
    """Singular values of a folded correlation matrix, descending.

    ``gram`` holds the squared singular values (eigenvalues of m m^T), which
    downstream code uses to form bounds with a single square root.
    ``vector_top`` and ``vector_second`` are unit right singular vectors for
    the top two singular values (zero vectors where the value vanishes).
    """

    values: tuple[float, float, float]
    gram: tuple[float, float, float]
    vector_top: np.ndarray
    vector_second: np.ndarray


def singular_triple(m: np.ndarray) -> SingularTriple:
    """Singular values of a 3x9 matrix via the 3x3 Gram matrix m m^T."""
    m = np.asarray(m, dtype=float)
    if m.shape != (3, 9):
        raise ValueError(f"expected a 3x9 matrix, got {m.shape}")
    gram = m @ m.T
    w, u = np.linalg.eigh(gram)
    order = [2, 1, 0]
    g = tuple(max(float(w[k]), 0.0) for k in order)
    values = tuple(math.sqrt(x) for x in g)

    def right_vector(col: int, value: float) -> np.ndarray:
        if value <= 1e-12:
            return np.zeros(9)
        vec = m.T @ u[:, col]
        return vec / np.linalg.norm(vec)

    return SingularTriple(
        values=values,
        gram=g,
        vector_top=right_vector(2, values[0]),
        vector_second=right_vector(1, values[1]),
    )


@dataclass(frozen=True)
class PairBound:
    """Degenerate-pair reading of a singular spectrum.

    ``value`` is 2*sqrt(2) times the second singular value, the level of a
    would-be degenerate pair. ``pair_is_max`` reports whether the top two
    values actually coincide (within PAIR_DEGENERACY_TOL, relative) and
    dominate the third, which is the precondition for the bound to be
    attainable. ``gap`` is the raw distance between the top two values.
    """

    value: float
    pair_is_max: bool
    gap: float


def pair_from_triple(triple: SingularTriple) -> PairBound:
    v1, v2, v3 = triple.values
    gap = v1 - v2
    degenerate = gap <= PAIR_DEGENERACY_TOL * max(1.0, v1)
    pair_is_max = degenerate and v2 >= v3 - PAIR_DEGENERACY_TOL
    return PairBound(value=math.sqrt(8.0 * triple.gram[1]), pair_is_max=pair_is_max, gap=gap)


def mermin_bound(rho) -> float:
    """Upper bound 2*sqrt(2)*lambda_max on |<Mermin>| for the given state."""
    triple = singular_triple(fold(correlation_tensor(rho)))
    return math.sqrt(8.0 * triple.gram[0])


def pair_bound(rho) -> PairBound:
    """Degenerate-pair bound of a state; see :class:`PairBound`."""
    triple = singular_triple(fold(correlation_tensor(rho)))
    return pair_from_triple(triple)
