"""Dense complex matrix algebra for three-qubit states.

Everything works on plain numpy arrays in double precision. Qubit A is the
most significant tensor factor and qubit C the least significant, so the
basis state |abc> sits at index 4a + 2b + c of an 8-dimensional vector.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
BLOCH_NORM_TOL = 1e-9
IMAG_TOL = 1e-10

# sigma_x, sigma_y, sigma_z stacked as a (3, 2, 2) array.
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

IDENTITY2 = np.eye(2, dtype=complex)


class DensityMatrixError(ValueError):
    """A matrix failed one of the density-matrix checks."""


class NotHermitianError(DensityMatrixError):
    def __init__(self, deviation):
        self.deviation = float(deviation)
        super().__init__(
            f"matrix is not Hermitian: max |M - M^dag| = {self.deviation:.3e}"
        )


class NotUnitTraceError(DensityMatrixError):
    def __init__(self, trace):
        self.trace = complex(trace)
        super().__init__(f"matrix does not have unit trace: Tr = {self.trace}")


class NotPSDError(DensityMatrixError):
    def __init__(self, min_eigenvalue):
        self.min_eigenvalue = float(min_eigenvalue)
        super().__init__(
            "matrix is not positive semidefinite: "
            f"min eigenvalue = {self.min_eigenvalue:.3e}"
        )


def pauli(i: int) -> np.ndarray:
    """Return the Pauli matrix sigma_i for i in {1, 2, 3}."""
    if i not in (1, 2, 3):
        raise ValueError(f"Pauli index must be 1, 2 or 3, got {i}")
    return PAULI[i - 1].copy()


def bloch_observable(v) -> np.ndarray:
    """Spin observable v . sigma for a unit Bloch vector v.

    The result is Hermitian with eigenvalues +-1.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"Bloch vector must have three components, got {v.shape}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > BLOCH_NORM_TOL:
        raise ValueError(f"Bloch vector must be unit length, got |v| = {norm}")
    return np.einsum("i,ijk->jk", v, PAULI)


def kron3(a, b, c) -> np.ndarray:
    """Kronecker product A (x) B (x) C of three 2x2 matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    for name, m in (("a", a), ("b", b), ("c", c)):
        if m.shape != (2, 2):
            raise ValueError(f"kron3 factor {name} must be 2x2, got {m.shape}")
    return np.kron(np.kron(a, b), c)


def hermiticity_deviation(m) -> float:
    """Max-entry distance of a square matrix from its own adjoint."""
    m = np.asarray(m, dtype=complex)
    return float(np.max(np.abs(m - m.conj().T)))


def expectation(rho, obs) -> float:
    """Real expectation value Tr[obs rho] of a Hermitian observable.

    Raises if ``obs`` is not Hermitian or if the trace picks up an imaginary
    residue beyond IMAG_TOL (which would indicate a corrupted input).
    """
    rho = np.asarray(rho, dtype=complex)
    obs = np.asarray(obs, dtype=complex)
    dev = hermiticity_deviation(obs)
    if dev > HERMITIAN_TOL:
        raise ValueError(f"observable is not Hermitian (deviation {dev:.3e})")
    value = np.trace(obs @ rho)
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"expectation has imaginary residue {value.imag:.3e}")
    return float(value.real)


def eig_hermitian(h):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Returns ``(w, v)`` with ``h @ v[:, k] == w[k] * v[:, k]``.
    """
    h = np.asarray(h, dtype=complex)
    dev = hermiticity_deviation(h)
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(dev)
    w, v = np.linalg.eigh(h)
    return w, v


def validate_density(mat) -> np.ndarray:
    """Check that ``mat`` is a valid 8x8 density matrix and return it.

    Raises NotHermitianError, NotUnitTraceError or NotPSDError with the
    offending metric attached.
    """
    mat = np.asarray(mat, dtype=complex)
    if mat.shape != (8, 8):
        raise ValueError(f"density matrix must be 8x8, got {mat.shape}")
    if not np.all(np.isfinite(mat.view(float))):
        raise ValueError("density matrix contains non-finite entries")
    dev = hermiticity_deviation(mat)
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(dev)
    tr = complex(np.trace(mat))
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotUnitTraceError(tr)
    w = np.linalg.eigvalsh(mat)
    if w[0] < -PSD_TOL:
        raise NotPSDError(w[0])
    return mat
