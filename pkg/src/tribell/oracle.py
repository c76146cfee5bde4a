"""Direct maximization of Mermin and Svetlichny expectations.

This is the ground truth the singular-value bounds are checked against: build
the Bell operator from six Bloch vectors and push its expectation up by
coordinate ascent. The expectation is linear in each Bloch vector once the
other five are frozen, so every single-vector update has the closed form
"normalize the gradient", and each update can only increase the value.
Multi-start makes the search global in practice; all restarts advance in one
vectorized batch and the best one wins, ties going to the lowest index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import correlation, qalg

CONVERGENCE_TOL = 1e-12
MAX_SWEEPS = 1000
_ZERO_GRAD = 1e-15

# coeff[x, y, z] is the sign of the <A_x B_y C_z> term in the Bell expression.
MERMIN_COEFF = np.zeros((2, 2, 2))
MERMIN_COEFF[0, 0, 1] = 1.0
MERMIN_COEFF[0, 1, 0] = 1.0
MERMIN_COEFF[1, 0, 0] = 1.0
MERMIN_COEFF[1, 1, 1] = -1.0

SVETLICHNY_COEFF = np.zeros((2, 2, 2))
SVETLICHNY_COEFF[0, 0, 0] = 1.0
SVETLICHNY_COEFF[0, 0, 1] = 1.0
SVETLICHNY_COEFF[0, 1, 0] = 1.0
SVETLICHNY_COEFF[0, 1, 1] = -1.0
SVETLICHNY_COEFF[1, 0, 0] = 1.0
SVETLICHNY_COEFF[1, 0, 1] = -1.0
SVETLICHNY_COEFF[1, 1, 0] = -1.0
SVETLICHNY_COEFF[1, 1, 1] = -1.0


@dataclass(frozen=True, eq=False)
class MeasurementSettings:
    """Six unit Bloch vectors, two dichotomic observables per party."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray
    c: np.ndarray
    c_prime: np.ndarray

    def observables(self):
        return tuple(
            qalg.bloch_observable(v)
            for v in (self.a, self.a_prime, self.b, self.b_prime, self.c, self.c_prime)
        )


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Best value found, the settings achieving it, and search effort."""

    value: float
    settings: MeasurementSettings
    iterations: int
    restarts_used: int


def _operator(settings: MeasurementSettings, coeff: np.ndarray) -> np.ndarray:
    a0, a1, b0, b1, c0, c1 = settings.observables()
    ops_a, ops_b, ops_c = (a0, a1), (b0, b1), (c0, c1)
    out = np.zeros((8, 8), dtype=complex)
    for x in range(2):
        for y in range(2):
            for z in range(2):
                if coeff[x, y, z] != 0.0:
                    out += coeff[x, y, z] * qalg.kron3(ops_a[x], ops_b[y], ops_c[z])
    return out


def mermin_operator(settings: MeasurementSettings) -> np.ndarray:
    """8x8 Hermitian Mermin operator A0(B0C1 + B1C0) + A1(B0C0 - B1C1)."""
    return _operator(settings, MERMIN_COEFF)


def svetlichny_operator(settings: MeasurementSettings) -> np.ndarray:
    """8x8 Hermitian Svetlichny operator (eight-term form, classical bound 4)."""
    return _operator(settings, SVETLICHNY_COEFF)


def mermin_expectation(rho, settings: MeasurementSettings) -> float:
    """Signed expectation Tr[M rho] of the Mermin operator."""
    return qalg.expectation(rho, mermin_operator(settings))


def svetlichny_expectation(rho, settings: MeasurementSettings) -> float:
    """Signed expectation Tr[S rho] of the Svetlichny operator."""
    return qalg.expectation(rho, svetlichny_operator(settings))


def _normalize_batch(vecs: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vecs, axis=-1, keepdims=True)
    return vecs / np.where(norms > _ZERO_GRAD, norms, 1.0)


def _update_slot(current: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Move each restart's vector to its normalized gradient.

    Zero gradients keep the previous vector, which preserves determinism in
    degenerate directions (any unit vector would do equally well).
    """
    norms = np.linalg.norm(grad, axis=-1, keepdims=True)
    moved = grad / np.where(norms > _ZERO_GRAD, norms, 1.0)
    return np.where(norms > _ZERO_GRAD, moved, current)


def _ascend(tensor: np.ndarray, coeff: np.ndarray, seed: int, restarts: int):
    """Batched coordinate ascent over all six Bloch vectors.

    Returns (values (R,), A, B, C stacks of shape (R, 2, 3), sweeps).
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(seed)]))
    va = _normalize_batch(rng.standard_normal((restarts, 2, 3)))
    vb = _normalize_batch(rng.standard_normal((restarts, 2, 3)))
    vc = _normalize_batch(rng.standard_normal((restarts, 2, 3)))

    def value():
        return np.einsum("xyz,ijk,rxi,ryj,rzk->r", coeff, tensor, va, vb, vc)

    values = value()
    sweeps = 0
    for sweeps in range(1, MAX_SWEEPS + 1):
        for x in range(2):
            grad = np.einsum("yz,ijk,ryj,rzk->ri", coeff[x], tensor, vb, vc)
            va[:, x] = _update_slot(va[:, x], grad)
        for y in range(2):
            grad = np.einsum("xz,ijk,rxi,rzk->rj", coeff[:, y], tensor, va, vc)
            vb[:, y] = _update_slot(vb[:, y], grad)
        for z in range(2):
            grad = np.einsum("xy,ijk,rxi,ryj->rk", coeff[:, :, z], tensor, va, vb)
            vc[:, z] = _update_slot(vc[:, z], grad)
        new_values = value()
        gain = float(np.max(new_values - values))
        values = new_values
        if gain < CONVERGENCE_TOL:
            break
    return values, va, vb, vc, sweeps


def _maximize(rho, coeff: np.ndarray, seed: int, restarts: int) -> OracleResult:
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    tensor = correlation.correlation_tensor(rho)
    values, va, vb, vc, sweeps = _ascend(tensor, coeff, seed, restarts)
    best = int(np.argmax(values))
    settings = MeasurementSettings(
        a=va[best, 0].copy(),
        a_prime=va[best, 1].copy(),
        b=vb[best, 0].copy(),
        b_prime=vb[best, 1].copy(),
        c=vc[best, 0].copy(),
        c_prime=vc[best, 1].copy(),
    )
    return OracleResult(
        value=float(values[best]),
        settings=settings,
        iterations=sweeps,
        restarts_used=restarts,
    )


def maximize_mermin(rho, seed: int = 0, restarts: int = 32) -> OracleResult:
    """Best |<Mermin>| over measurement settings, found by coordinate ascent."""
    return _maximize(rho, MERMIN_COEFF, seed, restarts)


def maximize_svetlichny(rho, seed: int = 0, restarts: int = 32) -> OracleResult:
    """Best |<Svetlichny>| over measurement settings, found by coordinate ascent."""
    return _maximize(rho, SVETLICHNY_COEFF, seed, restarts)
