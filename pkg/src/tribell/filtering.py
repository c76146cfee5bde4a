"""Local filtering of three-qubit states and the filtered Mermin bound.

A local filter is a positive 2x2 operator applied to one party; filtering a
state means conjugating by F_A (x) F_B (x) F_C and renormalizing by the trace
(the success probability of the post-selection). Each filter is kept in
normal form: a unitary times diag(l, 1). The overall scale of a filter
cancels from the filtered state, so the normal form pins it down.

``filtered_bound`` evaluates the bound on the filtered state's Mermin
expectation without ever building the filtered state: rotate the state by the
filters' unitary parts, take correlations with respect to the Sigma-dressed
Paulis ``Sigma sigma_i Sigma``, and divide by the normalization
``Tr[rho_rot (Sigma_A^2 (x) Sigma_B^2 (x) Sigma_C^2)]``. The singular values
of that matrix coincide with those of the filtered state's correlation
matrix, which is checked as a property test.

``optimize_filters`` searches filter space with multi-start Nelder-Mead in
log(l, m, n), optionally extended by three unitary angles per party.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import Bounds, minimize

from . import correlation, qalg

NORM_FLOOR = 1e-12
LOG_RATIO_LIMIT = 7.0

_SIMPLEX_SCALE = 0.5
_XATOL = 1e-9
_FATOL = 1e-9


class FilterError(ValueError):
    """Base class for filter construction and application failures."""


class ZeroFilterError(FilterError):
    """Raised when a raw filter matrix has no nonzero singular value."""


class FilterAnnihilatesError(FilterError):
    """Raised when filtering leaves trace <= NORM_FLOOR (post-selection never succeeds)."""

    def __init__(self, norm):
        self.norm = float(norm)
        super().__init__(f"filter annihilates the state: norm = {self.norm:.3e}")


@dataclass(frozen=True, eq=False)
class LocalFilter:
    """Single-party filter in normal form ``U diag(ratio, 1) U^dag``."""

    unitary: np.ndarray
    ratio: float

    @property
    def sigma(self) -> np.ndarray:
        return np.diag([self.ratio, 1.0]).astype(complex)

    @property
    def matrix(self) -> np.ndarray:
        u = self.unitary
        return u @ self.sigma @ u.conj().T

    @classmethod
    def identity(cls) -> "LocalFilter":
        return cls(unitary=qalg.IDENTITY2.copy(), ratio=1.0)

    @classmethod
    def diagonal(cls, ratio: float) -> "LocalFilter":
        ratio = float(ratio)
        if ratio < 0.0:
            raise FilterError(f"diagonal filter ratio must be >= 0, got {ratio}")
        return cls(unitary=qalg.IDENTITY2.copy(), ratio=ratio)


@dataclass(frozen=True, eq=False)
class FilterTriple:
    """One local filter per party."""

    fa: LocalFilter
    fb: LocalFilter
    fc: LocalFilter

    @classmethod
    def identity(cls) -> "FilterTriple":
        return cls(LocalFilter.identity(), LocalFilter.identity(), LocalFilter.identity())

    @classmethod
    def diagonal(cls, l: float, m: float, n: float) -> "FilterTriple":
        return cls(LocalFilter.diagonal(l), LocalFilter.diagonal(m), LocalFilter.diagonal(n))

    @property
    def ratios(self) -> tuple[float, float, float]:
        return (self.fa.ratio, self.fb.ratio, self.fc.ratio)


def filter_normal_form(raw) -> LocalFilter:
    """Canonical normal form of a raw positive 2x2 filter matrix.

    The spectral decomposition is rescaled so the smaller nonzero eigenvalue
    becomes 1, which leaves the filtered state unchanged. A rank-one filter
    comes out with ratio 0; the zero matrix raises ZeroFilterError.
    """
    raw = np.asarray(raw, dtype=complex)
    if raw.shape != (2, 2):
        raise FilterError(f"filter matrix must be 2x2, got {raw.shape}")
    dev = qalg.hermiticity_deviation(raw)
    if dev > qalg.HERMITIAN_TOL:
        raise qalg.NotPSDError(-dev)
    w, v = np.linalg.eigh(raw)
    small, big = float(w[0]), float(w[1])
    if small < -qalg.PSD_TOL * max(1.0, big):
        raise qalg.NotPSDError(small)
    if big <= NORM_FLOOR:
        raise ZeroFilterError("both singular values of the filter are zero")
    small = max(small, 0.0)
    if small > 1e-12 * big:
        # Columns ordered (large, small) so Sigma = diag(big/small, 1).
        unitary = np.ascontiguousarray(v[:, ::-1])
        return LocalFilter(unitary=unitary, ratio=big / small)
    # Rank one: diag(0, 1) after rescaling by the large eigenvalue.
    return LocalFilter(unitary=np.ascontiguousarray(v), ratio=0.0)


def apply_filters(rho, filters: FilterTriple):
    """Filtered state and the trace of the unnormalized transform.

    Returns ``(rho_prime, norm)``. Raises FilterAnnihilatesError when the
    post-selection probability collapses below NORM_FLOOR.
    """
    rho = np.asarray(rho, dtype=complex)
    op = qalg.kron3(filters.fa.matrix, filters.fb.matrix, filters.fc.matrix)
    unnormalized = op @ rho @ op.conj().T
    norm = float(np.trace(unnormalized).real)
    if norm <= NORM_FLOOR:
        raise FilterAnnihilatesError(norm)
    return unnormalized / norm, norm


def filtered_correlation(rho, filters: FilterTriple):
    """Sigma-dressed correlation tensor and normalization of a filter triple.

    Returns ``(tensor, norm)`` where ``tensor / norm`` folds to the matrix
    whose singular values bound the filtered state's Mermin expectation.
    The tensor is computed on the unitary-rotated state, so its entries match
    the closed forms quoted for diagonal filters.
    """
    rho = np.asarray(rho, dtype=complex)
    u3 = qalg.kron3(filters.fa.unitary, filters.fb.unitary, filters.fc.unitary)
    rho_rot = u3.conj().T @ rho @ u3

    def dressed(f: LocalFilter) -> np.ndarray:
        s = f.sigma
        return np.einsum("ab,ibc,cd->iad", s, qalg.PAULI, s)

    tensor = correlation.pauli_product_tensor(
        rho_rot, dressed(filters.fa), dressed(filters.fb), dressed(filters.fc)
    )
    sq = [f.sigma @ f.sigma for f in (filters.fa, filters.fb, filters.fc)]
    norm = float(np.trace(qalg.kron3(*sq) @ rho_rot).real)
    return tensor, norm


@dataclass(frozen=True)
class FilteredBoundReport:
    """Bound data for one (state, filter triple) pair.

    ``singular_values`` are those of the normalized dressed correlation
    matrix, descending; ``bound`` is 2*sqrt(2) times the largest;
    ``pair_value`` and ``pair_is_max`` follow the degenerate-pair reading of
    :mod:`tribell.correlation`.
    """

    norm: float
    singular_values: tuple[float, float, float]
    bound: float
    pair_value: float
    pair_is_max: bool
    degeneracy_gap: float


def filtered_bound(rho, filters: FilterTriple) -> FilteredBoundReport:
    """Mermin bound of the filtered state, computed in filter normal form."""
    tensor, norm = filtered_correlation(rho, filters)
    if norm <= NORM_FLOOR:
        raise FilterAnnihilatesError(norm)
    triple = correlation.singular_triple(correlation.fold(tensor / norm))
    pair = correlation.pair_from_triple(triple)
    return FilteredBoundReport(
        norm=norm,
        singular_values=triple.values,
        bound=math.sqrt(8.0 * triple.gram[0]),
        pair_value=pair.value,
        pair_is_max=pair.pair_is_max,
        degeneracy_gap=pair.gap,
    )


def unitary_from_angles(phi: float, theta: float, psi: float) -> np.ndarray:
    """SU(2) element Rz(phi) Ry(theta) Rz(psi)."""
    def rz(a):
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])

    def ry(a):
        ca, sa = math.cos(a / 2.0), math.sin(a / 2.0)
        return np.array([[ca, -sa], [sa, ca]], dtype=complex)

    return rz(phi) @ ry(theta) @ rz(psi)


def triple_from_params(x, include_unitaries: bool) -> FilterTriple:
    """Decode an optimizer parameter vector into a filter triple.

    Layout: ``x[0:3]`` are log ratios; with unitaries enabled, ``x[3:12]``
    are three Euler angles per party.
    """
    x = np.asarray(x, dtype=float)
    ratios = np.exp(x[:3])
    if include_unitaries:
        us = [unitary_from_angles(*x[3 + 3 * k : 6 + 3 * k]) for k in range(3)]
    else:
        us = [qalg.IDENTITY2.copy()] * 3
    return FilterTriple(
        LocalFilter(unitary=us[0], ratio=float(ratios[0])),
        LocalFilter(unitary=us[1], ratio=float(ratios[1])),
        LocalFilter(unitary=us[2], ratio=float(ratios[2])),
    )


@dataclass(frozen=True)
class RestartTrace:
    """Log entry for one optimizer restart."""

    index: int
    start: tuple
    params: tuple
    value: float
    evaluations: int


@dataclass(frozen=True, eq=False)
class FilterSearchResult:
    best: FilterTriple
    value: float
    params: tuple
    trace: tuple


def optimize_filters(
    rho,
    objective: str = "pair_bound",
    *,
    restarts: int = 20,
    seed: int = 0,
    max_iters: int = 400,
    include_unitaries: bool = False,
    oracle_restarts: int = 16,
) -> FilterSearchResult:
    """Search for the filter triple maximizing the chosen objective.

    ``objective="pair_bound"`` maximizes the degenerate-pair level of the
    filtered bound and scores minus infinity whenever the pair is not the top
    of the spectrum, so untight configurations never win. ``objective=
    "oracle"`` maximizes the direct Mermin maximization on the actually
    filtered state (much slower, but free of tightness assumptions).

    Runs ``restarts`` independent Nelder-Mead searches from seeded starting
    points (restart 0 always starts at the identity filters) and returns the
    best, ties going to the lowest restart index. Deterministic for a fixed
    seed.
    """
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if objective not in ("pair_bound", "oracle"):
        raise ValueError(f"unknown objective {objective!r}")
    rho = np.asarray(rho, dtype=complex)
    dim = 12 if include_unitaries else 3

    if objective == "oracle":
        from . import oracle as oracle_mod

        inner_seed = int(np.random.SeedSequence([int(seed), 0xF1]).generate_state(1)[0])

        def score(triple: FilterTriple) -> float:
            try:
                rho_prime, _ = apply_filters(rho, triple)
            except FilterAnnihilatesError:
                return -math.inf
            return oracle_mod.maximize_mermin(
                rho_prime, seed=inner_seed, restarts=oracle_restarts
            ).value

    else:

        def score(triple: FilterTriple) -> float:
            try:
                report = filtered_bound(rho, triple)
            except FilterAnnihilatesError:
                return -math.inf
            if not report.pair_is_max:
                return -math.inf
            return report.pair_value

    evaluations = [0]

    def negated(x) -> float:
        evaluations[0] += 1
        value = score(triple_from_params(x, include_unitaries))
        return math.inf if value == -math.inf else -value

    lo = np.full(dim, -LOG_RATIO_LIMIT)
    hi = np.full(dim, LOG_RATIO_LIMIT)
    if include_unitaries:
        lo[3:] = -2.0 * math.pi
        hi[3:] = 2.0 * math.pi
    bounds = Bounds(lo, hi)

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x0F]))
    starts = [np.zeros(dim)]
    for _ in range(restarts - 1):
        x0 = rng.uniform(-2.0, 2.0, size=dim)
        if include_unitaries:
            x0[3:] = rng.uniform(-math.pi, math.pi, size=9)
        starts.append(x0)

    best_value = -math.inf
    best_params = starts[0]
    trace = []
    for idx, x0 in enumerate(starts):
        simplex = np.vstack([x0] + [x0 + _SIMPLEX_SCALE * e for e in np.eye(dim)])
        simplex = np.clip(simplex, lo, hi)
        before = evaluations[0]
        # errstate: inf-valued vertices (dead proposals) make the simplex
        # convergence check subtract inf from inf, which is fine to ignore.
        with np.errstate(invalid="ignore"):
            res = minimize(
                negated,
                x0,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "initial_simplex": simplex,
                    "xatol": _XATOL,
                    "fatol": _FATOL,
                    "maxiter": max_iters,
                    "maxfev": 50 * max_iters,
                },
            )
        value = -res.fun if math.isfinite(res.fun) else -math.inf
        trace.append(
            RestartTrace(
                index=idx,
                start=tuple(float(v) for v in x0),
                params=tuple(float(v) for v in res.x),
                value=value,
                evaluations=evaluations[0] - before,
            )
        )
        if value > best_value:
            best_value = value
            best_params = res.x
    return FilterSearchResult(
        best=triple_from_params(best_params, include_unitaries),
        value=best_value,
        params=tuple(float(v) for v in best_params),
        trace=tuple(trace),
    )
