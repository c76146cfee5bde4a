"""Constructors for the built-in three-qubit state families and state file I/O.

State files are UTF-8 JSON of the form ``{"dim": 8, "matrix": [[[re, im],
... x8], ... x8]}`` with the matrix stored row-major and every complex entry
written as a two-element array. The writer emits 17 significant digits so a
save/load round trip reproduces the state bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import qalg

FAMILY_NAMES = ("ghz", "noisy-ghz", "psi-pi8", "ad-ghz", "file")

# diag(1, 0, 0, 1) on qubits B and C; the noise floor of the noisy GHZ family
# lives on the |00>,|11> block of the last two qubits.
_BC_BLOCK = np.diag([1.0, 0.0, 0.0, 1.0]).astype(complex)


def _check_param(p: float, name: str = "p") -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def ghz() -> np.ndarray:
    """Projector onto (|000> + |111>) / sqrt(2).

    Entries are written out directly so the four nonzero entries are exactly
    1/2 (squaring 1/sqrt(2) in floating point would lose the last bit).
    """
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = m[0, 7] = m[7, 0] = m[7, 7] = 0.5
    return m


def noisy_ghz(p: float) -> np.ndarray:
    """GHZ projector mixed with weight (1-p) of I_2 (x) diag(1,0,0,1) / 4."""
    p = _check_param(p)
    background = np.kron(qalg.IDENTITY2, _BC_BLOCK) / 4.0
    return p * ghz() + (1.0 - p) * background


def psi_pi8_state(p: float) -> np.ndarray:
    """cos(pi/8)|000> + sin(pi/8)|111> mixed with |00><00| (x) I_2 / 2."""
    p = _check_param(p)
    vec = np.zeros(8, dtype=complex)
    vec[0] = math.cos(math.pi / 8.0)
    vec[7] = math.sin(math.pi / 8.0)
    background = np.zeros((8, 8), dtype=complex)
    background[0, 0] = background[1, 1] = 0.5
    return p * np.outer(vec, vec.conj()) + (1.0 - p) * background


def ad_kraus(gamma: float):
    """Kraus pair (E0, E1) of the single-qubit amplitude damping channel."""
    gamma = _check_param(gamma, "gamma")
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    e1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return e0, e1


def ad_apply(rho: np.ndarray, gamma: float) -> np.ndarray:
    """Apply amplitude damping with rate gamma independently to all three qubits."""
    rho = np.asarray(rho, dtype=complex)
    kraus = ad_kraus(gamma)
    out = np.zeros((8, 8), dtype=complex)
    for ka in kraus:
        for kb in kraus:
            for kc in kraus:
                op = qalg.kron3(ka, kb, kc)
                out += op @ rho @ op.conj().T
    return out


def ad_ghz(gamma: float) -> np.ndarray:
    """Closed form of the GHZ state after per-qubit amplitude damping.

    Implemented independently of :func:`ad_apply` so the two routes can be
    cross-checked against each other.
    """
    gamma = _check_param(gamma, "gamma")
    c = 1.0 - gamma
    m = np.zeros((8, 8), dtype=complex)
    m[0, 0] = 1.0 + gamma**3
    m[7, 7] = c**3
    m[0, 7] = m[7, 0] = c**1.5
    m[1, 1] = m[2, 2] = m[4, 4] = c * gamma**2
    m[3, 3] = m[5, 5] = m[6, 6] = c**2 * gamma
    return m / 2.0


def save_state(rho: np.ndarray, path) -> None:
    """Write a density matrix to ``path`` in the state file format."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (8, 8):
        raise ValueError(f"expected an 8x8 matrix, got {rho.shape}")
    rows = []
    for row in rho:
        cells = ",".join(f"[{c.real:.17g},{c.imag:.17g}]" for c in row)
        rows.append(f"[{cells}]")
    text = '{"dim": 8, "matrix": [' + ",".join(rows) + "]}\n"
    Path(path).write_text(text, encoding="utf-8")


def load_state(path) -> np.ndarray:
    """Read and validate a density matrix from a state file."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"state file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or data.get("dim") != 8:
        raise ValueError(f'state file {path} must be an object with "dim": 8')
    matrix = data.get("matrix")
    if not isinstance(matrix, list) or len(matrix) != 8:
        raise ValueError(f"state file {path} must carry an 8-row matrix")
    out = np.zeros((8, 8), dtype=complex)
    for i, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != 8:
            raise ValueError(f"state file {path}: row {i} must have 8 entries")
        for j, cell in enumerate(row):
            if not isinstance(cell, list) or len(cell) != 2:
                raise ValueError(
                    f"state file {path}: entry ({i},{j}) must be [re, im]"
                )
            out[i, j] = complex(float(cell[0]), float(cell[1]))
    return qalg.validate_density(out)


@dataclass(frozen=True)
class StateFamily:
    """Selector for a built-in family (with parameter) or a state file."""

    name: str
    param: float | None = None
    path: str | None = None

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise ValueError(
                f"unknown state family {self.name!r}; expected one of {FAMILY_NAMES}"
            )
        if self.name in ("noisy-ghz", "psi-pi8", "ad-ghz"):
            if self.param is None:
                raise ValueError(f"family {self.name!r} needs a parameter in [0, 1]")
            _check_param(self.param)
        if self.name == "file" and not self.path:
            raise ValueError('family "file" needs a path')


def build_state(family: StateFamily) -> np.ndarray:
    """Materialize the density matrix selected by ``family``."""
    if family.name == "ghz":
        return ghz()
    if family.name == "noisy-ghz":
        return noisy_ghz(family.param)
    if family.name == "psi-pi8":
        return psi_pi8_state(family.param)
    if family.name == "ad-ghz":
        return ad_ghz(family.param)
    return load_state(family.path)
