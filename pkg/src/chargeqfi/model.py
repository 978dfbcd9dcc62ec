"""Model parameters, Hamiltonian and initial state for two coupled charge qubits.

Basis convention throughout the package: product basis |00>, |01>, |10>, |11>
with sigma_z|0> = +|0>. Energies are dimensionless (hbar = 1), so time carries
inverse-energy units.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

# numerical contract for density matrices
HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-9
EIGENVALUE_FLOOR = -1e-9


def _readonly(mat: np.ndarray) -> np.ndarray:
    arr = np.array(mat, dtype=complex)
    arr.setflags(write=False)
    return arr


def max_abs_diff(a, b) -> float:
    """Largest entrywise |a - b|; all matrix comparisons go through an explicit tolerance."""
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the coupled-qubit model plus the dephasing rate gamma.

    e_c1, e_c2 : charging energies
    e_j1, e_j2 : Josephson energies
    e_m        : mutual (coupling) energy
    n_g1, n_g2 : dimensionless gate charges
    gamma      : dephasing rate, >= 0
    """

    e_c1: float = 1.0
    e_c2: float = 1.0
    e_j1: float = 0.1
    e_j2: float = 0.1
    e_m: float = 0.1
    n_g1: float = 0.5
    n_g2: float = 0.5
    gamma: float = 0.0

    def __post_init__(self):
        for name, value in dataclasses.asdict(self).items():
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite real number, got {value!r}")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    @classmethod
    def degenerate(cls, e_j: float, e_m: float, gamma: float,
                   e_c1: float = 1.0, e_c2: float = 1.0) -> "SystemParams":
        """Identical qubits parked at the charge degeneracy point n_g = 1/2."""
        return cls(e_c1=e_c1, e_c2=e_c2, e_j1=e_j, e_j2=e_j, e_m=e_m,
                   n_g1=0.5, n_g2=0.5, gamma=gamma)

    def degenerate_identical(self) -> bool:
        """True iff n_g1 = n_g2 = 1/2 and both Josephson energies coincide."""
        return self.n_g1 == 0.5 and self.n_g2 == 0.5 and self.e_j1 == self.e_j2


def kappa_coefficients(p: SystemParams) -> tuple[float, float]:
    """Effective charge-sector coefficients (kappa1, kappa2) of the Hamiltonian.

    kappa1 = 2 E_c1 (1 - 2 n_g1) + E_m (1 - 2 n_g2), and symmetrically for
    kappa2. Both vanish exactly at n_g1 = n_g2 = 1/2.
    """
    k1 = 2.0 * p.e_c1 * (1.0 - 2.0 * p.n_g1) + p.e_m * (1.0 - 2.0 * p.n_g2)
    k2 = 2.0 * p.e_c2 * (1.0 - 2.0 * p.n_g2) + p.e_m * (1.0 - 2.0 * p.n_g1)
    return k1, k2


def build_hamiltonian(p: SystemParams) -> np.ndarray:
    """4x4 Hamiltonian -1/2 {k1 Z1 + k2 Z2 + EJ1 X1 + EJ2 X2 - 2 Em Z1 Z2}."""
    k1, k2 = kappa_coefficients(p)
    z1 = np.kron(SIGMA_Z, ID2)
    z2 = np.kron(ID2, SIGMA_Z)
    x1 = np.kron(SIGMA_X, ID2)
    x2 = np.kron(ID2, SIGMA_X)
    zz = np.kron(SIGMA_Z, SIGMA_Z)
    h = -0.5 * (k1 * z1 + k2 * z2 + p.e_j1 * x1 + p.e_j2 * x2 - 2.0 * p.e_m * zz)
    return _readonly(h)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """4x4 Hermitian, unit-trace, positive-semidefinite state.

    Construction validates the numerical contract: Hermiticity deviation
    <= 1e-10, |trace - 1| <= 1e-9, eigenvalues >= -1e-9.
    """

    mat: np.ndarray

    def __post_init__(self):
        arr = _readonly(self.mat)
        if arr.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got shape {arr.shape}")
        herm = max_abs_diff(arr, arr.conj().T)
        if herm > HERMITICITY_ATOL:
            raise ContractViolationError(f"Hermiticity deviation {herm:.3e} exceeds {HERMITICITY_ATOL:.0e}")
        tr_dev = abs(arr.trace() - 1.0)
        if tr_dev > TRACE_ATOL:
            raise ContractViolationError(f"trace deviation {tr_dev:.3e} exceeds {TRACE_ATOL:.0e}")
        lo = float(np.linalg.eigvalsh(0.5 * (arr + arr.conj().T)).min())
        if lo < EIGENVALUE_FLOOR:
            raise ContractViolationError(f"negative eigenvalue {lo:.3e} below floor {EIGENVALUE_FLOOR:.0e}")
        object.__setattr__(self, "mat", arr)


def as_matrix(rho) -> np.ndarray:
    """Accept a DensityMatrix or a plain array and return the 4x4 ndarray."""
    if isinstance(rho, DensityMatrix):
        return rho.mat
    arr = np.asarray(rho, dtype=complex)
    if arr.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {arr.shape}")
    return arr


def bell_state_psi_plus() -> DensityMatrix:
    """Projector onto (|01> + |10>)/sqrt(2), the initial state used throughout."""
    mat = np.zeros((4, 4), dtype=complex)
    mat[1, 1] = mat[2, 2] = mat[1, 2] = mat[2, 1] = 0.5
    return DensityMatrix(mat)
