"""Dephasing dynamics: master-equation right-hand side, two independent
propagators, and an audited closed-form solution.

The authoritative propagator is the matrix exponential of the Liouvillian
(scaling-and-squaring). An adaptive Runge-Kutta integration of the
right-hand side serves as an independent cross-check. The closed-form
expression for rho(t) at the degeneracy point is kept exactly as derived
even though its lambda3 radicand is dimensionally suspect; audit_analytic
quantifies its deviation from the numerical propagator instead of patching
it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .errors import ContractViolationError, IntegrationError
from .model import (
    ID2,
    SIGMA_Z,
    DensityMatrix,
    SystemParams,
    as_matrix,
    bell_state_psi_plus,
    build_hamiltonian,
    max_abs_diff,
    _readonly,
)

SZ1 = np.kron(SIGMA_Z, ID2)
SZ2 = np.kron(ID2, SIGMA_Z)

# propagator output beyond this trace/Hermiticity deviation signals a kernel bug
PROPAGATOR_ATOL = 1e-8


def lindblad_rhs(rho, p: SystemParams) -> np.ndarray:
    """d(rho)/dt = -i[H, rho] + (gamma/8) sum_j (2 Zj rho Zj - Zj Zj rho - rho Zj Zj)."""
    r = as_matrix(rho)
    h = build_hamiltonian(p)
    out = -1j * (h @ r - r @ h)
    for sz in (SZ1, SZ2):
        out = out + (p.gamma / 8.0) * (2.0 * sz @ r @ sz - sz @ sz @ r - r @ sz @ sz)
    return out


def _vec(mat: np.ndarray) -> np.ndarray:
    # column stacking
    return np.asarray(mat).reshape(16, order="F")

def _unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v).reshape((4, 4), order="F")


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """16x16 generator acting on column-stacked density matrices."""

    matrix: np.ndarray
    params: SystemParams


def build_liouvillian(p: SystemParams) -> Liouvillian:
    """Generator L with unvec(L vec(rho)) = lindblad_rhs(rho) for every rho."""
    h = build_hamiltonian(p)
    eye4 = np.eye(4, dtype=complex)
    mat = -1j * (np.kron(eye4, h) - np.kron(h.T, eye4))
    for sz in (SZ1, SZ2):
        sz2 = sz @ sz
        mat = mat + (p.gamma / 8.0) * (2.0 * np.kron(sz.T, sz)
                                       - np.kron(eye4, sz2)
                                       - np.kron(sz2.T, eye4))
    return Liouvillian(matrix=_readonly(mat), params=p)


def _check_propagated(mat: np.ndarray) -> DensityMatrix:
    herm = max_abs_diff(mat, mat.conj().T)
    tr_dev = abs(mat.trace() - 1.0)
    if herm > PROPAGATOR_ATOL or tr_dev > PROPAGATOR_ATOL:
        raise ContractViolationError(
            f"propagator output broke the state contract (hermiticity {herm:.3e}, "
            f"trace deviation {tr_dev:.3e}); exponential kernel bug")
    return DensityMatrix(mat)


def propagate_expm(rho0, p: SystemParams, t: float) -> DensityMatrix:
    """Propagate rho0 to time t via expm(L t) acting on vec(rho0).

    Exact up to the matrix-exponential kernel; this is the authoritative
    route used by the Fisher-information layer.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    liou = build_liouvillian(p)
    out = _unvec(expm(liou.matrix * t) @ _vec(as_matrix(rho0)))
    return _check_propagated(out)


def propagate_rk(rho0, p: SystemParams, t: float, rel_tol: float = 1e-9) -> DensityMatrix:
    """Propagate rho0 to time t by adaptive Runge-Kutta on lindblad_rhs.

    Independent of the exponential route: integrates the right-hand side
    directly, never touching the 16x16 generator. rel_tol must lie in
    [1e-12, 1e-4]; the absolute floor is 1e-12.
    """
    if not (1e-12 <= rel_tol <= 1e-4):
        raise ValueError(f"rel_tol must lie in [1e-12, 1e-4], got {rel_tol}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    r0 = as_matrix(rho0)
    if t == 0.0:
        return DensityMatrix(r0)

    def rhs(_t, y):
        return lindblad_rhs(y.reshape((4, 4)), p).reshape(16)

    sol = solve_ivp(rhs, (0.0, t), r0.reshape(16), method="DOP853",
                    rtol=rel_tol, atol=1e-12, t_eval=[t])
    if not sol.success:
        raise IntegrationError(f"adaptive integration failed: {sol.message}")
    return _check_propagated(sol.y[:, -1].reshape((4, 4)))


# ---------------------------------------------------------------------------
# closed-form solution at the degeneracy point (kept verbatim, audited)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AnalyticCoefficients:
    """Coefficients of the closed-form rho(t) for identical qubits at degeneracy.

    mu_plus/mu_minus here are the solution-level constants lambda3 +/- (gamma^2
    + E_m^2 - E_j^2); the eigensystem layer defines a different mu pair and the
    two are never interchanged.
    """

    lambda1: float
    lambda2: float
    lambda3: float
    mu_plus: float
    mu_minus: float
    r1_plus: float
    r1_minus: float
    r2_plus: float
    r2_minus: float
    upsilon1: float
    upsilon2: float


def analytic_coefficients(p: SystemParams, t: float) -> AnalyticCoefficients:
    """Evaluate the closed-form coefficient set at time t.

    Raises ValueError on a negative radicand; nothing is clamped or
    corrected. The lambda3 radicand contains the term 2 E_m (E_j^2 +
    gamma^2)^2, which mixes energy powers; it is evaluated exactly as
    written.
    """
    if not p.degenerate_identical():
        raise ValueError("closed form requires identical qubits at the degeneracy point")
    ej, em, g = p.e_j1, p.e_m, p.gamma
    rad3 = em ** 4 + (ej ** 2 - g ** 2) ** 2 + 2.0 * em * (ej ** 2 + g ** 2) ** 2
    if rad3 < 0.0:
        raise ValueError(f"lambda3 radicand is negative ({rad3:.6e})")
    lam3 = math.sqrt(rad3)
    a = em ** 2 + ej ** 2 - g ** 2
    rad1 = lam3 + a
    rad2 = lam3 - a
    if rad1 < 0.0 or rad2 < 0.0:
        raise ValueError(f"lambda1/lambda2 radicand is negative ({rad1:.6e}, {rad2:.6e})")
    lam1 = math.sqrt(rad1)
    lam2 = math.sqrt(rad2)
    lam123 = lam1 * lam2 * lam3
    if lam123 == 0.0 or lam3 == 0.0:
        raise ValueError("degenerate closed-form coefficients: lambda1*lambda2*lambda3 = 0")
    b = g ** 2 + em ** 2 - ej ** 2
    s2 = math.sqrt(2.0)
    sin1, cos1 = math.sin(s2 * lam1 * t), math.cos(s2 * lam1 * t)
    sinh2, cosh2 = math.sinh(s2 * lam2 * t), math.cosh(s2 * lam2 * t)
    return AnalyticCoefficients(
        lambda1=lam1, lambda2=lam2, lambda3=lam3,
        mu_plus=lam3 + b, mu_minus=lam3 - b,
        r1_plus=s2 * g * sin1 + lam2 * cos1,
        r1_minus=s2 * g * sin1 - lam2 * cos1,
        r2_plus=s2 * g * sinh2 + lam2 * cosh2,
        r2_minus=s2 * g * sinh2 - lam2 * cosh2,
        upsilon1=math.exp(-2.0 * g * t) / (8.0 * lam123),
        upsilon2=ej * math.exp(-2.0 * g * t) / (8.0 * lam3),
    )


def analytic_state_matrix(p: SystemParams, t: float) -> np.ndarray:
    """Closed-form rho(t) evaluated verbatim; may violate positivity (audited)."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    c = analytic_coefficients(p, t)
    ej, em, g = p.e_j1, p.e_m, p.gamma
    lam123 = c.lambda1 * c.lambda2 * c.lambda3
    grow = 2.0 * lam123 * math.exp(2.0 * g * t)
    decay = 2.0 * lam123 * math.exp(-2.0 * g * t)
    sym = c.lambda2 * c.mu_minus * c.r1_plus + c.lambda1 * c.mu_plus * c.r2_plus
    asym = c.lambda2 * c.mu_minus * c.r1_minus + c.lambda1 * c.mu_plus * c.r2_minus
    s2 = math.sqrt(2.0)
    sin1, cos1 = math.sin(s2 * c.lambda1 * t), math.cos(s2 * c.lambda1 * t)
    sinh2, cosh2 = math.sinh(s2 * c.lambda2 * t), math.cosh(s2 * c.lambda2 * t)

    r11 = c.upsilon1 * (grow - sym)
    r22 = c.upsilon1 * (grow + sym)
    r14 = c.upsilon1 * (decay + asym)
    r23 = c.upsilon1 * (decay - asym)
    r12 = c.upsilon2 * (2.0 * em * (cosh2 - cos1)
                        + 1j * s2 * (c.lambda2 * sinh2 + c.lambda1 * sin1))

    mat = np.empty((4, 4), dtype=complex)
    mat[0, 0] = mat[3, 3] = r11
    mat[1, 1] = mat[2, 2] = r22
    mat[0, 3] = mat[3, 0] = r14
    mat[1, 2] = mat[2, 1] = r23
    mat[0, 1] = mat[0, 2] = mat[3, 1] = mat[3, 2] = r12
    mat[1, 0] = mat[2, 0] = mat[1, 3] = mat[2, 3] = np.conj(r12)
    return mat


def analytic_state(p: SystemParams, t: float) -> DensityMatrix:
    """Closed-form rho(t) wrapped in the state contract.

    Fails with ContractViolationError whenever the verbatim expression is
    not a valid state at (p, t); use analytic_state_matrix / audit_analytic
    to inspect the raw values.
    """
    return DensityMatrix(analytic_state_matrix(p, t))


@dataclass(frozen=True)
class AuditReport:
    """Entrywise comparison of the closed form against the exponential propagator."""

    params: SystemParams
    tolerance: float
    grid: tuple
    max_abs_deviation: float
    deviating_entries: tuple  # (t, row, col, analytic, oracle, abs_dev), 1-based indices
    failures: tuple           # (t, message) for grid points where the closed form errored
    verdict: str              # "consistent" | "inconsistent"

    def to_dict(self) -> dict:
        import dataclasses as _dc
        return {
            "params": _dc.asdict(self.params),
            "tolerance": self.tolerance,
            "grid": list(self.grid),
            "max_abs_deviation": self.max_abs_deviation,
            "deviating_entries": [
                {"t": t, "row": r, "col": col,
                 "analytic": [val.real, val.imag],
                 "oracle": [ora.real, ora.imag],
                 "abs_dev": dev}
                for (t, r, col, val, ora, dev) in self.deviating_entries
            ],
            "failures": [{"t": t, "message": m} for (t, m) in self.failures],
            "verdict": self.verdict,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def audit_analytic(p: SystemParams, t_grid, tol: float = 1e-8) -> AuditReport:
    """Compare analytic_state_matrix against propagate_expm on a time grid.

    Domain errors in the closed form become audit entries, never exceptions.
    Verdict is "consistent" iff the largest entrywise deviation over the
    grid stays within tol.
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    rho0 = bell_state_psi_plus()
    max_dev = 0.0
    deviating = []
    failures = []
    for t in t_grid:
        oracle = propagate_expm(rho0, p, float(t)).mat
        try:
            candidate = analytic_state_matrix(p, float(t))
        except ValueError as exc:
            failures.append((float(t), str(exc)))
            continue
        dev = np.abs(candidate - oracle)
        max_dev = max(max_dev, float(dev.max()))
        for i in range(4):
            for j in range(4):
                if dev[i, j] > tol:
                    deviating.append((float(t), i + 1, j + 1,
                                      complex(candidate[i, j]), complex(oracle[i, j]),
                                      float(dev[i, j])))
    verdict = "consistent" if (max_dev <= tol and not failures) else "inconsistent"
    return AuditReport(params=p, tolerance=tol, grid=tuple(float(t) for t in t_grid),
                       max_abs_deviation=max_dev, deviating_entries=tuple(deviating),
                       failures=tuple(failures), verdict=verdict)
