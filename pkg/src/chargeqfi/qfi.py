"""Quantum Fisher information of the dephased two-qubit state.

Two independent routes are kept side by side. qfi_components assembles
F = F_C + F_P - F_M from central-difference derivatives of the eigenvalues
and eigenvectors (classical, pure and mixed contributions). qfi_sld
evaluates the symmetric-logarithmic-derivative expression directly from
d(rho)/d(eta) and never sees the eigenvector derivatives, so agreement
between the two is a real cross-check, not bookkeeping.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolationError, DegenerateDerivativeError
from .model import DensityMatrix, SystemParams, bell_state_psi_plus, _readonly
from .dynamics import propagate_expm
from .spectral import EIGENVALUE_CLAMP, SpectralDecomposition, spectral_decompose

FD_STEP_MIN = 1e-7
FD_STEP_MAX = 1e-3
FD_STEP_DEFAULT = 1e-4
# two candidate branch overlaps closer than this are ambiguous
MATCH_AMBIGUITY = 1e-3
NEAR_DEGENERATE_GAP = 1e-6
CRB_FLOOR = 1e-12
QFI_NEGATIVE_FLOOR = -1e-8
COMPONENT_FLOOR = -1e-10


class EstimandTag(enum.Enum):
    """Parameter the Fisher information is taken with respect to.

    EJ moves e_j1 and e_j2 together; GAMMA and EM move the single
    corresponding field.
    """

    GAMMA = "gamma"
    EJ = "ej"
    EM = "em"

    def shifted(self, p: SystemParams, delta: float) -> SystemParams:
        if self is EstimandTag.GAMMA:
            return dataclasses.replace(p, gamma=p.gamma + delta)
        if self is EstimandTag.EJ:
            return dataclasses.replace(p, e_j1=p.e_j1 + delta, e_j2=p.e_j2 + delta)
        return dataclasses.replace(p, e_m=p.e_m + delta)


def _check_step(p: SystemParams, eta: EstimandTag, h: float) -> None:
    if not (FD_STEP_MIN <= h <= FD_STEP_MAX):
        raise ValueError(f"fd step must lie in [{FD_STEP_MIN:g}, {FD_STEP_MAX:g}], got {h}")
    if eta is EstimandTag.GAMMA and p.gamma - h < 0.0:
        raise ValueError(
            f"gamma - h = {p.gamma - h:.3e} < 0; shrink the step or move gamma away from 0")


def _state(p: SystemParams, t: float) -> DensityMatrix:
    return propagate_expm(bell_state_psi_plus(), p, t)


def d_rho(p: SystemParams, t: float, eta: EstimandTag, h: float = FD_STEP_DEFAULT) -> np.ndarray:
    """Central-difference derivative of rho(t) with respect to the estimand."""
    _check_step(p, eta, h)
    plus = _state(eta.shifted(p, +h), t).mat
    minus = _state(eta.shifted(p, -h), t).mat
    return (plus - minus) / (2.0 * h)


@dataclass(frozen=True, eq=False)
class SpectralDerivative:
    """Central-difference derivatives of the matched eigensystem.

    d_eigenvectors column i differentiates the branch of base eigenvector i
    in the parallel-transport gauge (overlap with the base vector rotated to
    be real positive on both sides).
    """

    d_eigenvalues: np.ndarray
    d_eigenvectors: np.ndarray
    method: str
    step: float
    near_degenerate_pairs: tuple


def _match_side(base_vecs: np.ndarray, side: SpectralDecomposition) -> tuple[np.ndarray, np.ndarray]:
    """Permute and re-phase a shifted eigensystem onto the base branches."""
    overlaps = base_vecs.conj().T @ side.eigenvectors  # overlaps[i, j] = <b_i|s_j>
    mags = np.abs(overlaps)
    taken = np.zeros(4, dtype=bool)
    vals = np.empty(4)
    vecs = np.empty((4, 4), dtype=complex)
    for i in range(4):
        avail = np.where(~taken)[0]
        order = avail[np.argsort(mags[i, avail])[::-1]]
        best = order[0]
        if len(order) > 1 and mags[i, best] - mags[i, order[1]] < MATCH_AMBIGUITY:
            raise DegenerateDerivativeError(
                f"branch matching ambiguous for eigenvector {i}: overlaps "
                f"{mags[i, best]:.6f} vs {mags[i, order[1]]:.6f} within {MATCH_AMBIGUITY:g}")
        taken[best] = True
        ov = overlaps[i, best]
        phase = np.conj(ov) / abs(ov)
        vals[i] = side.eigenvalues[best]
        vecs[:, i] = side.eigenvectors[:, best] * phase
    return vals, vecs


def spectral_derivative(p: SystemParams, t: float, eta: EstimandTag,
                        h: float = FD_STEP_DEFAULT,
                        base: SpectralDecomposition | None = None) -> SpectralDerivative:
    """Differentiate eigenvalues and eigenvectors by central differences.

    The shifted decompositions are matched branch-by-branch to the base via
    maximal overlap; ambiguous matches (top two overlaps within 1e-3) raise
    DegenerateDerivativeError rather than silently mixing branches.
    """
    _check_step(p, eta, h)
    if base is None:
        base = spectral_decompose(_state(p, t))
    plus = spectral_decompose(_state(eta.shifted(p, +h), t))
    minus = spectral_decompose(_state(eta.shifted(p, -h), t))
    vals_p, vecs_p = _match_side(base.eigenvectors, plus)
    vals_m, vecs_m = _match_side(base.eigenvectors, minus)
    flagged = tuple((i, j) for i in range(4) for j in range(i + 1, 4)
                    if abs(base.eigenvalues[i] - base.eigenvalues[j]) < NEAR_DEGENERATE_GAP)
    return SpectralDerivative(
        d_eigenvalues=_readonly((vals_p - vals_m) / (2.0 * h)).real,
        d_eigenvectors=_readonly((vecs_p - vecs_m) / (2.0 * h)),
        method="central-difference",
        step=h,
        near_degenerate_pairs=flagged,
    )


@dataclass(frozen=True)
class QfiBreakdown:
    """Fisher information split into classical, pure and mixed parts.

    f_total = f_c + f_p - f_m by construction; crb = 1/f_total (inf below
    the 1e-12 floor). Diagnostics: fd_step, n_clamped eigenvalues, and the
    worst residual Berry connection |<V_i|dV_i>| after gauge matching.
    """

    f_total: float
    f_c: float
    f_p: float
    f_m: float
    crb: float
    fd_step: float
    n_clamped: int
    gauge_residual: float

    def __post_init__(self):
        for name in ("f_c", "f_p", "f_m"):
            val = getattr(self, name)
            if val < COMPONENT_FLOOR:
                raise ContractViolationError(f"{name} = {val:.3e} is negative beyond roundoff")
        if self.f_total < QFI_NEGATIVE_FLOOR:
            raise ContractViolationError(
                f"f_total = {self.f_total:.3e} below the {QFI_NEGATIVE_FLOOR:.0e} floor")


def cramer_rao(f: float) -> float:
    """Single-shot Cramer-Rao bound 1/f, +inf once f drops below 1e-12."""
    if f < QFI_NEGATIVE_FLOOR:
        raise ContractViolationError(f"Fisher information {f:.3e} negative beyond the floor")
    if f > CRB_FLOOR:
        return 1.0 / f
    return math.inf


def qfi_components(p: SystemParams, t: float, eta: EstimandTag,
                   h: float = FD_STEP_DEFAULT) -> QfiBreakdown:
    """Assemble F_C + F_P - F_M from matched eigensystem derivatives.

    F_C sums (d eps_i)^2 / eps_i over unclamped eigenvalues; F_P is
    4 sum_i eps_i (<dV_i|dV_i> - |<V_i|dV_i>|^2); F_M is
    8 sum_{i != j} eps_i eps_j / (eps_i + eps_j) |<V_i|dV_j>|^2 over pairs
    with eps_i + eps_j above the clamp.
    """
    base = spectral_decompose(_state(p, t))
    deriv = spectral_derivative(p, t, eta, h, base=base)
    eps = base.clamped
    vecs = base.eigenvectors
    dvals = deriv.d_eigenvalues
    dvecs = deriv.d_eigenvectors

    f_c = 0.0
    for i in range(4):
        if eps[i] > 0.0:
            f_c += dvals[i] ** 2 / eps[i]

    # overlaps[i, j] = <V_i | dV_j>
    overlaps = vecs.conj().T @ dvecs
    gauge_residual = float(np.max(np.abs(np.diag(overlaps))))

    f_p = 0.0
    for i in range(4):
        if eps[i] > 0.0:
            dv = dvecs[:, i]
            f_p += eps[i] * (float(np.real(np.vdot(dv, dv))) - abs(overlaps[i, i]) ** 2)
    f_p *= 4.0

    f_m = 0.0
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            s = eps[i] + eps[j]
            if s > EIGENVALUE_CLAMP:
                f_m += eps[i] * eps[j] / s * abs(overlaps[i, j]) ** 2
    f_m *= 8.0

    f_total = f_c + f_p - f_m
    return QfiBreakdown(f_total=f_total, f_c=f_c, f_p=f_p, f_m=f_m,
                        crb=cramer_rao(f_total), fd_step=h,
                        n_clamped=base.n_clamped, gauge_residual=gauge_residual)


def qfi_sld(p: SystemParams, t: float, eta: EstimandTag,
            h: float = FD_STEP_DEFAULT) -> float:
    """Symmetric-logarithmic-derivative oracle.

    F = sum_{i,j} 2 |<V_i| d_rho |V_j>|^2 / (eps_i + eps_j) over pairs with
    eps_i + eps_j above the clamp; gauge-free because only d(rho) enters.
    """
    base = spectral_decompose(_state(p, t))
    drho = d_rho(p, t, eta, h)
    eps = base.clamped
    vecs = base.eigenvectors
    mixed = vecs.conj().T @ drho @ vecs
    total = 0.0
    for i in range(4):
        for j in range(4):
            s = eps[i] + eps[j]
            if s > EIGENVALUE_CLAMP:
                total += 2.0 * abs(mixed[i, j]) ** 2 / s
    return total
