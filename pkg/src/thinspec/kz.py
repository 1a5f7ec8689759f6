"""Adiabatic-impulse (Kibble-Zurek) approximation of the field ramp.

The wavefunction follows the instantaneous ground state until the freeze-out
time, stays frozen through the impulse window and afterwards evolves as a
superposition of snapshot eigenstates with accumulated dynamical phases.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, ModelParams, renormalized_field, static_omega
from .static import GaussianHermiteState, expand_in_snapshot_basis, snapshot_eigenstate

# Largest expansion order tried before giving up.
N_MAX_CAP = 4001


class TruncationError(RuntimeError):
    """The snapshot-basis expansion did not converge below the order cap."""


class RegimeLabel(enum.Enum):
    ADIABATIC = "adiabatic"
    IMPULSE = "impulse"
    POST_FREEZE_OUT = "post-freeze-out"


def classify_regime(t: float, t0: float, t_hat: float) -> RegimeLabel:
    """Label time ``t`` of a ramp started at ``t0``.

    Boundaries belong to the later regime: t0 == t_hat is adiabatic and
    t == t_hat is post-freeze-out.
    """
    if t < t0:
        raise DomainError(f"t={t!r} precedes the start t0={t0!r}")
    if t0 >= t_hat:
        return RegimeLabel.ADIABATIC
    if t < t_hat:
        return RegimeLabel.IMPULSE
    return RegimeLabel.POST_FREEZE_OUT


def relaxation_time(params: ModelParams, t: float) -> float:
    """Inverse dual thin-spectrum gap, hbar / sqrt(J delta t)."""
    if not t > 0:
        raise DomainError(f"relaxation time diverges at t={t!r}")
    return params.hbar / math.sqrt(params.J * params.delta * t)


def adiabaticity_bound(params: ModelParams) -> float:
    """Largest ramp rate sqrt(H0^3 J) / hbar that is still adiabatic at t0."""
    if not params.H0 > 0:
        raise DomainError("adiabaticity bound needs H0 > 0")
    return math.sqrt(params.H0**3 * params.J) / params.hbar


def saturated_defect_density(t0_over_that):
    """D_sat = 1 - 8 r^(3/2) / (1 + r)^3 with r = sqrt(min(t0/t_hat, 1))."""
    x = np.minimum(np.asarray(t0_over_that, dtype=float), 1.0)
    if np.any(x < 0):
        raise DomainError("t0/t_hat must be non-negative")
    r = np.sqrt(x)
    out = 1.0 - 8.0 * r**1.5 / (1.0 + r) ** 3
    return float(out) if out.ndim == 0 else out


def asymptotic_defect_density(t0_over_that):
    """Small-t0 law 1 - 8 (t0/t_hat)^(3/4)."""
    x = np.asarray(t0_over_that, dtype=float)
    out = 1.0 - 8.0 * x**0.75
    return float(out) if out.ndim == 0 else out


def frozen_defect_density(params: ModelParams, t):
    """Defect density 1 - |<u^1(t)|psi_KZ(t)>|^2 of the frozen state.

    Before freeze-out the state follows the ground state (D = 0 in the
    adiabatic regime); past ``max(t0, t_hat)`` the value saturates.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < params.t0):
        raise DomainError(f"times before t0={params.t0!r}")
    t_freeze = max(params.t0, params.t_hat)
    t_eff = np.minimum(t, t_freeze)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(t_eff > 0, np.sqrt(params.t0 / np.where(t_eff > 0, t_eff, 1.0)), 1.0)
    out = 1.0 - 8.0 * r**1.5 / (1.0 + r) ** 3
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DefectTrace:
    t: np.ndarray
    defect_density: np.ndarray
    saturation: float
    t0_over_that: float


def defect_trace(params: ModelParams, t) -> DefectTrace:
    t = np.asarray(t, dtype=float)
    x = params.t0 / params.t_hat
    return DefectTrace(
        t=t,
        defect_density=np.asarray(frozen_defect_density(params, t)),
        saturation=saturated_defect_density(x),
        t0_over_that=x,
    )


def dynamical_phase(n: int, t: float, t_hat: float) -> float:
    """Phase (n + 1/2)(2/3)((t/t_hat)^(3/2) - 1) accumulated since freeze-out."""
    if t < t_hat:
        raise DomainError(f"phase defined only after freeze-out, t={t!r} < t_hat={t_hat!r}")
    return (n + 0.5) * (2.0 / 3.0) * ((t / t_hat) ** 1.5 - 1.0)


def dynamical_phases(n, t: float, t_hat: float) -> np.ndarray:
    if t < t_hat:
        raise DomainError(f"phase defined only after freeze-out, t={t!r} < t_hat={t_hat!r}")
    n = np.asarray(n, dtype=float)
    return (n + 0.5) * (2.0 / 3.0) * ((t / t_hat) ** 1.5 - 1.0)


def recursion_times(t_hat: float, k_max: int) -> np.ndarray:
    """Times t_k = (1 + 3 k pi / 2)^(2/3) t_hat, k = 0..k_max, at which all phases realign."""
    k = np.arange(int(k_max) + 1)
    return (1.0 + 1.5 * k * math.pi) ** (2.0 / 3.0) * t_hat


def _converged_expansion(state: GaussianHermiteState, basis_omega: float, n_max, tol: float):
    if n_max is not None:
        coeffs = expand_in_snapshot_basis(state, basis_omega, n_max)
        weight = float(np.sum(np.abs(coeffs) ** 2))
        return coeffs, weight
    n_try = 31
    while True:
        coeffs = expand_in_snapshot_basis(state, basis_omega, n_try)
        cum = np.cumsum(np.abs(coeffs) ** 2)
        hit = np.nonzero(cum >= 1.0 - tol)[0]
        if hit.size:
            n = int(hit[0]) | 1
            return coeffs[: n + 1], float(cum[n])
        if n_try >= N_MAX_CAP:
            raise TruncationError(
                f"weight {cum[-1]:.3e} below 1-{tol:g} at order {N_MAX_CAP}; "
                "the frozen state is too wide for the snapshot basis"
            )
        n_try = min(2 * n_try + 1, N_MAX_CAP)


@dataclass(frozen=True)
class KZState:
    """Phased superposition sum_n c_n exp(-i Omega_n(t)) u^n(t) at one time."""

    params: ModelParams
    t: float
    basis_omega: float
    coefficients: np.ndarray
    weight: float

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def amplitudes(self) -> np.ndarray:
        n = np.arange(self.n_max + 1)
        return self.coefficients * np.exp(-1j * dynamical_phases(n, self.t, self.params.t_hat))

    def wavefunction(self, S) -> np.ndarray:
        amp = self.amplitudes()
        S = np.asarray(S, dtype=float)
        out = np.zeros(S.shape, dtype=complex)
        for n in range(1, self.n_max + 1, 2):
            if amp[n] != 0:
                out += amp[n] * GaussianHermiteState(n, self.basis_omega)(S)
        return out

    def fidelity(self, reference_omega: float) -> float:
        """|<u^1_ref|psi_KZ(t)>|^2 against the n = 1 state of real width ``reference_omega``."""
        ref = GaussianHermiteState(1, reference_omega)
        # d_n = <u^1_ref|u^n_t> is real, equal to <u^n_t|u^1_ref>
        d = expand_in_snapshot_basis(ref, self.basis_omega, self.n_max).real
        return float(abs(np.dot(d, self.amplitudes())) ** 2)

    def ground_state_fidelity(self) -> float:
        return self.fidelity(self.basis_omega)

    def renormalized_fidelity(self) -> float:
        # delta*t rather than field_at: for t0 > t_hat the formal state predates t0
        H_R = renormalized_field(self.params, self.params.delta * self.t)
        return self.fidelity(static_omega(self.params, H_R))


def kz_state_at(params: ModelParams, t: float, n_max: int | None = None, tol: float = 1e-8) -> KZState:
    """Adiabatic-impulse state at a post-freeze-out time ``t``.

    Expands the frozen state u^1(t0) in the snapshot basis at freeze-out.  The
    same construction is applied whatever the ratio t0/t_hat; for t0 >= t_hat
    it is the formal continuation of the frozen state rather than the
    adiabatically followed one.  With ``n_max`` omitted, the smallest odd
    order holding weight >= 1 - ``tol`` is used.
    """
    t_hat = params.t_hat
    if t < t_hat:
        raise DomainError(f"t={t!r} precedes freeze-out t_hat={t_hat!r}")
    if not params.H0 > 0:
        raise DomainError("frozen state needs H0 > 0")
    frozen = snapshot_eigenstate(params, params.H0, 1)
    basis_omega = static_omega(params, params.delta * t_hat)
    coeffs, weight = _converged_expansion(frozen, basis_omega, n_max, tol)
    # the snapshot basis follows H(t): only its width changes, not the coefficients
    return KZState(
        params=params,
        t=float(t),
        basis_omega=static_omega(params, params.delta * t),
        coefficients=coeffs,
        weight=weight,
    )
