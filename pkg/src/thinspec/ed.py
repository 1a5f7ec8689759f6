"""Exact diagonalisation of the Lieb-Mattis model in the M = 0 sector.

With both sublattice spins at their maximum S_A = S_B = j = N/4, the states
|S, M=0> for S = 0..N/2 span the sector reached from the singlet by the
staggered field.  There the model is tridiagonal:

    E(S) = (J/N) [S(S+1) - 2j(j+1)],
    <S+1| S_A^z - S_B^z |S> = (S+1) sqrt(((2j+1)^2 - (S+1)^2) / ((2S+1)(2S+3))),

and the field couples only neighbouring S.  N must be even; N = 2 mod 4
gives half-integer j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, eigvalsh_tridiagonal, null_space, solve_banded
from scipy.signal import find_peaks

from .core import DomainError, ModelParams
from .series import TimeSeries

# Dense product-basis construction is only meant for cross-checks.
BRUTE_FORCE_MAX_N = 40


@dataclass(frozen=True)
class EDBasis:
    N: int
    j: float
    S: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.S)


@dataclass(frozen=True)
class EDOperator:
    """Exchange energies E(S) and staggered-moment couplings O(S, S+1)."""

    basis: EDBasis
    energy: np.ndarray
    coupling: np.ndarray

    def hamiltonian(self, H: float) -> tuple[np.ndarray, np.ndarray]:
        """Tridiagonal (diagonal, off-diagonal) of E - H (S_A^z - S_B^z)."""
        return self.energy, -H * self.coupling

    def staggered_moment(self, psi) -> float:
        """<S_A^z - S_B^z> in state ``psi``."""
        return float(2.0 * np.real(np.sum(np.conj(psi[:-1]) * self.coupling * psi[1:])))

    def order_parameter(self, psi) -> float:
        """Staggered magnetisation 2 <S_A^z - S_B^z>."""
        return 2.0 * self.staggered_moment(psi)

    def energy_of(self, psi, H: float) -> float:
        e = np.sum(self.energy * np.abs(psi) ** 2)
        return float(e - H * self.staggered_moment(psi))


def _check_N(N) -> int:
    if int(N) != N or N < 4 or N % 2:
        raise DomainError(f"N must be an even integer >= 4, got {N!r}")
    return int(N)


def wigner_eckart_couplings(N: int) -> np.ndarray:
    """Closed-form <S+1, 0| S_A^z - S_B^z |S, 0>, S = 0..N/2 - 1."""
    N = _check_N(N)
    j = N / 4.0
    s = np.arange(N // 2, dtype=float)
    return (s + 1) * np.sqrt(((2 * j + 1) ** 2 - (s + 1) ** 2) / ((2 * s + 1) * (2 * s + 3)))


def build_basis_and_operators(N: int, J: float = 1.0) -> tuple[EDBasis, EDOperator]:
    N = _check_N(N)
    if not J > 0:
        raise DomainError(f"J must be positive, got {J!r}")
    j = N / 4.0
    S = np.arange(N // 2 + 1, dtype=float)
    basis = EDBasis(N=N, j=j, S=S)
    energy = (J / N) * (S * (S + 1) - 2 * j * (j + 1))
    return basis, EDOperator(basis, energy, wigner_eckart_couplings(N))


def _spin_matrices(j: float):
    m = np.arange(j, -j - 1e-9, -1.0)  # descending: index 0 is m = j
    sz = np.diag(m)
    # <m+1|S^+|m> = sqrt(j(j+1) - m(m+1))
    up = np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1))
    sp = np.diag(up, 1)
    return m, sz, sp


def clebsch_gordan_couplings(N: int) -> np.ndarray:
    """<S+1, 0| S_A^z - S_B^z |S, 0> from explicit states in the product basis.

    Each |S, S> is the null vector of the total raising operator in the
    M = S block, fixed in sign by the Condon-Shortley rule (positive
    coefficient on m_A = j), then lowered S times to M = 0.
    """
    N = _check_N(N)
    if N > BRUTE_FORCE_MAX_N:
        raise DomainError(f"brute-force construction limited to N <= {BRUTE_FORCE_MAX_N}")
    j = N / 4.0
    m, sz, sp = _spin_matrices(j)
    d = len(m)
    eye = np.eye(d)
    Sp = np.kron(sp, eye) + np.kron(eye, sp)
    Sm = Sp.T
    mA = np.repeat(m, d)
    mB = np.tile(m, d)
    M = mA + mB
    stag = mA - mB

    states = []
    for S in range(N // 2 + 1):
        block = np.nonzero(np.isclose(M, S))[0]
        above = np.nonzero(np.isclose(M, S + 1))[0]
        raising = Sp[np.ix_(above, block)] if above.size else np.zeros((1, block.size))
        ns = null_space(raising)
        if ns.shape[1] != 1:
            raise RuntimeError(f"highest-weight space of S={S} has dimension {ns.shape[1]}")
        v = np.zeros(d * d)
        v[block] = ns[:, 0]
        lead = block[np.argmax(mA[block])]
        if v[lead] < 0:
            v = -v
        for _ in range(S):
            v = Sm @ v
            v /= np.linalg.norm(v)
        states.append(v)
    return np.array([states[s + 1] @ (stag * states[s]) for s in range(N // 2)])


def wigner_eckart_vs_clebsch_gordan(N: int) -> float:
    """Largest absolute difference between the closed form and the explicit construction."""
    return float(np.max(np.abs(wigner_eckart_couplings(N) - clebsch_gordan_couplings(N))))


def ed_ground_state(ops: EDOperator, H: float) -> tuple[np.ndarray, float]:
    """Lowest eigenpair at field H; the vector is signed so its largest entry is positive."""
    if H < 0:
        raise DomainError(f"field must be non-negative, got {H!r}")
    d, e = ops.hamiltonian(H)
    w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, 0))
    vec = v[:, 0]
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    return vec, float(w[0])


def ed_observables(ops: EDOperator, psi, H: float) -> dict:
    gs, _ = ed_ground_state(ops, H)
    return {
        "order_parameter": ops.order_parameter(psi),
        "defect_density": 1.0 - abs(np.vdot(gs, psi)) ** 2,
        "energy": ops.energy_of(psi, H),
    }


class _CayleyStepper:
    """Implicit-midpoint step (1 + i dt H/2)^-1 (1 - i dt H/2), exactly unitary.

    The Hamiltonian is shifted by the time-dependent floor E(0) - H lambda_max(O),
    which alters only the global phase but removes the large common phase
    rate that would otherwise dominate the step error.
    """

    def __init__(self, ops: EDOperator, params: ModelParams):
        self.E = ops.energy - ops.energy[0]
        self.O = ops.coupling
        self.lam = float(eigvalsh_tridiagonal(np.zeros(len(self.E)), self.O, select="i",
                                              select_range=(len(self.E) - 1, len(self.E) - 1))[0])
        self.delta = params.delta
        self.hbar = params.hbar
        self.ab = np.zeros((3, len(self.E)), dtype=complex)

    def __call__(self, psi, t: float, dt: float):
        Hm = self.delta * (t + 0.5 * dt)
        h = 0.5j * dt / self.hbar
        diag = self.E + Hm * self.lam
        off = -Hm * self.O
        ab = self.ab
        ab[1] = 1 + h * diag
        ab[0, 1:] = h * off
        ab[2, :-1] = h * off
        rhs = (1 - h * diag) * psi
        rhs[:-1] -= h * off * psi[1:]
        rhs[1:] -= h * off * psi[:-1]
        return solve_banded((1, 1), ab, rhs, overwrite_b=True, check_finite=False)


@dataclass
class EDSeries:
    series: TimeSeries
    final_state: np.ndarray
    steps: int
    max_norm_drift: float


def ed_evolve(
    params: ModelParams,
    t_end: float,
    times=None,
    *,
    n_samples: int = 2001,
    tol: float = 1e-7,
    dt_initial: float | None = None,
) -> EDSeries:
    """Evolve the ground state at t0 under the ramp and sample observables.

    Steps are controlled by step doubling: a step of dt is compared with two
    of dt/2 and accepted when their difference is below ``tol``; the two
    half-steps are kept.  Output times are hit exactly.
    """
    t0 = params.t0
    if not t_end > t0:
        raise DomainError(f"t_end={t_end!r} must exceed t0={t0!r}")
    times = np.linspace(t0, t_end, n_samples) if times is None else np.asarray(times, dtype=float)
    if times.min() < t0 or times.max() > t_end or np.any(np.diff(times) <= 0):
        raise DomainError("output times must be increasing inside [t0, t_end]")

    _, ops = build_basis_and_operators(params.N, params.J)
    step = _CayleyStepper(ops, params)
    psi, _ = ed_ground_state(ops, params.H0)
    psi = psi.astype(complex)
    dt = dt_initial or 1e-3 * params.t_hat
    t = t0
    n_steps = 0
    cols = {k: np.empty(len(times)) for k in ("order_parameter", "defect_density", "energy", "norm_drift")}

    for i, t_out in enumerate(times):
        while t < t_out:
            h = min(dt, t_out - t)
            full = step(psi, t, h)
            half = step(step(psi, t, 0.5 * h), t + 0.5 * h, 0.5 * h)
            err = float(np.linalg.norm(full - half))
            # cubic local error
            factor = min(2.0, max(0.2, 0.9 * (tol / max(err, 1e-300)) ** (1.0 / 3.0)))
            if err <= tol:
                psi = half
                landed = h == t_out - t
                t = t_out if landed else t + h
                n_steps += 1
                dt = max(dt, h * factor) if landed else h * factor
            else:
                dt = h * factor
                if dt < 1e-14 * max(abs(t), 1.0):
                    raise RuntimeError(f"step size underflow at t={t!r}")
        H = params.delta * t_out if t_out > t0 else params.H0
        obs = ed_observables(ops, psi, H)
        for k, v in obs.items():
            cols[k][i] = v
        cols["norm_drift"][i] = abs(np.linalg.norm(psi) - 1.0)

    ts = TimeSeries(times)
    ts.add("t_over_that", times / params.t_hat)
    ts.add("field", np.where(times > t0, params.delta * times, params.H0), "energy")
    for k in ("order_parameter", "defect_density", "energy", "norm_drift"):
        ts.add(k, cols[k], "energy" if k == "energy" else "1")
    return EDSeries(ts, psi, n_steps, float(cols["norm_drift"].max()))


def ed_peak_times(series: EDSeries, prominence_fraction: float = 0.02) -> np.ndarray:
    """Times of order-parameter maxima, in units of t_hat."""
    op = series.series["order_parameter"]
    scale = max(float(np.ptp(op)), 1e-300)
    pk, _ = find_peaks(op, prominence=prominence_fraction * scale)
    return series.series["t_over_that"][pk]


def ed_static_order_parameter(params: ModelParams, H: float) -> float:
    _, ops = build_basis_and_operators(params.N, params.J)
    gs, _ = ed_ground_state(ops, H)
    return ops.order_parameter(gs)


def tower_gap(params: ModelParams) -> float:
    """Gap E(1) - E(0) = 2J/N of the Anderson tower at zero field."""
    return 2.0 * params.J / params.N
