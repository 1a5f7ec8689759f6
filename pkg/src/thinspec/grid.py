"""Brute-force Crank-Nicolson solver for the continuum model on the half-line.

The wavefunction is held on interior points S_i = i dx, i = 1..n_points, with
psi = 0 at S = 0 and at S_max = (n_points + 1) dx.  The kinetic term uses
either the 3-point Laplacian or the 4th-order 5-point one; for the latter the
ghost value psi(-dx) = -psi(dx) (odd reflection, the continuation of a state
vanishing at S = 0) folds into the first diagonal entry.  The discrete
Hamiltonian stays real symmetric, so each Cayley step is exactly unitary in the
dx-weighted norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np
from scipy.linalg import eig_banded

from .core import DomainError, ModelParams
from .series import TimeSeries
from .static import GaussianHermiteState

# Cutoff adequacy: exp(-Re omega S_max^2 / 2) must stay below this.
CUTOFF_TAIL = 1e-12
# Minimum resolution of the fastest local oscillation.
POINTS_PER_WAVELENGTH = 20


class CutoffError(RuntimeError):
    """The state reached the outer boundary of the grid."""


@dataclass(frozen=True)
class GridConfig:
    """Uniform half-line grid with fixed-zero ends.

    Parameters
    ----------
    S_max : float
        Outer boundary.
    n_points : int
        Number of interior points.
    dt : float
        Largest time step; each output interval is split into equal sub-steps.
    stencil : int
        3 (second order) or 5 (fourth order) point Laplacian.
    """

    S_max: float
    n_points: int
    dt: float
    stencil: int = 5

    def __post_init__(self):
        if not self.S_max > 0:
            raise DomainError(f"S_max must be positive, got {self.S_max!r}")
        if int(self.n_points) != self.n_points or self.n_points < 5:
            raise DomainError(f"n_points must be an integer >= 5, got {self.n_points!r}")
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt!r}")
        if self.stencil not in (3, 5):
            raise DomainError(f"stencil must be 3 or 5, got {self.stencil!r}")

    @classmethod
    def from_spacing(cls, S_max: float, dx: float, dt: float, stencil: int = 5) -> "GridConfig":
        return cls(S_max=S_max, n_points=int(round(S_max / dx)) - 1, dt=dt, stencil=stencil)

    @property
    def dx(self) -> float:
        return self.S_max / (self.n_points + 1)

    @property
    def S(self) -> np.ndarray:
        return self.dx * np.arange(1, self.n_points + 1)


def _stencil_bands(config: GridConfig):
    """(diag, off1, off2) of -d^2/dS^2 on the interior points."""
    n, dx2 = config.n_points, config.dx**2
    if config.stencil == 3:
        return np.full(n, 2.0 / dx2), -1.0 / dx2, 0.0
    d = np.full(n, 30.0 / (12 * dx2))
    d[0] = d[-1] = 29.0 / (12 * dx2)
    return d, -16.0 / (12 * dx2), 1.0 / (12 * dx2)


@numba.njit(cache=True)
def _cn_advance(psi, V, lap_d, lap_e, lap_f, kin0, kin1, t_start, dt, nsteps, hbar):
    """Advance ``psi`` in place by ``nsteps`` Cayley steps.

    H(t) = kin(t) * L + diag(V) with kin(t) = kin0 + kin1 * t evaluated at
    the step midpoint; L is symmetric with bands (lap_d, lap_e, lap_f).
    The pentadiagonal system is solved by LU without pivoting, which is
    stable because 1 + i h H has a positive definite Hermitian part.
    """
    n = psi.shape[0]
    d = np.empty(n, np.complex128)
    rhs = np.empty(n, np.complex128)
    u0 = np.empty(n, np.complex128)
    u1 = np.empty(n, np.complex128)
    h = 0.5j * dt / hbar
    for it in range(nsteps):
        c = kin0 + kin1 * (t_start + (it + 0.5) * dt)
        e = h * c * lap_e
        f = h * c * lap_f
        for i in range(n):
            hd = c * lap_d[i] + V[i]
            s = hd * psi[i]
            if i > 0:
                s += c * lap_e * psi[i - 1]
            if i < n - 1:
                s += c * lap_e * psi[i + 1]
            if i > 1:
                s += c * lap_f * psi[i - 2]
            if i < n - 2:
                s += c * lap_f * psi[i + 2]
            rhs[i] = psi[i] - h * s
            d[i] = 1.0 + h * hd
        # forward elimination; U has bands (u0, u1, f)
        for i in range(n):
            a1 = e if i > 0 else 0j
            di = d[i]
            ui1 = e if i < n - 1 else 0j
            if i > 1:
                m2 = f / u0[i - 2]
                a1 = a1 - m2 * u1[i - 2]
                di = di - m2 * f
                rhs[i] -= m2 * rhs[i - 2]
            if i > 0:
                m1 = a1 / u0[i - 1]
                di = di - m1 * u1[i - 1]
                if i < n - 1:
                    ui1 = ui1 - m1 * f
                rhs[i] -= m1 * rhs[i - 1]
            u0[i] = di
            u1[i] = ui1
        for i in range(n - 1, -1, -1):
            s = rhs[i]
            if i < n - 1:
                s -= u1[i] * psi[i + 1]
            if i < n - 2:
                s -= f * psi[i + 2]
            psi[i] = s / u0[i]


@dataclass
class GridResult:
    """Grid wavefunctions at the output times plus scalar diagnostics."""

    config: GridConfig
    series: TimeSeries
    psi: np.ndarray

    @property
    def S(self) -> np.ndarray:
        return self.config.S

    @property
    def max_norm_drift(self) -> float:
        return float(np.max(np.abs(self.series["norm"] - self.series["norm"][0])))


def _norm(psi, dx):
    return dx * np.sum(np.abs(psi) ** 2, axis=-1)


def _width_estimate(psi, S, dx, n):
    # an order-n state of real width a has <S^2> = (n + 1/2) / a
    s2 = dx * np.sum(np.abs(psi) ** 2 * S**2, axis=-1) / _norm(psi, dx)
    return (n + 0.5) / s2


def _check_resolution(initial: GaussianHermiteState, config: GridConfig):
    a, b = initial.omega.real, initial.omega.imag
    s_eff = min(config.S_max, initial.support)
    k = math.sqrt(2 * initial.n + 1) * math.sqrt(a) + abs(b) * s_eff
    per_wavelength = 2 * math.pi / (k * config.dx)
    if per_wavelength < POINTS_PER_WAVELENGTH:
        raise DomainError(
            f"grid resolves the initial state with {per_wavelength:.1f} points per wavelength; "
            f"need {POINTS_PER_WAVELENGTH} (reduce dx)"
        )


def _run(params, config, initial, times, substeps, frozen):
    S = config.S
    dx = config.dx
    lap_d, lap_e, lap_f = _stencil_bands(config)
    V = (params.J / params.N) * S**2
    kin_scale = params.N / 4.0  # (H N / 4 hbar^2) Pi^2 = -(H N / 4) d^2/dS^2
    if frozen:
        kin0, kin1 = kin_scale * params.H0, 0.0
    else:
        kin0, kin1 = 0.0, kin_scale * params.delta
    psi = np.ascontiguousarray(initial(S), dtype=np.complex128)
    out = np.empty((len(times), len(S)), dtype=np.complex128)
    out[0] = psi
    for i in range(1, len(times)):
        m = int(substeps[i - 1])
        h = (times[i] - times[i - 1]) / m
        _cn_advance(psi, V, lap_d, lap_e, lap_f, kin0, kin1, times[i - 1], h, m, params.hbar)
        out[i] = psi
    return out


def _result(params, config, initial, times, psi):
    S, dx = config.S, config.dx
    a_est = _width_estimate(psi, S, dx, initial.n)
    tail = np.exp(-a_est * config.S_max**2 / 2)
    bad = np.nonzero(tail >= CUTOFF_TAIL)[0]
    if bad.size:
        i = int(bad[0])
        need = math.sqrt(-2 * math.log(CUTOFF_TAIL) / a_est[i])
        raise CutoffError(
            f"state too wide for S_max={config.S_max} at t={times[i]!r}; use S_max >= {need:.1f}"
        )
    ts = TimeSeries(times)
    ts.add("t_over_that", times / params.t_hat)
    ts.add("norm", _norm(psi, dx))
    ts.add("re_omega_estimate", a_est)
    ts.add("cutoff_tail", tail)
    return GridResult(config, ts, psi)


def _output_times(params, t_end, times):
    t0 = params.t0
    if times is None:
        times = np.array([t0, t_end])
    times = np.asarray(times, dtype=float)
    if times[0] != t0:
        times = np.concatenate([[t0], times])
    if np.any(np.diff(times) <= 0) or times[-1] > t_end:
        raise DomainError("output times must increase from t0 and not pass t_end")
    return times


def grid_evolve(
    params: ModelParams,
    config: GridConfig,
    initial: GaussianHermiteState,
    t_end: float,
    times=None,
    *,
    frozen: bool = False,
) -> GridResult:
    """Integrate i hbar psi_t = [-(H N / 4) psi_SS + (J/N) S^2 psi] from t0.

    ``times`` are output times (t0 is prepended if absent).  Each interval is
    split into the fewest equal sub-steps no longer than ``config.dt``.

    Raises
    ------
    CutoffError
        If the state's estimated width violates the cutoff-adequacy bound at
        any output time.
    """
    if initial.n % 2 == 0:
        raise DomainError("initial state must vanish at S = 0 (odd n)")
    if not t_end > params.t0:
        raise DomainError(f"t_end={t_end!r} must exceed t0={params.t0!r}")
    _check_resolution(initial, config)
    times = _output_times(params, t_end, times)
    substeps = np.maximum(1, np.ceil(np.diff(times) / config.dt - 1e-9)).astype(int)
    psi = _run(params, config, initial, times, substeps, frozen)
    return _result(params, config, initial, times, psi)


def romberg_evolve(
    params: ModelParams,
    config: GridConfig,
    initial: GaussianHermiteState,
    t_end: float,
    times=None,
    *,
    levels: int = 3,
    frozen: bool = False,
) -> tuple[GridResult, list[GridResult]]:
    """Runs at dt, dt/2, ..., dt/2^(levels-1) and their Romberg extrapolation in dt.

    The Cayley error expands in even powers of dt, so the table eliminates
    dt^2, dt^4, ... in turn.  Returns (extrapolated, raw levels).
    """
    if levels < 1:
        raise DomainError("need at least one level")
    if initial.n % 2 == 0:
        raise DomainError("initial state must vanish at S = 0 (odd n)")
    _check_resolution(initial, config)
    times = _output_times(params, t_end, times)
    base = np.maximum(1, np.ceil(np.diff(times) / config.dt - 1e-9)).astype(int)
    raw = []
    for lev in range(levels):
        psi = _run(params, config, initial, times, base * 2**lev, frozen)
        raw.append(_result(params, config, initial, times, psi))
    table = [r.psi for r in raw]
    for order in range(1, levels):
        w = 4.0**order
        table = [(w * table[i + 1] - table[i]) / (w - 1) for i in range(len(table) - 1)]
    best = _result(params, config, initial, times, table[0])
    return best, raw


def l2_distance(config: GridConfig, psi_a, psi_b) -> np.ndarray:
    """dx-weighted L2 distance along the last axis."""
    return np.sqrt(config.dx * np.sum(np.abs(np.asarray(psi_a) - np.asarray(psi_b)) ** 2, axis=-1))


def observed_order(errors, ratio: float = 2.0) -> np.ndarray:
    """Convergence orders log(e_k / e_{k+1}) / log(ratio) from successive refinements."""
    e = np.asarray(errors, dtype=float)
    return np.log(e[:-1] / e[1:]) / math.log(ratio)


def grid_eigensolve(params: ModelParams, H: float, config: GridConfig, count: int = 3):
    """Lowest ``count`` eigenpairs of the discretised Hamiltonian at field H.

    Eigenvectors are normalised in the dx-weighted norm and signed positive
    near S = 0.
    """
    if not H > 0:
        raise DomainError(f"field must be positive, got {H!r}")
    lap_d, lap_e, lap_f = _stencil_bands(config)
    c = H * params.N / 4.0
    n = config.n_points
    S = config.S
    # upper banded storage: row -1 is the diagonal
    bands = np.zeros((3, n))
    bands[2] = c * lap_d + (params.J / params.N) * S**2
    bands[1, 1:] = c * lap_e
    bands[0, 2:] = c * lap_f
    w, v = eig_banded(bands, select="i", select_range=(0, count - 1))
    v = v / math.sqrt(config.dx)
    v *= np.sign(v[0])[None, :]
    return w, v
