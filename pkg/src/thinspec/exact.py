"""Exact Gaussian evolution under the ramped continuum Hamiltonian.

A Gaussian-Hermite state stays Gaussian-Hermite with a complex width obeying
the Riccati flow

    d omega / dt = i [2J / (N hbar) - N H(t) omega^2 / (2 hbar)].

It is integrated through the equivalent linear system chi' = p / m(t),
p' = -k chi with omega = -i p / (hbar chi), which stays regular where the
Riccati form is stiff.  Quantal phase: d phi / dt = N H Re(omega) / (2 hbar).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.signal import find_peaks

from .core import ContinuumHamiltonian, DomainError, ModelParams, renormalized_field, static_omega
from .series import TimeSeries
from .static import gaussian_hermite, overlap_n1_array

DEFAULT_RTOL = 1e-10
# Comb peaks must stand out by this factor in Re(omega) (log prominence ln 2).
DEFAULT_PROMINENCE = math.log(2.0)


class IntegrationError(RuntimeError):
    """The integrator failed; ``t_fail`` is the last time reached."""

    def __init__(self, message: str, t_fail: float):
        super().__init__(f"{message} (at t={t_fail!r})")
        self.t_fail = t_fail


class Reference(enum.Enum):
    INSTANTANEOUS = "instantaneous"
    RENORMALIZED = "renormalized"


@dataclass(frozen=True)
class RiccatiState:
    t: float
    omega: complex
    phi: float

    def wavefunction(self, S, n: int = 1):
        return gaussian_hermite(n, self.omega, self.phi, S)


def riccati_rhs(params: ModelParams, H: float, omega: complex) -> complex:
    hb = params.hbar
    return 1j * (2.0 * params.J / (params.N * hb) - params.N * H * omega * omega / (2.0 * hb))


def riccati_components(params: ModelParams, H: float, a: float, b: float) -> tuple[float, float]:
    """(da/dt, db/dt) for omega = a + ib; da/dt vanishes exactly where b does."""
    hb = params.hbar
    da = params.N * H * a * b / hb
    db = 2.0 * params.J / (params.N * hb) - params.N * H * (a * a - b * b) / (2.0 * hb)
    return da, db


@dataclass
class ExactTrajectory:
    """Samples of omega(t) and phi(t) plus a dense interpolant of the linear system."""

    params: ModelParams
    t: np.ndarray
    omega: np.ndarray
    phi: np.ndarray
    accepted_t: np.ndarray
    min_accepted_re_omega: float
    frozen: bool
    _dense: object = None

    def __len__(self):
        return len(self.t)

    def state(self, i: int) -> RiccatiState:
        return RiccatiState(float(self.t[i]), complex(self.omega[i]), float(self.phi[i]))

    def omega_at(self, t):
        y = self._dense(t)
        return -1j * y[1] / (self.params.hbar * y[0])

    def phi_at(self, t):
        return self._dense(t)[2].real

    def field(self, t=None):
        t = self.t if t is None else np.asarray(t, dtype=float)
        if self.frozen:
            return np.full_like(t, self.params.H0)
        return self.params.delta * t


def _field_fn(params: ModelParams, frozen: bool):
    if frozen:
        return lambda t: params.H0
    return lambda t: params.delta * t


def evolve_exact(
    params: ModelParams,
    t_end: float,
    times=None,
    *,
    n_samples: int = 2001,
    rtol: float = DEFAULT_RTOL,
    frozen: bool = False,
    max_step: float = np.inf,
) -> ExactTrajectory:
    """Integrate from the snapshot ground state at t0 to ``t_end``.

    Parameters
    ----------
    times : array_like, optional
        Output times inside [t0, t_end]; default is ``n_samples`` uniform points.
    frozen : bool
        Hold the field at H0 (stationarity check) instead of ramping it.

    Raises
    ------
    IntegrationError
        If the integrator stops early or Re(omega) loses positivity.
    """
    if not params.H0 > 0:
        raise DomainError("exact evolution starts from a finite width and needs H0 > 0")
    t0 = params.t0
    if not t_end > t0:
        raise DomainError(f"t_end={t_end!r} must exceed t0={t0!r}")
    times = np.linspace(t0, t_end, n_samples) if times is None else np.asarray(times, dtype=float)
    if times.min() < t0 or times.max() > t_end:
        raise DomainError("output times must lie inside [t0, t_end]")

    hb = params.hbar
    k = ContinuumHamiltonian(params).stiffness
    N = params.N
    H = _field_fn(params, frozen)

    def rhs(t, y):
        chi, p = y[0], y[1]
        inv_m = N * H(t) / (2.0 * hb * hb)
        re_omega = (p / chi).imag / hb
        return np.array([p * inv_m, -k * chi, hb * re_omega * inv_m + 0j])

    p0 = 1j * hb * static_omega(params, params.H0)
    y0 = np.array([1.0 + 0j, p0, 0j])
    atol = rtol * 1e-3 * np.array([1.0, abs(p0), 1.0])
    sol = solve_ivp(rhs, (t0, t_end), y0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True, max_step=max_step)
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]))
    re_acc = (sol.y[1] / sol.y[0]).imag / hb
    if not np.all(re_acc > 0):
        i = int(np.argmax(~(re_acc > 0)))
        raise IntegrationError("Re(omega) lost positivity", float(sol.t[i]))

    y = sol.sol(times)
    omega = -1j * y[1] / (hb * y[0])
    return ExactTrajectory(
        params=params,
        t=times,
        omega=omega,
        phi=y[2].real,
        accepted_t=sol.t,
        min_accepted_re_omega=float(re_acc.min()),
        frozen=frozen,
        _dense=sol.sol,
    )


def evolve_riccati(params: ModelParams, t_end: float, times, *, rtol: float = DEFAULT_RTOL):
    """Integrate the Riccati equation for omega directly (cross-check route).

    Returns the complex widths at ``times``.
    """
    times = np.asarray(times, dtype=float)
    w0 = static_omega(params, params.H0)

    def rhs(t, y):
        return [riccati_rhs(params, params.delta * t, y[0])]

    sol = solve_ivp(rhs, (params.t0, t_end), [complex(w0)], method="DOP853", t_eval=times,
                    rtol=rtol, atol=rtol * 1e-3 * w0)
    if sol.status != 0:
        raise IntegrationError(sol.message, float(sol.t[-1]) if sol.t.size else params.t0)
    return sol.y[0]


def wavefunction_at(traj: ExactTrajectory, i: int, S, n: int = 1):
    return traj.state(i).wavefunction(S, n)


def energy_expectation(params: ModelParams, omega, H):
    """Energy expectation of an n = 1 state with width ``omega`` at field ``H``.

    Uses <Pi^2> = 3 hbar^2 |omega|^2 / (2 Re omega) and <S^2> = 3 / (2 Re omega);
    equals (3/2) sqrt(J H) on the static state.
    """
    omega = np.asarray(omega, dtype=complex)
    H = np.asarray(H, dtype=float)
    a = omega.real
    kin = H * params.N / 4.0 * 1.5 * np.abs(omega) ** 2 / a
    pot = params.J / params.N * 1.5 / a
    return kin + pot


def reference_widths(params: ModelParams, H, reference: Reference) -> np.ndarray:
    H = np.asarray(H, dtype=float)
    if reference is Reference.RENORMALIZED:
        if not params.H0 > 0:
            raise DomainError("renormalized reference needs H0 > 0")
        H = np.array([renormalized_field(params, h) for h in np.ravel(H)]).reshape(H.shape)
    return np.sqrt(4.0 * params.J / H) / params.N


def classical_fidelity(traj: ExactTrajectory, reference: Reference = Reference.INSTANTANEOUS) -> np.ndarray:
    """|<u^1_ref(t)|psi(t)>|^2 along the trajectory."""
    ref = reference_widths(traj.params, traj.field(), reference)
    return overlap_n1_array(ref, traj.omega)


def defect_density(traj: ExactTrajectory) -> np.ndarray:
    return 1.0 - classical_fidelity(traj, Reference.INSTANTANEOUS)


def order_parameter(params: ModelParams, omega) -> np.ndarray:
    """Staggered magnetisation 2<S_A^z - S_B^z> of an n = 1 state.

    The sublattice-exchange operator shifts S by one unit, so its expectation
    is N <cos Pi>.  For the odd-extended Gaussian this is
    N (1 - s) exp(-s / 2) with s = |omega|^2 / (2 Re omega).
    """
    omega = np.asarray(omega, dtype=complex)
    s = np.abs(omega) ** 2 / (2.0 * omega.real)
    return params.N * (1.0 - s) * np.exp(-0.5 * s)


def comb_prediction_R(k) -> np.ndarray:
    """Asymptotic times (in t_hat) of the Re(omega) maxima, (13 pi/8 + 3 k pi / 2)^(2/3)."""
    return (13.0 * math.pi / 8.0 + 1.5 * math.pi * np.asarray(k, dtype=float)) ** (2.0 / 3.0)


def comb_prediction_I(k) -> np.ndarray:
    """Asymptotic times (in t_hat) of the classical returns, (7 pi/8 + 3 k pi / 2)^(2/3)."""
    return (7.0 * math.pi / 8.0 + 1.5 * math.pi * np.asarray(k, dtype=float)) ** (2.0 / 3.0)


@dataclass(frozen=True)
class CombReport:
    """Detected and predicted comb times, all in units of t_hat.

    ``t_R`` are Re(omega) maxima (narrow, singlet-like states), ``t_I`` are
    Re(omega) minima (classical Neel-like returns).  Each is refined to the
    zero of Im(omega) it sits on.  ``complete`` is False if fewer than
    ``k_max + 1`` events of either kind were found.
    """

    k_max: int
    t_R: np.ndarray
    t_I: np.ndarray
    predicted_R: np.ndarray
    predicted_I: np.ndarray
    deviation_R: np.ndarray
    deviation_I: np.ndarray
    im_zero_crossings: np.ndarray
    renormalized_fidelity_peaks: np.ndarray
    complete: bool

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.__dict__.items()}


def _refine_on_im_zero(traj: ExactTrajectory, i: int) -> float:
    t = traj.t
    im = traj.omega.imag
    lo, hi = max(i - 2, 0), min(i + 2, len(t) - 1)
    for j in range(lo, hi):
        if im[j] == 0.0:
            return float(t[j])
        if np.sign(im[j]) != np.sign(im[j + 1]):
            return float(brentq(lambda s: traj.omega_at(s).imag, t[j], t[j + 1], xtol=1e-14 * t[j + 1]))
    return float(t[i])


def _zero_crossings(traj: ExactTrajectory) -> np.ndarray:
    im = traj.omega.imag
    idx = np.nonzero(np.sign(im[:-1]) * np.sign(im[1:]) < 0)[0]
    t = traj.t
    return np.array([brentq(lambda s: traj.omega_at(s).imag, t[j], t[j + 1], xtol=1e-14 * t[j + 1]) for j in idx])


def detect_comb(traj: ExactTrajectory, k_max: int = 4, prominence: float = DEFAULT_PROMINENCE) -> CombReport:
    """Locate the frequency comb in Re(omega) and compare with the asymptotic law.

    Extrema are picked on ln Re(omega) with the given prominence, then refined
    to the enclosing zero of Im(omega): because dRe(omega)/dt is proportional
    to Re(omega) Im(omega), every extremum of Re(omega) is such a zero.
    """
    params = traj.params
    t_hat = params.t_hat
    need = float(comb_prediction_R(k_max)) * t_hat
    if traj.t[-1] < need:
        raise DomainError(f"trajectory ends at {traj.t[-1]!r}, comb up to k={k_max} needs {need!r}")
    log_re = np.log(traj.omega.real)
    peaks, _ = find_peaks(log_re, prominence=prominence)
    troughs, _ = find_peaks(-log_re, prominence=prominence)
    t_R = np.array([_refine_on_im_zero(traj, i) for i in peaks[: k_max + 1]]) / t_hat
    t_I = np.array([_refine_on_im_zero(traj, i) for i in troughs[: k_max + 1]]) / t_hat

    k = np.arange(k_max + 1)
    pred_R, pred_I = comb_prediction_R(k), comb_prediction_I(k)
    dev_R = np.full(k_max + 1, np.nan)
    dev_I = np.full(k_max + 1, np.nan)
    dev_R[: len(t_R)] = (t_R - pred_R[: len(t_R)]) / pred_R[: len(t_R)]
    dev_I[: len(t_I)] = (t_I - pred_I[: len(t_I)]) / pred_I[: len(t_I)]

    fid = classical_fidelity(traj, Reference.RENORMALIZED)
    fpk, _ = find_peaks(fid)
    return CombReport(
        k_max=int(k_max),
        t_R=t_R,
        t_I=t_I,
        predicted_R=pred_R,
        predicted_I=pred_I,
        deviation_R=dev_R,
        deviation_I=dev_I,
        im_zero_crossings=_zero_crossings(traj) / t_hat,
        renormalized_fidelity_peaks=traj.t[fpk] / t_hat,
        complete=bool(len(t_R) == k_max + 1 and len(t_I) == k_max + 1),
    )


def trajectory_series(traj: ExactTrajectory) -> TimeSeries:
    """All per-time observables of an exact trajectory."""
    p = traj.params
    ts = TimeSeries(traj.t)
    ts.add("t_over_that", traj.t / p.t_hat)
    ts.add("field", traj.field(), "energy")
    ts.add("re_omega", traj.omega.real)
    ts.add("im_omega", traj.omega.imag)
    ts.add("N_re_omega", p.N * traj.omega.real)
    ts.add("N_im_omega", p.N * traj.omega.imag)
    ts.add("phi", traj.phi, "rad")
    ts.add("fidelity", classical_fidelity(traj, Reference.INSTANTANEOUS))
    ts.add("defect_density", defect_density(traj))
    ts.add("renormalized_fidelity", classical_fidelity(traj, Reference.RENORMALIZED))
    ts.add("order_parameter", order_parameter(p, traj.omega))
    ts.add("energy", energy_expectation(p, traj.omega, traj.field()), "energy")
    return ts


def order_parameter_trace(traj: ExactTrajectory) -> TimeSeries:
    """Order parameter N<cos Pi> alongside the proxy N x renormalized fidelity."""
    p = traj.params
    ts = TimeSeries(traj.t)
    ts.add("t_over_that", traj.t / p.t_hat)
    ts.add("order_parameter", order_parameter(p, traj.omega))
    ts.add("renormalized_fidelity_proxy", p.N * classical_fidelity(traj, Reference.RENORMALIZED))
    return ts


def extrapolate_comb_times(values_by_ratio: dict) -> np.ndarray:
    """Linear extrapolation to t0/t_hat -> 0 from the two smallest ratios.

    ``values_by_ratio`` maps t0/t_hat to an array of comb times; finite-start
    corrections are linear in t0/t_hat.
    """
    ratios = sorted(values_by_ratio)
    if len(ratios) < 2:
        raise DomainError("need comb times at two ratios at least")
    x1, x2 = ratios[0], ratios[1]
    y1 = np.asarray(values_by_ratio[x1], dtype=float)
    y2 = np.asarray(values_by_ratio[x2], dtype=float)
    n = min(len(y1), len(y2))
    return y1[:n] - (y2[:n] - y1[:n]) * x1 / (x2 - x1)


def comb_sequence(params: ModelParams, ratios, k_max: int = 4, n_per_that: int = 2000, rtol: float = DEFAULT_RTOL):
    """Comb reports for a sequence of start ratios t0/t_hat at fixed J, delta, N."""
    reports = {}
    for x in ratios:
        q = params.with_t0_over_that(x)
        t_end = 1.05 * float(comb_prediction_R(k_max)) * q.t_hat
        n = int(n_per_that * t_end / q.t_hat) + 1
        traj = evolve_exact(q, t_end, n_samples=n, rtol=rtol)
        reports[x] = detect_comb(traj, k_max)
    return reports

