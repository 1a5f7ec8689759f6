"""Cross-checks between independent routes to the same quantity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .core import DomainError, ModelParams
from .ed import ed_evolve, ed_peak_times, wigner_eckart_vs_clebsch_gordan
from .exact import (Reference, classical_fidelity, comb_prediction_I, detect_comb,
                    evolve_exact)
from .grid import GridConfig, l2_distance, observed_order, romberg_evolve
from .kz import kz_state_at, recursion_times
from .static import GaussianHermiteState, gaussian_hermite
from .tolerances import DEFAULTS, GRID_REFERENCE


@dataclass
class CheckResult:
    name: str
    metric: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "metric": self.metric, "tolerance": self.tolerance,
                "status": "PASS" if self.passed else "FAIL", "details": self.details}


def _default(params, **kw):
    return params if params is not None else ModelParams(**kw)


def exact_vs_grid(params: ModelParams | None = None, tol: float | None = None, *,
                  t_end_over_that: float = 10.0, n_out: int = 21, grid: dict | None = None) -> CheckResult:
    """Max L2 distance between the Gaussian reconstruction and the grid solution."""
    params = _default(params, J=1.0, delta=1.0, N=100)
    if params.H0 == 0:
        params = params.with_t0_over_that(1e-2)
    tol = DEFAULTS["exact_vs_grid"] if tol is None else tol
    g = dict(GRID_REFERENCE, **(grid or {}))
    t_end = t_end_over_that * params.t_hat
    times = np.linspace(params.t0, t_end, n_out)
    traj = evolve_exact(params, t_end, times)
    config = GridConfig.from_spacing(g["S_max"], g["dx"], g["dt"], int(g["stencil"]))
    best, raw = romberg_evolve(params, config, GaussianHermiteState(1, traj.omega[0]), t_end, times,
                               levels=int(g["levels"]))
    exact_psi = np.array([gaussian_hermite(1, traj.omega[i], traj.phi[i], config.S) for i in range(n_out)])
    dist = l2_distance(config, best.psi, exact_psi)
    raw_err = [float(l2_distance(config, r.psi, exact_psi).max()) for r in raw]
    orders = observed_order(raw_err).tolist() if len(raw_err) > 1 else []
    metric = float(dist.max())
    return CheckResult("exact-vs-grid", metric, tol, metric < tol, {
        "params": params.to_dict(),
        "grid": g,
        "distance": dist.tolist(),
        "raw_level_errors": raw_err,
        "observed_orders": orders,
        "max_norm_drift": max(r.max_norm_drift for r in raw),
        "min_accepted_re_omega": traj.min_accepted_re_omega,
    })


def kz_vs_exact(params: ModelParams | None = None, tol: float | None = None, *, k_max: int = 5,
                t0_over_that: float = 2.0) -> CheckResult:
    """Recursion times against renormalized-fidelity peaks of the exact evolution."""
    params = _default(params, J=1.0, delta=1.0, N=100).with_t0_over_that(t0_over_that)
    tol = DEFAULTS["kz_vs_exact"] if tol is None else tol
    t_hat = params.t_hat
    t_k = recursion_times(t_hat, k_max)
    t_k = t_k[t_k > params.t0]
    t_end = 1.05 * t_k[-1]
    traj = evolve_exact(params, t_end, n_samples=int(4000 * t_end / t_hat) + 1)
    fid = classical_fidelity(traj, Reference.RENORMALIZED)
    pk, _ = find_peaks(fid)
    peaks = traj.t[pk]
    n = min(len(peaks), len(t_k))
    dev = (peaks[:n] - t_k[:n]) / t_k[:n]
    kz_fid = [kz_state_at(params, t).renormalized_fidelity() for t in t_k]
    metric = float(np.max(np.abs(dev))) if n else float("inf")
    return CheckResult("kz-vs-exact", metric, tol, bool(n == len(t_k) and metric < tol), {
        "params": params.to_dict(),
        "recursion_times_over_that": (t_k / t_hat).tolist(),
        "exact_peaks_over_that": (peaks[:n] / t_hat).tolist(),
        "relative_deviation": dev.tolist(),
        "kz_fidelity": kz_fid,
        "exact_peak_fidelity": fid[pk[:n]].tolist(),
    })


def ed_vs_continuum(params: ModelParams | None = None, tol: float | None = None, *, k_max: int = 2,
                    t0_over_that: float = 1e-2, n_samples: int = 3001) -> CheckResult:
    """ED order-parameter peak times against the classical-return law.

    Defaults: N = 400, J = 1, delta = 1e-2 (so H stays well below J over the
    window and the continuum description holds).
    """
    params = _default(params, J=1.0, delta=1e-2, N=400).with_t0_over_that(t0_over_that)
    tol = DEFAULTS["ed_vs_continuum"] if tol is None else tol
    pred = comb_prediction_I(np.arange(k_max + 1))
    t_end = 1.15 * pred[-1] * params.t_hat
    ed = ed_evolve(params, t_end, n_samples=n_samples, tol=DEFAULTS["ed_tol"])
    peaks = ed_peak_times(ed)
    n = min(len(peaks), k_max + 1)
    dev = (peaks[:n] - pred[:n]) / pred[:n]
    traj = evolve_exact(params, max(t_end, 1.05 * (13 * np.pi / 8 + 1.5 * np.pi * k_max) ** (2 / 3) * params.t_hat),
                        n_samples=8001)
    comb = detect_comb(traj, k_max)
    metric = float(np.max(np.abs(dev))) if n else float("inf")
    return CheckResult("ed-vs-continuum", metric, tol, bool(n == k_max + 1 and metric < tol), {
        "params": params.to_dict(),
        "ed_peaks_over_that": peaks[:n].tolist(),
        "predicted_over_that": pred.tolist(),
        "relative_deviation": dev.tolist(),
        "continuum_t_I_over_that": comb.t_I.tolist(),
        "ed_max_norm_drift": ed.max_norm_drift,
    })


def wigner_eckart_vs_clebsch_gordan_check(sizes=(4, 8), tol: float | None = None) -> CheckResult:
    tol = DEFAULTS["wigner_eckart_vs_clebsch_gordan"] if tol is None else tol
    errs = {int(N): wigner_eckart_vs_clebsch_gordan(int(N)) for N in sizes}
    metric = max(errs.values())
    return CheckResult("wigner-eckart-vs-clebsch-gordan", metric, tol, metric < tol,
                       {"max_error_by_N": {str(k): v for k, v in errs.items()}})


CHECKS = {
    "exact-vs-grid": exact_vs_grid,
    "kz-vs-exact": kz_vs_exact,
    "ed-vs-continuum": ed_vs_continuum,
    "wigner-eckart-vs-clebsch-gordan": wigner_eckart_vs_clebsch_gordan_check,
}


def run_check(name: str, tol: float | None = None, **options) -> CheckResult:
    try:
        fn = CHECKS[name]
    except KeyError:
        raise DomainError(f"unknown check {name!r}; choose from {sorted(CHECKS)}") from None
    return fn(tol=tol, **options)
