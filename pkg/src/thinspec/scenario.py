"""Serializable run descriptions, their execution and parameter sweeps.

A scenario names a run kind, the model parameters, an output grid, tolerance
overrides and kind-specific options.  Running it writes CSV series plus a
``summary.json`` that embeds the fully resolved scenario.  Identical scenarios
give byte-identical files.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import checks
from .core import DomainError, ModelParams, static_omega
from .ed import build_basis_and_operators, ed_evolve, ed_ground_state, ed_peak_times
from .exact import (DEFAULT_PROMINENCE, IntegrationError, comb_prediction_I, comb_prediction_R,
                    comb_sequence, defect_density, detect_comb, evolve_exact,
                    extrapolate_comb_times, order_parameter, trajectory_series)
from .grid import CutoffError
from .kz import (RegimeLabel, TruncationError, adiabaticity_bound, asymptotic_defect_density,
                 classify_regime, frozen_defect_density, kz_state_at, recursion_times,
                 saturated_defect_density)
from .series import TimeSeries, write_rows
from .static import dual_thin_energy, static_order_parameter
from .tolerances import resolve

KINDS = ("static", "kz", "exact", "ed", "oracle-check", "figure1", "figure2", "figure3", "figure4")
SWEEP_AXES = ("t0_over_that", "N", "delta")
DEFAULT_BUDGET = 1000


class ConfigError(ValueError):
    """Invalid scenario or sweep description."""


class NumericalError(RuntimeError):
    """A run failed numerically; ``diagnostics`` explains where."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def dump_json(obj, path=None) -> str:
    text = json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def params_from_dict(d: dict) -> ModelParams:
    d = dict(d or {})
    ratio = d.pop("t0_over_that", None)
    unknown = set(d) - {"J", "delta", "H0", "N", "hbar"}
    if unknown:
        raise ConfigError(f"unknown parameter(s) {sorted(unknown)}")
    if ratio is not None and "H0" in d:
        raise ConfigError("give either H0 or t0_over_that, not both")
    try:
        p = ModelParams(**d)
        if ratio is not None:
            if not float(ratio) >= 0:
                raise ConfigError(f"t0_over_that must be non-negative, got {ratio!r}")
            p = p.with_t0_over_that(float(ratio))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return p


@dataclass
class Scenario:
    """One run.

    ``grid`` holds the output grid (``t_end_over_that``, ``n_samples`` or, for
    static runs, ``H_min``/``H_max``/``n_H``); ``options`` holds kind-specific
    settings such as the check name or ``k_max``.
    """

    kind: str
    params: ModelParams = field(default_factory=ModelParams)
    grid: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    out: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}; choose from {list(KINDS)}")
        try:
            self.tolerances = resolve(self.tolerances)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        if not isinstance(d, dict):
            raise ConfigError("scenario must be a JSON object")
        d = dict(d)
        unknown = set(d) - {"kind", "params", "grid", "tolerances", "options", "out"}
        if unknown:
            raise ConfigError(f"unknown scenario field(s) {sorted(unknown)}")
        if "kind" not in d:
            raise ConfigError("scenario needs a 'kind'")
        for key in ("grid", "tolerances", "options"):
            if not isinstance(d.get(key, {}), dict):
                raise ConfigError(f"'{key}' must be an object")
        return cls(
            kind=d["kind"],
            params=params_from_dict(d.get("params", {})),
            grid=dict(d.get("grid", {})),
            tolerances=dict(d.get("tolerances", {})),
            options=dict(d.get("options", {})),
            out=d.get("out"),
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params.to_dict(),
            "grid": dict(self.grid),
            "tolerances": dict(self.tolerances),
            "options": dict(self.options),
            "out": self.out,
        }


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _grid_get(sc: Scenario, key, default):
    value = sc.grid.get(key, default)
    try:
        return type(default)(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"grid.{key}: {exc}") from exc


def _require_ramp_start(p: ModelParams):
    if not p.H0 > 0:
        raise ConfigError("this run kind needs H0 > 0 (or t0_over_that > 0)")


# ---------------------------------------------------------------- run kinds


def _run_static(sc):
    p = sc.params
    H_min = _grid_get(sc, "H_min", 1e-4 * p.J)
    H_max = _grid_get(sc, "H_max", p.J)
    n_H = _grid_get(sc, "n_H", 41)
    if not 0 < H_min <= H_max or n_H < 1:
        raise ConfigError("static grid needs 0 < H_min <= H_max and n_H >= 1")
    H = np.geomspace(H_min, H_max, n_H)
    with_ed = p.N <= int(sc.options.get("ed_max_N", 20000))
    rows = [["H [energy]", "omega_S [1]", "order_parameter [1]", "order_parameter_ed [1]",
             "E_dual_n1 [energy]", "tower_gap [energy]"]]
    ratios = []
    ops = build_basis_and_operators(p.N, p.J)[1] if with_ed else None
    for h in H:
        op = static_order_parameter(p, h)
        op_ed = ops.order_parameter(ed_ground_state(ops, h)[0]) if with_ed else float("nan")
        ratios.append(op_ed / op)
        rows.append([h, static_omega(p, h), op, op_ed, dual_thin_energy(p, h, 1), 2 * p.J / p.N])
    summary = {"ed_over_continuum_min": min(ratios), "ed_over_continuum_max": max(ratios)}
    return {"static.csv": rows}, summary, summary


def _run_kz(sc):
    p = sc.params
    t_hat = p.t_hat
    t_end = _grid_get(sc, "t_end_over_that", 10.0) * t_hat
    n = _grid_get(sc, "n_samples", 1001)
    t0 = p.t0
    if not t_end > t0:
        raise ConfigError("t_end must exceed t0")
    t = np.linspace(t0, t_end, n)
    ts = TimeSeries(t)
    ts.add("t_over_that", t / t_hat)
    ts.add("regime", [classify_regime(ti, t0, t_hat).value for ti in t])
    ts.add("defect_density", frozen_defect_density(p, t))
    x = t0 / t_hat
    k_max = int(sc.options.get("k_max", 5))
    scal = {
        "t_hat": t_hat,
        "t0_over_that": x,
        "D_sat": saturated_defect_density(x),
        "D_law": asymptotic_defect_density(x),
        "relative_law_deviation": abs(saturated_defect_density(x) - asymptotic_defect_density(x))
        / max(1 - saturated_defect_density(x), 1e-300),
    }
    summary = dict(scal)
    summary["regime_at_start"] = classify_regime(t0, t0, t_hat).value
    if p.H0 > 0:
        summary["adiabaticity_bound"] = adiabaticity_bound(p)
        tk = recursion_times(t_hat, k_max)
        summary["recursion_times"] = tk.tolist()
        try:
            fid = [kz_state_at(p, tt, tol=sc.tolerances["kz_weight"]).renormalized_fidelity() for tt in tk]
            mids = [kz_state_at(p, 0.5 * (a + b), tol=sc.tolerances["kz_weight"]).renormalized_fidelity()
                    for a, b in zip(tk[:-1], tk[1:])]
        except TruncationError as exc:
            raise NumericalError(str(exc), {"stage": "kz expansion", "t0_over_that": x}) from exc
        summary["recursion_fidelity"] = fid
        summary["midpoint_fidelity"] = mids
        scal["min_recursion_fidelity"] = min(fid)
        scal["max_midpoint_fidelity"] = max(mids)
    return {"kz.csv": ts}, summary, scal


def _run_exact(sc):
    p = sc.params
    _require_ramp_start(p)
    t_hat = p.t_hat
    t_end = _grid_get(sc, "t_end_over_that", 10.0) * t_hat
    n = _grid_get(sc, "n_samples", 4001)
    k_max = int(sc.options.get("k_max", 4))
    traj = evolve_exact(p, t_end, n_samples=n, rtol=sc.tolerances["exact_rtol"])
    ts = trajectory_series(traj)
    i_hat = np.searchsorted(traj.t, max(t_hat, p.t0))
    summary = {
        "t_hat": t_hat,
        "t0_over_that": p.t0 / t_hat,
        "min_accepted_re_omega": traj.min_accepted_re_omega,
        "accepted_steps": len(traj.accepted_t),
        "D_at_freeze_out": float(defect_density(traj)[min(i_hat, len(traj) - 1)]),
        "D_sat_adiabatic_impulse": saturated_defect_density(p.t0 / t_hat),
    }
    try:
        comb = detect_comb(traj, k_max, float(sc.options.get("prominence", DEFAULT_PROMINENCE)))
        summary["comb"] = comb.to_dict()
    except DomainError as exc:
        summary["comb"] = None
        summary["comb_skipped"] = str(exc)
    scal = {k: v for k, v in summary.items() if isinstance(v, (int, float))}
    return {"exact.csv": ts}, summary, scal


def _run_ed(sc):
    p = sc.params
    t_hat = p.t_hat
    t_end = _grid_get(sc, "t_end_over_that", 6.0) * t_hat
    n = _grid_get(sc, "n_samples", 3001)
    if not t_end > p.t0:
        raise ConfigError("t_end must exceed t0")
    res = ed_evolve(p, t_end, n_samples=n, tol=sc.tolerances["ed_tol"])
    peaks = ed_peak_times(res)
    k = np.arange(len(peaks))
    summary = {
        "t_hat": t_hat,
        "steps": res.steps,
        "max_norm_drift": res.max_norm_drift,
        "order_parameter_peaks_over_that": peaks.tolist(),
        "predicted_classical_returns_over_that": comb_prediction_I(k).tolist(),
    }
    scal = {"steps": res.steps, "max_norm_drift": res.max_norm_drift}
    return {"ed.csv": res.series}, summary, scal


def _run_check(sc):
    name = sc.options.get("check")
    if name not in checks.CHECKS:
        raise ConfigError(f"unknown check {name!r}; choose from {sorted(checks.CHECKS)}")
    tol = sc.options.get("tol")
    opts = {k: v for k, v in sc.options.items() if k not in ("check", "tol")}
    if name != "wigner-eckart-vs-clebsch-gordan" and sc.options.get("use_params"):
        opts["params"] = sc.params
    opts.pop("use_params", None)
    try:
        res = checks.run_check(name, None if tol is None else float(tol), **opts)
    except TypeError as exc:
        raise ConfigError(f"bad options for check {name}: {exc}") from exc
    summary = res.to_dict()
    return {}, summary, {"metric": res.metric, "passed": res.passed}


def _run_figure1(sc):
    x0 = np.geomspace(1e-4, 10.0, _grid_get(sc, "n_t0", 51))
    xt = np.geomspace(1e-4, 100.0, _grid_get(sc, "n_t", 61))
    rows = [["t0_over_that [1]", "t_over_that [1]", "regime [label]"]]
    counts = {r.value: 0 for r in RegimeLabel}
    for a in x0:
        for b in xt:
            if b >= a:
                lab = classify_regime(b, a, 1.0).value
                counts[lab] += 1
                rows.append([a, b, lab])
    return {"figure1.csv": rows}, {"counts": counts}, counts


def _run_figure2(sc):
    p = sc.params
    ratios = [float(r) for r in sc.options.get("t0_over_that", [1e-1, 1e-2, 1e-3, 1e-4])]
    n = _grid_get(sc, "n_samples", 401)
    t_end_x = _grid_get(sc, "t_end_over_that", 10.0)
    rows = [["t0_over_that [1]", "t_over_that [1]", "D [1]", "D_exact [1]"]]
    max_diff_kz = 0.0
    max_diff_exact = 0.0
    for x in ratios:
        curves = []
        for N in (p.N, 10 * p.N):
            q = replace(p, N=N).with_t0_over_that(x)
            t = q.t_hat * np.geomspace(x, t_end_x, n)
            t[0] = q.t0
            D = frozen_defect_density(q, t)
            De = defect_density(evolve_exact(q, t[-1], t, rtol=sc.tolerances["exact_rtol"]))
            curves.append((t / q.t_hat, D, De))
        max_diff_kz = max(max_diff_kz, float(np.max(np.abs(curves[0][1] - curves[1][1]))))
        max_diff_exact = max(max_diff_exact, float(np.max(np.abs(curves[0][2] - curves[1][2]))))
        for row in zip(itertools.repeat(x), *curves[0]):
            rows.append(list(row))
    sat = [["t0_over_that [1]", "D_sat [1]", "D_law [1]", "relative_deviation [1]"]]
    for x in np.geomspace(1e-5, 1.0, 21):
        d, law = saturated_defect_density(x), asymptotic_defect_density(x)
        sat.append([x, d, law, abs(d - law) / (1 - d)])
    scal = {"N_independence_max_diff": max_diff_kz, "N_independence_max_diff_exact": max_diff_exact}
    summary = dict(scal, N_pair=[p.N, 10 * p.N], t0_over_that=ratios)
    return {"figure2.csv": rows, "figure2_saturation.csv": sat}, summary, scal


def _run_figure3(sc):
    t_end = _grid_get(sc, "t_end_over_that", 10.0)
    n = _grid_get(sc, "n_samples", 2001)
    base = ModelParams(J=1.0, delta=1.0, N=100, hbar=1.0)  # t_hat = 1
    rtol = sc.tolerances["exact_rtol"]
    rows = [["panel [label]", "N [1]", "t0 [time]", "t [time]", "re_omega [1]", "im_omega [1]",
             "N_re_omega [1]", "N_im_omega [1]"]]
    runs = [("a/c", 100, x) for x in sc.options.get("t0", [1e-1, 1e-2, 1e-3])]
    runs += [("b/d", N, 1e-2) for N in sc.options.get("N", [100, 1000, 10000])]
    collapse = []
    for panel, N, t0 in runs:
        q = replace(base, N=int(N), H0=float(t0))
        traj = evolve_exact(q, t_end, np.linspace(q.t0, t_end, n), rtol=rtol)
        if panel == "b/d":
            collapse.append(N * traj.omega)
        for ti, w in zip(traj.t, traj.omega):
            rows.append([panel, N, t0, ti, w.real, w.imag, N * w.real, N * w.imag])
    spread = max(float(np.max(np.abs(c - collapse[0]) / np.abs(collapse[0]))) for c in collapse)
    scal = {"N_collapse_max_relative_diff": spread}
    return {"figure3.csv": rows}, dict(scal, rtol=rtol), scal


def _run_figure4(sc):
    p = sc.params
    ratios = [float(r) for r in sc.options.get("t0_over_that", [1e-1, 1e-2, 1e-3, 1e-4])]
    k_max = int(sc.options.get("k_max", 4))
    reports = comb_sequence(p, ratios, k_max, rtol=sc.tolerances["exact_rtol"])
    ext_R = extrapolate_comb_times({x: r.t_R for x, r in reports.items()})
    ext_I = extrapolate_comb_times({x: r.t_I for x, r in reports.items()})
    k = np.arange(k_max + 1)
    pred_R, pred_I = comb_prediction_R(k), comb_prediction_I(k)
    header = ["k [1]", "predicted_R [t_hat]", "predicted_I [t_hat]"]
    for x in ratios:
        header += [f"t_R@{x:g} [t_hat]", f"t_I@{x:g} [t_hat]"]
    header += ["t_R_extrapolated [t_hat]", "t_I_extrapolated [t_hat]"]
    rows = [header]
    for i in k:
        row = [int(i), pred_R[i], pred_I[i]]
        for x in ratios:
            r = reports[x]
            row += [r.t_R[i] if i < len(r.t_R) else float("nan"), r.t_I[i] if i < len(r.t_I) else float("nan")]
        row += [ext_R[i] if i < len(ext_R) else float("nan"), ext_I[i] if i < len(ext_I) else float("nan")]
        rows.append(row)
    # traces at the smallest start ratio approximate the t0 -> 0 limit
    q = p.with_t0_over_that(min(ratios))
    t_end = 1.05 * float(pred_R[-1]) * q.t_hat
    traj = evolve_exact(q, t_end, n_samples=_grid_get(sc, "n_samples", 4001), rtol=sc.tolerances["exact_rtol"])
    ts = TimeSeries(traj.t)
    ts.add("t_over_that", traj.t / q.t_hat)
    ts.add("N_re_omega", q.N * traj.omega.real)
    ts.add("N_im_omega", q.N * traj.omega.imag)
    ts.add("order_parameter_over_N", order_parameter(q, traj.omega) / q.N)
    dev_R = (ext_R - pred_R[: len(ext_R)]) / pred_R[: len(ext_R)]
    dev_I = (ext_I - pred_I[: len(ext_I)]) / pred_I[: len(ext_I)]
    scal = {"max_abs_dev_R_extrapolated_k_ge_2": float(np.max(np.abs(dev_R[2:]))) if len(dev_R) > 2 else float("nan"),
            "max_abs_dev_I_extrapolated_k_ge_2": float(np.max(np.abs(dev_I[2:]))) if len(dev_I) > 2 else float("nan")}
    summary = dict(scal, reports={f"{x:g}": r.to_dict() for x, r in reports.items()},
                   extrapolated_R=ext_R, extrapolated_I=ext_I,
                   deviation_R_extrapolated=dev_R, deviation_I_extrapolated=dev_I)
    return {"figure4_comb.csv": rows, "figure4_traces.csv": ts}, summary, scal


RUNNERS = {
    "static": _run_static,
    "kz": _run_kz,
    "exact": _run_exact,
    "ed": _run_ed,
    "oracle-check": _run_check,
    "figure1": _run_figure1,
    "figure2": _run_figure2,
    "figure3": _run_figure3,
    "figure4": _run_figure4,
}


def execute(sc: Scenario):
    """Run without writing files: returns (files, summary, scalars).

    Raises ConfigError for invalid settings and NumericalError for failures.
    """
    try:
        return RUNNERS[sc.kind](sc)
    except (ConfigError, NumericalError):
        raise
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    except IntegrationError as exc:
        raise NumericalError(str(exc), {"stage": sc.kind, "t_fail": exc.t_fail}) from exc
    except (CutoffError, TruncationError, RuntimeError, FloatingPointError, np.linalg.LinAlgError) as exc:
        raise NumericalError(str(exc), {"stage": sc.kind, "error": type(exc).__name__}) from exc


def run_scenario(sc: Scenario, out_dir=None) -> dict:
    """Execute ``sc`` and write its CSV files and ``summary.json`` under ``out_dir``."""
    files, summary, scalars = execute(sc)
    out = Path(out_dir or sc.out or f"thinspec-out/{sc.kind}")
    out.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        if isinstance(content, TimeSeries):
            content.to_csv(out / name)
        else:
            write_rows(content, out / name)
    record = {"scenario": sc.to_dict(), "summary": summary, "scalars": scalars, "files": sorted(files)}
    dump_json(record, out / "summary.json")
    return record


# ---------------------------------------------------------------- sweeps


def _axis_values(name, spec):
    if isinstance(spec, dict):
        if set(spec) != {"geom"} or len(spec["geom"]) != 3:
            raise ConfigError(f"axis {name}: use a list or {{'geom': [start, stop, num]}}")
        a, b, n = spec["geom"]
        vals = np.geomspace(float(a), float(b), int(n)).tolist()
    elif isinstance(spec, list):
        vals = list(spec)
    else:
        raise ConfigError(f"axis {name}: expected a list or geometric range")
    if name == "N":
        vals = [int(v) for v in vals]
    else:
        vals = [float(v) for v in vals]
    return vals


@dataclass
class SweepSpec:
    axes: dict
    template: dict
    workers: int = 1
    budget: int = DEFAULT_BUDGET

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        if not isinstance(d, dict):
            raise ConfigError("sweep spec must be a JSON object")
        unknown = set(d) - {"axes", "template", "workers", "budget"}
        if unknown:
            raise ConfigError(f"unknown sweep field(s) {sorted(unknown)}")
        axes_in = d.get("axes", {})
        if not isinstance(axes_in, dict):
            raise ConfigError("'axes' must be an object")
        bad = set(axes_in) - set(SWEEP_AXES)
        if bad:
            raise ConfigError(f"unsupported sweep axes {sorted(bad)}; use {list(SWEEP_AXES)}")
        axes = {k: _axis_values(k, axes_in[k]) for k in SWEEP_AXES if k in axes_in}
        template = dict(d.get("template", {"kind": "kz"}))
        Scenario.from_dict(template)  # validate early
        spec = cls(axes=axes, template=template, workers=int(d.get("workers", 1)),
                   budget=int(d.get("budget", DEFAULT_BUDGET)))
        if spec.n_points > spec.budget:
            raise ConfigError(f"sweep has {spec.n_points} points, budget is {spec.budget}")
        return spec

    @property
    def n_points(self) -> int:
        if not self.axes or any(len(v) == 0 for v in self.axes.values()):
            return 0
        return int(np.prod([len(v) for v in self.axes.values()]))

    def points(self) -> list[dict]:
        if self.n_points == 0:
            return []
        names = list(self.axes)
        return [dict(zip(names, combo)) for combo in itertools.product(*(self.axes[n] for n in names))]

    def to_dict(self) -> dict:
        # worker count is left out so merged output does not depend on it
        return {"axes": self.axes, "template": self.template, "budget": self.budget}


def _point_scenario(template: dict, coords: dict) -> Scenario:
    d = json.loads(json.dumps(template))
    params = dict(d.get("params", {}))
    if "N" in coords:
        params["N"] = coords["N"]
    if "delta" in coords:
        params["delta"] = coords["delta"]
    if "t0_over_that" in coords:
        params.pop("H0", None)
        params["t0_over_that"] = coords["t0_over_that"]
    d["params"] = params
    return Scenario.from_dict(d)


def _point_label(index: int) -> str:
    return f"p{index:05d}"


def _run_point(args):
    index, template, coords, out_dir = args
    try:
        sc = _point_scenario(template, coords)
        rec = run_scenario(sc, Path(out_dir) / "points" / _point_label(index))
        return index, {"status": "ok", "scalars": rec["scalars"], "summary": rec["summary"]}
    except (ConfigError, NumericalError, DomainError) as exc:
        return index, {"status": "failed", "error": f"{type(exc).__name__}: {exc}"}
    except Exception as exc:  # per-point isolation: nothing aborts the sweep
        return index, {"status": "failed", "error": f"{type(exc).__name__}: {exc}"}


def resolve_workers(requested: int | None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get("THINSPEC_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"THINSPEC_WORKERS must be an integer, got {env!r}") from None
    return 1


def run_sweep(spec: SweepSpec, out_dir, workers: int | None = None) -> dict:
    """Run every point of ``spec`` and write ``sweep.csv`` and ``summary.json``.

    Output depends only on the points, never on the worker count or the
    completion order.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pts = spec.points()
    n_workers = resolve_workers(workers or spec.workers)
    jobs = [(i, spec.template, c, str(out)) for i, c in enumerate(pts)]
    results = {}
    if n_workers > 1 and len(jobs) > 1:
        # spawn, not fork: forking a process that already runs numba or BLAS
        # threads can deadlock
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(max_workers=n_workers, mp_context=ctx) as pool:
            for i, res in pool.map(_run_point, jobs):
                results[i] = res
    else:
        for job in jobs:
            i, res = _run_point(job)
            results[i] = res

    axis_names = list(spec.axes)
    scalar_names = sorted({k for r in results.values() if r["status"] == "ok" for k in r["scalars"]}
                          - set(axis_names))
    rows = [["point [label]"] + [f"{a} [1]" for a in axis_names] + ["status [label]"]
            + [f"{s} [1]" for s in scalar_names]]
    points = []
    for i, coords in enumerate(pts):
        r = results[i]
        sc = r.get("scalars", {})
        rows.append([_point_label(i)] + [coords[a] for a in axis_names] + [r["status"]]
                    + [sc.get(s, float("nan")) for s in scalar_names])
        points.append({"label": _point_label(i), "coordinates": coords, **r})
    write_rows(rows, out / "sweep.csv")
    record = {
        "sweep": spec.to_dict(),
        "n_points": len(pts),
        "failed": [p["label"] for p in points if p["status"] != "ok"],
        "points": points,
    }
    dump_json(record, out / "summary.json")
    return record
