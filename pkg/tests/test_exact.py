import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import airy

from thinspec.core import DomainError, ModelParams, static_omega
from thinspec.exact import (Reference, classical_fidelity, comb_prediction_I, comb_prediction_R,
                            detect_comb, energy_expectation, evolve_exact, evolve_riccati,
                            extrapolate_comb_times, order_parameter, riccati_components, riccati_rhs,
                            trajectory_series)
from thinspec.kz import frozen_defect_density


def _airy_zeros(f, count, hi=12.0):
    x = np.linspace(0.05, hi, 20000)
    v = f(x)
    idx = np.nonzero(np.sign(v[:-1]) != np.sign(v[1:]))[0]
    return np.array([brentq(f, x[j], x[j + 1], xtol=1e-14) for j in idx[:count]])


def test_static_width_is_riccati_fixed_point():
    p = ModelParams(J=1.3, N=50)
    H = 0.2
    assert abs(riccati_rhs(p, H, static_omega(p, H))) < 1e-15


def test_components_match_complex_form():
    p = ModelParams(J=0.8, N=30, hbar=1.2)
    w = 0.3 - 0.7j
    da, db = riccati_components(p, 0.5, w.real, w.imag)
    assert complex(da, db) == pytest.approx(riccati_rhs(p, 0.5, w), rel=1e-14)


def test_frozen_schedule_is_stationary():
    p = ModelParams(J=1, delta=1, N=100, H0=0.05)
    tr = evolve_exact(p, 20.0, frozen=True)
    assert np.max(np.abs(tr.omega - static_omega(p, p.H0))) < 1e-12
    # phase advances at the dual thin-spectrum rate: (3/2) sqrt(J H0) t / hbar for the n=1 level
    assert tr.phi[-1] * 1.5 == pytest.approx(1.5 * math.sqrt(p.J * p.H0) * (20.0 - p.t0), rel=1e-9)


def test_linear_and_riccati_routes_agree():
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-2)
    tr = evolve_exact(p, 8.0, n_samples=801)
    w = evolve_riccati(p, 8.0, tr.t, rtol=1e-11)
    assert np.max(np.abs(w - tr.omega) / np.abs(tr.omega)) < 1e-7


def test_re_omega_positive_on_accepted_steps():
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-2)
    tr = evolve_exact(p, 10.0)
    assert tr.min_accepted_re_omega > 0
    assert tr.min_accepted_re_omega == pytest.approx(7.6e-4, rel=0.01)


def test_early_defect_density_matches_frozen_picture():
    # deep in the impulse window the state has barely moved
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-3)
    t = 3 * p.t0
    tr = evolve_exact(p, t, np.array([p.t0, t]))
    D = 1 - classical_fidelity(tr)[-1]
    assert D == pytest.approx(frozen_defect_density(p, t), abs=2e-3)


def test_energy_of_static_state():
    p = ModelParams(J=2.0, N=40)
    H = 0.3
    assert energy_expectation(p, static_omega(p, H), H) == pytest.approx(1.5 * math.sqrt(p.J * H), rel=1e-14)


def test_order_parameter_limits():
    p = ModelParams(N=100)
    assert order_parameter(p, 1e-9) == pytest.approx(100, rel=1e-8)
    assert abs(order_parameter(p, 50.0)) < 1e-3 * 100


def test_comb_limit_is_airy_zeros():
    """t0 -> 0 comb times are the zeros of sqrt(3) Ai(-x) + Bi(-x) and of its derivative."""
    base = ModelParams(J=1, delta=1, N=100)
    reports = {}
    for x in (1e-3, 1e-4):
        q = base.with_t0_over_that(x)
        reports[x] = detect_comb(evolve_exact(q, 9.0, n_samples=9001), 4)
    ext_I = extrapolate_comb_times({x: r.t_I for x, r in reports.items()})
    ext_R = extrapolate_comb_times({x: r.t_R for x, r in reports.items()})
    zI = _airy_zeros(lambda s: math.sqrt(3) * airy(-s)[0] + airy(-s)[2], 5)
    zR = _airy_zeros(lambda s: math.sqrt(3) * airy(-s)[1] + airy(-s)[3], 5)
    assert np.allclose(ext_I, zI, rtol=1e-6)
    assert np.allclose(ext_R, zR, rtol=1e-6)
    # the closed forms are the large-k asymptotics of those zeros
    k = np.arange(5)
    for z, pred in ((zI, comb_prediction_I(k)), (zR, comb_prediction_R(k))):
        gap = np.abs(z / pred - 1)
        assert np.all(gap < 0.013)
        assert np.all(np.diff(gap) < 0)


def test_comb_extrema_sit_on_im_zeros():
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-2)
    tr = evolve_exact(p, 9.0, n_samples=4001)
    r = detect_comb(tr, 3)
    assert r.complete
    for t in np.concatenate([r.t_R, r.t_I]):
        assert abs(tr.omega_at(t * p.t_hat).imag) < 1e-9
    assert np.all(r.t_I[:-1] < r.t_R[:-1])
    assert np.all(r.t_R[:-1] < r.t_I[1:])


def test_detect_comb_needs_long_enough_run():
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-2)
    with pytest.raises(DomainError):
        detect_comb(evolve_exact(p, 3.0), 4)


def test_renormalized_fidelity_requires_start_field():
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-2)
    tr = evolve_exact(p, 2.0)
    f = classical_fidelity(tr, Reference.RENORMALIZED)
    assert np.all((f > 0) & (f <= 1 + 1e-12))


def test_series_columns_and_units():
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(1e-2)
    ts = trajectory_series(evolve_exact(p, 2.0, n_samples=11))
    text = ts.to_csv()
    header = text.splitlines()[0]
    assert header.startswith("t [time],t_over_that [1]")
    assert "defect_density [1]" in header and "energy [energy]" in header
    assert len(text.splitlines()) == 12


def test_needs_positive_start_field():
    with pytest.raises(DomainError):
        evolve_exact(ModelParams(H0=0.0), 1.0)
