"""Property-based checks of the invariants the modules promise."""

import math

import numpy as np
from hypothesis import given, strategies as st

from thinspec.core import ModelParams, freeze_out_time, static_omega
from thinspec.ed import build_basis_and_operators, ed_evolve, ed_ground_state
from thinspec.exact import evolve_exact
from thinspec.kz import frozen_defect_density, saturated_defect_density
from thinspec.static import GaussianHermiteState, half_line_norm, overlap_n1

pos = st.floats(min_value=1e-3, max_value=1e3)
odd_n = st.integers(min_value=0, max_value=60).map(lambda k: 2 * k + 1)
width = st.builds(complex, st.floats(min_value=1e-3, max_value=10.0), st.floats(min_value=-10.0, max_value=10.0))


@given(odd_n, width)
def test_half_line_normalization(n, w):
    assert abs(half_line_norm(GaussianHermiteState(n, w)) - 1) < 1e-8


@given(width, width)
def test_overlap_is_a_probability(w1, w2):
    f = overlap_n1(w1, w2)
    assert 0 < f <= 1 + 1e-12
    assert math.isclose(f, overlap_n1(w2, w1), rel_tol=1e-12)


@given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=1e-6, max_value=1e6))
def test_freeze_out_scaling(J, delta):
    t = freeze_out_time(ModelParams(J=J, delta=delta))
    # relaxation time hbar / sqrt(J delta t) equals t at freeze-out
    assert math.isclose(1 / math.sqrt(J * delta * t), t, rel_tol=1e-12)


@given(st.integers(min_value=2, max_value=500).map(lambda k: 2 * k), pos, st.floats(min_value=0.1, max_value=1e4))
def test_order_parameter_collapse(N, J, c):
    # N e^(-omega_S) / N depends on N^2 H / J only
    H = c * J / N**2
    w = static_omega(ModelParams(J=J, N=N), H)
    assert math.isclose(w, 2 / math.sqrt(c), rel_tol=1e-12)


@given(st.floats(min_value=1e-8, max_value=1.0), st.floats(min_value=1e-8, max_value=1.0))
def test_saturation_monotone_in_start(x1, x2):
    lo, hi = sorted((x1, x2))
    assert saturated_defect_density(lo) >= saturated_defect_density(hi) - 1e-15


@given(st.floats(min_value=1e-4, max_value=0.5), st.floats(min_value=1.0, max_value=30.0))
def test_frozen_defect_density_bounded_and_nondecreasing(x, span):
    p = ModelParams(J=1, delta=1, N=100).with_t0_over_that(x)
    t = np.linspace(p.t0, p.t0 + span, 50)
    D = frozen_defect_density(p, t)
    assert np.all((D >= 0) & (D <= 1))
    assert np.all(np.diff(D) >= -1e-15)


@given(st.floats(min_value=1e-3, max_value=1.0), st.sampled_from([50, 100, 1000]))
def test_re_omega_positive_on_accepted_steps(x, N):
    p = ModelParams(J=1, delta=1, N=N).with_t0_over_that(x)
    tr = evolve_exact(p, p.t0 + 6.0, n_samples=50)
    assert tr.min_accepted_re_omega > 0
    assert np.all(tr.omega.real > 0)


@given(st.integers(min_value=2, max_value=40).map(lambda k: 2 * k), st.floats(min_value=1e-3, max_value=1.0),
       st.floats(min_value=1e-3, max_value=1.0))
def test_ed_unitarity(N, delta, H0):
    p = ModelParams(J=1.0, delta=delta, N=N, H0=H0)
    res = ed_evolve(p, p.t0 + 2.0, n_samples=5)
    assert res.max_norm_drift < 1e-10


@given(st.integers(min_value=2, max_value=100).map(lambda k: 2 * k), st.floats(min_value=0.0, max_value=5.0))
def test_ed_ground_state_normalized(N, H):
    _, ops = build_basis_and_operators(N)
    v, e = ed_ground_state(ops, H)
    assert abs(np.linalg.norm(v) - 1) < 1e-12
    assert -N <= ops.order_parameter(v) <= N
