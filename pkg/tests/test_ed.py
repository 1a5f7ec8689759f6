import numpy as np
import pytest
from sympy import Rational
from sympy.physics.quantum.cg import CG

from thinspec.core import DomainError, ModelParams
from thinspec.ed import (build_basis_and_operators, clebsch_gordan_couplings, ed_evolve, ed_ground_state,
                         ed_observables, ed_peak_times, wigner_eckart_couplings)


def _sympy_couplings(N):
    # sum_m 2m <j m; j -m | S+1 0> <j m; j -m | S 0>
    j = Rational(N, 4)
    out = []
    for s in range(N // 2):
        tot = 0
        for m2 in range(-int(2 * j), int(2 * j) + 1, 2):
            m = Rational(m2, 2)
            tot += 2 * m * CG(j, m, j, -m, s + 1, 0).doit() * CG(j, m, j, -m, s, 0).doit()
        out.append(float(tot))
    return np.array(out)


@pytest.mark.parametrize("N", [4, 6, 8])
def test_couplings_three_routes(N):
    closed = wigner_eckart_couplings(N)
    assert np.max(np.abs(closed - clebsch_gordan_couplings(N))) < 1e-12
    assert np.max(np.abs(closed - _sympy_couplings(N))) < 1e-12


def test_known_values_N4():
    assert np.allclose(wigner_eckart_couplings(4), [2 / np.sqrt(1.5), 2 / np.sqrt(3)], atol=1e-15)


def test_zero_field_spectrum_is_tower():
    basis, ops = build_basis_and_operators(20, J=1.5)
    S = basis.S
    assert basis.dim == 11
    assert np.allclose(np.diff(ops.energy), 1.5 / 20 * 2 * (S[:-1] + 1))
    gs, e = ed_ground_state(ops, 0.0)
    assert gs[0] == pytest.approx(1.0)
    assert ops.order_parameter(gs) == 0.0


def test_ground_state_order_parameter_monotone_and_bounded():
    _, ops = build_basis_and_operators(100)
    vals = [ops.order_parameter(ed_ground_state(ops, H)[0]) for H in np.geomspace(1e-5, 10, 30)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] < 100 and vals[-1] > 95


def test_observables_bounds_random_state():
    rng = np.random.default_rng(7)
    _, ops = build_basis_and_operators(40)
    for _ in range(20):
        v = rng.normal(size=21) + 1j * rng.normal(size=21)
        v /= np.linalg.norm(v)
        obs = ed_observables(ops, v, 0.3)
        assert -40 <= obs["order_parameter"] <= 40
        assert 0 <= obs["defect_density"] <= 1


def test_half_integer_sublattice_spin():
    basis, ops = build_basis_and_operators(10)
    assert basis.j == 2.5
    assert np.max(np.abs(wigner_eckart_couplings(10) - clebsch_gordan_couplings(10))) < 1e-12


def test_evolution_unitary_and_adiabatic():
    # slow ramp from a finite field: the state tracks the ground state
    p = ModelParams(J=1, delta=1e-4, N=40, H0=0.5)
    res = ed_evolve(p, p.t0 + 200, n_samples=11, tol=1e-9)
    assert res.max_norm_drift < 1e-10
    assert res.series["defect_density"][-1] < 1e-4


def test_evolution_from_singlet():
    p = ModelParams(J=1, delta=1e-2, N=100, H0=0.0)
    res = ed_evolve(p, 3 * p.t_hat, n_samples=301)
    assert res.series["order_parameter"][0] == 0.0
    assert res.max_norm_drift < 1e-10
    assert res.series["order_parameter"].max() > 0


def test_peak_times_trend_toward_prediction():
    # N = 200 -> 400: first peak approaches the classical-return time 1.962 t_hat
    dev = []
    for N in (200, 400):
        p = ModelParams(J=1, delta=1e-2, N=N).with_t0_over_that(1e-2)
        pk = ed_peak_times(ed_evolve(p, 2.6 * p.t_hat, n_samples=1301))
        dev.append(abs(pk[0] - 1.9623) / 1.9623)
    assert dev[1] < dev[0]


def test_ed_rejects_bad_input():
    with pytest.raises(DomainError):
        build_basis_and_operators(7)
    with pytest.raises(DomainError):
        ed_ground_state(build_basis_and_operators(8)[1], -1.0)
