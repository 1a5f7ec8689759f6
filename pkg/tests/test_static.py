import math

import numpy as np
import pytest
from scipy.integrate import quad

from thinspec.core import DomainError, ModelParams, static_omega
from thinspec.static import (GaussianHermiteState, dual_thin_energy, expand_in_snapshot_basis,
                             gaussian_hermite, half_line_norm, hermite_functions, overlap_n1,
                             static_order_parameter)


def test_n1_closed_form():
    # 2 sqrt(a) (a/pi)^(1/4) S exp(-omega S^2 / 2) exp(-3i phi / 2)
    w, phi = 0.3 + 0.7j, 0.4
    S = np.linspace(0, 8, 17)
    ref = 2 * math.sqrt(w.real) * (w.real / math.pi) ** 0.25 * S * np.exp(-w * S**2 / 2) * np.exp(-1.5j * phi)
    assert np.allclose(gaussian_hermite(1, w, phi, S), ref, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("n", [1, 3, 7, 51, 401])
def test_half_line_normalization(n):
    for w in (0.02, 1.0, 0.5 + 3.0j):
        assert abs(half_line_norm(GaussianHermiteState(n, w)) - 1) < 1e-10


def test_hermite_functions_orthonormal():
    x = np.linspace(-40, 40, 40001)
    h = hermite_functions(30, x)
    gram = h @ h.T * (x[1] - x[0])
    assert np.allclose(gram, np.eye(31), atol=1e-10)


def test_high_order_values_finite():
    x = np.linspace(0, 90, 1001)
    h = hermite_functions(3001, x)
    assert np.all(np.isfinite(h))
    assert np.max(np.abs(h[-1])) < 1.0


def test_overlap_closed_form_vs_quadrature():
    w1, w2 = 0.7, 0.2 + 0.9j

    def f(S, part):
        v = np.conj(gaussian_hermite(1, w1, 0.0, S)) * gaussian_hermite(1, w2, 0.0, S)
        return v.real if part == 0 else v.imag

    re = quad(f, 0, 60, args=(0,), limit=400, epsabs=1e-13)[0]
    im = quad(f, 0, 60, args=(1,), limit=400, epsabs=1e-13)[0]
    assert abs(re**2 + im**2 - overlap_n1(w1, w2)) < 1e-10


def test_overlap_symmetric_and_unity():
    assert overlap_n1(0.4, 0.4) == pytest.approx(1.0, abs=1e-15)
    assert overlap_n1(0.4, 1.1) == pytest.approx(overlap_n1(1.1, 0.4), rel=1e-15)
    with pytest.raises(DomainError):
        overlap_n1(-0.1, 0.4)


def test_expansion_of_same_width_state_is_unit_vector():
    c = expand_in_snapshot_basis(GaussianHermiteState(3, 0.5), 0.5, 9)
    target = np.zeros(10)
    target[3] = 1.0
    assert np.allclose(c, target, atol=1e-12)


def test_expansion_first_coefficient_matches_overlap():
    w = 0.1
    c = expand_in_snapshot_basis(GaussianHermiteState(1, w), 1.0, 301)
    assert abs(c[1]) ** 2 == pytest.approx(overlap_n1(1.0, w), rel=1e-12)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-8)
    assert np.all(c[0::2] == 0)


def test_dual_spectrum_and_order_parameter():
    p = ModelParams(J=1.0, N=100)
    assert dual_thin_energy(p, 1.0, 1) == pytest.approx(1.5)
    assert dual_thin_energy(p, 1.0, 3) - dual_thin_energy(p, 1.0, 1) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        dual_thin_energy(p, 0.0, 1)
    # N e^(-omega_S) collapses on N^2 H / J
    r1 = static_order_parameter(ModelParams(N=100), 0.04) / 100
    r2 = static_order_parameter(ModelParams(N=400), 0.04 / 16) / 400
    assert r1 == pytest.approx(r2, rel=1e-14)
    assert r1 == pytest.approx(math.exp(-static_omega(p, 0.04)))


@pytest.mark.parametrize("n", [0, 2, -1, 1.5])
def test_even_or_invalid_order_rejected(n):
    with pytest.raises(DomainError):
        GaussianHermiteState(n, 1.0)


def test_nonpositive_width_rejected():
    with pytest.raises(DomainError):
        GaussianHermiteState(1, -0.5 + 1j)
