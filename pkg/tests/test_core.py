import math

import pytest

from thinspec.core import (ContinuumHamiltonian, DerivedScales, DomainError, ModelParams, field_at,
                           freeze_out_time, renormalized_field, static_omega)


def test_freeze_out_examples():
    assert freeze_out_time(ModelParams(J=1, delta=1)) == 1.0
    assert freeze_out_time(ModelParams(J=1, delta=8)) == pytest.approx(0.5, rel=1e-15)
    assert freeze_out_time(ModelParams(J=1, delta=1, hbar=2)) == pytest.approx(2 ** (2 / 3), rel=1e-15)


def test_static_width():
    p = ModelParams(J=1, N=100)
    assert static_omega(p, 1.0) == pytest.approx(0.02, rel=1e-15)
    assert static_omega(p, 0.25) == pytest.approx(2 * static_omega(p, 1.0), rel=1e-15)
    with pytest.raises(DomainError):
        static_omega(p, 0.0)


def test_field_schedule():
    p = ModelParams(delta=2.0, H0=0.5)
    assert p.t0 == 0.25
    assert field_at(p, 0.25) == 0.5
    assert field_at(p, 1.0) == 2.0
    with pytest.raises(DomainError):
        field_at(p, 0.2)


def test_with_t0_over_that():
    p = ModelParams(J=2.0, delta=0.3).with_t0_over_that(1e-2)
    assert p.t0 / p.t_hat == pytest.approx(1e-2, rel=1e-14)


def test_renormalized_field_is_field_times_start_ratio():
    p = ModelParams(J=1.0, delta=1.0).with_t0_over_that(0.1)
    assert renormalized_field(p, 2.0) == pytest.approx(0.2, rel=1e-14)
    assert renormalized_field(ModelParams(H0=0.0), 1.0) == 0.0


@pytest.mark.parametrize("kw", [dict(J=0), dict(J=-1), dict(delta=0), dict(H0=-1e-3), dict(N=3), dict(N=2),
                                dict(N=101), dict(hbar=0), dict(J=math.inf)])
def test_invalid_params(kw):
    with pytest.raises(DomainError):
        ModelParams(**kw)


def test_hamiltonian_forms_agree():
    p = ModelParams(J=1.3, N=60, hbar=0.7)
    h = ContinuumHamiltonian(p)
    H = 0.4
    assert 1 / (2 * h.mass(H)) * p.hbar**2 == pytest.approx(h.kinetic_coefficient(H) * p.hbar**2, rel=1e-14)
    assert h.stiffness / 2 == pytest.approx(h.potential_coefficient(), rel=1e-15)
    # hbar * classical frequency is the dual thin-spectrum spacing
    assert p.hbar * h.frequency(H) == pytest.approx(math.sqrt(p.J * H), rel=1e-14)


def test_derived_scales():
    d = DerivedScales(ModelParams(J=2.0, N=50, delta=1.0))
    assert d.E_thin_tower == pytest.approx(0.04)
    assert d.E_thin_magnon == 2.0
    assert d.E_thin_dual(0.5) == pytest.approx(1.0)
    assert d.E_thin_dual(0.0) == 0.0
