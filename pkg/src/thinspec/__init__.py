"""Dynamical symmetry breaking in the Lieb-Mattis antiferromagnet.

Continuum thin-spectrum theory, the adiabatic-impulse picture of a linear
staggered-field ramp, its exact Gaussian solution, and two independent
oracles (exact diagonalisation and a brute-force grid solver).
"""

from .core import (ContinuumHamiltonian, DerivedScales, DomainError, ModelParams, field_at,
                   freeze_out_time, renormalized_field, static_omega)

__all__ = [
    "ContinuumHamiltonian",
    "DerivedScales",
    "DomainError",
    "ModelParams",
    "field_at",
    "freeze_out_time",
    "renormalized_field",
    "static_omega",
]
__version__ = "0.1.0"
