"""Model parameters, derived scales and the linear field schedule.

Internal units take hbar = 1 by default, but hbar, J and delta are always
carried explicitly so that scaling relations can be exercised.  The stored
input is the initial field ``H0``; the start time ``t0 = H0 / delta`` is
always derived from it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


@dataclass(frozen=True)
class ModelParams:
    """One Lieb-Mattis scenario with a staggered field ramped as H(t) = delta*t.

    Parameters
    ----------
    J : float
        Exchange energy (antiferromagnetic, > 0).
    delta : float
        Ramp rate of the staggered field (energy / time, > 0).
    H0 : float
        Field at the start of the ramp (>= 0).
    N : int
        Number of lattice sites (even, >= 4).
    hbar : float
        Reduced Planck constant.
    """

    J: float = 1.0
    delta: float = 1.0
    H0: float = 0.01
    N: int = 100
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.J > 0 and math.isfinite(self.J)):
            raise DomainError(f"J must be positive, got {self.J!r}")
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise DomainError(f"delta must be positive, got {self.delta!r}")
        if not (self.H0 >= 0 and math.isfinite(self.H0)):
            raise DomainError(f"H0 must be non-negative, got {self.H0!r}")
        if not (self.hbar > 0 and math.isfinite(self.hbar)):
            raise DomainError(f"hbar must be positive, got {self.hbar!r}")
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise DomainError(f"N must be an even integer >= 4, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def t0(self) -> float:
        """Start of the schedule, H0 / delta."""
        return self.H0 / self.delta

    @property
    def t_hat(self) -> float:
        return freeze_out_time(self)

    def with_t0_over_that(self, ratio: float) -> "ModelParams":
        """Copy with H0 chosen so that t0 / t_hat equals ``ratio``."""
        return replace(self, H0=self.delta * ratio * freeze_out_time(self))

    def to_dict(self) -> dict:
        return {"J": self.J, "delta": self.delta, "H0": self.H0, "N": self.N, "hbar": self.hbar}


def field_at(params: ModelParams, t: float) -> float:
    """Staggered field H(t) = delta*t, defined from t0 onward."""
    if t < params.t0:
        raise DomainError(f"t={t!r} is before schedule start t0={params.t0!r}")
    if t == params.t0:
        return params.H0
    return params.delta * t


def freeze_out_time(params: ModelParams) -> float:
    """Freeze-out time (hbar^2 / (J delta))^(1/3)."""
    return (params.hbar**2 / (params.J * params.delta)) ** (1.0 / 3.0)


def static_omega(params: ModelParams, H: float) -> float:
    """Dimensionless static width N^-1 sqrt(4J/H) of the snapshot ground state."""
    if not H > 0:
        raise DomainError(f"static width undefined at H={H!r} (symmetric point)")
    return math.sqrt(4.0 * params.J / H) / params.N


def renormalized_field(params: ModelParams, H: float) -> float:
    """Field whose snapshot ground state the Kibble-Zurek state revisits at recursion times.

    Equals H * H0 / (hbar^2 delta^2 / J)^(1/3), i.e. H(t) * t0 / t_hat, which is
    the field of the instantaneous ground state u^1(t t0 / t_hat).  Vanishes
    linearly in H0.
    """
    if not H > 0:
        raise DomainError(f"renormalized field needs H > 0, got {H!r}")
    return H * params.H0 / (params.hbar**2 * params.delta**2 / params.J) ** (1.0 / 3.0)


@dataclass(frozen=True)
class DerivedScales:
    """Energy and time scales that follow from a ModelParams."""

    params: ModelParams

    @property
    def t_hat(self) -> float:
        return freeze_out_time(self.params)

    @property
    def E_thin_magnon(self) -> float:
        return self.params.J

    @property
    def E_thin_tower(self) -> float:
        return self.params.J / self.params.N

    def omega_S(self, H: float) -> float:
        return static_omega(self.params, H)

    def E_thin_dual(self, H: float) -> float:
        if H < 0:
            raise DomainError(f"negative field {H!r}")
        return math.sqrt(self.params.J * H)


@dataclass(frozen=True)
class ContinuumHamiltonian:
    """Collective-coordinate Hamiltonian Pi^2 / (2 m(t)) + k S^2 / 2.

    ``m(t) = 2 hbar^2 / (N H(t))`` and ``k = 2J / N``; identical to
    (H N / 4 hbar^2) Pi^2 + (J / N) S^2.
    """

    params: ModelParams

    @property
    def stiffness(self) -> float:
        return 2.0 * self.params.J / self.params.N

    def mass(self, H: float) -> float:
        if not H > 0:
            raise DomainError(f"mass diverges at H={H!r}")
        return 2.0 * self.params.hbar**2 / (self.params.N * H)

    def kinetic_coefficient(self, H: float) -> float:
        """Coefficient of Pi^2, H N / (4 hbar^2)."""
        return H * self.params.N / (4.0 * self.params.hbar**2)

    def potential_coefficient(self) -> float:
        """Coefficient of S^2, J / N."""
        return self.params.J / self.params.N

    def frequency(self, H: float) -> float:
        """Classical angular frequency sqrt(k / m(H))."""
        return math.sqrt(self.stiffness / self.mass(H))
