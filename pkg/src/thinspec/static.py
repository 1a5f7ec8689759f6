"""Equilibrium thin-spectrum theory and half-line Gaussian-Hermite algebra.

States live on the half-line S >= 0 and carry odd order n only, so that they
vanish at S = 0.  An order-n state with complex width ``omega = a + ib`` and
quantal phase ``phi`` is

    sqrt(1 / (2^(n-1) n!)) (a/pi)^(1/4) exp(-i(n+1/2)phi) H_n(sqrt(a) S) exp(-S^2 omega / 2)

which is normalised to one on the half-line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, ModelParams, static_omega

# Rescaling threshold for the Hermite recurrence; keeps |h| far from overflow.
_RESCALE = 1e150
_LOG_RESCALE = math.log(_RESCALE)

# Gauss-Legendre panel used by the half-line quadrature.
_GL_ORDER = 24
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)

# S_max = _TAIL / sqrt(min Re omega); the n=1 tail beyond it is < exp(-70).
_TAIL = 12.0


def _check_odd(n: int) -> int:
    if int(n) != n or n < 1 or n % 2 == 0:
        raise DomainError(f"order n must be an odd positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class GaussianHermiteState:
    """Order-n half-line state with complex width ``omega`` and quantal phase ``phi``."""

    n: int
    omega: complex
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n", _check_odd(self.n))
        object.__setattr__(self, "omega", complex(self.omega))
        if not self.omega.real > 0:
            raise DomainError(f"Re(omega) must be positive, got {self.omega!r}")

    def __call__(self, S):
        return gaussian_hermite(self.n, self.omega, self.phi, S)

    @property
    def support(self) -> float:
        """Half-line cutoff beyond which the state is negligible."""
        return half_line_cutoff(self.omega.real, self.n)


@dataclass(frozen=True)
class StaticGroundState:
    """Snapshot ground state u^1 at field H (real width, zero phase)."""

    H: float
    state: GaussianHermiteState


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised Hermite functions psi_0..psi_{n_max} at points ``x``.

    Returns an array of shape (n_max + 1, len(x)).  The three-term recurrence
    is carried on rescaled values with a per-point log scale, so orders in the
    thousands do not overflow or lose the Gaussian factor to underflow.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1, x.size))
    for n, values in enumerate(_hermite_iter(n_max, x)):
        out[n] = values
    return out


def _hermite_iter(n_max: int, x: np.ndarray):
    """Yield psi_n(x) for n = 0..n_max."""
    log_scale = -0.5 * x * x - 0.25 * math.log(math.pi)
    h_prev = np.zeros_like(x)
    h = np.ones_like(x)
    yield np.exp(log_scale)
    for n in range(n_max):
        h_next = math.sqrt(2.0 / (n + 1)) * x * h - math.sqrt(n / (n + 1)) * h_prev
        h_prev, h = h, h_next
        big = np.abs(h) > _RESCALE
        if big.any():
            h[big] /= _RESCALE
            h_prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        yield h * np.exp(log_scale)


def gaussian_hermite(n: int, omega: complex, phi: float, S):
    """Evaluate the half-line order-n state pointwise (n odd)."""
    n = _check_odd(n)
    omega = complex(omega)
    a = omega.real
    if not a > 0:
        raise DomainError(f"Re(omega) must be positive, got {omega!r}")
    S = np.asarray(S, dtype=float)
    x = np.sqrt(a) * np.ravel(S)
    *_, values = _hermite_iter(n, x)
    # psi_n(x) already holds H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)).
    amp = math.sqrt(2.0) * a**0.25 * values
    chirp = np.exp(-0.5j * omega.imag * np.ravel(S) ** 2)
    out = amp * chirp * np.exp(-1j * (n + 0.5) * phi)
    return out.reshape(S.shape) if S.ndim else complex(out[0])


def half_line_cutoff(re_omega: float, n: int = 1) -> float:
    """Cutoff S_max for quadrature of an order-n state of real width ``re_omega``."""
    return (_TAIL + math.sqrt(2.0 * n + 1.0)) / math.sqrt(re_omega)


def half_line_nodes(s_max: float, k_max: float, min_panels: int = 8):
    """Composite Gauss-Legendre nodes and weights on [0, s_max].

    ``k_max`` is the largest local wavenumber the integrand carries; panels
    are sized so each covers well under one oscillation.
    """
    panels = max(min_panels, int(math.ceil(s_max * max(k_max, 1e-12) / 2.0)))
    edges = np.linspace(0.0, s_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


def half_line_norm(state: GaussianHermiteState) -> float:
    """Numerically integrated norm of ``state`` over S >= 0."""
    a = state.omega.real
    s_max = state.support
    # |psi|^2 only sees Re(omega): the chirp exp(-i Im(omega) S^2 / 2) drops out
    k_max = math.sqrt(2.0 * state.n + 1.0) * math.sqrt(a)
    nodes, weights = half_line_nodes(s_max, k_max)
    return float(np.sum(weights * np.abs(state(nodes)) ** 2))


def snapshot_eigenstate(params: ModelParams, H: float, n: int = 1) -> GaussianHermiteState:
    """Instantaneous eigenstate u^n at field H (real width, phase zero)."""
    n = _check_odd(n)
    return GaussianHermiteState(n=n, omega=static_omega(params, H), phi=0.0)


def static_ground_state(params: ModelParams, H: float) -> StaticGroundState:
    return StaticGroundState(H=H, state=snapshot_eigenstate(params, H, 1))


def dual_thin_energy(params: ModelParams, H: float, n: int) -> float:
    """Energy sqrt(J H) (n + 1/2) of level n in the dual thin spectrum."""
    if not H > 0:
        raise DomainError(f"dual thin spectrum needs H > 0, got {H!r}")
    if int(n) != n or n < 0:
        raise DomainError(f"level index must be a non-negative integer, got {n!r}")
    return math.sqrt(params.J * H) * (n + 0.5)


def static_order_parameter(params: ModelParams, H: float) -> float:
    """Static staggered magnetisation 2<S_A^z - S_B^z> ~ N exp(-omega_S(H))."""
    return params.N * math.exp(-static_omega(params, H))


def overlap_n1(bra_omega: complex, ket_omega: complex) -> float:
    """|<1_bra|1_ket>|^2 = 8 (Re w1 Re w2)^(3/2) / |conj(w1) + w2|^3 for n = 1 states."""
    w1, w2 = complex(bra_omega), complex(ket_omega)
    if not (w1.real > 0 and w2.real > 0):
        raise DomainError(f"widths need positive real parts, got {w1!r}, {w2!r}")
    return 8.0 * (w1.real * w2.real) ** 1.5 / abs(w1.conjugate() + w2) ** 3


def overlap_n1_array(bra_omega, ket_omega) -> np.ndarray:
    """Vectorised ``overlap_n1`` (no domain checks)."""
    w1 = np.asarray(bra_omega, dtype=complex)
    w2 = np.asarray(ket_omega, dtype=complex)
    return 8.0 * (w1.real * w2.real) ** 1.5 / np.abs(np.conj(w1) + w2) ** 3


def expand_in_snapshot_basis(state: GaussianHermiteState, basis_omega: float, n_max: int) -> np.ndarray:
    """Coefficients c_n = <u^n_basis | state> for n = 0..n_max by quadrature.

    The basis has real width ``basis_omega``.  Even-n entries are structural
    zeros.  The returned array has length n_max + 1.
    """
    n_max = _check_odd(n_max)
    basis_omega = float(basis_omega)
    if not basis_omega > 0:
        raise DomainError(f"basis width must be positive, got {basis_omega!r}")
    a_ket = state.omega.real
    # basis functions are bounded, so the ket's own support limits the integrand
    s_max = state.support
    k_basis = math.sqrt(2.0 * n_max + 1.0) * math.sqrt(basis_omega)
    k_ket = math.sqrt(2.0 * state.n + 1.0) * math.sqrt(a_ket) + abs(state.omega.imag) * s_max
    nodes, weights = half_line_nodes(s_max, k_basis + k_ket)
    ket = state(nodes) * weights
    scale = math.sqrt(2.0) * basis_omega**0.25
    coeffs = np.zeros(n_max + 1, dtype=complex)
    for n, values in enumerate(_hermite_iter(n_max, math.sqrt(basis_omega) * nodes)):
        if n % 2:
            coeffs[n] = scale * np.dot(values, ket)
    return coeffs
