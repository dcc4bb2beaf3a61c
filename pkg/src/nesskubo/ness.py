"""
Non-equilibrium steady states of the dissipative one-particle dynamics.

A quasi-free state is represented by its covariance matrix ``R`` with
``omega(a*_x a_y) = R[y, x]``. Under the field Hamiltonian ``h_E`` and
relaxation towards ``F = f(h)`` at rate ``2 lam`` the covariance obeys

    dR/dt = -i[h_E, R] - 2 lam (R - F),

whose solution and fixed point are evaluated in closed form in the
eigenbasis of ``h_E`` (no time stepping).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError, NumericalError, UnsupportedOperationError
from .lattice import (OPEN, LatticeSpec, PotentialSpec, build_field_hamiltonian,
                      build_hamiltonian, build_position, check_hermitian)
from .spectral import SpectralDecomposition, ThermoParams, eig_hermitian, fermi_operator

logger = logging.getLogger(__name__)

COVARIANCE_TOL = 1e-10

CURRENT_CONVENTIONS = ("forward", "reversed", "literal")


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Two-point matrix of a quasi-free state; ``0 <= R <= 1`` is checked on construction."""

    R: np.ndarray
    spectrum_bounds: tuple = field(init=False, repr=False)

    def __post_init__(self):
        r = check_hermitian(self.R, tol=1e-10)
        spec = np.linalg.eigvalsh(0.5 * (r + r.conj().T)) if r.size else np.zeros(0)
        if spec.size and (spec[0] < -COVARIANCE_TOL or spec[-1] > 1 + COVARIANCE_TOL):
            raise NumericalError(f"covariance spectrum [{spec[0]:.3e}, {spec[-1]:.3e}] leaves [0, 1]")
        object.__setattr__(self, "spectrum_bounds", (float(spec[0]), float(spec[-1])) if spec.size else (0.0, 0.0))

    def density(self, index: int) -> float:
        return float(self.R[index, index].real)


def _check_lambda(lam: float) -> None:
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam}")


def _energy_differences(decomp: SpectralDecomposition) -> np.ndarray:
    e = decomp.eigenvalues
    return e[:, None] - e[None, :]


def ness_covariance(hE_decomp: SpectralDecomposition, F: np.ndarray, lam: float) -> CovarianceState:
    """
    Steady-state covariance ``2 lam int_0^inf e^{-2 lam s} e^{-i s h_E} F e^{i s h_E} ds``.

    In the eigenbasis of ``h_E`` the time integral is a resolvent factor,
    ``R~_ab = 2 lam F~_ab / (2 lam + i (e_a - e_b))``.
    """
    _check_lambda(lam)
    ft = hE_decomp.to_eigenbasis(F)
    kernel = 2 * lam / (2 * lam + 1j * _energy_differences(hE_decomp))
    r = hE_decomp.from_eigenbasis(ft * kernel)
    return CovarianceState(0.5 * (r + r.conj().T))


def evolve_covariance(R0: CovarianceState, t: float, hE_decomp: SpectralDecomposition,
                      F: np.ndarray, lam: float) -> CovarianceState:
    """
    Covariance at time ``t`` starting from ``R0``:
    ``e^{-2 lam t} e^{-i t h_E} R0 e^{i t h_E} + 2 lam int_0^t e^{-2 lam s} e^{-i s h_E} F e^{i s h_E} ds``.
    """
    _check_lambda(lam)
    if t < 0:
        raise ConfigError(f"time must be non-negative, got {t}")
    if t == 0:
        return R0
    de = _energy_differences(hE_decomp)
    rate = 2 * lam + 1j * de
    decay = np.exp(-rate * t)
    r0t = hE_decomp.to_eigenbasis(R0.R)
    ft = hE_decomp.to_eigenbasis(F)
    # -expm1 keeps (1 - e^{-rate t}) accurate for small t
    r = hE_decomp.from_eigenbasis(decay * r0t + 2 * lam * ft * (-np.expm1(-rate * t)) / rate)
    return CovarianceState(0.5 * (r + r.conj().T))


def covariance_rhs(R: np.ndarray, hE: np.ndarray, F: np.ndarray, lam: float) -> np.ndarray:
    """Right-hand side ``-i[h_E, R] - 2 lam (R - F)`` of the covariance equation of motion."""
    return -1j * (hE @ R - R @ hE) - 2 * lam * (R - F)


def site_current(R: CovarianceState, lattice: LatticeSpec, x: Sequence[int], direction: int = 1,
                 convention: str = "forward") -> float:
    """
    Expectation of the bond-averaged particle current at site ``x``.

    ``convention="forward"`` (default) counts particles moving towards
    ``+e_direction``: ``Im R[x+e, x] + Im R[x, x-e]``. Its field derivative is
    the conductivity of :mod:`nesskubo.kubo`. ``"reversed"`` is the negative of
    this; ``"literal"`` evaluates the variant of the operator whose last term
    repeats ``a*_x a_{x+e}``; it is not self-adjoint and only its real part is
    returned. The last two are diagnostics.
    """
    if convention not in CURRENT_CONVENTIONS:
        raise ValueError(f"convention must be one of {CURRENT_CONVENTIONS}, got {convention!r}")
    lattice.require_interior(x, direction)
    r = R.R
    i0 = lattice.index(x)
    ip = lattice.index(lattice.neighbor(x, direction, +1))
    im = lattice.index(lattice.neighbor(x, direction, -1))
    forward = float(r[ip, i0].imag + r[i0, im].imag)
    if convention == "forward":
        return forward
    if convention == "reversed":
        return -forward
    return float((0.5j * (r[i0, im] - r[i0, ip])).real)


def equilibrium_operator(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams):
    """``(h, f(h))`` for the lattice problem."""
    h = build_hamiltonian(lattice, potential)
    return h, fermi_operator(eig_hermitian(h), params.beta, params.mu)


def steady_state(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams,
                 direction: int = 1, F: np.ndarray = None) -> CovarianceState:
    """NESS covariance for a field ``params.E`` along ``direction`` (open boundary only)."""
    if lattice.boundary != OPEN:
        raise UnsupportedOperationError("a static field needs the position operator; use an open boundary")
    if F is None:
        h, F = equilibrium_operator(lattice, potential, params)
    else:
        h = build_hamiltonian(lattice, potential)
    hE = build_field_hamiltonian(h, build_position(lattice, direction), params.E)
    return ness_covariance(eig_hermitian(hE), F, params.lam)


def steady_current(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams,
                   x: Sequence[int] = None, direction: int = 1, convention: str = "forward") -> float:
    """Current at site ``x`` (default: the centre) in the steady state at field ``params.E``."""
    x = lattice.center if x is None else tuple(x)
    lattice.require_interior(x, direction)
    return site_current(steady_state(lattice, potential, params, direction), lattice, x, direction, convention)
