"""
Site-resolved dc conductivity of the dissipative steady state.

The linear response of the steady-state current to the field is

    sigma_x = Re int_0^inf e^{-2 lam s} <x| e^{-i s h} i[Q, f(h)] e^{i s h} v |x> ds,

with ``v = i[h, Q]``. Each pair of eigenmodes contributes the resolvent
factor ``1 / (2 lam + i (eps_n - eps_m))``, which stays finite on
degeneracies, so the sum is evaluated exactly without special cases.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from .errors import ConfigError, SiteRangeError
from .lattice import (OPEN, LatticeSpec, PotentialSpec, build_hamiltonian, build_position,
                      build_velocity, lattice_velocity, position_commutator)
from .ness import equilibrium_operator, site_current, steady_state
from .spectral import SpectralDecomposition, ThermoParams, commutator_i, eig_hermitian, fermi_operator

logger = logging.getLogger(__name__)


def conductivity_from_vertex(h_decomp: SpectralDecomposition, vertex: np.ndarray, v1: np.ndarray,
                             lam: float, x: int) -> float:
    """Resolvent sum for a precomputed vertex ``A = i[Q_1, f(h)]``; ``x`` is a flat site index."""
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    n = h_decomp.dim
    if not 0 <= x < n:
        raise SiteRangeError(f"site index {x} outside 0..{n - 1}")
    u = h_decomp.eigenvectors
    e = h_decomp.eigenvalues
    left = u[x, :]                        # <x|n>
    right = u.conj().T @ v1[:, x]         # <m|v|x>
    at = h_decomp.to_eigenbasis(vertex)
    kernel = 1.0 / (2 * lam + 1j * (e[:, None] - e[None, :]))
    return float(np.real(left @ (at * kernel) @ right))


def conductivity_site(h_decomp: SpectralDecomposition, F: np.ndarray, Q1: np.ndarray, v1: np.ndarray,
                      lam: float, x: int) -> float:
    """Conductivity at flat site index ``x`` from the position operator ``Q1`` (open boundary)."""
    return conductivity_from_vertex(h_decomp, commutator_i(Q1, F), v1, lam, x)


def site_conductivity(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams,
                      site: Sequence[int] = None, direction: int = 1) -> float:
    """
    Conductivity at ``site`` (default: centre) for either boundary.

    On a torus ``i[Q, .]`` is replaced by minimal-image displacements, which
    is exact for the nearest-neighbour velocity.
    """
    site = lattice.center if site is None else tuple(site)
    return sites_conductivity(lattice, potential, params, [site], direction)[0]


def sites_conductivity(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams,
                       sites: Sequence[Sequence[int]], direction: int = 1) -> list:
    """Like :func:`site_conductivity` for several sites, sharing one eigendecomposition."""
    h = build_hamiltonian(lattice, potential)
    decomp = eig_hermitian(h)
    F = fermi_operator(decomp, params.beta, params.mu)
    if lattice.boundary == OPEN:
        q = build_position(lattice, direction)
        vertex = commutator_i(q, F)
        v1 = build_velocity(h, q)
    else:
        vertex = position_commutator(lattice, F, direction)
        v1 = lattice_velocity(lattice, h, direction)
    out = []
    for site in sites:
        lattice.require_interior(site, direction)
        sigma = conductivity_from_vertex(decomp, vertex, v1, params.lam, lattice.index(site))
        if sigma < 0:
            logger.warning("negative conductivity %.6g at site %s (beta=%g, mu=%g, lambda=%g)",
                           sigma, tuple(site), params.beta, params.mu, params.lam)
        out.append(sigma)
    return out


def center_cell(lattice: LatticeSpec, potential: PotentialSpec) -> list:
    """Sites of the unit cell containing the origin (just the origin for non-periodic potentials)."""
    if potential is None or potential.kind != "periodic":
        return [lattice.center]
    cell = np.indices(potential.periods).reshape(len(potential.periods), -1).T
    return [tuple(int(c) for c in row) for row in cell]


def cell_conductivity(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams,
                      direction: int = 1) -> float:
    """Mean of the site conductivities over the unit cell at the centre of the box."""
    sites = center_cell(lattice, potential)
    return float(np.mean(sites_conductivity(lattice, potential, params, sites, direction)))


def conductivity_finite_difference(lattice: LatticeSpec, potential: PotentialSpec, params: ThermoParams,
                                   x: Sequence[int] = None, dE: float = 1e-4, direction: int = 1,
                                   richardson_check: bool = True) -> float:
    """
    Centred difference ``(j(dE) - j(-dE)) / (2 dE)`` of the steady-state current.

    ``params.E`` is ignored. With ``richardson_check`` the difference is
    repeated at ``dE / 2``; the two must agree to within the expected
    ``O(dE^2)`` truncation, otherwise a warning is logged.
    """
    if dE == 0:
        raise ConfigError("dE must be non-zero")

    x = lattice.center if x is None else tuple(x)
    lattice.require_interior(x, direction)
    _, F = equilibrium_operator(lattice, potential, params)

    def current(E):
        state = steady_state(lattice, potential, params.replace(E=E), direction, F=F)
        return site_current(state, lattice, x, direction)

    def diff(step):
        return (current(step) - current(-step)) / (2 * step)

    sigma = diff(dE)
    if richardson_check:
        half = diff(dE / 2)
        # truncation error scales like dE^2 / (2 lam)^2 relative to sigma
        expected = 4 * abs(sigma) * (dE / (2 * params.lam)) ** 2 + 1e-10 * max(1.0, abs(sigma))
        logger.info("finite-difference conductivity: dE=%g -> %.12g, dE/2 -> %.12g", dE, sigma, half)
        if abs(sigma - half) > expected:
            logger.warning("finite difference not in the O(dE^2) regime: |sigma(dE) - sigma(dE/2)| = %.3e",
                           abs(sigma - half))
    return sigma
