"""
Closed-form references: the field-driven free chain and the free continuum.

For ``V = 0`` the steady-state covariance is a multiplication operator in
momentum space,

    R(k) = 2 lam int_0^inf e^{-2 lam s} f(eps(k + s E)) ds,

and the current reduces to one-dimensional quadratures. In this momentum
representation the position operator is ``-i d/dk``, so the velocity is
``-eps'(k)``; with that sign the current is positive for ``E > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .spectral import ThermoParams, fermi_dirac

# exp(-2 lam s) < 1e-14 beyond this many relaxation units
_TRUNCATION = math.log(1e14)


@dataclass(frozen=True)
class Dispersion:
    """Band energy ``eps(k)`` with its first two derivatives."""

    name: str
    value: Callable[[float], float]
    first: Callable[[float], float]
    second: Callable[[float], float]
    periodic: bool = True

    def __call__(self, k):
        return self.value(k)


def cosine_dispersion(amplitude: float = 2.0) -> Dispersion:
    """``eps(k) = -amplitude cos k``; amplitude 2 matches unit nearest-neighbour hopping."""
    a = float(amplitude)
    return Dispersion(f"cosine({a:g})",
                      lambda k: -a * np.cos(k),
                      lambda k: a * np.sin(k),
                      lambda k: a * np.cos(k))


def quadratic_dispersion() -> Dispersion:
    """Free continuum ``eps(k) = k^2 / 2``."""
    return Dispersion("quadratic", lambda k: 0.5 * np.asarray(k) ** 2, lambda k: np.asarray(k) * 1.0,
                      lambda k: np.ones_like(np.asarray(k, dtype=float)), periodic=False)


def _crossings(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, samples: int = 4097) -> list:
    """Roots of ``g`` on ``[a, b]`` located from sign changes on a uniform sample and refined by brentq."""
    x = np.linspace(a, b, samples)
    y = g(x)
    roots = []
    for i in np.flatnonzero(np.sign(y[:-1]) * np.sign(y[1:]) < 0):
        roots.append(optimize.brentq(lambda t: float(g(t)), x[i], x[i + 1], xtol=1e-15, rtol=1e-15))
    roots.extend(x[np.flatnonzero(y == 0)].tolist())
    return sorted(roots)


def _piecewise_quad(fn, a: float, b: float, breaks, epsabs=1e-14, epsrel=1e-12) -> float:
    edges = [a] + [t for t in breaks if a < t < b] + [b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi > lo:
            total += integrate.quad(fn, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=500)[0]
    return total


def solvable_ness_distribution(k: float, params: ThermoParams, dispersion: Dispersion = None) -> float:
    """Steady-state occupation ``R(k)`` of momentum ``k`` by quadrature over the relaxation time."""
    dispersion = cosine_dispersion() if dispersion is None else dispersion
    beta, mu, lam, E = params.beta, params.mu, params.lam, params.E
    if E == 0:
        return float(fermi_dirac(dispersion(k), beta, mu))
    s_max = _TRUNCATION / (2 * lam)

    def integrand(s):
        return 2 * lam * math.exp(-2 * lam * s) * float(fermi_dirac(dispersion(k + s * E), beta, mu))

    breaks = []
    if math.isinf(beta):
        breaks = _crossings(lambda s: dispersion(k + np.asarray(s) * E) - mu, 0.0, s_max,
                            samples=max(4097, int(64 * abs(E) * s_max) + 1))
    else:
        # resolve each passage through the Fermi level
        period = 2 * math.pi / abs(E) if dispersion.periodic else s_max
        breaks = list(np.arange(period / 4, s_max, period / 4))
    value = _piecewise_quad(integrand, 0.0, s_max, breaks)
    return float(min(max(value, 0.0), 1.0))


def _band_average(fn, dispersion: Dispersion, beta: float, mu: float) -> float:
    """``(1/2pi) int_{-pi}^{pi} fn(k) dk`` with breakpoints at Fermi crossings for ``beta = inf``."""
    breaks = _crossings(lambda k: dispersion(k) - mu, -math.pi, math.pi) if math.isinf(beta) else []
    return _piecewise_quad(fn, -math.pi, math.pi, breaks) / (2 * math.pi)


def curvature_weight(params: ThermoParams, dispersion: Dispersion = None) -> float:
    """``(1/2pi) int f(eps(k)) eps''(k) dk``, the band integral common to current and conductivity."""
    dispersion = cosine_dispersion() if dispersion is None else dispersion
    beta, mu = params.beta, params.mu
    return _band_average(lambda k: float(fermi_dirac(dispersion(k), beta, mu)) * float(dispersion.second(k)),
                         dispersion, beta, mu)


def solvable_current(params: ThermoParams, dispersion: Dispersion = None) -> float:
    """
    Steady-state current of the free chain,
    ``2 lam E / (4 lam^2 + E^2) * (1/2pi) int f(eps(k)) eps''(k) dk``.
    """
    lam, E = params.lam, params.E
    if E == 0:
        return 0.0
    return 2 * lam * E / (4 * lam ** 2 + E ** 2) * curvature_weight(params, dispersion)


def solvable_current_direct(params: ThermoParams, dispersion: Dispersion = None) -> float:
    """
    Current as ``(1/2pi) int (-eps'(k)) R(k) dk`` with ``R(k)`` from
    :func:`solvable_ness_distribution`; a slow double quadrature used to
    cross-check :func:`solvable_current`.
    """
    dispersion = cosine_dispersion() if dispersion is None else dispersion
    if params.E == 0:
        return 0.0

    def integrand(k):
        return -float(dispersion.first(k)) * solvable_ness_distribution(k, params, dispersion)

    ks = np.linspace(-math.pi, math.pi, 257)
    return sum(integrate.quad(integrand, lo, hi, epsabs=1e-12, epsrel=1e-10, limit=200)[0]
               for lo, hi in zip(ks[:-1], ks[1:])) / (2 * math.pi)


def solvable_conductivity(params: ThermoParams, dispersion: Dispersion = None) -> float:
    """``dj/dE`` at ``E = 0``: ``(1 / 2 lam) (1/2pi) int f eps'' dk``."""
    return curvature_weight(params, dispersion) / (2 * params.lam)


def drude_density(beta: float, mu: float) -> float:
    """Particle density ``int_R f(k^2 / 2) dk`` of the free continuum."""
    if math.isinf(beta):
        return 2 * math.sqrt(2 * mu) if mu > 0 else 0.0

    def occ(k):
        return float(fermi_dirac(0.5 * k * k, beta, mu))

    if mu > 0:
        kf = math.sqrt(2 * mu)
        w = min(kf, 60.0 / (beta * kf))
        edges = [0.0, kf - w, kf, kf + w]
    else:
        edges = [0.0, math.sqrt(2 * (abs(mu) + 60.0 / beta))]
    total = sum(integrate.quad(occ, lo, hi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
                for lo, hi in zip(edges[:-1], edges[1:]) if hi > lo)
    total += integrate.quad(occ, edges[-1], np.inf, epsabs=1e-14, limit=200)[0]
    return 2 * total


def drude_current(params: ThermoParams) -> float:
    """Drude current ``j = E rho / (2 lam)``: relaxation time ``1 / (2 lam)``, unit charge and mass."""
    if params.E == 0:
        return 0.0
    return params.E * drude_density(params.beta, params.mu) / (2 * params.lam)
