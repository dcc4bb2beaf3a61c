"""
Spectral calculus for Hermitian matrices and the Fermi-Dirac distribution.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, NumericalError
from .lattice import _same_dim, check_hermitian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThermoParams:
    """Inverse temperature ``beta`` (may be ``inf``), chemical potential, dissipation ``lam`` and field ``E``."""

    beta: float
    mu: float
    lam: float
    E: float = 0.0

    def __post_init__(self):
        for name in ("beta", "mu", "lam", "E"):
            value = getattr(self, name)
            if not isinstance(value, (int, float, np.floating, np.integer)) or math.isnan(value):
                raise ConfigError(f"{name} must be a real number, got {value!r}")
        if not self.beta > 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if not self.lam > 0 or math.isinf(self.lam):
            raise ConfigError(f"lambda must be positive and finite, got {self.lam}")
        if math.isinf(self.mu) or math.isinf(self.E):
            raise ConfigError("mu and E must be finite")

    def replace(self, **changes) -> "ThermoParams":
        values = dict(beta=self.beta, mu=self.mu, lam=self.lam, E=self.E)
        values.update(changes)
        return ThermoParams(**values)


def fermi_dirac(eps, beta: float, mu: float):
    """
    Occupation ``1 / (1 + exp(beta (eps - mu)))``.

    Evaluated as ``exp(-|x|) / (1 + exp(-|x|))`` on the upper branch so that
    no exponential overflows. For ``beta = inf`` this is the step function
    with value 1/2 exactly at ``eps == mu``.
    """
    eps = np.asarray(eps, dtype=float)
    if math.isinf(beta):
        out = np.where(eps < mu, 1.0, np.where(eps > mu, 0.0, 0.5))
    else:
        x = beta * (eps - mu)
        t = np.exp(-np.abs(x))
        out = np.where(x > 0, t / (1.0 + t), 1.0 / (1.0 + t))
    return out[()] if out.ndim == 0 else out


def fermi_dirac_derivative(eps, beta: float, mu: float):
    """``d f / d eps = -beta / (4 cosh^2(beta (eps - mu) / 2))``; zero almost everywhere for ``beta = inf``."""
    eps = np.asarray(eps, dtype=float)
    if math.isinf(beta):
        out = np.zeros_like(eps)
    else:
        t = np.exp(-np.abs(beta * (eps - mu)))
        out = -beta * t / (1.0 + t) ** 2
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and the unitary matrix of eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T

    def to_eigenbasis(self, a: np.ndarray) -> np.ndarray:
        """``U^dagger A U``."""
        u = self.eigenvectors
        return u.conj().T @ a @ u

    def from_eigenbasis(self, a: np.ndarray) -> np.ndarray:
        """``U A U^dagger``."""
        u = self.eigenvectors
        return u @ a @ u.conj().T


def eig_hermitian(a: np.ndarray) -> SpectralDecomposition:
    a = check_hermitian(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    return SpectralDecomposition(w, v)


def matrix_function(decomp: SpectralDecomposition, g: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """``g(A) = U diag(g(eps)) U^dagger``; ``g`` is called once on the eigenvalue vector."""
    values = np.broadcast_to(np.asarray(g(decomp.eigenvalues), dtype=float), decomp.eigenvalues.shape)
    u = decomp.eigenvectors
    out = (u * values) @ u.conj().T
    return 0.5 * (out + out.conj().T)


def fermi_operator(decomp: SpectralDecomposition, beta: float, mu: float) -> np.ndarray:
    """Equilibrium covariance ``f_{beta,mu}(h)``."""
    if math.isinf(beta):
        hits = np.abs(decomp.eigenvalues - mu) <= 1e-10 * max(1.0, abs(mu))
        if np.any(hits):
            logger.warning("beta=inf: %d eigenvalue(s) within 1e-10 of mu=%g; occupation at the "
                           "chemical potential depends on rounding", int(hits.sum()), mu)
    return matrix_function(decomp, lambda e: fermi_dirac(e, beta, mu))


def commutator_i(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``i (AB - BA)``."""
    _same_dim(a, b)
    return 1j * (a @ b - b @ a)
