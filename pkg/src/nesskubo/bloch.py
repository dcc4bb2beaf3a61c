"""
Periodic potentials: Bloch Hamiltonians, band structures and band-resolved
conductivities.

Two gauges of the cell Hamiltonian are used. The *twisted* gauge puts the
phase ``e^{i k_l p_l}`` only on hops that leave the cell, which is the
boundary-condition form ``phi(x + p_l e_l) = e^{i k_l p_l} phi(x)``. The
*periodic* gauge attaches ``e^{i k . (y - x)}`` to every bond ``x -> y``. Both
have the same spectrum, but only in the periodic gauge does ``d/dk_l``
correspond to the commutator with the position operator, so every
derivative below is taken there.

Brillouin-zone integrals use the measure ``dk / (2 pi)^d``. With it the
band sums equal the mean over one unit cell of the real-space site
conductivities.
"""

from __future__ import annotations

import csv
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .errors import AssumptionViolation, ConfigError
from .lattice import PotentialSpec
from .spectral import fermi_dirac, fermi_dirac_derivative

logger = logging.getLogger(__name__)

DEGENERACY_WARN = 1e-8
DEGENERACY_FAIL = 1e-12


class DegenerateBandWarning(UserWarning):
    """Bands touch or nearly touch somewhere on the k-grid."""


@dataclass(frozen=True, eq=False)
class PeriodicProblem:
    """
    Unit cell ``{0 <= m_l < p_l}`` with on-site values ``cell_values[m]`` and a
    ``k_points[l]``-point grid per axis of the zone ``prod (-pi/p_l, pi/p_l]``.
    """

    periods: Tuple[int, ...]
    cell_values: np.ndarray
    k_points: Tuple[int, ...]
    _hops: list = field(init=False, repr=False)

    def __post_init__(self):
        periods = tuple(int(p) for p in self.periods)
        if not periods or any(p < 1 for p in periods):
            raise ConfigError(f"periods must be positive integers, got {self.periods}")
        values = np.asarray(self.cell_values, dtype=float)
        if values.size != int(np.prod(periods)):
            raise ConfigError(f"cell needs {int(np.prod(periods))} potential values, got {values.size}")
        values = values.reshape(periods)
        k_points = (int(self.k_points),) * len(periods) if np.isscalar(self.k_points) else tuple(int(m) for m in self.k_points)
        if len(k_points) != len(periods) or any(m < 2 for m in k_points):
            raise ConfigError(f"need at least 2 k-points on each of {len(periods)} axes, got {self.k_points}")
        object.__setattr__(self, "periods", periods)
        object.__setattr__(self, "cell_values", values)
        object.__setattr__(self, "k_points", k_points)
        object.__setattr__(self, "_hops", self._make_hops())

    @classmethod
    def from_potential(cls, potential: PotentialSpec, k_points) -> "PeriodicProblem":
        if potential.kind == "zero":
            return cls((1,) * (len(k_points) if not np.isscalar(k_points) else 1), [0.0], k_points)
        if potential.kind != "periodic":
            raise ConfigError("Bloch analysis needs a periodic potential")
        return cls(potential.periods, potential.cell_values, k_points)

    @property
    def dimension(self) -> int:
        return len(self.periods)

    @property
    def cell_size(self) -> int:
        return int(np.prod(self.periods))

    def cell_coords(self) -> np.ndarray:
        return np.indices(self.periods).reshape(self.dimension, -1).T

    def _make_hops(self):
        """``(i, j, displacement, winding)`` for every site ``i`` and neighbour ``x_i +- e_l``."""
        coords = self.cell_coords()
        p = np.array(self.periods)
        hops = []
        for i, x in enumerate(coords):
            for axis in range(self.dimension):
                for step in (1, -1):
                    y = x.copy()
                    y[axis] += step
                    winding = np.floor_divide(y, p)
                    j = int(np.ravel_multi_index(tuple(y - winding * p), self.periods))
                    disp = np.zeros(self.dimension)
                    disp[axis] = step
                    hops.append((i, j, disp, winding * p))
        return hops

    def zone_bounds(self) -> np.ndarray:
        return np.pi / np.array(self.periods, dtype=float)

    def grid_axes(self) -> list:
        """
        Uniform grid ``-pi/p + j dk``, ``j = 1..M``, on each axis. It ends at the
        zone edge ``pi/p`` and is mapped onto itself by ``k -> -k`` modulo a
        reciprocal vector.
        """
        axes = []
        for p, m in zip(self.periods, self.k_points):
            dk = 2 * np.pi / (p * m)
            axes.append(-np.pi / p + (np.arange(m) + 1.0) * dk)
        return axes

    def grid(self) -> np.ndarray:
        mesh = np.meshgrid(*self.grid_axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def wrap(self, k: np.ndarray) -> np.ndarray:
        """Map ``k`` into the zone, warning when anything moves."""
        k = np.atleast_2d(np.asarray(k, dtype=float))
        half = self.zone_bounds()
        width = 2 * half
        wrapped = half - np.mod(half - k, width)
        if not np.allclose(wrapped, k, rtol=0, atol=1e-12):
            warnings.warn("k outside the Brillouin zone; wrapped back", RuntimeWarning, stacklevel=3)
        return wrapped

    def hamiltonians(self, ks: np.ndarray, gauge: str = "periodic", derivative: Optional[int] = None,
                     order: int = 1) -> np.ndarray:
        """
        Stack of ``h_k`` (or ``d^order h_k / dk_l^order`` for ``derivative = l``), shape ``(nk, n, n)``.

        Derivatives are only offered in the periodic gauge.
        """
        if gauge not in ("periodic", "twisted"):
            raise ValueError(f"gauge must be 'periodic' or 'twisted', got {gauge!r}")
        ks = np.atleast_2d(np.asarray(ks, dtype=float))
        n = self.cell_size
        out = np.zeros((len(ks), n, n), dtype=complex)
        if derivative is None:
            idx = np.arange(n)
            out[:, idx, idx] = self.cell_values.ravel()
        elif gauge != "periodic":
            raise ValueError("k-derivatives are defined in the periodic gauge")
        for i, j, disp, shift in self._hops:
            phase_vec = disp if gauge == "periodic" else shift
            phase = np.exp(1j * ks @ phase_vec)
            if derivative is None:
                out[:, i, j] -= phase
            else:
                out[:, i, j] -= (1j * disp[derivative - 1]) ** order * phase
        return out


def build_bloch_hamiltonian(prob: PeriodicProblem, k, gauge: str = "twisted") -> np.ndarray:
    """``h_k`` at one quasi-momentum; ``k`` outside the zone is wrapped with a warning."""
    k = prob.wrap(np.asarray(k, dtype=float).reshape(1, -1) if np.ndim(k) else [[float(k)]])
    if k.shape[1] != prob.dimension:
        raise ValueError(f"k has {k.shape[1]} components, problem is {prob.dimension}D")
    return prob.hamiltonians(k, gauge=gauge)[0]


@dataclass(frozen=True, eq=False)
class BandStructure:
    """
    Eigenpairs of ``h_k`` on the problem's k-grid.

    ``energies`` has shape ``(nk, n_bands)`` sorted per k; ``vectors`` holds the
    periodic-gauge eigenvectors as columns. ``margin`` is the smallest
    direct gap ``min_k min_{n != m} |eps_n - eps_m|``.
    """

    problem: PeriodicProblem
    kpoints: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    margin: float

    @property
    def grid_shape(self) -> Tuple[int, ...]:
        return self.problem.k_points

    @property
    def n_bands(self) -> int:
        return self.energies.shape[1]

    @property
    def measure(self) -> float:
        """Weight of one grid point in ``dk / (2 pi)^d``."""
        return 1.0 / (len(self.kpoints) * self.problem.cell_size)

    def spacing(self, direction: int = 1) -> float:
        l = direction - 1
        return 2 * np.pi / (self.problem.periods[l] * self.problem.k_points[l])

    def band_matrix(self, direction: int = 1, order: int = 1) -> np.ndarray:
        """``<psi_n| d^order h / dk_l^order |psi_m>`` on every grid point."""
        dh = self.problem.hamiltonians(self.kpoints, derivative=direction, order=order)
        u = self.vectors
        return np.conj(np.swapaxes(u, -1, -2)) @ dh @ u

    def velocities(self, direction: int = 1) -> np.ndarray:
        """``d eps_n / dk_l`` from first-order perturbation theory."""
        return np.real(np.diagonal(self.band_matrix(direction), axis1=-2, axis2=-1))

    def curvature(self, direction: int = 1, method: str = "fd") -> np.ndarray:
        """
        ``d^2 eps_n / dk_l^2``: centred differences on the periodic grid
        (``"fd"``) or second-order perturbation theory (``"analytic"``).
        """
        if method == "fd":
            grid = self.energies.reshape(*self.grid_shape, self.n_bands)
            axis = direction - 1
            d2 = (np.roll(grid, -1, axis) - 2 * grid + np.roll(grid, 1, axis)) / self.spacing(direction) ** 2
            return d2.reshape(self.energies.shape)
        if method == "analytic":
            dh = self.band_matrix(direction)
            d2h = self.band_matrix(direction, order=2)
            de = self.energies[:, :, None] - self.energies[:, None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                mix = np.where(np.eye(self.n_bands, dtype=bool), 0.0, np.abs(dh) ** 2 / de)
            return np.real(np.diagonal(d2h, axis1=-2, axis2=-1)) + 2 * mix.sum(axis=-1)
        raise ValueError(f"method must be 'fd' or 'analytic', got {method!r}")

    def fd_velocities(self, direction: int = 1) -> np.ndarray:
        grid = self.energies.reshape(*self.grid_shape, self.n_bands)
        axis = direction - 1
        d1 = (np.roll(grid, -1, axis) - np.roll(grid, 1, axis)) / (2 * self.spacing(direction))
        return d1.reshape(self.energies.shape)

    def require_nondegenerate(self) -> None:
        if self.margin <= DEGENERACY_FAIL:
            raise AssumptionViolation(f"bands touch on the k-grid (margin {self.margin:.3e}); "
                                      "band-resolved formulas need nondegenerate h_k")


def band_structure(prob: PeriodicProblem) -> BandStructure:
    ks = prob.grid()
    e, u = np.linalg.eigh(prob.hamiltonians(ks))
    if e.shape[1] > 1:
        margin = float(np.min(np.diff(e, axis=1)))
    else:
        margin = math.inf
    if margin < DEGENERACY_WARN:
        warnings.warn(f"nondegeneracy margin {margin:.3e} below {DEGENERACY_WARN:g}: bands (nearly) touch",
                      DegenerateBandWarning, stacklevel=2)
    return BandStructure(prob, ks, e, u, margin)


def _exact_band(prob: PeriodicProblem, n: int, direction: int, base: np.ndarray):
    """Band ``n`` and its velocity along ``direction`` as functions of ``k_direction`` with other components fixed."""
    def point(t):
        k = base.copy()
        k[direction - 1] = t
        return k

    def energy(t):
        return float(np.linalg.eigvalsh(prob.hamiltonians(point(t))[0])[n])

    def velocity(t):
        k = point(t)
        e, u = np.linalg.eigh(prob.hamiltonians(k)[0])
        dh = prob.hamiltonians(k, derivative=direction)[0]
        return float(np.real(u[:, n].conj() @ dh @ u[:, n]))

    return energy, velocity


def _occupations(bands: BandStructure, beta: float, mu: float) -> np.ndarray:
    """
    Grid weights of ``f(eps)``. For ``beta = inf`` in 1D each node gets the
    occupied fraction of its dual cell under linear interpolation of the band,
    which keeps the step-function integrals second-order accurate.
    """
    e = bands.energies
    if not math.isinf(beta) or bands.problem.dimension != 1:
        return fermi_dirac(e, beta, mu)
    right = 0.5 * (e + np.roll(e, -1, axis=0))
    left = 0.5 * (e + np.roll(e, 1, axis=0))

    def fraction(a, b):
        # occupied share of a segment interpolating linearly from a to b
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.clip((mu - a) / (b - a), 0.0, 1.0)
        return np.where((a < mu) & (b < mu), 1.0,
                        np.where((a >= mu) & (b >= mu), 0.0, np.where(a < mu, t, 1.0 - t)))

    return 0.5 * (fraction(e, right) + fraction(e, left))


@dataclass(frozen=True)
class BlochConductivity:
    """Split of the band-resolved conductivity into intra- and interband parts."""

    diagonal: float
    off_diagonal: float
    bound: float

    @property
    def total(self) -> float:
        return self.diagonal + self.off_diagonal


def off_diagonal_bound(bands: BandStructure, lam: float, direction: int = 1) -> float:
    """
    ``(4 lam / C) sum_{n != m} <Tr P^n (dP^m)^2>`` with ``C`` the nondegeneracy margin.

    For ``n != m``, ``Tr P^n (dP^m)^2 = |<n|dh|m>|^2 / (eps_n - eps_m)^2``.
    """
    if bands.n_bands == 1:
        return 0.0
    bands.require_nondegenerate()
    dh = bands.band_matrix(direction)
    de = bands.energies[:, :, None] - bands.energies[:, None, :]
    off = ~np.eye(bands.n_bands, dtype=bool)
    total = np.sum((np.abs(dh) ** 2)[:, off] / de[:, off] ** 2) * bands.measure
    return 4 * lam / bands.margin * float(total)


def conductivity_bloch_parts(bands: BandStructure, beta: float, mu: float, lam: float,
                             direction: int = 1) -> BlochConductivity:
    """
    Band-basis evaluation of the cell-averaged conductivity.

    The k-integrand is ``-Re sum_{n,m} <n|df|m><m|dh|n> / (2 lam + i (eps_n - eps_m))``
    with ``<n|df|m> = (f_n - f_m) / (eps_n - eps_m) <n|dh|m>`` off the diagonal
    and ``f'(eps_n) d eps_n`` on it. At ``beta = inf`` the diagonal part is the
    Fermi-surface integral.
    """
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    bands.require_nondegenerate()
    dh = bands.band_matrix(direction)
    e = bands.energies
    w2 = np.abs(dh) ** 2
    if math.isinf(beta):
        if bands.problem.dimension <= 2:
            diagonal = fermi_surface_conductivity(bands, mu, lam, direction)
        else:
            diagonal = conductivity_bloch_leading(bands, beta, mu, lam, direction)
    else:
        vel = np.real(np.diagonal(dh, axis1=-2, axis2=-1))
        resolution = beta * max(bands.spacing(l + 1) for l in range(bands.problem.dimension)) * np.max(np.abs(vel))
        if resolution > 2:
            warnings.warn(f"k-grid too coarse for f' at beta={beta:g} (beta*dk*|v| = {resolution:.2g}); "
                          "refine the grid or use the leading-order form", RuntimeWarning, stacklevel=2)
        fprime = fermi_dirac_derivative(e, beta, mu)
        diagonal = -float(np.sum(fprime * np.real(np.diagonal(w2, axis1=-2, axis2=-1)))) * bands.measure / (2 * lam)
    if bands.n_bands == 1:
        return BlochConductivity(diagonal, 0.0, 0.0)
    f = fermi_dirac(e, beta, mu)
    de = e[:, :, None] - e[:, None, :]
    df = f[:, :, None] - f[:, None, :]
    off = ~np.eye(bands.n_bands, dtype=bool)
    lorentz = 2 * lam / (4 * lam ** 2 + de[:, off] ** 2)
    off_diagonal = -float(np.sum(w2[:, off] * df[:, off] / de[:, off] * lorentz)) * bands.measure
    bound = off_diagonal_bound(bands, lam, direction)
    if abs(off_diagonal) > bound * (1 + 1e-9):
        logger.warning("interband term %.6g exceeds its bound %.6g", off_diagonal, bound)
    return BlochConductivity(diagonal, off_diagonal, bound)


def conductivity_bloch_exact(bands: BandStructure, beta: float, mu: float, lam: float, direction: int = 1) -> float:
    return conductivity_bloch_parts(bands, beta, mu, lam, direction).total


def conductivity_bloch_leading(bands: BandStructure, beta: float, mu: float, lam: float,
                               direction: int = 1, curvature: str = "auto") -> float:
    """
    Intraband term ``(1 / 2 lam) sum_n int f(eps_n) d^2 eps_n dk / (2 pi)^d``.

    ``curvature="auto"`` uses centred differences, or perturbation theory
    for a one-site cell. At ``beta = inf``, bands lying entirely on one side
    of ``mu`` contribute exactly zero (a total derivative over the torus).
    """
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    if min(bands.grid_shape) < 4:
        raise ConfigError(f"grid too coarse for second differences: {bands.grid_shape}")
    if curvature == "auto":
        curvature = "analytic" if bands.n_bands == 1 else "fd"
    d2 = bands.curvature(direction, curvature)
    weights = _occupations(bands, beta, mu)
    if math.isinf(beta):
        crossing = (bands.energies.min(axis=0) < mu) & (bands.energies.max(axis=0) > mu)
        weights = weights[:, crossing]
        d2 = d2[:, crossing]
    return float(np.sum(weights * d2)) * bands.measure / (2 * lam)


@dataclass(frozen=True)
class FermiPoint:
    band: int
    k: float
    velocity: float


def fermi_points(bands: BandStructure, mu: float) -> list:
    """Solutions of ``eps_n(k) = mu`` in 1D, bracketed on the grid and refined by brentq."""
    prob = bands.problem
    if prob.dimension != 1:
        raise ValueError("fermi_points is one-dimensional; use fermi_segments in 2D")
    k = bands.kpoints[:, 0]
    period = 2 * np.pi / prob.periods[0]
    out = []
    for n in range(bands.n_bands):
        energy, velocity = _exact_band(prob, n, 1, np.zeros(1))
        g = bands.energies[:, n] - mu
        for j in range(len(k)):
            a, b = k[j], k[(j + 1) % len(k)]
            ga, gb = g[j], g[(j + 1) % len(k)]
            if j == len(k) - 1:
                b += period
            if ga == 0:
                root = a
            elif ga * gb < 0:
                root = optimize.brentq(lambda t: energy(t) - mu, a, b, xtol=1e-14, rtol=1e-15)
            else:
                continue
            if root > np.pi / prob.periods[0]:
                root -= period
            out.append(FermiPoint(n, root, velocity(root)))
    return out


def fermi_segments(bands: BandStructure, mu: float):
    """
    Marching-squares level set ``eps_n(k) = mu`` on the periodic 2D grid.

    Returns ``(band, start, end)`` triples; the saddle case is resolved with
    the mean of the four corners.
    """
    prob = bands.problem
    if prob.dimension != 2:
        raise ValueError("fermi_segments needs a 2D problem")
    m1, m2 = prob.k_points
    ax1, ax2 = prob.grid_axes()
    d1, d2 = bands.spacing(1), bands.spacing(2)
    segments = []
    for n in range(bands.n_bands):
        g = bands.energies[:, n].reshape(m1, m2) - mu
        for i in range(m1):
            for j in range(m2):
                ip, jp = (i + 1) % m1, (j + 1) % m2
                corners = [(ax1[i], ax2[j], g[i, j]), (ax1[i] + d1, ax2[j], g[ip, j]),
                           (ax1[i] + d1, ax2[j] + d2, g[ip, jp]), (ax1[i], ax2[j] + d2, g[i, jp])]
                neg = [c[2] < 0 for c in corners]
                if all(neg) or not any(neg):
                    continue
                cuts = []
                for e in range(4):
                    (xa, ya, va), (xb, yb, vb) = corners[e], corners[(e + 1) % 4]
                    if (va < 0) != (vb < 0):
                        t = va / (va - vb)
                        cuts.append((e, np.array([xa + t * (xb - xa), ya + t * (yb - ya)])))
                if len(cuts) == 2:
                    segments.append((n, cuts[0][1], cuts[1][1]))
                elif len(cuts) == 4:
                    center_neg = np.mean([c[2] for c in corners]) < 0
                    if center_neg == neg[0]:
                        pairs = [(0, 1), (2, 3)]
                    else:
                        pairs = [(3, 0), (1, 2)]
                    for a, b in pairs:
                        segments.append((n, cuts[a][1], cuts[b][1]))
    return segments


def fermi_surface_conductivity(bands: BandStructure, mu: float, lam: float, direction: int = 1) -> float:
    """
    Zero-temperature intraband conductivity as a Fermi-surface integral,
    ``(1 / 2 lam) sum_n oint d_l eps_n n_l dS / (2 pi)^d`` with ``n`` the outward
    normal of ``{eps_n <= mu}``.
    """
    if not lam > 0:
        raise ConfigError(f"lambda must be positive, got {lam}")
    prob = bands.problem
    lo, hi = bands.energies.min(axis=0), bands.energies.max(axis=0)
    edge_gap = np.minimum(np.abs(lo - mu), np.abs(hi - mu))
    if np.any(edge_gap < 1e-9):
        warnings.warn(f"mu={mu} sits at a band edge; the Fermi surface is degenerate", RuntimeWarning, stacklevel=2)
    per_site = 1.0 / ((2 * np.pi) ** prob.dimension * prob.cell_size)
    if prob.dimension == 1:
        if direction != 1:
            raise ValueError("1D problems only have direction 1")
        total = sum(abs(p.velocity) for p in fermi_points(bands, mu))
        # the BZ of a p-site cell is 1/p of the full circle; points are counted once
        return total * prob.cell_size * per_site / (2 * lam)
    if prob.dimension == 2:
        segs = fermi_segments(bands, mu)
        if not segs:
            return 0.0
        total = 0.0
        for n, a, b in segs:
            # band energies and velocities are periodic in k, so midpoints past the zone edge need no wrapping
            mid = 0.5 * (a + b)
            e, u = np.linalg.eigh(prob.hamiltonians(mid)[0])
            grad = np.array([np.real(u[:, n].conj() @ prob.hamiltonians(mid, derivative=l)[0] @ u[:, n])
                             for l in (1, 2)])
            norm = np.linalg.norm(grad)
            if norm == 0:
                continue
            total += grad[direction - 1] ** 2 / norm * np.linalg.norm(b - a)
        return total * prob.cell_size * per_site / (2 * lam)
    raise ValueError("Fermi-surface extraction is implemented for d = 1 and 2")


@dataclass(frozen=True)
class GapInfo:
    """``kind`` is ``"metal"`` or ``"insulator"``; ``gap`` is the width of the gap containing ``mu``."""

    kind: str
    gap: Optional[float] = None
    below: Optional[float] = None
    above: Optional[float] = None

    @property
    def is_insulator(self) -> bool:
        return self.kind == "insulator"


def band_edges(bands: BandStructure) -> np.ndarray:
    """``(n_bands, 2)`` array of band minima and maxima; refined by bounded minimisation in 1D."""
    prob = bands.problem
    e = bands.energies
    edges = np.stack([e.min(axis=0), e.max(axis=0)], axis=1)
    if prob.dimension != 1:
        return edges
    k = bands.kpoints[:, 0]
    dk = bands.spacing(1)
    for n in range(bands.n_bands):
        energy, _ = _exact_band(prob, n, 1, np.zeros(1))
        for col, sign, j in ((0, 1.0, int(np.argmin(e[:, n]))), (1, -1.0, int(np.argmax(e[:, n])))):
            res = optimize.minimize_scalar(lambda t: sign * energy(t), bounds=(k[j] - dk, k[j] + dk),
                                           method="bounded", options={"xatol": 1e-12})
            edges[n, col] = min(edges[n, col], res.fun) if sign > 0 else max(edges[n, col], -res.fun)
    return edges


def gap_check(bands: BandStructure, mu: float) -> GapInfo:
    edges = band_edges(bands)
    if np.any((edges[:, 0] <= mu) & (mu <= edges[:, 1])):
        return GapInfo("metal")
    below = edges[edges[:, 1] < mu, 1]
    above = edges[edges[:, 0] > mu, 0]
    top = float(below.max()) if below.size else -math.inf
    bottom = float(above.min()) if above.size else math.inf
    return GapInfo("insulator", bottom - top, top, bottom)


def write_bands_csv(bands: BandStructure, stream, direction: int = 1) -> None:
    """Columns ``k_1..k_d, n, eps, deps, d2eps`` (derivatives along ``direction``; ``n`` counts from 1)."""
    d = bands.problem.dimension
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow([f"k_{l + 1}" for l in range(d)] + ["n", "eps", "deps", "d2eps"])
    vel = bands.velocities(direction)
    curv = bands.curvature(direction, "fd")
    for i, k in enumerate(bands.kpoints):
        for n in range(bands.n_bands):
            writer.writerow([f"{c:.17g}" for c in k] + [n + 1] +
                            [f"{bands.energies[i, n]:.17g}", f"{vel[i, n]:.17g}", f"{curv[i, n]:.17g}"])
