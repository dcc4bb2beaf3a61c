"""
One-particle operators of nearest-neighbour lattice fermions on a finite box.

Sites of the box ``[-N, N]^d`` are flattened in row-major order, so site
``(x_1, ..., x_d)`` has index ``ravel_multi_index(x + N, (2N+1,)*d)``.
All operators are dense ``numpy`` arrays of shape ``(n_sites, n_sites)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigError, SiteRangeError, UnsupportedOperationError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12

OPEN = "open"
PERIODIC = "periodic"

Site = Tuple[int, ...]


def check_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``a`` as an array after verifying ``a == a^dagger`` entrywise to ``tol``."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max |A - A^H| = {dev:.3e})")
    return a


def _same_dim(*mats: np.ndarray) -> None:
    shapes = {m.shape for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


@dataclass(frozen=True)
class LatticeSpec:
    """Box ``[-N, N]^d`` of ``Z^d`` with open or periodic (torus) boundary."""

    dimension: int
    half_width: int
    boundary: str = OPEN

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dimension!r}")
        if int(self.half_width) != self.half_width or self.half_width < 1:
            raise ConfigError(f"half_width must be a positive integer, got {self.half_width!r}")
        if self.boundary not in (OPEN, PERIODIC):
            raise ConfigError(f"boundary must be '{OPEN}' or '{PERIODIC}', got {self.boundary!r}")

    @property
    def side(self) -> int:
        return 2 * self.half_width + 1

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.side,) * self.dimension

    @property
    def n_sites(self) -> int:
        return self.side ** self.dimension

    @property
    def center(self) -> Site:
        return (0,) * self.dimension

    def coords(self) -> np.ndarray:
        """Integer coordinates of all sites, shape ``(n_sites, d)``, in flattening order."""
        grids = np.indices(self.shape).reshape(self.dimension, -1).T
        return grids - self.half_width

    def contains(self, site: Sequence[int]) -> bool:
        return len(site) == self.dimension and all(abs(int(c)) <= self.half_width for c in site)

    def index(self, site: Sequence[int]) -> int:
        """Flat index of ``site``; on the torus coordinates are wrapped first."""
        site = tuple(int(c) for c in site)
        if len(site) != self.dimension:
            raise SiteRangeError(f"site {site} has wrong dimension (expected {self.dimension})")
        if self.boundary == PERIODIC:
            site = tuple((c + self.half_width) % self.side - self.half_width for c in site)
        elif not self.contains(site):
            raise SiteRangeError(f"site {site} outside the box [-{self.half_width}, {self.half_width}]^{self.dimension}")
        return int(np.ravel_multi_index(tuple(c + self.half_width for c in site), self.shape))

    def neighbor(self, site: Sequence[int], direction: int, step: int = 1) -> Site:
        _check_direction(self, direction)
        out = list(int(c) for c in site)
        out[direction - 1] += step
        return tuple(out)

    def require_interior(self, site: Sequence[int], direction: int) -> None:
        """Raise unless ``site`` and both neighbours along ``direction`` lie in the box."""
        if not self.contains(site):
            raise SiteRangeError(f"site {tuple(site)} outside the box")
        if self.boundary == OPEN:
            for step in (-1, 1):
                if not self.contains(self.neighbor(site, direction, step)):
                    raise SiteRangeError(f"site {tuple(site)} is on the boundary along direction {direction}")


def _check_direction(lattice: LatticeSpec, direction: int) -> None:
    if not 1 <= int(direction) <= lattice.dimension:
        raise ValueError(f"direction must be in 1..{lattice.dimension}, got {direction}")


@dataclass(frozen=True)
class PotentialSpec:
    """
    On-site potential ``V``.

    Use the constructors :meth:`zero`, :meth:`from_table` and :meth:`periodic`
    instead of filling the fields directly.
    """

    kind: str = "zero"
    table: Optional[Mapping[Site, float]] = None
    periods: Optional[Tuple[int, ...]] = None
    cell_values: Optional[np.ndarray] = field(default=None, compare=False)

    @classmethod
    def zero(cls) -> "PotentialSpec":
        return cls("zero")

    @classmethod
    def from_table(cls, table: Mapping[Sequence[int], float]) -> "PotentialSpec":
        clean = {}
        for site, value in table.items():
            value = float(value)
            if not np.isfinite(value):
                raise ConfigError(f"potential at {tuple(site)} is not finite: {value}")
            clean[tuple(int(c) for c in site)] = value
        return cls("table", table=clean)

    @classmethod
    def periodic(cls, periods: Sequence[int], cell_values) -> "PotentialSpec":
        """``cell_values`` is an array of shape ``periods`` indexed by ``x mod p``."""
        periods = tuple(int(p) for p in periods)
        if any(p < 1 for p in periods):
            raise ConfigError(f"periods must be positive, got {periods}")
        values = np.asarray(cell_values, dtype=float).reshape(periods)
        if not np.all(np.isfinite(values)):
            raise ConfigError("periodic cell values must be finite")
        values.setflags(write=False)
        return cls("periodic", periods=periods, cell_values=values)

    def __eq__(self, other):
        if not isinstance(other, PotentialSpec):
            return NotImplemented
        same_cells = (self.cell_values is None and other.cell_values is None) or (
            self.cell_values is not None and other.cell_values is not None
            and np.array_equal(self.cell_values, other.cell_values))
        return (self.kind, self.table, self.periods) == (other.kind, other.table, other.periods) and same_cells

    __hash__ = None

    def values(self, lattice: LatticeSpec) -> np.ndarray:
        """Potential on every site of ``lattice`` in flattening order."""
        coords = lattice.coords()
        if self.kind == "zero":
            return np.zeros(lattice.n_sites)
        if self.kind == "periodic":
            if len(self.periods) != lattice.dimension:
                raise ConfigError(f"periodic potential has {len(self.periods)} periods for a {lattice.dimension}D lattice")
            idx = tuple((coords[:, l] % p) for l, p in enumerate(self.periods))
            if lattice.boundary == PERIODIC and any(lattice.side % p for p in self.periods):
                logger.warning("torus side %d is not a multiple of the periods %s", lattice.side, self.periods)
            return self.cell_values[idx].astype(float)
        if self.kind == "table":
            out = np.empty(lattice.n_sites)
            for i, site in enumerate(map(tuple, coords.tolist())):
                try:
                    out[i] = self.table[site]
                except KeyError:
                    raise ConfigError(f"potential table has no value for site {site}") from None
            return out
        raise ConfigError(f"unknown potential kind {self.kind!r}")


def load_potential_table(path: Union[str, Path]) -> PotentialSpec:
    """
    Read a potential table: one site per line, ``x1 ... xd value``.

    Blank lines and everything after ``#`` are ignored. All lines must have
    the same number of coordinates.
    """
    table = {}
    dim = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ConfigError(f"{path}:{lineno}: expected 'x1 ... xd value'")
        if dim is None:
            dim = len(parts) - 1
        elif len(parts) - 1 != dim:
            raise ConfigError(f"{path}:{lineno}: expected {dim} coordinates, got {len(parts) - 1}")
        try:
            site = tuple(int(p) for p in parts[:-1])
            value = float(parts[-1])
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        if site in table:
            raise ConfigError(f"{path}:{lineno}: duplicate site {site}")
        table[site] = value
    return PotentialSpec.from_table(table)


def _hops(lattice: LatticeSpec):
    """Index pairs ``(i, j)`` with ``j`` the +e_l neighbour of ``i``, for every direction."""
    idx = np.arange(lattice.n_sites).reshape(lattice.shape)
    for axis in range(lattice.dimension):
        if lattice.boundary == PERIODIC:
            if lattice.side < 3:
                raise ConfigError("periodic boundary needs at least 3 sites per side")
            nxt = np.roll(idx, -1, axis=axis)
            yield idx.ravel(), nxt.ravel()
        else:
            src = np.take(idx, np.arange(lattice.side - 1), axis=axis)
            dst = np.take(idx, np.arange(1, lattice.side), axis=axis)
            yield src.ravel(), dst.ravel()


def hopping_matrix(lattice: LatticeSpec) -> np.ndarray:
    """Kinetic part ``-sum_{|x-y|=1}``: ``-1`` on every nearest-neighbour pair."""
    t = np.zeros((lattice.n_sites, lattice.n_sites))
    for i, j in _hops(lattice):
        t[i, j] = -1.0
        t[j, i] = -1.0
    return t


def build_hamiltonian(lattice: LatticeSpec, potential: PotentialSpec = None) -> np.ndarray:
    """
    Tight-binding Hamiltonian ``(h phi)(x) = -sum_{|x-y|=1} phi(y) + V(x) phi(x)``.

    Returns a real symmetric array stored as complex so that it mixes freely
    with the complex operators built from it.
    """
    potential = PotentialSpec.zero() if potential is None else potential
    h = hopping_matrix(lattice) + np.diag(potential.values(lattice))
    return check_hermitian(h.astype(complex))


def build_position(lattice: LatticeSpec, direction: int = 1) -> np.ndarray:
    """Diagonal position operator ``Q_l``; only defined with open boundaries."""
    _check_direction(lattice, direction)
    if lattice.boundary != OPEN:
        raise UnsupportedOperationError("the position operator is not defined on a periodic torus")
    return np.diag(lattice.coords()[:, direction - 1].astype(complex))


def displacement_matrix(lattice: LatticeSpec, direction: int = 1) -> np.ndarray:
    """
    ``D[a, b] = x_a - x_b`` along ``direction``.

    On a torus the minimal-image displacement is used, so ``1j * D * X`` is the
    natural replacement for ``i[Q, X]`` when ``X`` is short ranged. With open
    boundaries ``1j * D * X`` equals ``i[Q, X]`` exactly.
    """
    _check_direction(lattice, direction)
    x = lattice.coords()[:, direction - 1]
    d = x[:, None] - x[None, :]
    if lattice.boundary == PERIODIC:
        side = lattice.side
        d = (d + lattice.half_width) % side - lattice.half_width
    return d.astype(float)


def position_commutator(lattice: LatticeSpec, x: np.ndarray, direction: int = 1) -> np.ndarray:
    """``i[Q_l, X]`` computed entrywise; valid on the torus via minimal images."""
    return 1j * displacement_matrix(lattice, direction) * x


def build_velocity(h: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Velocity ``v = i[h, q]``."""
    _same_dim(h, q)
    return check_hermitian(1j * (h @ q - q @ h))


def lattice_velocity(lattice: LatticeSpec, h: np.ndarray, direction: int = 1) -> np.ndarray:
    """``i[h, Q_l]`` for either boundary (minimal-image displacements on a torus)."""
    return check_hermitian(-position_commutator(lattice, h, direction))


def build_field_hamiltonian(h: np.ndarray, q1: np.ndarray, E: float) -> np.ndarray:
    """``h_E = h - E Q_1``: the one-particle Hamiltonian in a uniform field."""
    _same_dim(h, q1)
    return check_hermitian(h - float(E) * q1)
