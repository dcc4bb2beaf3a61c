"""
Steady states and dc conductivity of non-interacting lattice fermions
driven by a static field and relaxed towards equilibrium by a dissipative
reservoir coupling.
"""

from .bloch import (BandStructure, BlochConductivity, GapInfo, PeriodicProblem, band_structure,
                    build_bloch_hamiltonian, conductivity_bloch_exact, conductivity_bloch_leading,
                    conductivity_bloch_parts, fermi_points, fermi_surface_conductivity, gap_check,
                    off_diagonal_bound, write_bands_csv)
from .config import RunConfig, emit_config, parse_config
from .errors import (AssumptionViolation, ConfigError, NessKuboError, NumericalError, SiteRangeError,
                     UnsupportedOperationError)
from .kubo import (cell_conductivity, conductivity_finite_difference, conductivity_site,
                   site_conductivity, sites_conductivity)
from .lattice import (LatticeSpec, PotentialSpec, build_field_hamiltonian, build_hamiltonian, build_position,
                      build_velocity, load_potential_table)
from .ness import (CovarianceState, evolve_covariance, ness_covariance, site_current, steady_current,
                   steady_state)
from .oracles import (cosine_dispersion, drude_current, drude_density, quadratic_dispersion,
                      solvable_conductivity, solvable_current, solvable_ness_distribution)
from .spectral import (SpectralDecomposition, ThermoParams, eig_hermitian, fermi_dirac, fermi_operator,
                       matrix_function)

__version__ = "0.1.0"
