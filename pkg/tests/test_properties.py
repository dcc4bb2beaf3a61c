import math

import numpy as np
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from nesskubo.bloch import PeriodicProblem, build_bloch_hamiltonian
from nesskubo.config import emit_config, parse_config
from nesskubo.lattice import LatticeSpec, PotentialSpec, build_field_hamiltonian, build_hamiltonian, build_position, build_velocity
from nesskubo.ness import CovarianceState, evolve_covariance, ness_covariance
from nesskubo.spectral import eig_hermitian, fermi_dirac, fermi_operator, matrix_function

reals = st.floats(-5, 5, allow_nan=False)
betas = st.one_of(st.just(math.inf), st.floats(0.01, 1e4))
lams = st.floats(0.01, 10)


@st.composite
def hermitian(draw, max_dim=6):
    n = draw(st.integers(1, max_dim))
    a = draw(hnp.arrays(float, (n, n), elements=reals))
    b = draw(hnp.arrays(float, (n, n), elements=reals))
    m = a + 1j * b
    return 0.5 * (m + m.conj().T)


@st.composite
def chain(draw, max_half_width=6):
    n = draw(st.integers(1, max_half_width))
    lat = LatticeSpec(1, n)
    vals = draw(hnp.arrays(float, lat.n_sites, elements=st.floats(-3, 3)))
    return lat, PotentialSpec.from_table({(x,): v for x, v in zip(range(-n, n + 1), vals)})


@given(reals, betas, reals)
def test_particle_hole_symmetry(eps, beta, mu):
    total = fermi_dirac(eps, beta, mu) + fermi_dirac(2 * mu - eps, beta, mu)
    assert abs(total - 1) < 1e-12


@given(hnp.arrays(float, 20, elements=reals), betas, reals)
def test_fermi_dirac_is_monotone_occupation(eps, beta, mu):
    eps = np.sort(eps)
    f = fermi_dirac(eps, beta, mu)
    assert np.all((0 <= f) & (f <= 1))
    assert np.all(np.diff(f) <= 1e-15)


@given(hermitian(), betas, reals)
def test_fermi_operator_spectrum(a, beta, mu):
    d = eig_hermitian(a)
    f = matrix_function(d, lambda e: fermi_dirac(e, beta, mu))
    spec = np.linalg.eigvalsh(f)
    assert spec.min() >= -1e-12 and spec.max() <= 1 + 1e-12
    np.testing.assert_allclose(spec, np.sort(fermi_dirac(d.eigenvalues, beta, mu)), atol=1e-12)


@given(hermitian())
def test_decomposition_invariants(a):
    d = eig_hermitian(a)
    u = d.eigenvectors
    np.testing.assert_allclose(u.conj().T @ u, np.eye(len(a)), atol=1e-12)
    scale = max(1.0, np.abs(a).max())
    np.testing.assert_allclose(d.reconstruct(), a, atol=1e-10 * scale)
    assert np.all(np.diff(d.eigenvalues) >= 0)


@given(chain())
def test_operators_hermitian_and_velocity_potential_free(problem):
    lat, pot = problem
    h = build_hamiltonian(lat, pot)
    q = build_position(lat)
    for op in (h, q, build_velocity(h, q), build_field_hamiltonian(h, q, 0.3)):
        assert np.abs(op - op.conj().T).max() <= 1e-12
    np.testing.assert_allclose(build_velocity(h, q), build_velocity(build_hamiltonian(lat), q), atol=1e-12)


@given(chain(), betas, st.floats(-3, 3), lams, st.floats(-2, 2), st.floats(0, 20))
def test_covariances_stay_in_unit_interval(problem, beta, mu, lam, E, t):
    lat, pot = problem
    h = build_hamiltonian(lat, pot)
    F = fermi_operator(eig_hermitian(h), beta, mu)
    d = eig_hermitian(build_field_hamiltonian(h, build_position(lat), E))
    for state in (ness_covariance(d, F, lam), evolve_covariance(CovarianceState(np.zeros_like(F)), t, d, F, lam)):
        lo, hi = state.spectrum_bounds
        assert -1e-10 <= lo and hi <= 1 + 1e-10


@given(st.floats(-3, 3), st.floats(-math.pi / 2, math.pi / 2))
def test_dimer_bands(v, k):
    prob = PeriodicProblem((2,), [v, -v], (4,))
    e = np.linalg.eigvalsh(build_bloch_hamiltonian(prob, k))
    r = math.sqrt(v * v + 4 * math.cos(k) ** 2)
    np.testing.assert_allclose(e, [-r, r], atol=1e-12)


@given(betas, st.floats(-10, 10), st.floats(1e-6, 100), st.floats(-1, 1), st.integers(1, 300),
       st.sampled_from(["open", "periodic"]))
def test_config_round_trip(beta, mu, lam, E, n, boundary):
    text = (f"[run]\ncommand = conductivity\n[lattice]\nN = {n}\nboundary = {boundary}\n"
            f"[thermo]\nbeta = {beta!r}\nmu = {mu!r}\nlambda = {lam!r}\nE = {E!r}\n")
    cfg = parse_config(text)
    assert parse_config(emit_config(cfg)) == cfg
