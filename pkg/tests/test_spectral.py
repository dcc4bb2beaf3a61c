import math

import numpy as np
import pytest

from nesskubo.errors import ConfigError
from nesskubo.lattice import LatticeSpec, build_hamiltonian, build_position, build_velocity
from nesskubo.spectral import (ThermoParams, commutator_i, eig_hermitian, fermi_dirac, fermi_dirac_derivative,
                               fermi_operator, matrix_function)


def test_fermi_dirac_values():
    assert fermi_dirac(0.3, 4.0, 0.3) == 0.5
    assert fermi_dirac(1.0, 2.0, 0.0) == pytest.approx(1 / (1 + math.e ** 2), rel=1e-15)
    assert fermi_dirac(1.0, 2.0, 0.0) == pytest.approx(0.119202922, abs=1e-9)
    assert fermi_dirac(-0.1, math.inf, 0.0) == 1.0
    assert fermi_dirac(0.1, math.inf, 0.0) == 0.0
    assert fermi_dirac(0.0, math.inf, 0.0) == 0.5


def test_fermi_dirac_no_overflow():
    with np.errstate(over="raise", invalid="raise", divide="raise"):
        out = fermi_dirac(np.array([-1e3, 1e3]), 1e4, 0.0)
        d = fermi_dirac_derivative(np.array([-1e3, 1e3]), 1e4, 0.0)
    np.testing.assert_array_equal(out, [1.0, 0.0])
    np.testing.assert_array_equal(d, [0.0, 0.0])


def test_fermi_derivative_matches_difference():
    eps, h = 0.37, 1e-5
    fd = (fermi_dirac(eps + h, 3.0, 0.1) - fermi_dirac(eps - h, 3.0, 0.1)) / (2 * h)
    assert fermi_dirac_derivative(eps, 3.0, 0.1) == pytest.approx(fd, rel=1e-8)


def test_eig_examples():
    assert np.allclose(eig_hermitian(np.eye(4)).eigenvalues, 1)
    d = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(d.eigenvalues, [1, 2, 3])
    np.testing.assert_allclose(np.abs(d.eigenvectors), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    chain = eig_hermitian(build_hamiltonian(LatticeSpec(1, 1)))
    np.testing.assert_allclose(chain.eigenvalues, [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-14)


def test_matrix_function_examples():
    h = build_hamiltonian(LatticeSpec(1, 1))
    d = eig_hermitian(h)
    np.testing.assert_allclose(matrix_function(d, lambda e: e), h, atol=1e-10)
    np.testing.assert_allclose(matrix_function(d, lambda e: np.ones_like(e)), np.eye(3), atol=1e-14)
    f = matrix_function(d, lambda e: fermi_dirac(e, 1.0, 0.0))
    # exact values 1/(1 + e^{+-sqrt 2}) = 0.19557, 0.80443
    expected = [1 / (1 + math.exp(math.sqrt(2))), 0.5, 1 / (1 + math.exp(-math.sqrt(2)))]
    np.testing.assert_allclose(np.linalg.eigvalsh(f), expected, atol=1e-14)


def test_commutator_examples():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = a + a.conj().T
    np.testing.assert_allclose(commutator_i(a, a), 0, atol=1e-13)
    diag = np.array([1.0, 2.0, -1.0, 0.5])
    np.testing.assert_allclose(commutator_i(np.diag(diag), a), 1j * (diag[:, None] - diag[None, :]) * a, atol=1e-13)
    lat = LatticeSpec(1, 3)
    h, q = build_hamiltonian(lat), build_position(lat)
    np.testing.assert_array_equal(commutator_i(h, q), build_velocity(h, q))


def test_thermo_params_validation():
    ThermoParams(math.inf, 0, 0.1)
    for bad in [dict(beta=0), dict(beta=-1), dict(lam=0), dict(lam=-0.1), dict(mu=float("nan")), dict(lam=math.inf)]:
        values = dict(beta=1.0, mu=0.0, lam=0.5)
        values.update(bad)
        with pytest.raises(ConfigError):
            ThermoParams(**values)
    assert ThermoParams(1, 0, 0.5).replace(E=0.2).E == 0.2


def test_fermi_operator_logs_eigenvalue_at_mu(caplog):
    d = eig_hermitian(build_hamiltonian(LatticeSpec(1, 1)))
    f = fermi_operator(d, math.inf, 0.0)
    assert "within 1e-10" in caplog.text
    spec = np.linalg.eigvalsh(f)
    assert spec.min() > -1e-14 and spec.max() < 1 + 1e-14
