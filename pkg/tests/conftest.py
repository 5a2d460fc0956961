import numpy as np
import pytest

from lsw import models, superop


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def qubit_table():
    """Decaying qubit at gamma=1, omega=0.2 with its known eigensystem."""
    l0, spec = models.decaying_qubit(gamma=1.0, omega=0.2)
    return l0, spec


def random_density(rng, dim):
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = x @ x.conj().T
    return rho / np.trace(rho)


def random_hermitian(rng, dim):
    x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (x + x.conj().T)


def lindblad_rhs(spec, rho, epsilon=0.0):
    """Direct evaluation of the master-equation right-hand side."""
    h = np.asarray(spec.hamiltonian, dtype=complex)
    for hp in spec.perturbations:
        h = h + epsilon * np.asarray(hp, dtype=complex)
    out = -1j * (h @ rho - rho @ h)
    for rate, l in spec.jumps:
        l = np.asarray(l, dtype=complex)
        ldl = l.conj().T @ l
        out = out + rate * (l @ rho @ l.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def model_fleet():
    """Small collection of generators used by the structural-invariant suite."""
    fleet = []
    l0, spec = models.decaying_qubit(gamma=1.0, omega=0.2)
    fleet.append(("decaying_qubit", superop.to_dense(l0), None))
    for n in (1, 2, 4):
        p = models.SuperradianceParams(n_spins=n, g=0.1, gamma=1.0, omega=0.2)
        m = models.superradiance_model(p, sparse=False)
        fleet.append((f"superradiance_n{n}", superop.to_dense(m.l0), superop.to_dense(m.v)))
    for dim, seed in ((2, 3), (3, 5), (4, 7)):
        spec = models.random_lindblad_model(dim, 2, seed)
        l0, v = superop.lindblad_superop(spec, sparse=False)
        fleet.append((f"random_d{dim}_s{seed}", l0, v))
    return fleet
