import numpy as np
import pytest

from lsw.operators import (
    commutator,
    dagger,
    hermitian_basis,
    partial_trace_left,
    spin_operators,
    tensor,
)


def test_spin_half_matrices():
    jp, jm, jz = spin_operators(1)
    assert np.array_equal(jz, np.diag([0.5, -0.5]))
    assert np.array_equal(jp, np.array([[0, 1], [0, 0]], dtype=complex))
    assert np.array_equal(jm, jp.conj().T)


def test_spin_half_commutator_exact():
    jp, jm, jz = spin_operators(1)
    assert np.array_equal(commutator(jp, jm), 2 * jz)


def test_spin_two_ladder_product_diagonal():
    # j = 2: diagonal of J+J- is j(j+1) - m(m-1) for m = 2..-2
    jp, jm, _ = spin_operators(4)
    expected = np.array([4.0, 6.0, 6.0, 4.0, 0.0])
    assert np.allclose(np.diag(jp @ jm).real, expected, atol=1e-12)


@pytest.mark.parametrize("two_j", [0, 1, 2, 3, 5, 9])
def test_su2_commutators(two_j):
    jp, jm, jz = spin_operators(two_j)
    assert np.abs(commutator(jz, jp) - jp).max() < 1e-12
    assert np.abs(commutator(jz, jm) + jm).max() < 1e-12
    assert np.abs(commutator(jp, jm) - 2 * jz).max() < 1e-12


def test_dagger_involution(rng):
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(dagger(dagger(a)), a)


def test_tensor_identity():
    assert np.array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))


def test_tensor_ladder_action():
    jp, jm, _ = spin_operators(1)
    up = np.array([1, 0], dtype=complex)
    dn = np.array([0, 1], dtype=complex)
    state = np.kron(dn, up)  # |down> x |up>
    flipped = tensor(jp, jm) @ state
    assert np.allclose(flipped, np.kron(up, dn), atol=1e-15)


def test_tensor_mixed_product(rng):
    a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
    lhs = tensor(a, b) @ tensor(c, d)
    rhs = tensor(a @ c, b @ d)
    assert np.abs(lhs - rhs).max() < 1e-12


def test_tensor_associative_exact(rng):
    # integer entries keep every product exactly representable
    a, b, c = (rng.integers(-9, 9, size=(2, 2)).astype(float) for _ in range(3))
    assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))
    x, y, z = (rng.standard_normal((2, 2)) for _ in range(3))
    assert np.abs(tensor(tensor(x, y), z) - tensor(x, tensor(y, z))).max() < 1e-15


def test_partial_trace_left(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    reduced = partial_trace_left(tensor(a, b), 3, 4)
    assert np.abs(reduced - np.trace(a) * b).max() < 1e-12


def test_hermitian_basis_orthonormal():
    basis = hermitian_basis(3, traceless=True)
    assert len(basis) == 8
    for i, fi in enumerate(basis):
        assert np.abs(fi - fi.conj().T).max() < 1e-14
        assert abs(np.trace(fi)) < 1e-14
        for j, fj in enumerate(basis):
            expected = 1.0 if i == j else 0.0
            assert abs(np.trace(fi.conj().T @ fj) - expected) < 1e-13
