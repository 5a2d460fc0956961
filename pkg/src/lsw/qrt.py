"""Second-order adiabatic elimination via steady-state correlation functions.

For an ancilla with fast dissipative dynamics weakly coupled to a system
through Hermitian pairs A_a (x) S_a, the reduced system generator is fixed
by the integrated correlation matrix of the ancilla deviations.  The
quantum regression theorem turns that integral into a linear solve against
the Bloch matrix of the closed operator set, so no fast-space inverse of
the full generator is ever needed.
"""

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import (
    DegenerateSteadyStateError,
    NotPositiveError,
    SingularBlochMatrixError,
)
from .spectral import decompose, fast_inverse
from .superop import (
    devectorize,
    hamiltonian_superop,
    sandwich_superop,
    to_dense,
    vectorize,
)

CLOSURE_TOL = 1e-10


@dataclass
class AncillaModel:
    """Fast ancilla generator plus Hermitian coupling pairs (A_a, S_a)."""

    l0: np.ndarray  # superoperator on the ancilla space, (dA**2, dA**2)
    couplings: Sequence  # (ancilla_op, system_op) pairs
    epsilon: float = 1.0

    @property
    def dim_ancilla(self):
        return int(round(self.l0.shape[0] ** 0.5))

    @property
    def dim_system(self):
        return self.couplings[0][1].shape[0]

    def validate(self, herm_tol=1e-12):
        for i, (a, s) in enumerate(self.couplings):
            for name, op in (("ancilla", a), ("system", s)):
                op = np.asarray(op)
                if np.max(np.abs(op - op.conj().T)) > herm_tol:
                    raise ValueError(f"coupling {i}: {name} operator not Hermitian")
        return self


def steady_state(l0, zero_tol=1e-9, psd_tol=1e-10):
    """Unique fixed point of the generator, hermitized and trace-normalized.

    Raises DegenerateSteadyStateError when the zero eigenvalue is not
    simple, and NotPositiveError when the fixed point fails positivity.
    """
    sd = decompose(to_dense(l0), zero_tol=zero_tol)
    if sd.slow_dim != 1:
        raise DegenerateSteadyStateError(
            f"zero eigenvalue has multiplicity {sd.slow_dim}"
        )
    sigma = devectorize(sd.right[:, sd.slow[0]])
    sigma = sigma / np.trace(sigma)
    sigma = 0.5 * (sigma + sigma.conj().T)
    low = np.linalg.eigvalsh(sigma).min()
    if low < -psd_tol:
        raise NotPositiveError(f"steady state has eigenvalue {low:.3e}")
    return sigma


@dataclass
class BlochSystem:
    """Closed operator set with its mean-deviation evolution matrix.

    ``ops`` is an orthonormal Hermitian basis (under the real part of the
    Hilbert-Schmidt product) spanning the seed deviations and everything
    their adjoint evolution generates.  ``seed_coeffs[:, a]`` expresses the
    a-th seed deviation in that basis.
    """

    ops: list
    bloch: np.ndarray  # M with d<dA_i>/dt = sum_k M_ik <dA_k>
    steady_means: np.ndarray  # <A_a> over the seed operators
    covariance: np.ndarray  # Tr(E_m E_n sigma) over the basis
    seed_coeffs: np.ndarray  # real, shape (len(ops), n_seeds)
    sigma: np.ndarray
    seed_count: int


def _real_project(vec, basis_vecs):
    """Coefficients and residual of vec against an R-orthonormal basis."""
    coeffs = np.array([np.vdot(b, vec).real for b in basis_vecs])
    residual = vec - sum(c * b for c, b in zip(coeffs, basis_vecs)) if basis_vecs else vec
    return coeffs, residual


def close_operator_set(l0, seed_ops, tol=CLOSURE_TOL):
    """Close the seed operators under the adjoint evolution.

    Iteratively adjoins adjoint-evolution images, orthonormalizing over the
    real span of (sigma-expectation-free) Hermitian operators; that span is
    invariant, so in finite dimension the loop always terminates, at the
    latest once the full traceless basis is reached.
    """
    l0 = to_dense(l0)
    dim = int(round(l0.shape[0] ** 0.5))
    sigma = steady_state(l0)
    eye = np.eye(dim, dtype=complex)
    adjoint = l0.conj().T

    means = np.array([np.trace(np.asarray(a) @ sigma).real for a in seed_ops])
    deltas = [np.asarray(a, dtype=complex) - m * eye for a, m in zip(seed_ops, means)]

    basis_vecs, basis_ops = [], []
    scale = max([np.linalg.norm(d) for d in deltas], default=1.0) or 1.0

    def adjoin(op):
        v = vectorize(op)
        _, res = _real_project(v, basis_vecs)
        norm = np.linalg.norm(res)
        if norm > tol * scale:
            basis_vecs.append(res / norm)
            basis_ops.append(devectorize(res / norm))
            return True
        return False

    for d in deltas:
        adjoin(d)
    cursor = 0
    while cursor < len(basis_vecs):
        if len(basis_vecs) >= dim * dim - 1:
            break  # full deviation space reached, closed by construction
        image = devectorize(adjoint @ basis_vecs[cursor])
        image = image - np.trace(image @ sigma) * eye
        adjoin(image)
        cursor += 1

    n = len(basis_vecs)
    bloch = np.zeros((n, n), dtype=complex)
    for i in range(n):
        image = adjoint @ basis_vecs[i]
        coeffs, _ = _real_project(image, basis_vecs)
        bloch[i, :] = coeffs
    covariance = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            covariance[i, j] = np.trace(basis_ops[i] @ basis_ops[j] @ sigma)
    seed_coeffs = np.zeros((n, len(deltas)))
    for a, d in enumerate(deltas):
        coeffs, res = _real_project(vectorize(d), basis_vecs)
        seed_coeffs[:, a] = coeffs
    return BlochSystem(
        ops=basis_ops,
        bloch=bloch,
        steady_means=means,
        covariance=covariance,
        seed_coeffs=seed_coeffs,
        sigma=sigma,
        seed_count=len(deltas),
    )


@dataclass
class CoefficientMatrix:
    """Integrated deviation-correlation matrix and its two generator parts."""

    a_matrix: np.ndarray
    dissipation: np.ndarray  # A + A†, Hermitian
    hamiltonian_part: np.ndarray  # (A - A†) / 2i, Hermitian

    @property
    def eigmin_dissipation(self):
        if self.dissipation.size == 0:
            return 0.0
        return float(np.linalg.eigvalsh(self.dissipation).min())


def coefficient_matrix(bs, stability_tol=1e-12):
    """Integrate the regression evolution against the equal-time covariance.

    The correlation matrix entry (i, j) integrates the mean of the i-th
    deviation evolved from the j-th deviation applied to the steady state,
    which the regression theorem closes as -M^{-1} C; the seed block is
    then read off through the seed coordinates.
    """
    k = bs.seed_count
    if len(bs.ops) == 0:
        zero = np.zeros((k, k), dtype=complex)
        return CoefficientMatrix(zero, zero.copy(), zero.copy())
    eigs = np.linalg.eigvals(bs.bloch)
    scale = max(1.0, float(np.abs(eigs).max()))
    if np.max(eigs.real) > -stability_tol * scale:
        raise SingularBlochMatrixError(
            f"Bloch matrix eigenvalue with real part {np.max(eigs.real):.3e}"
        )
    full = -np.linalg.solve(bs.bloch, bs.covariance)
    a = bs.seed_coeffs.T @ full @ bs.seed_coeffs
    dissipation = a + a.conj().T
    ham = (a - a.conj().T) / 2j
    return CoefficientMatrix(
        a_matrix=a,
        dissipation=0.5 * (dissipation + dissipation.conj().T),
        hamiltonian_part=0.5 * (ham + ham.conj().T),
    )


def coefficient_matrix_resolvent_oracle(l0, sigma, ops):
    """Independent route: integrate correlators with the fast-space inverse.

    Entry (i, j) is -Tr(dA_i devec(L0inv vec(dA_j sigma))); the slow
    component of dA_j sigma vanishes because its trace does, so the
    fast-space inverse integrates the full correlator.
    """
    l0 = to_dense(l0)
    dim = sigma.shape[0]
    eye = np.eye(dim, dtype=complex)
    sd = decompose(l0)
    finv = fast_inverse(sd)
    deltas = [
        np.asarray(a, dtype=complex) - np.trace(np.asarray(a) @ sigma).real * eye
        for a in ops
    ]
    k = len(deltas)
    out = np.zeros((k, k), dtype=complex)
    for j in range(k):
        integrated = devectorize(finv @ vectorize(deltas[j] @ sigma))
        for i in range(k):
            out[i, j] = -np.trace(deltas[i] @ integrated)
    return out


@dataclass
class EffectiveMasterEquation:
    """System-space generators at first and second order (epsilon excluded)."""

    first_order: np.ndarray
    second_order: np.ndarray
    coefficient: CoefficientMatrix
    bloch: BlochSystem = field(repr=False, default=None)


def effective_master_equation_2(model):
    """Reduced system generator after eliminating the ancilla, to second order.

    First order couples the system to the steady means of the ancilla
    operators; second order combines the Hermitian part of the coefficient
    matrix into a dissipator over the system coupling operators and its
    anti-Hermitian part into an induced Hamiltonian.
    """
    model.validate()
    ancilla_ops = [a for a, _ in model.couplings]
    system_ops = [np.asarray(s, dtype=complex) for _, s in model.couplings]
    ds = model.dim_system
    eye = np.eye(ds, dtype=complex)

    bs = close_operator_set(model.l0, ancilla_ops)
    cm = coefficient_matrix(bs)

    first = np.zeros((ds * ds, ds * ds), dtype=complex)
    for mean, s in zip(bs.steady_means, system_ops):
        first = first + mean * hamiltonian_superop(s)

    second = np.zeros_like(first)
    diss = cm.dissipation
    for i, si in enumerate(system_ops):
        for j, sj in enumerate(system_ops):
            if diss[i, j] != 0:
                sij = si @ sj
                second = second + 0.5 * diss[i, j] * (
                    2.0 * sandwich_superop(sj, si)
                    - sandwich_superop(sij, eye)
                    - sandwich_superop(eye, sij)
                )
    h_induced = np.zeros((ds, ds), dtype=complex)
    ham = cm.hamiltonian_part
    for i, si in enumerate(system_ops):
        for j, sj in enumerate(system_ops):
            h_induced = h_induced + ham[i, j] * (si @ sj)
    h_induced = 0.5 * (h_induced + h_induced.conj().T)
    second = second + hamiltonian_superop(h_induced)
    return EffectiveMasterEquation(
        first_order=first, second_order=second, coefficient=cm, bloch=bs
    )


def lindblad_decomposition(cm, system_ops, tol=1e-9):
    """Diagonalize the dissipative part into jump operators and rates.

    Returns (jumps, h_eff) with jumps a list of (rate, operator) in the
    normalization where the generator is sum_a rate_a * D[op_a] plus
    -i[h_eff, .].  Rates in [-tol, 0) are clamped to zero; anything below
    -tol signals an upstream bug and raises NotPositiveError.
    """
    system_ops = [np.asarray(s, dtype=complex) for s in system_ops]
    half = 0.5 * cm.dissipation
    kappa, u = np.linalg.eigh(half)
    jumps = []
    for alpha in range(kappa.size):
        rate = float(kappa[alpha])
        if rate < -tol:
            raise NotPositiveError(f"dissipation eigenvalue {rate:.3e} below -{tol:.1e}")
        rate = max(rate, 0.0)
        if rate == 0.0:
            continue
        op = sum(u[i, alpha].conjugate() * system_ops[i] for i in range(len(system_ops)))
        jumps.append((2.0 * rate, op))
    ds = system_ops[0].shape[0]
    h_eff = np.zeros((ds, ds), dtype=complex)
    ham = cm.hamiltonian_part
    for i, si in enumerate(system_ops):
        for j, sj in enumerate(system_ops):
            h_eff = h_eff + ham[i, j] * (si @ sj)
    h_eff = 0.5 * (h_eff + h_eff.conj().T)
    return jumps, h_eff
