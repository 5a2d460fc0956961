"""Exact and effective time evolution, observables, emission intensity."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from . import _kernels
from .exceptions import ToleranceNotMetError, ValidationError
from .superop import devectorize, to_csr, to_dense, vectorize

DENSE_LIMIT = 1024  # matrix-exponential stepping up to this superoperator dim


@dataclass
class Trajectory:
    """Vectorized states on a fixed time grid."""

    times: np.ndarray
    states: np.ndarray  # shape (n_times, d**2)
    generator_tag: str = ""

    @property
    def hdim(self):
        return int(round(self.states.shape[1] ** 0.5))

    def operator(self, index):
        return devectorize(self.states[index])

    def expectation(self, op):
        """Tr(op rho(t)) along the trajectory."""
        flat = np.asarray(op, dtype=complex).T.reshape(-1)
        return self.states @ flat


def _validate_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 1:
        raise ValidationError("times must be a one-dimensional grid")
    if abs(times[0]) > 0:
        raise ValidationError("time grid must start at 0")
    if times.size > 1 and not np.all(np.diff(times) > 0):
        raise ValidationError("times must be strictly increasing")
    return times


def evolve(
    generator,
    rho0,
    times,
    rtol=1e-9,
    atol=1e-12,
    dense_limit=DENSE_LIMIT,
    force=None,
    max_steps=10_000_000,
    tag="",
):
    """Propagate rho0 under a fixed generator, landing exactly on `times`.

    Dense path (dimension up to ``dense_limit``): one matrix exponential
    per distinct step size.  Sparse path: adaptive embedded Runge-Kutta
    5(4) on the generator matvec with the given tolerances; steps are
    clipped so every requested time is hit exactly.

    ``force`` may be "dense" or "sparse" to override the size policy.
    """
    times = _validate_times(times)
    rho0 = np.asarray(rho0, dtype=complex)
    trace = np.trace(rho0)
    if abs(trace - 1.0) > 1e-8:
        raise ValidationError(f"initial state has trace {trace:.6g}, expected 1")
    y0 = vectorize(rho0)
    dim = y0.size

    use_dense = dim <= dense_limit and not sp.issparse(generator)
    if force == "dense":
        use_dense = True
    elif force == "sparse":
        use_dense = False

    if use_dense:
        g = to_dense(generator)
        states = np.empty((times.size, dim), dtype=complex)
        states[0] = y0
        props = {}
        y = y0
        for i in range(1, times.size):
            dt = times[i] - times[i - 1]
            key = round(dt, 12)
            if key not in props:
                props[key] = expm(g * dt)
            y = props[key] @ y
            states[i] = y
        return Trajectory(times=times, states=states, generator_tag=tag or "dense")

    g = to_csr(generator)
    out, status, _ = _kernels.rk45_csr(
        g.indptr,
        g.indices,
        g.data.astype(np.complex128),
        y0,
        times,
        float(rtol),
        float(atol),
        int(max_steps),
    )
    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise ToleranceNotMetError("step size underflow in adaptive integration")
    if status == _kernels.STATUS_MAX_STEPS:
        raise ToleranceNotMetError(f"integration exceeded {max_steps} steps")
    return Trajectory(times=times, states=out, generator_tag=tag or "sparse")


def emission_intensity(traj, op, generator):
    """Instantaneous loss rate of <op>: -Tr(op * G rho(t)) along a trajectory.

    The sign makes decay from a polarized state register as positive
    emitted intensity.
    """
    op = np.asarray(op, dtype=complex)
    derivs = (generator @ traj.states.T).T if not sp.issparse(generator) else (
        generator.dot(traj.states.T)
    ).T
    flat = op.T.reshape(-1)
    return -np.real(derivs @ flat)


def trace_drift(traj):
    """Maximum deviation of the state trace from one along the trajectory."""
    d = traj.hdim
    idx = np.arange(d) * d + np.arange(d)
    traces = traj.states[:, idx].sum(axis=1)
    return float(np.max(np.abs(traces - 1.0)))


def min_state_eigenvalue(traj):
    """Smallest eigenvalue of the hermitized state along the trajectory."""
    lows = []
    for k in range(traj.times.size):
        rho = traj.operator(k)
        rho = 0.5 * (rho + rho.conj().T)
        lows.append(np.linalg.eigvalsh(rho).min())
    return float(min(lows))
