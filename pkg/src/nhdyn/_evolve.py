"""Shared drivers for the vectorized, trace-renormalized flow.

Both the closed equation of motion and the corrected master equation have the
form ``d vec(rho)/dt = L vec(rho) - i Tr[rho (H^dagger - H)] vec(rho)`` with a
linear superoperator ``L``.  The helpers here wrap the kernels in
:mod:`nhdyn._kernels` and translate their status codes.
"""

import numpy as np

from . import _kernels
from .errors import NumericalError, StepSizeUnderflowError, VanishingNormError
from .linalg import diag_indices_vec, vec

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
DEFAULT_MAX_STEPS = 2_000_000


def trace_leak_vector(h):
    """Row vector ``a`` with ``a . vec(rho) = Tr[rho (H^dagger - H)]``."""
    return vec((h.conj().T - h).T)


def _check_grid(t_grid):
    t = np.asarray(t_grid, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("time grid is empty")
    if t[0] != 0.0:
        raise ValueError("time grid must start at 0")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly ascending")
    return t


def integrate_flow(superop, h, rho0, t_grid, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
                   max_steps=DEFAULT_MAX_STEPS):
    t = _check_grid(t_grid)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    d = rho0.shape[0]
    # overflowing trial stages are rejected by the step control
    with np.errstate(over="ignore", invalid="ignore"):
        ys, status, t_stop, _ = _kernels.dopri5_kernel(
            np.ascontiguousarray(superop), trace_leak_vector(h), diag_indices_vec(d),
            vec(rho0), t, float(rtol), float(atol), int(max_steps))
    if status == _kernels.STATUS_VANISHING_NORM:
        raise VanishingNormError(f"state trace vanished at t={t_stop:.6g}", t_stop)
    if status == _kernels.STATUS_STEP_UNDERFLOW:
        raise StepSizeUnderflowError(f"step size underflow at t={t_stop:.6g}", t_stop)
    if status == _kernels.STATUS_MAX_STEPS:
        raise NumericalError(f"step budget of {max_steps} exhausted at t={t_stop:.6g}")
    return ys.reshape(t.size, d, d).transpose(0, 2, 1)


def step_flow(step_superop, rho0, n_steps, dt):
    """States after ``0..n_steps`` applications of a one-step propagator."""
    rho0 = np.asarray(rho0, dtype=np.complex128)
    d = rho0.shape[0]
    ys, status, done = _kernels.step_kernel(
        np.ascontiguousarray(step_superop), vec(rho0), diag_indices_vec(d), int(n_steps))
    if status == _kernels.STATUS_VANISHING_NORM:
        raise VanishingNormError(f"state trace vanished at t={(done + 1) * dt:.6g}",
                                 (done + 1) * dt)
    return ys.reshape(n_steps + 1, d, d).transpose(0, 2, 1)


def uniform_grid(t_max, dt):
    if dt <= 0 or t_max <= 0 or dt >= t_max:
        raise ValueError("need 0 < dt < t_max")
    n = int(round(t_max / dt))
    return np.arange(n + 1) * dt, n


def normalize_by_trace(sigma, t):
    tr = np.trace(sigma)
    if abs(tr) < _kernels.VANISHING_TRACE:
        raise VanishingNormError(f"state trace vanished at t={t:.6g}", t)
    return sigma / tr

