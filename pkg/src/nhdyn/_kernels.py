"""Hot numeric loops.

Everything here sticks to the numpy subset supported by numba so that the
module runs unchanged with or without JIT (see :mod:`nhdyn._accel`).  Kernels
report failures through integer status codes; the public wrappers turn them
into exceptions.
"""

import numpy as np

from ._accel import njit

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1
STATUS_VANISHING_NORM = 2
STATUS_MAX_STEPS = 3

VANISHING_TRACE = 1e-30

# Pade approximants of degree m and the 1-norm bounds theta_m below which they
# reach double precision (Higham 2005, Table 2.3).
_PADE3 = np.array([120.0, 60.0, 12.0, 1.0])
_PADE5 = np.array([30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0])
_PADE7 = np.array([17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0,
                   1512.0, 56.0, 1.0])
_PADE9 = np.array([17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                   30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0])
_PADE13 = np.array([64764752532480000.0, 32382376266240000.0,
                    7771770303897600.0, 1187353796428800.0,
                    129060195264000.0, 10559470521600.0, 670442572800.0,
                    33522128640.0, 1323241920.0, 40840800.0, 960960.0,
                    16380.0, 182.0, 1.0])
_THETA3 = 1.495585217958292e-2
_THETA5 = 2.539398330063230e-1
_THETA7 = 9.504178996162932e-1
_THETA9 = 2.097847961257068
_THETA13 = 5.371920351148152


@njit
def _one_norm(a):
    return np.max(np.sum(np.abs(a), axis=0))


@njit
def _pade_low(a, b, m):
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    a2 = a @ a
    # even powers a^0, a^2, ..., a^(m-1)
    pw = np.empty(((m + 1) // 2, n, n), dtype=np.complex128)
    pw[0] = ident
    pw[1] = a2
    for k in range(2, (m + 1) // 2):
        pw[k] = pw[k - 1] @ a2
    u = np.zeros((n, n), dtype=np.complex128)
    v = np.zeros((n, n), dtype=np.complex128)
    for k in range((m + 1) // 2):
        u += b[2 * k + 1] * pw[k]
        v += b[2 * k] * pw[k]
    u = a @ u
    return np.linalg.solve(v - u, v + u)


@njit
def _pade13(a):
    b = _PADE13
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
             + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
    v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
         + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
    return np.linalg.solve(v - u, v + u)


@njit
def expm_kernel(a):
    """Scaling-and-squaring matrix exponential with a diagonal Pade core."""
    a = np.ascontiguousarray(a).astype(np.complex128)
    nrm = _one_norm(a)
    if nrm <= _THETA3:
        return _pade_low(a, _PADE3, 3)
    if nrm <= _THETA5:
        return _pade_low(a, _PADE5, 5)
    if nrm <= _THETA7:
        return _pade_low(a, _PADE7, 7)
    if nrm <= _THETA9:
        return _pade_low(a, _PADE9, 9)
    s = 0
    if nrm > _THETA13:
        s = int(np.ceil(np.log2(nrm / _THETA13)))
    r = np.ascontiguousarray(_pade13(a / 2.0 ** s))
    for _ in range(s):
        r = r @ r
    return r


@njit
def _flow(m, a, y):
    # linear superoperator part plus the trace-restoring nonlinear term
    return m @ y - 1j * np.sum(a * y) * y


@njit
def _trace(y, diag):
    tr = 0.0 + 0.0j
    for k in range(diag.shape[0]):
        tr += y[diag[k]]
    return tr


@njit
def dopri5_kernel(m, a, diag, y0, t_grid, rtol, atol, max_steps):
    """Integrate ``y' = m y - i (a.y) y`` on ``t_grid`` with Dormand-Prince 5(4).

    ``y`` is a column-stacked density matrix, ``diag`` the positions of its
    diagonal entries.  After each accepted step the state is divided by its
    trace.  Steps are shortened to land exactly on every grid point.

    Returns ``(states, status, t_stop, n_accepted)``.
    """
    n = y0.shape[0]
    nt = t_grid.shape[0]
    out = np.zeros((nt, n), dtype=np.complex128)
    y = y0.copy()
    out[0] = y
    t = t_grid[0]

    f0 = _flow(m, a, y)
    d0 = np.sqrt(np.mean(np.abs(y) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0) ** 2))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h = min(h, 0.1)

    accepted = 0
    total = 0
    for it in range(1, nt):
        target = t_grid[it]
        while t < target:
            total += 1
            if total > max_steps:
                return out, STATUS_MAX_STEPS, t, accepted
            remaining = target - t
            truncated = h >= remaining
            h_try = remaining if truncated else h
            if h_try < 16.0 * 2.220446049250313e-16 * max(abs(t), 1.0):
                return out, STATUS_STEP_UNDERFLOW, t, accepted

            k1 = _flow(m, a, y)
            k2 = _flow(m, a, y + h_try * (0.2 * k1))
            k3 = _flow(m, a, y + h_try * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2))
            k4 = _flow(m, a, y + h_try * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2
                                          + 32.0 / 9.0 * k3))
            k5 = _flow(m, a, y + h_try * (19372.0 / 6561.0 * k1
                                          - 25360.0 / 2187.0 * k2
                                          + 64448.0 / 6561.0 * k3
                                          - 212.0 / 729.0 * k4))
            k6 = _flow(m, a, y + h_try * (9017.0 / 3168.0 * k1
                                          - 355.0 / 33.0 * k2
                                          + 46732.0 / 5247.0 * k3
                                          + 49.0 / 176.0 * k4
                                          - 5103.0 / 18656.0 * k5))
            y_new = y + h_try * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3
                                 + 125.0 / 192.0 * k4
                                 - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6)
            k7 = _flow(m, a, y_new)
            err = h_try * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3
                           + 71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5
                           + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7)
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
            err_norm = np.sqrt(np.mean((np.abs(err) / scale) ** 2))

            if err_norm <= 1.0:
                if err_norm == 0.0:
                    factor = 5.0
                else:
                    factor = min(5.0, max(0.2, 0.9 * err_norm ** -0.2))
                t = target if truncated else t + h_try
                tr = _trace(y_new, diag)
                if abs(tr) < VANISHING_TRACE:
                    return out, STATUS_VANISHING_NORM, t, accepted
                y = y_new / tr
                accepted += 1
                if not (truncated and factor >= 1.0):
                    h = h_try * factor
            else:
                h = h_try * max(0.2, 0.9 * err_norm ** -0.2)
        out[it] = y
    return out, STATUS_OK, t, accepted


@njit
def step_kernel(prop, y0, diag, n_steps):
    """Repeatedly apply a one-step propagator, renormalizing by the trace.

    Returns ``(states, status, n_done)``.
    """
    n = y0.shape[0]
    out = np.zeros((n_steps + 1, n), dtype=np.complex128)
    y = y0.copy()
    out[0] = y
    for k in range(n_steps):
        y = prop @ y
        tr = _trace(y, diag)
        if abs(tr) < VANISHING_TRACE:
            return out, STATUS_VANISHING_NORM, k
        y = y / tr
        out[k + 1] = y
    return out, STATUS_OK, n_steps


@njit
def trace_norm_kernel(m):
    # singular values directly; square roots of eigenvalues of m^dagger m
    # would amplify round-off near zero to ~1e-8
    return np.sum(np.linalg.svd(m)[1])


@njit
def trace_distance_series(ys1, ys2, dim):
    nt = ys1.shape[0]
    out = np.empty(nt)
    for k in range(nt):
        diff = (ys1[k] - ys2[k]).reshape((dim, dim)).T.copy()
        out[k] = 0.5 * trace_norm_kernel(diff)
    return out


@njit
def concurrence_kernel(rho, flip):
    # sqrt of the eigenvalues of rho flip rho* flip are the singular values of
    # psi^T flip psi with rho = psi psi^dagger; taking them directly avoids
    # square roots of round-off sized eigenvalues
    herm = 0.5 * (rho + rho.conj().T)
    w, v = np.linalg.eigh(herm)
    psi = v * np.sqrt(np.where(w > 0.0, w, 0.0))
    s = np.linalg.svd(psi.T @ flip @ psi)[1]
    return max(0.0, s[0] - s[1] - s[2] - s[3])


@njit
def concurrence_series(ys, flip):
    nt = ys.shape[0]
    out = np.empty(nt)
    for k in range(nt):
        rho = ys[k].reshape((4, 4)).T.copy()
        out[k] = concurrence_kernel(rho, flip)
    return out
