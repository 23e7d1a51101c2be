"""Open non-Hermitian dynamics under pure dephasing.

The corrected master equation is

    drho/dt = L0(rho) - i Tr[rho (H^dagger - H)] rho,
    L0(rho) = -i (H rho - rho H^dagger) + sum_k g_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)

with jump operators ``sigma_z`` on each qubit (local channels) and
``sum_j sigma_z^(j)`` (collective channel).  Its trace-normalized solution is
``unvec(exp(L0 t) vec(rho0))`` divided by the trace, so the long-time behaviour
is read off the spectrum of the column-stacked superoperator ``L0``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _evolve
from .closed_system import closed_step_propagator, propagate_closed, rhs_closed
from .errors import (DefectiveMatrixError, NHDynError, NonUniqueSteadyStateError,
                     ZeroGapError)
from .linalg import eig_general, expm, sort_with_ties, unvec, vec
from .models import SIGMA_Z, embed, hamiltonian_matrix

GAP_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class DephasingConfig:
    """Pure-dephasing rates.

    ``gammas_local[j]`` is the rate of ``sigma_z`` on qubit ``j``;
    ``gamma_collective`` the rate of ``sum_j sigma_z^(j)``.  An empty
    ``gammas_local`` means no local channels.  For two qubits the rates
    ``gamma1, gamma2, gamma3`` are the two local channels and the collective one.
    """

    gammas_local: tuple = ()
    gamma_collective: float = 0.0

    def __post_init__(self):
        local = tuple(float(g) for g in self.gammas_local)
        object.__setattr__(self, "gammas_local", local)
        object.__setattr__(self, "gamma_collective", float(self.gamma_collective))
        rates = local + (self.gamma_collective,)
        if any(not np.isfinite(g) or g < 0 for g in rates):
            raise ValueError(f"dephasing rates must be finite and nonnegative, got {rates}")

    @classmethod
    def two_qubit(cls, gamma1=0.0, gamma2=0.0, gamma3=0.0):
        return cls((gamma1, gamma2), gamma3)

    @classmethod
    def local(cls, n_qubits, gamma):
        return cls((gamma,) * n_qubits, 0.0)

    @classmethod
    def collective(cls, gamma):
        return cls((), gamma)

    @property
    def gamma1(self):
        return self.gammas_local[0] if self.gammas_local else 0.0

    @property
    def gamma2(self):
        return self.gammas_local[1] if len(self.gammas_local) > 1 else 0.0

    @property
    def gamma3(self):
        return self.gamma_collective

    @property
    def is_zero(self):
        return self.gamma_collective == 0 and not any(self.gammas_local)

    def jump_operators(self, n_qubits):
        """``[(rate, L), ...]`` for the nonzero channels."""
        if self.gammas_local and len(self.gammas_local) != n_qubits:
            raise ValueError(f"{len(self.gammas_local)} local rates given for "
                             f"{n_qubits} qubits")
        ops = []
        for j, g in enumerate(self.gammas_local):
            if g:
                ops.append((g, embed(SIGMA_Z, j, n_qubits)))
        if self.gamma_collective:
            total = sum(embed(SIGMA_Z, j, n_qubits) for j in range(n_qubits))
            ops.append((self.gamma_collective, total))
        return ops


NO_DEPHASING = DephasingConfig()


def _n_qubits(h):
    return h.shape[0].bit_length() - 1


def build_liouvillian(h, deph=NO_DEPHASING):
    """``L0`` as a ``d^2 x d^2`` matrix acting on column-stacked states."""
    h = hamiltonian_matrix(h)
    d = h.shape[0]
    ident = np.eye(d, dtype=np.complex128)
    sup = -1j * (np.kron(ident, h) - np.kron(h.conj(), ident))
    for g, op in deph.jump_operators(_n_qubits(h)):
        ldl = op.conj().T @ op
        sup += g * (np.kron(op.conj(), op)
                    - 0.5 * np.kron(ident, ldl)
                    - 0.5 * np.kron(ldl.T, ident))
    return sup


def dissipator(deph, rho):
    rho = np.asarray(rho, dtype=np.complex128)
    out = np.zeros_like(rho)
    for g, op in deph.jump_operators(_n_qubits(rho)):
        ldl = op.conj().T @ op
        out += g * (op @ rho @ op.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
    return out


def apply_liouvillian(h, deph, rho):
    """``L0(rho)`` evaluated directly in matrix form."""
    h = hamiltonian_matrix(h)
    rho = np.asarray(rho, dtype=np.complex128)
    return -1j * (h @ rho - rho @ h.conj().T) + dissipator(deph, rho)


def rhs_open(h, deph, rho):
    return rhs_closed(h, rho) + dissipator(deph, rho)


def _real_shift(sup):
    return float(np.max(np.linalg.eigvals(sup).real))


def propagate_open(h, deph, rho0, t):
    """Normalized ``unvec(exp(L0 t) vec(rho0))``.

    ``L0`` is shifted by its largest real eigenvalue before exponentiating;
    the scalar factor cancels in the normalization.  Without dephasing
    ``exp(L0 t)`` factorizes into ``conj(U) x U`` and the state is propagated
    with ``U = exp(-iHt)`` directly: for strongly non-normal ``H`` the
    squared-up superoperator exponential loses several digits that the
    smaller Hamiltonian exponential keeps.
    """
    if deph.is_zero:
        return propagate_closed(h, rho0, t)
    h = hamiltonian_matrix(h)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != h.shape:
        raise ValueError(f"state shape {rho0.shape} does not match Hamiltonian {h.shape}")
    t = float(t)
    if t < 0:
        raise ValueError("time must be nonnegative")
    if t == 0:
        return rho0.copy()
    sup = build_liouvillian(h, deph)
    shift = _real_shift(sup)
    prop = expm(sup * t - shift * t * np.eye(sup.shape[0]))
    return _evolve.normalize_by_trace(unvec(prop @ vec(rho0)), t)


def integrate_open(h, deph, rho0, t_grid, rtol=_evolve.DEFAULT_RTOL,
                   atol=_evolve.DEFAULT_ATOL):
    """Adaptive integration of the corrected master equation on ``t_grid``."""
    h = hamiltonian_matrix(h)
    return _evolve.integrate_flow(build_liouvillian(h, deph), h, rho0, t_grid, rtol, atol)


def open_step_propagator(h, deph, dt):
    if deph.is_zero:
        return closed_step_propagator(h, dt)
    sup = build_liouvillian(h, deph)
    return expm(sup * dt - _real_shift(sup) * dt * np.eye(sup.shape[0]))


def evolve_open(h, deph, rho0, t_max, dt):
    """States on the uniform grid ``0, dt, ..., t_max``; returns ``(times, states)``."""
    times, n = _evolve.uniform_grid(t_max, dt)
    return times, _evolve.step_flow(open_step_propagator(h, deph, dt), rho0, n, dt)


def _eigenmatrix_scale(m, leading):
    """Scalar ``s`` so that ``s * m`` follows the eigenmatrix conventions."""
    tr = np.trace(m)
    if leading and abs(tr) > 1e-10 * np.linalg.norm(m):
        return 1.0 / tr
    flat = m.ravel(order="F")
    first = flat[np.flatnonzero(np.abs(flat) > 1e-12 * np.abs(flat).max())[0]]
    return abs(first) / (first * np.linalg.norm(m))


@dataclass
class LiouvillianSpectrum:
    eigenvalues: np.ndarray
    eigenmatrices: list
    gap: float
    delta_eta: float
    steady_state: np.ndarray | None
    superoperator: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    tie_tol: float = 0.0
    defective: bool = False

    @property
    def real_parts(self):
        return self.eigenvalues.real

    def expansion(self, rho0):
        """Coefficients ``C_j`` with ``vec(rho0) = sum_j C_j vec(rho_j)``."""
        return self.left @ vec(rho0)

    def steady_state_overlap(self, rho0):
        return complex(self.expansion(rho0)[0])

    def r_matrix(self, rho0):
        """``C_2 rho_2 / C_1``, the leading correction near the steady state."""
        c = self.expansion(rho0)
        if abs(c[0]) < 1e-12:
            raise NHDynError("initial state has (numerically) no overlap with rho_1")
        return c[1] * self.eigenmatrices[1] / c[0]


def liouvillian_order(values, sup_norm):
    tol = GAP_TIE_RTOL * max(sup_norm, 1.0)
    return sort_with_ties(np.real(values), np.imag(values), tol), tol


def liouvillian_eigenvalues(h, deph=NO_DEPHASING):
    """Eigenvalues of ``L0`` sorted by descending real part."""
    sup = build_liouvillian(h, deph)
    w = np.linalg.eigvals(sup)
    order, _ = liouvillian_order(w, np.linalg.norm(sup, 2))
    return w[order]


def liouvillian_spectrum(h, deph=NO_DEPHASING):
    """Full sorted eigen-analysis of ``L0``.

    ``rho_1`` is scaled to unit trace and returned as ``steady_state`` (``None``
    when its trace vanishes, e.g. for unitary dynamics); the other
    eigenmatrices have unit Frobenius norm and a real positive first nonzero
    entry.

    Raises:
        DefectiveMatrixError: the cluster of the leading eigenvalue is defective.
        NonUniqueSteadyStateError: the two leading eigenvalues coincide.
    """
    sup = build_liouvillian(h, deph)
    es = eig_general(sup)
    sup_norm = np.linalg.norm(sup, 2)
    order, tol = liouvillian_order(es.eigenvalues, sup_norm)
    es = es.reorder(order)
    if any(0 in c for c in es.defective_clusters):
        raise DefectiveMatrixError("leading Liouvillian eigenvalue cluster is defective",
                                   cluster=[es.eigenvalues[c].tolist()
                                            for c in es.defective_clusters if 0 in c])
    mu = es.eigenvalues
    if mu.size > 1 and abs(mu[0] - mu[1]) <= tol:
        raise NonUniqueSteadyStateError(
            f"leading Liouvillian eigenvalue {mu[0]:.6g} is degenerate")

    mats = []
    scales = np.empty(mu.size, dtype=np.complex128)
    for j in range(mu.size):
        m = unvec(es.right[:, j])
        scales[j] = _eigenmatrix_scale(m, j == 0)
        mats.append(scales[j] * m)
    steady = mats[0] if abs(np.trace(mats[0]) - 1) < 1e-8 else None
    left = es.left / scales[:, None]

    gap = float(mu[0].real - mu[1].real) if mu.size > 1 else 0.0
    deta = float(mu[0].imag - mu[1].imag) if mu.size > 1 else 0.0
    return LiouvillianSpectrum(mu, mats, gap, deta, steady, sup, left, tol,
                               es.defective)


def relaxation_time_open(spec):
    """``1 / gap``.

    Raises:
        ZeroGapError: the gap is zero within the tie tolerance.
    """
    gap = spec.gap if isinstance(spec, LiouvillianSpectrum) else float(spec)
    tol = spec.tie_tol if isinstance(spec, LiouvillianSpectrum) else 0.0
    if gap <= tol:
        raise ZeroGapError(f"Liouvillian gap {gap:.3g} is not positive")
    return 1.0 / gap


def freezing_diagnostic(h, deph, rho):
    """Largest ``|d rho_nn / dt|`` in the local ``{up, down}`` product basis."""
    return float(np.max(np.abs(np.diag(rhs_open(h, deph, rho)))))


# rate standing in for the strong-dephasing limit
STRONG_DEPHASING = 1e3
STRONG_DEPHASING_GAMMAS = (1e2, 3e2, 1e3)


@dataclass
class DephasingScaling:
    """Power laws ``rate ~ gamma^p`` fitted over large dephasing rates."""

    gammas: np.ndarray
    coherence_rates: np.ndarray
    gaps: np.ndarray
    coherence_exponent: float
    gap_exponent: float


def _slowest_coherence_rate(h, deph):
    sup = build_liouvillian(h, deph)
    w, v = np.linalg.eig(sup)
    d = int(round(np.sqrt(sup.shape[0])))
    off = np.ones((d, d), dtype=bool)
    np.fill_diagonal(off, False)
    top = w.real.max()
    rates = []
    for j in range(w.size):
        m = unvec(v[:, j])
        weight = np.sum(np.abs(m[off]) ** 2) / np.sum(np.abs(m) ** 2)
        if weight > 0.5:
            rates.append(top - w[j].real)
    return min(rates)


def strong_dephasing_scaling(h, deph_family, gammas=STRONG_DEPHASING_GAMMAS):
    """Exponents of the slowest coherence decay rate and of the gap in ``gamma``.

    Coherence modes are Liouvillian eigenmatrices with more than half their
    weight off the diagonal; their slowest rate relative to the leading
    eigenvalue grows like ``gamma`` under pure dephasing.  A gap exponent of
    -1 means populations freeze as ``1/gamma``; 0 means a finite gap remains.
    """
    g = np.asarray(gammas, dtype=float)
    if g.size < 2 or np.any(g <= 0):
        raise ValueError("need at least two positive dephasing rates")
    coh = np.array([_slowest_coherence_rate(h, deph_family(x)) for x in g])
    gaps = np.array([_sweep_point(h, deph_family, x).gap for x in g])
    lg = np.log(g)
    p_coh = float(np.polyfit(lg, np.log(coh), 1)[0])
    p_gap = float(np.polyfit(lg, np.log(gaps), 1)[0]) if np.all(gaps > 0) else np.nan
    return DephasingScaling(g, coh, gaps, p_coh, p_gap)


@dataclass
class SpectrumRow:
    gamma: float
    real_parts: np.ndarray
    gap: float
    delta_eta: float
    error: str | None = None


@dataclass
class SpectrumSweep:
    rows: list

    @property
    def gammas(self):
        return np.array([r.gamma for r in self.rows])

    @property
    def gaps(self):
        return np.array([r.gap for r in self.rows])

    @property
    def gap_at_max_gamma(self):
        return float(self.rows[-1].gap)

    @property
    def argmax_gap(self):
        """``gamma`` at which the gap peaks."""
        return float(self.gammas[int(np.nanargmax(self.gaps))])

    def is_strictly_decreasing(self):
        return bool(np.all(np.diff(self.gaps) < 0))


def _sweep_point(h_family, deph_family, gamma):
    h = h_family(gamma) if callable(h_family) else h_family
    deph = deph_family(gamma)
    try:
        spec = liouvillian_spectrum(h, deph)
        return SpectrumRow(gamma, spec.real_parts.copy(), spec.gap, spec.delta_eta)
    except NHDynError as exc:
        mu = liouvillian_eigenvalues(h, deph)
        gap = float(mu[0].real - mu[1].real)
        return SpectrumRow(gamma, mu.real.copy(), gap, float(mu[0].imag - mu[1].imag),
                           f"{exc.kind}: {exc}")


def spectrum_sweep(h_family, deph_family, gammas, workers=1):
    """Liouvillian spectrum summary for every rate in ``gammas``.

    ``h_family`` is a Hamiltonian or a callable ``gamma -> Hamiltonian``;
    ``deph_family`` maps ``gamma`` to a :class:`DephasingConfig`.  Rows come
    back in the order of ``gammas`` whatever the worker count.
    """
    gammas = [float(g) for g in gammas]
    if not gammas:
        raise ValueError("need at least one dephasing rate")
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda g: _sweep_point(h_family, deph_family, g), gammas))
    else:
        rows = [_sweep_point(h_family, deph_family, g) for g in gammas]
    return SpectrumSweep(rows)
