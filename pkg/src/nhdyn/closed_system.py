"""Closed non-Hermitian dynamics of the trace-normalized density matrix.

Three independent routes give the same ``rho(t)``:

* :func:`propagate_closed` applies ``exp(-iHt) rho0 exp(iH^dagger t)`` and
  divides by the trace;
* :func:`integrate_closed` integrates the nonlinear equation of motion
  ``drho/dt = -i(H rho - rho H^dagger) - i Tr[rho (H^dagger - H)] rho``;
* :meth:`SpectralState.reconstruct` sums the biorthogonal expansion
  ``sum_mn rho_mn exp(-i (lambda_m - conj(lambda_n)) t) |phi_m><phi_n|``.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import _evolve
from .errors import AmbiguousRegimeError, DefectiveMatrixError
from .linalg import DEGENERACY_RTOL, EigenSystem, eig_general, expm, sort_with_ties
from .models import hamiltonian_matrix


def closed_superoperator(h):
    """Column-stacked ``rho -> -i (H rho - rho H^dagger)``."""
    h = hamiltonian_matrix(h)
    ident = np.eye(h.shape[0], dtype=np.complex128)
    return -1j * (np.kron(ident, h) - np.kron(h.conj(), ident))


def rhs_closed(h, rho):
    h = hamiltonian_matrix(h)
    rho = np.asarray(rho, dtype=np.complex128)
    hd = h.conj().T
    leak = np.trace(rho @ (hd - h))
    return -1j * (h @ rho - rho @ hd) - 1j * leak * rho


def _growth_shift(h):
    # largest Gamma_m; subtracting it keeps exp(-iHt) bounded for long times
    # without changing the normalized state
    return float(np.max(np.linalg.eigvals(h).imag))


def propagate_closed(h, rho0, t):
    """Normalized ``exp(-iHt) rho0 exp(iH^dagger t)``.

    The propagator is evaluated with ``H`` shifted by ``-i max(Gamma_m)``, a
    scalar factor that cancels in the normalization.  ``VanishingNormError``
    is raised when the trace of the shifted, unnormalized state drops below
    1e-30, i.e. when the state has been annihilated relative to its fastest
    growing component.
    """
    h = hamiltonian_matrix(h)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if rho0.shape != h.shape:
        raise ValueError(f"state shape {rho0.shape} does not match Hamiltonian {h.shape}")
    t = float(t)
    if t < 0:
        raise ValueError("time must be nonnegative")
    if t == 0:
        return rho0.copy()
    shift = _growth_shift(h)
    u = expm(-1j * h * t - shift * t * np.eye(h.shape[0]))
    return _evolve.normalize_by_trace(u @ rho0 @ u.conj().T, t)


def integrate_closed(h, rho0, t_grid, rtol=_evolve.DEFAULT_RTOL, atol=_evolve.DEFAULT_ATOL):
    """Adaptive Dormand-Prince integration of the closed equation of motion.

    Returns an array of shape ``(len(t_grid), d, d)``.  The state is divided
    by its trace after every accepted step.
    """
    h = hamiltonian_matrix(h)
    return _evolve.integrate_flow(closed_superoperator(h), h, rho0, t_grid, rtol, atol)


def closed_step_propagator(h, dt):
    """Superoperator advancing ``vec(rho)`` by ``dt`` (before normalization)."""
    h = hamiltonian_matrix(h)
    u = expm(-1j * h * dt - _growth_shift(h) * dt * np.eye(h.shape[0]))
    return np.kron(u.conj(), u)


def evolve_closed(h, rho0, t_max, dt):
    """States on the uniform grid ``0, dt, ..., t_max``.

    Returns ``(times, states)``.
    """
    times, n = _evolve.uniform_grid(t_max, dt)
    return times, _evolve.step_flow(closed_step_propagator(h, dt), rho0, n, dt)


def spectrum_order(values, scale):
    """Descending ``Gamma = Im(lambda)``; ties broken by descending ``Re(lambda)``."""
    tol = DEGENERACY_RTOL * max(scale, 1.0)
    return sort_with_ties(np.imag(values), np.real(values), tol)


@dataclass
class SpectralState:
    eigen: EigenSystem
    coefficients: np.ndarray
    delta_e: float
    delta_gamma: float

    @property
    def eigenvalues(self):
        return self.eigen.eigenvalues

    @property
    def r1_main(self):
        """``rho_21 / rho_11`` (ordering used alongside the asymptotic law)."""
        return self.coefficients[1, 0] / self.coefficients[0, 0]

    @property
    def r1_appendix(self):
        """``rho_12 / rho_11``, the transposed ordering."""
        return self.coefficients[0, 1] / self.coefficients[0, 0]

    def unnormalized(self, t, shift=True):
        lam = self.eigen.eigenvalues
        omega = lam[:, None] - lam.conj()[None, :]
        expo = -1j * omega * t
        if shift:
            expo = expo - 2 * np.max(lam.imag) * t
        phi = self.eigen.right
        return phi @ (self.coefficients * np.exp(expo)) @ phi.conj().T

    def reconstruct(self, t):
        sigma = self.unnormalized(t)
        return _evolve.normalize_by_trace(sigma, t)

    def asymptote(self):
        """``|phi_1><phi_1|`` normalized to unit trace."""
        phi = self.eigen.right[:, 0]
        return np.outer(phi, phi.conj()) / np.vdot(phi, phi).real


def spectral_decompose(h, rho0):
    """Sorted biorthogonal spectrum of ``H`` and the expansion of ``rho0``.

    ``rho_mn = <chi_m|rho0|chi_n> / (<chi_m|phi_m> <phi_n|chi_n>)``.

    Raises:
        DefectiveMatrixError: ``H`` is at an exceptional point.
    """
    h = hamiltonian_matrix(h)
    es = eig_general(h)
    if es.defective:
        bad = [es.eigenvalues[c].tolist() for c in es.defective_clusters]
        raise DefectiveMatrixError(f"Hamiltonian is defective; eigenvalue clusters {bad}",
                                   cluster=bad)
    es = es.reorder(spectrum_order(es.eigenvalues, np.linalg.norm(h, 2)))
    chi = es.left
    phi = es.right
    rho0 = np.asarray(rho0, dtype=np.complex128)
    # <chi_m| rho0 |chi_n>; the ket |chi_n> is the conjugate transpose of the row
    num = chi @ rho0 @ chi.conj().T
    norm_m = np.einsum("mi,im->m", chi, phi)
    norm_n = np.conj(norm_m)
    coeffs = num / (norm_m[:, None] * norm_n[None, :])
    lam = es.eigenvalues
    if lam.size > 1:
        de = abs(lam[0].real - lam[1].real)
        dg = lam[0].imag - lam[1].imag
    else:
        de = dg = 0.0
    return SpectralState(es, coeffs, float(de), float(max(dg, 0.0)))


class Regime(str, enum.Enum):
    DAMPED_OSCILLATION = "DampedOscillation"
    PURE_OSCILLATION = "PureOscillation"
    PURE_DECAY = "PureDecay"


@dataclass
class RegimeLabel:
    kind: Regime
    period: float | None
    relax_rate: float | None
    delta_e: float
    delta_gamma: float


def classify_regime(h, eps=1e-9):
    """Dynamical regime from the top two eigenvalues (sorted by ``Gamma``).

    Raises:
        DefectiveMatrixError: ``H`` is at an exceptional point.
        AmbiguousRegimeError: both ``|dE|`` and ``dGamma`` are below ``eps * ||H||``.
    """
    h = hamiltonian_matrix(h)
    es = eig_general(h)
    if es.defective:
        raise DefectiveMatrixError("cannot classify a defective Hamiltonian",
                                   cluster=[es.eigenvalues[c].tolist()
                                            for c in es.defective_clusters])
    norm = np.linalg.norm(h, 2)
    lam = es.eigenvalues[spectrum_order(es.eigenvalues, norm)]
    if lam.size < 2:
        raise AmbiguousRegimeError("a one-dimensional system has no dynamics")
    de = abs(lam[0].real - lam[1].real)
    dg = max(lam[0].imag - lam[1].imag, 0.0)
    cut = eps * norm
    osc = de > cut
    dec = dg > cut
    if osc and dec:
        return RegimeLabel(Regime.DAMPED_OSCILLATION, 2 * np.pi / de, dg, de, dg)
    if osc:
        return RegimeLabel(Regime.PURE_OSCILLATION, 2 * np.pi / de, None, de, dg)
    if dec:
        return RegimeLabel(Regime.PURE_DECAY, None, dg, de, dg)
    raise AmbiguousRegimeError(
        f"top of spectrum is degenerate (|dE|={de:.3g}, dGamma={dg:.3g})")
