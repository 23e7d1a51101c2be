"""Initial states and density-matrix checks.

Basis ordering follows the local basis ``|up> = (1, 0)``, ``|down> = (0, 1)``
so for two qubits the order is ``|uu>, |ud>, |du>, |dd>``.
"""

import numpy as np

UP = np.array([1, 0], dtype=np.complex128)
DOWN = np.array([0, 1], dtype=np.complex128)

STATE_TOL = 1e-10


def projector(psi):
    psi = np.asarray(psi, dtype=np.complex128)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def product_state(spins):
    """Density matrix of a product of ``'u'``/``'d'`` spins, e.g. ``'ud'``."""
    psi = np.ones(1, dtype=np.complex128)
    for c in spins:
        psi = np.kron(psi, UP if c == "u" else DOWN)
    return projector(psi)


def all_up(n_qubits=2):
    return product_state("u" * n_qubits)


def all_down(n_qubits=2):
    return product_state("d" * n_qubits)


def bell_state():
    """``(|ud> + |du>) / sqrt(2)``."""
    return projector([0, 1, 1, 0])


def maximally_mixed(n_qubits=2):
    d = 2 ** n_qubits
    return np.eye(d, dtype=np.complex128) / d


def werner_state(p):
    return p * bell_state() + (1 - p) * maximally_mixed(2)


STATE_NAMES = ("up_up", "down_down", "bell", "maximally_mixed")


def named_state(name, n_qubits=2):
    if name == "up_up":
        return all_up(n_qubits)
    if name == "down_down":
        return all_down(n_qubits)
    if name == "bell":
        if n_qubits != 2:
            raise ValueError("the Bell state is defined for two qubits only")
        return bell_state()
    if name == "maximally_mixed":
        return maximally_mixed(n_qubits)
    raise ValueError(f"unknown state name {name!r}")


def check_density_matrix(rho, tol=STATE_TOL):
    """Raise ``ValueError`` unless ``rho`` is unit-trace, Hermitian and PSD."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"trace {np.trace(rho):.3g} differs from 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")
    return rho


def random_density_matrix(dim, rng, rank=None):
    """Random mixed state ``G G^dagger / Tr`` with Ginibre ``G``."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
