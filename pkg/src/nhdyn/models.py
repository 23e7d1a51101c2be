"""PT- and APT-symmetric qubit Hamiltonians.

Parity is ``P = sigma_x`` on every qubit and time reversal is entrywise complex
conjugation, so a Hamiltonian is PT-symmetric when ``P H* P = H`` and
APT-symmetric when ``P H* P = -H``.
"""

import enum
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .linalg import as_matrix

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
IDENTITY2 = np.eye(2, dtype=np.complex128)

SYMMETRY_RTOL = 1e-10


class Symmetry(str, enum.Enum):
    HERMITIAN = "Hermitian"
    PT = "PT"
    APT = "APT"
    NONE = "None"


# priority used when several labels apply
_PRIORITY = (Symmetry.HERMITIAN, Symmetry.PT, Symmetry.APT)


@dataclass
class QubitHamiltonian:
    matrix: np.ndarray
    symmetry: Symmetry = Symmetry.NONE
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix)
        dim = self.matrix.shape[0]
        n = dim.bit_length() - 1
        if 2 ** n != dim:
            raise ValueError(f"dimension {dim} is not a power of two")
        self.symmetry = Symmetry(self.symmetry)

    @property
    def n_qubits(self):
        return self.matrix.shape[0].bit_length() - 1

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def hamiltonian_matrix(h):
    """Accept a :class:`QubitHamiltonian` or a raw matrix."""
    if isinstance(h, QubitHamiltonian):
        return h.matrix
    return as_matrix(h)


def parity_operator(n_qubits):
    return reduce(np.kron, [SIGMA_X] * n_qubits)


def embed(op, site, n_qubits):
    """``I x ... x op x ... x I`` with ``op`` on qubit ``site`` (0 = leftmost)."""
    factors = [IDENTITY2] * n_qubits
    factors[site] = np.asarray(op, dtype=np.complex128)
    return reduce(np.kron, factors)


def build_pt_qubit(a):
    """Single-qubit ``sigma_x + i a sigma_z``."""
    a = float(a)
    return QubitHamiltonian(SIGMA_X + 1j * a * SIGMA_Z, Symmetry.PT, {"a": a})


def build_apt_qubit_general(b, theta=0.0, kappa=1.0, s=0.0):
    """Most general single-qubit APT Hamiltonian.

    ``[[b + i theta, i kappa - s], [i kappa + s, -b + i theta]]``; the plain
    ``i sigma_x + b sigma_z`` model is ``theta = s = 0, kappa = 1``.
    """
    b, theta, kappa, s = map(float, (b, theta, kappa, s))
    m = np.array([[b + 1j * theta, 1j * kappa - s],
                  [1j * kappa + s, -b + 1j * theta]], dtype=np.complex128)
    return QubitHamiltonian(m, Symmetry.APT,
                            {"b": b, "theta": theta, "kappa": kappa, "s": s})


def build_apt_qubit(b):
    return build_apt_qubit_general(b, 0.0, 1.0, 0.0)


def build_tensor_sum(locals_):
    """``sum_j I x ... x H_j x ... x I`` over single-qubit Hamiltonians."""
    locals_ = list(locals_)
    if not locals_:
        raise ValueError("need at least one local Hamiltonian")
    mats = []
    for h in locals_:
        m = hamiltonian_matrix(h)
        if m.shape != (2, 2):
            raise ValueError(f"tensor-sum entries must be single-qubit, got shape {m.shape}")
        mats.append(m)
    n = len(mats)
    total = sum(embed(m, j, n) for j, m in enumerate(mats))
    labels = {h.symmetry for h in locals_ if isinstance(h, QubitHamiltonian)}
    label = labels.pop() if len(labels) == 1 and all(
        isinstance(h, QubitHamiltonian) for h in locals_) else Symmetry.NONE
    params = {}
    if all(isinstance(h, QubitHamiltonian) for h in locals_):
        first = locals_[0].parameters
        if all(h.parameters == first for h in locals_):
            params = dict(first)
    params["n_qubits"] = n
    return QubitHamiltonian(total, label, params)


def pt_two_qubit(a):
    return build_tensor_sum([build_pt_qubit(a)] * 2)


def apt_two_qubit(b):
    return build_tensor_sum([build_apt_qubit(b)] * 2)


def apt_general(n_qubits, b, theta=0.0, kappa=1.0, s=0.0):
    return build_tensor_sum([build_apt_qubit_general(b, theta, kappa, s)] * n_qubits)


def symmetry_details(h):
    """Every label among Hermitian, PT, APT that ``h`` satisfies, in priority order."""
    m = hamiltonian_matrix(h)
    n = m.shape[0].bit_length() - 1
    tol = SYMMETRY_RTOL * max(np.linalg.norm(m, 2), 1.0)
    p = parity_operator(n)
    mirrored = p @ m.conj() @ p
    found = []
    if np.max(np.abs(m - m.conj().T)) <= tol:
        found.append(Symmetry.HERMITIAN)
    if np.max(np.abs(mirrored - m)) <= tol:
        found.append(Symmetry.PT)
    if np.max(np.abs(mirrored + m)) <= tol:
        found.append(Symmetry.APT)
    return [s for s in _PRIORITY if s in found]


def verify_symmetry(h):
    found = symmetry_details(h)
    return found[0] if found else Symmetry.NONE
