"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
Vectorization is column stacking: entry ``(i, j)`` of a ``d x d`` matrix lands
at index ``j*d + i``, which makes ``vec(A X B) == kron(B.T, A) @ vec(X)``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels
from .errors import EigenConvergenceError, ExpmOverflowError

# relative eigenvalue distance below which eigenvalues are treated as one cluster
DEGENERACY_RTOL = 1e-8
# overlap-block condition number above which a cluster counts as defective
DEFECTIVE_COND = 1e8


def as_matrix(m):
    """Validate ``m`` as a finite square matrix and return a complex copy."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def kron(a, b):
    return np.kron(as_matrix(a), as_matrix(b))


def vec(m):
    """Column-stack ``m`` into a 1-D vector."""
    return np.asarray(m, dtype=np.complex128).reshape(-1, order="F")


def unvec(v):
    v = np.asarray(v, dtype=np.complex128).ravel()
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size or d == 0:
        raise ValueError(f"vector length {v.size} is not a perfect square")
    return v.reshape((d, d), order="F")


def diag_indices_vec(dim):
    """Positions of the diagonal entries of a ``dim x dim`` matrix in ``vec``."""
    return np.arange(dim, dtype=np.int64) * (dim + 1)


def expm(m):
    """Matrix exponential by scaling and squaring around a Pade core.

    The Pade degree (3, 5, 7, 9 or 13) is picked from the 1-norm, and for
    norms beyond the degree-13 bound the argument is halved ``s`` times and
    the result squared back.  Accuracy is at the 1e-10 relative level up to
    norms of about 1e2; above 1e3 no accuracy is promised.

    Raises:
        ExpmOverflowError: the result (or an intermediate square) is not finite.
    """
    a = as_matrix(m)
    with np.errstate(over="ignore", invalid="ignore"):
        r = _kernels.expm_kernel(a)
    if not np.all(np.isfinite(r)):
        raise ExpmOverflowError(
            f"matrix exponential overflowed (1-norm of argument {np.abs(a).sum(0).max():.3g})")
    return r


def trace_norm(m):
    """Sum of singular values."""
    return float(_kernels.trace_norm_kernel(as_matrix(m)))


@dataclass
class EigenSystem:
    """Biorthogonal eigendecomposition of a (possibly non-normal) matrix.

    ``right[:, k]`` is the right eigenvector for ``eigenvalues[k]`` (unit
    2-norm) and ``left[k, :]`` the matching left eigenvector as a row, scaled so
    that ``left @ right`` is the identity.  ``defective_clusters`` lists the
    index groups where no such left basis could be built; when non-empty,
    ``defective`` is true and the left vectors of those groups are meaningless.
    """

    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray
    defective: bool = False
    defective_clusters: list = field(default_factory=list)

    @property
    def right_vectors(self):
        return [self.right[:, k] for k in range(self.right.shape[1])]

    @property
    def left_vectors(self):
        return [self.left[k, :] for k in range(self.left.shape[0])]

    def reorder(self, order):
        order = np.asarray(order)
        inverse = np.empty_like(order)
        inverse[order] = np.arange(order.size)
        clusters = [sorted(int(inverse[i]) for i in c) for c in self.defective_clusters]
        return EigenSystem(self.eigenvalues[order], self.right[:, order],
                           self.left[order, :], self.defective, clusters)

    def reconstruct(self):
        return (self.right * self.eigenvalues) @ self.left


def _clusters(values, tol):
    """Group indices of ``values`` whose members chain within ``tol``."""
    n = values.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def eig_general(m):
    """All eigenvalues with matched right and left eigenvectors.

    The dense eigenproblem is solved by LAPACK ``zgeev`` (Hessenberg reduction
    and shifted QR, capped at 30 iterations per eigenvalue).  Eigenvalues
    closer than ``1e-8 * ||m||_2`` form a cluster; inside each cluster the left
    basis is re-mixed through the inverse overlap block so that
    ``<chi_m|phi_n> = delta_mn``.  A cluster whose overlap block of unit
    vectors has ``1 / sigma_min`` above 1e8 is reported as defective.

    Raises:
        EigenConvergenceError: the QR iteration did not converge.
    """
    a = as_matrix(m)
    try:
        w, vl, vr = scipy.linalg.eig(a, left=True, right=True)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(str(exc)) from exc

    vr = vr / np.linalg.norm(vr, axis=0)
    chi = vl.conj().T
    chi = chi / np.linalg.norm(chi, axis=1)[:, None]

    norm = np.linalg.norm(a, 2)
    tol = DEGENERACY_RTOL * max(norm, np.finfo(float).tiny)
    left = np.empty_like(chi)
    defective = []
    for group in _clusters(w, tol):
        idx = np.array(group)
        overlap = chi[idx] @ vr[:, idx]
        # with unit vectors, 1/sigma_min generalizes the eigenvalue condition
        # number 1/|<chi|phi>|; at an exceptional point chi is orthogonal to phi
        smin = np.linalg.svd(overlap, compute_uv=False).min()
        cond = np.inf if smin == 0 else 1.0 / smin
        if cond > DEFECTIVE_COND:
            defective.append(group)
            left[idx] = chi[idx]
            continue
        left[idx] = np.linalg.solve(overlap, chi[idx])
    return EigenSystem(w, vr, left, bool(defective), defective)


def sort_with_ties(primary, secondary, tol):
    """Indices sorting by descending ``primary``, ties by descending ``secondary``.

    Values of ``primary`` within ``tol`` of the first member of a run count as
    tied, so round-off never decides the order of structurally equal keys.
    """
    primary = np.asarray(primary, dtype=float)
    secondary = np.asarray(secondary, dtype=float)
    order = np.argsort(-primary, kind="stable")
    out = []
    start = 0
    while start < order.size:
        stop = start + 1
        while stop < order.size and primary[order[start]] - primary[order[stop]] <= tol:
            stop += 1
        run = order[start:stop]
        out.extend(run[np.argsort(-secondary[run], kind="stable")])
        start = stop
    return np.array(out, dtype=int)
