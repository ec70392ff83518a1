"""Dense (and optionally sparse) linear-algebra kernels.

All tolerances live in :data:`DEFAULTS`; functions accept an explicit
``config`` when a caller needs different ones.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as spla
import scipy.sparse as sps
import scipy.sparse.linalg as spsla

from .errors import SingularK, SingularPencil


@dataclass(frozen=True)
class NumericsConfig:
    pivot_tol: float = 1e-14        # relative to max |A_ij|
    orth_drop_tol: float = 1e-12    # column pruning in orthonormal_basis
    svd_rel_tol: float = 1e-8       # singular value cutoff relative to sigma_max
    infinite_eig_ratio: float = 1e12
    pencil_probe_tol: float = 1e-13


DEFAULTS = NumericsConfig()


@dataclass(frozen=True)
class EigenTriple:
    lam: complex
    x: np.ndarray
    y: np.ndarray
    finite: bool = True


def _max_abs(A):
    if sps.issparse(A):
        return abs(A).max() if A.nnz else 0.0
    return np.abs(A).max() if A.size else 0.0


class Factorization:
    """LU factorization of a square matrix supporting plain and adjoint solves.

    Dense input goes through LAPACK ``getrf``, sparse input through SuperLU.
    """

    def __init__(self, A, config=DEFAULTS, point=None):
        self.point = point
        scale = _max_abs(A)
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {A.shape}")
        self.n = A.shape[0]
        self.sparse = sps.issparse(A)
        if self.sparse:
            try:
                self._lu = spsla.splu(sps.csc_matrix(A, dtype=complex))
            except RuntimeError as exc:
                raise SingularK(f"singular matrix at s={point}: {exc}", point) from exc
            pivots = self._lu.U.diagonal()
        else:
            A = np.asarray(A, dtype=complex)
            with warnings.catch_warnings():
                # singularity is reported below through the pivot test
                warnings.simplefilter("ignore", spla.LinAlgWarning)
                self._lu = spla.lu_factor(A, check_finite=True)
            pivots = np.diag(self._lu[0])
        if scale == 0 or np.min(np.abs(pivots)) < config.pivot_tol * scale:
            raise SingularK(f"numerically singular matrix at s={point}", point)

    def solve(self, rhs, adjoint=False):
        rhs = np.asarray(rhs, dtype=complex)
        if self.sparse:
            return self._lu.solve(rhs, trans="H" if adjoint else "N")
        return spla.lu_solve(self._lu, rhs, trans=2 if adjoint else 0)


def solve_linear(A, rhs, adjoint=False, config=DEFAULTS):
    """Solve ``A X = rhs`` (or ``A^H X = rhs``) by pivoted LU."""
    rhs = np.asarray(rhs)
    if rhs.shape[0] != A.shape[0]:
        raise ValueError(f"rhs has {rhs.shape[0]} rows, matrix has {A.shape[0]}")
    return Factorization(A, config).solve(rhs, adjoint=adjoint)


def orthonormal_basis(M, drop_tol=DEFAULTS.orth_drop_tol):
    """Orthonormal basis of ``span(M)`` by Gram-Schmidt with reorthogonalization.

    Columns are processed left to right, so the output order follows the
    input order. Each column is scaled to unit norm first; a column is
    dropped when less than ``drop_tol`` of it survives orthogonalization
    against the previously accepted ones.
    """
    M = np.asarray(M)
    if M.ndim == 1:
        M = M[:, None]
    k = M.shape[0]
    dtype = complex if np.iscomplexobj(M) else float
    cols = []
    for j in range(M.shape[1]):
        v = np.array(M[:, j], dtype=dtype)
        nrm = np.linalg.norm(v)
        if nrm == 0 or not np.isfinite(nrm):
            continue
        v = v / nrm
        if cols:
            Q = np.column_stack(cols)
            for _ in range(2):
                v = v - Q @ (Q.conj().T @ v)
        rem = np.linalg.norm(v)
        if rem < drop_tol:
            continue
        cols.append(v / rem)
    if not cols:
        return np.zeros((k, 0), dtype=dtype)
    return np.column_stack(cols)


def truncated_svd(M, rel_tol=DEFAULTS.svd_rel_tol, max_rank=None):
    """Thin SVD keeping singular values ``>= rel_tol * sigma_max``."""
    U, s, Vh = np.linalg.svd(np.asarray(M), full_matrices=False)
    if s.size == 0 or s[0] == 0:
        rank = 0
    else:
        rank = int(np.count_nonzero(s >= rel_tol * s[0]))
    if max_rank is not None:
        rank = min(rank, int(max_rank))
    return U[:, :rank], s[:rank], Vh[:rank].conj().T


def _check_regular(A, E, config):
    k = A.shape[0]
    nA = np.linalg.norm(A, 2)
    nE = np.linalg.norm(E, 2)
    scale = nA / nE if nE > 0 else 1.0
    if scale == 0:
        scale = 1.0
    # fixed probes keep the check deterministic
    for theta in (0.3, 1.9, 4.1):
        lam = scale * np.exp(1j * theta) * 1.37
        smin = np.linalg.svd(A - lam * E, compute_uv=False)[-1]
        if smin > config.pencil_probe_tol * k * (nA + abs(lam) * nE):
            return
    raise SingularPencil("matrix pencil appears singular (det(A - lam E) ~ 0 at all probes)")


def generalized_eig(A, E, config=DEFAULTS, check_regular=True):
    """All eigentriples of the pencil ``A - lam E`` (QZ algorithm).

    Right vectors satisfy ``A x = lam E x``, left vectors
    ``y^H A = lam y^H E``; both are scaled to unit 2-norm.
    """
    A = np.asarray(A)
    E = np.asarray(E)
    if A.shape != E.shape or A.shape[0] != A.shape[1]:
        raise ValueError("pencil matrices must be square and of equal shape")
    if A.shape[0] == 0:
        return []
    if check_regular:
        _check_regular(A, E, config)
    w, vl, vr = spla.eig(A, E, left=True, right=True, homogeneous_eigvals=True)
    alpha, beta = w
    nA = np.linalg.norm(A, 2)
    nE = np.linalg.norm(E, 2)
    bound = config.infinite_eig_ratio * (nA / nE if nE > 0 else np.inf)
    triples = []
    for j in range(A.shape[0]):
        if beta[j] == 0:
            lam, finite = complex(np.inf), False
        else:
            lam = complex(alpha[j] / beta[j])
            finite = bool(np.isfinite(lam) and abs(lam) <= bound)
        x = vr[:, j] / np.linalg.norm(vr[:, j])
        y = vl[:, j] / np.linalg.norm(vl[:, j])
        triples.append(EigenTriple(lam, x, y, finite))
    return triples
