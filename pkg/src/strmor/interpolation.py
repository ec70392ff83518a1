"""Structure-preserving tangential interpolation by two-sided projection.

With ``V`` spanning ``K(sigma_j)^{-1} B(sigma_j) b_j`` and ``W`` spanning
``K(sigma_j)^{-H} C(sigma_j)^H c_j``, the projected system
``(W^H K(s) V, W^H B(s), C(s) V)`` matches ``H(sigma_j) b_j``,
``c_j^H H(sigma_j)`` and ``c_j^H H'(sigma_j) b_j``.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from .errors import DimensionMismatch, NotConjugationClosed, SingularK
from .numerics import DEFAULTS, orthonormal_basis
from .system import StructuredSystem

CONJ_TOL = 1e-8


def _close(a, b, tol):
    return np.linalg.norm(np.ravel(a) - np.ravel(b)) <= tol * max(1.0, np.linalg.norm(np.ravel(a)))


@dataclass(frozen=True, eq=False)
class InterpolationData:
    """Interpolation points with right (``m``) and left (``p``) directions."""

    points: np.ndarray
    right_dirs: np.ndarray
    left_dirs: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex).ravel()
        b = np.asarray(self.right_dirs, dtype=complex)
        c = np.asarray(self.left_dirs, dtype=complex)
        if b.ndim == 1:
            b = b[:, None]
        if c.ndim == 1:
            c = c[:, None]
        if pts.size < 1:
            raise ValueError("at least one interpolation point is required")
        if b.shape[0] != pts.size or c.shape[0] != pts.size:
            raise DimensionMismatch(
                f"{pts.size} points but {b.shape[0]} right and {c.shape[0]} left directions")
        if np.any(np.linalg.norm(b, axis=1) == 0) or np.any(np.linalg.norm(c, axis=1) == 0):
            raise ValueError("tangential directions must be nonzero")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "right_dirs", b)
        object.__setattr__(self, "left_dirs", c)

    def __len__(self):
        return self.points.size

    @classmethod
    def siso(cls, points):
        points = np.asarray(points, dtype=complex).ravel()
        ones = np.ones((points.size, 1))
        return cls(points, ones, ones)

    def conjugate_partners(self, tol=CONJ_TOL):
        """Partner index for each non-real point (``None`` for real points).

        Raises :class:`NotConjugationClosed` when a non-real point has no
        partner carrying the conjugate point and directions.
        """
        partners = [None] * len(self)
        for i, s in enumerate(self.points):
            if abs(s.imag) <= tol * max(1.0, abs(s)) or partners[i] is not None:
                continue
            for j in range(len(self)):
                if j == i or partners[j] is not None:
                    continue
                if (_close(self.points[j], np.conj(s), tol)
                        and _close(self.right_dirs[j], self.right_dirs[i].conj(), tol)
                        and _close(self.left_dirs[j], self.left_dirs[i].conj(), tol)):
                    partners[i], partners[j] = j, i
                    break
            else:
                raise NotConjugationClosed(f"point {s} has no conjugate partner")
        return partners

    def closed_under_conjugation(self, tol=CONJ_TOL):
        try:
            self.conjugate_partners(tol)
        except NotConjugationClosed:
            return False
        return True


@dataclass(frozen=True, eq=False)
class ProjectionBases:
    V: np.ndarray
    W: np.ndarray
    real_valued: bool = False
    n_solves: int = 0
    raw: tuple = None

    @property
    def order(self):
        return self.V.shape[1]


def _equalize(V, W):
    r = min(V.shape[1], W.shape[1])
    return V[:, :r], W[:, :r]


def build_tangential_bases(sys, data, drop_tol=DEFAULTS.orth_drop_tol):
    """Orthonormal tangential bases; one LU and two solves per point."""
    if data.right_dirs.shape[1] != sys.m or data.left_dirs.shape[1] != sys.p:
        raise DimensionMismatch("direction dimensions do not match the system's inputs/outputs")
    vs, ws = [], []
    for j, (s, b, c) in enumerate(zip(data.points, data.right_dirs, data.left_dirs)):
        try:
            F = sys.factor(s)
        except SingularK as exc:
            raise SingularK(f"K(sigma) singular at interpolation point {j} (sigma={s})", s) from exc
        vs.append(F.solve(sys.eval_B(s) @ b))
        ws.append(F.solve(sys.eval_C(s).conj().T @ c, adjoint=True))
    Vraw, Wraw = np.column_stack(vs), np.column_stack(ws)
    V, W = _equalize(orthonormal_basis(Vraw, drop_tol), orthonormal_basis(Wraw, drop_tol))
    return ProjectionBases(V, W, real_valued=False, n_solves=2 * len(data), raw=(Vraw, Wraw))


def _real_split(X, partners):
    """``[Re x_i, Im x_i]`` for one member of each conjugate pair, ``Re x_i`` for real points."""
    cols = []
    for i, j in enumerate(partners):
        if j is None:
            cols.append(X[:, i].real)
        elif i < j:
            cols.extend([X[:, i].real, X[:, i].imag])
    return np.column_stack(cols)


def realify_bases(bases, data, drop_tol=DEFAULTS.orth_drop_tol):
    """Real bases spanning the same (conjugation-closed) spaces.

    Built pair by pair from the raw solution vectors, so rounding noise in
    the conjugate solves cannot add spurious real directions.
    """
    partners = data.conjugate_partners()
    if bases.raw is not None:
        Vc, Wc = bases.raw
        V = orthonormal_basis(_real_split(Vc, partners), drop_tol)
        W = orthonormal_basis(_real_split(Wc, partners), drop_tol)
    else:
        V = orthonormal_basis(np.hstack([bases.V.real, bases.V.imag]), drop_tol)
        W = orthonormal_basis(np.hstack([bases.W.real, bases.W.imag]), drop_tol)
    V, W = _equalize(V, W)
    return ProjectionBases(V, W, real_valued=True, n_solves=bases.n_solves)


def _left(W, X):
    WH = W.conj().T
    return np.asarray(WH @ X) if not sps.issparse(X) else np.asarray((X.T @ WH.T).T)


def project(sys, bases):
    """Petrov-Galerkin projection term by term; scalar terms are kept as-is."""
    V, W = bases.V, bases.W
    if V.shape[0] != sys.n or W.shape[0] != sys.n:
        raise DimensionMismatch(f"bases have {V.shape[0]} rows, system has order {sys.n}")

    def clean(X):
        X = np.asarray(X)
        if bases.real_valued and np.iscomplexobj(X) and not np.any(X.imag):
            return X.real
        return X

    K_terms = [(t, clean(_left(W, K @ V))) for t, K in sys.K_terms]
    B_terms = [(t, clean(_left(W, B))) for t, B in sys.B_terms]
    C_terms = [(t, clean(np.asarray(C @ V))) for t, C in sys.C_terms]
    return StructuredSystem(K_terms, B_terms, C_terms)
