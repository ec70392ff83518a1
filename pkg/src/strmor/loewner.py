"""Loewner-framework realizations from transfer-function samples.

Two constructions are provided:

* the tangential Loewner pencil on disjoint right/left point sets
  (:func:`build_loewner`), with rank truncation and realification, and
* the Hermite variant on a single point set (:func:`build_hermite_loewner`),
  which needs derivative samples and is what TF-IRKA iterates on.

Both produce a first-order realization ``H_L(s) = C (sE - A)^{-1} B``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as spla

from . import instrument
from .errors import (CoincidentPoints, DuplicatePoint, MissingDerivative,
                     NotConjugationClosed, OddSampleCount, SingularK)
from .numerics import DEFAULTS, generalized_eig, truncated_svd

_PAIR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TransferSample:
    point: complex
    value: np.ndarray
    derivative: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))
        value = np.atleast_2d(np.asarray(self.value, dtype=complex))
        if not np.all(np.isfinite(value)):
            raise ValueError(f"non-finite transfer value at s={self.point}")
        object.__setattr__(self, "value", value)
        if self.derivative is not None:
            object.__setattr__(self, "derivative",
                               np.atleast_2d(np.asarray(self.derivative, dtype=complex)))


def sample(tf, points, derivative=False):
    """Evaluate ``tf`` at ``points`` into a list of :class:`TransferSample`."""
    out = []
    for s in points:
        if derivative:
            H, dH = tf.transfer_and_derivative(s)
            out.append(TransferSample(s, H, dH))
        else:
            out.append(TransferSample(s, tf.eval_transfer(s)))
    return out


@dataclass(frozen=True, eq=False)
class LoewnerRealization:
    """First-order quadruple ``(E, A, B, C)``.

    ``left_points`` / ``right_points`` record the row / column sample points
    while the matrices are still in raw Loewner form (needed for
    realification); they are dropped by any projection.
    """

    E: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    left_points: np.ndarray = None
    right_points: np.ndarray = None
    singular_values: np.ndarray = None
    is_real: bool = field(init=False)

    def __post_init__(self):
        k = self.E.shape[0]
        if self.E.shape != (k, k) or self.A.shape != (k, k):
            raise ValueError(f"E and A must be square of equal size, got {self.E.shape}, {self.A.shape}")
        if self.B.shape[0] != k or self.C.shape[1] != k:
            raise ValueError("B/C do not match the order of the pencil")
        real = all(not np.iscomplexobj(X) for X in (self.E, self.A, self.B, self.C))
        object.__setattr__(self, "is_real", real)

    @property
    def order(self):
        return self.E.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    def _lu(self, s):
        M = complex(s) * self.E - self.A
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", spla.LinAlgWarning)
            lu = spla.lu_factor(M)
        scale = np.abs(M).max()
        if scale == 0 or np.min(np.abs(np.diag(lu[0]))) < DEFAULTS.pivot_tol * scale:
            raise SingularK(f"sE - A singular at s={s}", complex(s))
        return lu

    def eval_transfer(self, s):
        instrument.record("transfer")
        return self.C @ spla.lu_solve(self._lu(s), self.B.astype(complex))

    def transfer_and_derivative(self, s):
        instrument.record("transfer")
        instrument.record("derivative")
        lu = self._lu(s)
        X = spla.lu_solve(lu, self.B.astype(complex))
        H = self.C @ X
        dH = -self.C @ spla.lu_solve(lu, self.E @ X)
        return H, dH

    def eval_transfer_derivative(self, s):
        return self.transfer_and_derivative(s)[1]

    def __call__(self, s):
        return self.eval_transfer(s)

    def eig(self):
        return generalized_eig(self.A, self.E)


@dataclass(frozen=True, eq=False)
class TangentialDataset:
    """Right data ``(kappa_i, r_i, w_i = H(kappa_i) r_i)`` and left data
    ``(mu_j, l_j, v_j^H = l_j^H H(mu_j))``.

    Shapes: ``right_dirs`` (q, m), ``right_values`` (p, q) with columns
    ``w_i``; ``left_dirs`` (q, p), ``left_values`` (q, m) with rows ``v_j^H``.
    """

    right_points: np.ndarray
    right_dirs: np.ndarray
    right_values: np.ndarray
    left_points: np.ndarray
    left_dirs: np.ndarray
    left_values: np.ndarray

    def __post_init__(self):
        kappa = np.asarray(self.right_points, dtype=complex)
        mu = np.asarray(self.left_points, dtype=complex)
        if kappa.size != mu.size:
            raise OddSampleCount(f"right and left sets differ in size ({kappa.size} vs {mu.size})")
        for pts, name in ((kappa, "right"), (mu, "left")):
            if len(set(np.round(pts, 14).tolist())) != pts.size:
                raise DuplicatePoint(f"duplicate point in {name} set")

    @property
    def q(self):
        return len(self.right_points)


def _sort_key(s):
    # |Im s| first, then positive imaginary part before negative, then Re s
    return (abs(s.imag), -np.sign(s.imag), s.real)


def _is_pair(a, b):
    return abs(a.imag) > _PAIR_TOL * max(1.0, abs(a)) and abs(a - np.conj(b)) <= _PAIR_TOL * max(1.0, abs(a))


def _random_direction(rng, k, complex_):
    d = rng.standard_normal(k)
    if complex_:
        d = d + 1j * rng.standard_normal(k)
    return d / np.linalg.norm(d)


def partition_samples(samples, right_dirs=None, left_dirs=None, rng=None):
    """Split ``2q`` samples into right/left tangential data.

    Samples are ordered by ``(|Im s|, sign(Im s) descending, Re s)`` and
    blocks (a conjugate pair, or a single real point) go alternately to the
    right and the left set, so each set stays closed under conjugation.
    Missing directions are drawn as unit vectors from ``rng`` (conjugate
    partners receive conjugate directions, real points real ones).
    """
    samples = list(samples)
    if len(samples) < 2 or len(samples) % 2:
        raise OddSampleCount(f"need an even number >= 2 of samples, got {len(samples)}")
    pts = [s.point for s in samples]
    if len(set(np.round(pts, 14).tolist())) != len(pts):
        raise DuplicatePoint("sample points must be distinct")
    order = sorted(range(len(samples)), key=lambda i: _sort_key(pts[i]))
    blocks, k = [], 0
    while k < len(order):
        i = order[k]
        if k + 1 < len(order) and _is_pair(pts[i], pts[order[k + 1]]):
            blocks.append([i, order[k + 1]])
            k += 2
        else:
            blocks.append([i])
            k += 1
    right, left = [], []
    for b, block in enumerate(blocks):
        (right if b % 2 == 0 else left).extend(block)
    if len(right) != len(left):
        raise OddSampleCount(
            "samples cannot be split into two conjugation-closed halves of equal size")

    p, m = samples[0].value.shape
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)

    def directions(idx, given, k):
        if given is not None:
            given = np.asarray(given, dtype=complex)
            return given.reshape(len(idx), k)
        out = np.empty((len(idx), k), dtype=complex)
        t = 0
        while t < len(idx):
            s = pts[idx[t]]
            if t + 1 < len(idx) and _is_pair(s, pts[idx[t + 1]]):
                d = _random_direction(rng, k, True)
                out[t], out[t + 1] = d, d.conj()
                t += 2
            else:
                out[t] = _random_direction(rng, k, abs(s.imag) > _PAIR_TOL * max(1.0, abs(s)))
                t += 1
        return out

    R = directions(right, right_dirs, m)
    L = directions(left, left_dirs, p)
    W = np.column_stack([samples[i].value @ R[t] for t, i in enumerate(right)])
    V = np.vstack([L[t].conj() @ samples[i].value for t, i in enumerate(left)])
    return TangentialDataset(np.array([pts[i] for i in right]), R, W,
                             np.array([pts[i] for i in left]), L, V)


def build_loewner(data):
    """Loewner realization ``(-LL, -LLs, V, W)`` of tangential data."""
    kappa = np.asarray(data.right_points, dtype=complex)
    mu = np.asarray(data.left_points, dtype=complex)
    denom = mu[:, None] - kappa[None, :]
    if np.any(np.abs(denom) <= 1e-14 * max(1.0, np.abs(denom).max())):
        raise CoincidentPoints("right and left sample points must be disjoint")
    VR = data.left_values @ data.right_dirs.T       # v_j^H r_i
    LW = data.left_dirs.conj() @ data.right_values  # l_j^H w_i
    LL = (VR - LW) / denom
    LLs = (mu[:, None] * VR - kappa[None, :] * LW) / denom
    return LoewnerRealization(-LL, -LLs, np.array(data.left_values), np.array(data.right_values),
                              left_points=mu, right_points=kappa)


def _pairing(points):
    points = np.asarray(points, dtype=complex)
    partners = [None] * points.size
    for i, s in enumerate(points):
        if abs(s.imag) <= _PAIR_TOL * max(1.0, abs(s)) or partners[i] is not None:
            continue
        cands = [j for j in range(points.size)
                 if j != i and partners[j] is None and _is_pair(s, points[j])]
        if not cands:
            raise NotConjugationClosed(f"sample point {s} has no conjugate partner")
        j = cands[0]
        partners[i], partners[j] = j, i
    return partners


def _realification_transform(partners):
    q = len(partners)
    J = np.eye(q, dtype=complex)
    h = 1 / np.sqrt(2)
    for i, j in enumerate(partners):
        if j is None or j < i:
            continue
        J[i, i], J[i, j] = h, -1j * h
        J[j, i], J[j, j] = h, 1j * h
    return J


def realify_loewner(real, left_pairing=None, right_pairing=None, tol=1e-8):
    """Unitary change of basis making a conjugation-closed Loewner model real.

    Pairings default to matching conjugate sample points recorded on
    ``real``. Imaginary residues (relative to each matrix) must be below
    ``tol``; they are then set to exactly zero.
    """
    if real.is_real:
        return real
    if left_pairing is None or right_pairing is None:
        if real.left_points is None or real.right_points is None:
            raise NotConjugationClosed("realization carries no sample points to pair")
        if left_pairing is None:
            left_pairing = _pairing(real.left_points)
        if right_pairing is None:
            right_pairing = _pairing(real.right_points)
    Jl = _realification_transform(left_pairing)
    Jr = _realification_transform(right_pairing)
    mats = (Jl.conj().T @ real.E @ Jr, Jl.conj().T @ real.A @ Jr,
            Jl.conj().T @ real.B, real.C @ Jr)
    out = []
    for X in mats:
        scale = max(1.0, np.abs(X).max())
        if np.abs(X.imag).max() > tol * scale:
            raise NotConjugationClosed(
                f"transformed matrices keep imaginary parts of size {np.abs(X.imag).max():.2e}")
        out.append(np.ascontiguousarray(X.real))
    return LoewnerRealization(*out, singular_values=real.singular_values)


def truncate_loewner(real, rel_tol=DEFAULTS.svd_rel_tol, max_order=None):
    """Project onto the dominant row/column spaces of the Loewner pencil."""
    LL, LLs = -real.E, -real.A
    Y, s_row, _ = truncated_svd(np.hstack([LL, LLs]), rel_tol)
    _, s_col, X = truncated_svd(np.vstack([LL, LLs]), rel_tol)
    r = min(Y.shape[1], X.shape[1])
    if max_order is not None:
        r = min(r, int(max_order))
    Y, X = Y[:, :r], X[:, :r]
    YH = Y.conj().T
    _, s_all, _ = np.linalg.svd(np.hstack([LL, LLs]), full_matrices=False)
    return LoewnerRealization(YH @ real.E @ X, YH @ real.A @ X, YH @ real.B, real.C @ X,
                              singular_values=s_all)


def build_hermite_loewner(samples, data):
    """Hermite Loewner realization on one point set (needs ``H'`` samples).

    The realization matches ``H(s_i) b_i``, ``c_i^H H(s_i)`` and
    ``c_i^H H'(s_i) b_i`` at every point.
    """
    samples = list(samples)
    sig = np.asarray(data.points, dtype=complex)
    r = sig.size
    if len(samples) != r:
        raise ValueError(f"{len(samples)} samples for {r} interpolation points")
    if any(s.derivative is None for s in samples):
        raise MissingDerivative("every sample needs a derivative value")
    diff = sig[:, None] - sig[None, :]
    off = ~np.eye(r, dtype=bool)
    if np.any(np.abs(diff[off]) <= 1e-14 * max(1.0, np.abs(sig).max())):
        raise CoincidentPoints("interpolation points must be pairwise distinct")
    b = data.right_dirs
    c = data.left_dirs
    Hb = np.column_stack([S.value @ b[i] for i, S in enumerate(samples)])        # p x r
    cH = np.vstack([c[i].conj() @ S.value for i, S in enumerate(samples)])      # r x m
    cdHb = np.array([c[i].conj() @ S.derivative @ b[i] for i, S in enumerate(samples)])
    cHi_bj = cH @ b.T               # [i, j] = c_i^H H(s_i) b_j
    ci_Hbj = c.conj() @ Hb          # [i, j] = c_i^H H(s_j) b_j
    with np.errstate(divide="ignore", invalid="ignore"):
        E = -(cHi_bj - ci_Hbj) / diff
        A = -(sig[:, None] * cHi_bj - sig[None, :] * ci_Hbj) / diff
    idx = np.arange(r)
    E[idx, idx] = -cdHb
    A[idx, idx] = -(np.diag(ci_Hbj) + sig * cdHb)
    return LoewnerRealization(E, A, cH, Hb, left_points=sig, right_points=sig)


@dataclass(frozen=True)
class IdentifyOptions:
    rel_tol: float = DEFAULTS.svd_rel_tol
    max_order: int = None
    realify: bool = False


def identify(samples, options=IdentifyOptions(), rng=None):
    """Sample-to-realization backend (tangential Loewner + truncation)."""
    data = partition_samples(samples, rng=rng)
    real = build_loewner(data)
    if options.realify:
        real = realify_loewner(real)
    return truncate_loewner(real, options.rel_tol, options.max_order)
