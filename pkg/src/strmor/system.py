"""Structured linear systems in frequency-affine form.

    H(s) = C(s) K(s)^{-1} B(s),   K(s) = sum_j g_j(s) K_j

and likewise for B(s) and C(s). The constant matrices may be dense
``ndarray`` or ``scipy.sparse``; a sparse K(s) is factorized with SuperLU.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps

from . import instrument
from .errors import DimensionMismatch
from .numerics import DEFAULTS, Factorization
from .terms import Constant, ExpDelay, FractionalKelvin, Monomial, ScalarTerm, SqrtShift


def _as_matrix(X, name):
    if sps.issparse(X):
        return sps.csr_matrix(X)
    X = np.asarray(X)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        raise DimensionMismatch(f"{name} must be two-dimensional, got shape {X.shape}")
    return X


def _is_real_matrix(X):
    data = X.data if sps.issparse(X) else X
    return not np.iscomplexobj(data) or not np.any(np.imag(data))


def _dense(X):
    return X.toarray() if sps.issparse(X) else np.asarray(X)


def _combine(terms, s, deriv=False):
    mats = [(t.derivative(s) if deriv else t.value(s), M) for t, M in terms]
    if all(sps.issparse(M) for _, M in mats):
        out = None
        for g, M in mats:
            out = g * M if out is None else out + g * M
        return sps.csc_matrix(out, dtype=complex)
    out = np.zeros(mats[0][1].shape, dtype=complex)
    for g, M in mats:
        if g != 0:
            out += g * _dense(M)
    return out


@dataclass(frozen=True, eq=False)
class StructuredSystem:
    """Frequency-affine structured system; immutable after construction.

    Each of ``K_terms``, ``B_terms``, ``C_terms`` is a sequence of
    ``(ScalarTerm, matrix)`` pairs.
    """

    K_terms: tuple
    B_terms: tuple
    C_terms: tuple
    n: int = field(init=False)
    m: int = field(init=False)
    p: int = field(init=False)
    is_real: bool = field(init=False)

    def __post_init__(self):
        K_terms = self._normalize(self.K_terms, "K")
        B_terms = self._normalize(self.B_terms, "B")
        C_terms = self._normalize(self.C_terms, "C")
        n = K_terms[0][1].shape[0]
        for _, K in K_terms:
            if K.shape != (n, n):
                raise DimensionMismatch(f"K term of shape {K.shape}, expected ({n}, {n})")
        m = B_terms[0][1].shape[1]
        for _, B in B_terms:
            if B.shape != (n, m):
                raise DimensionMismatch(f"B term of shape {B.shape}, expected ({n}, {m})")
        p = C_terms[0][1].shape[0]
        for _, C in C_terms:
            if C.shape != (p, n):
                raise DimensionMismatch(f"C term of shape {C.shape}, expected ({p}, {n})")
        all_terms = K_terms + B_terms + C_terms
        is_real = all(t.is_real and _is_real_matrix(M) for t, M in all_terms)
        object.__setattr__(self, "K_terms", K_terms)
        object.__setattr__(self, "B_terms", B_terms)
        object.__setattr__(self, "C_terms", C_terms)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "is_real", is_real)

    @staticmethod
    def _normalize(terms, slot):
        terms = tuple(terms)
        if not terms:
            raise DimensionMismatch(f"at least one {slot} term is required")
        out = []
        for term, M in terms:
            if not isinstance(term, ScalarTerm):
                raise TypeError(f"{slot} term {term!r} is not a ScalarTerm")
            out.append((term, _as_matrix(M, slot)))
        return tuple(out)

    # -- evaluation --------------------------------------------------------

    def eval_K(self, s):
        return _combine(self.K_terms, complex(s))

    def eval_B(self, s):
        return _dense(_combine(self.B_terms, complex(s)))

    def eval_C(self, s):
        return _dense(_combine(self.C_terms, complex(s)))

    def factor(self, s, config=DEFAULTS):
        """LU factorization of K(s)."""
        return Factorization(self.eval_K(s), config, point=complex(s))

    def eval_transfer(self, s):
        instrument.record("transfer")
        F = self.factor(s)
        return self.eval_C(s) @ F.solve(self.eval_B(s))

    def transfer_and_derivative(self, s):
        """``(H(s), H'(s))`` from one factorization and two solves."""
        instrument.record("transfer")
        instrument.record("derivative")
        s = complex(s)
        F = self.factor(s)
        Bs, Cs = self.eval_B(s), self.eval_C(s)
        X = F.solve(Bs)
        Y = F.solve(Cs.conj().T, adjoint=True)
        dK = _combine(self.K_terms, s, deriv=True)
        dB = _dense(_combine(self.B_terms, s, deriv=True))
        dC = _dense(_combine(self.C_terms, s, deriv=True))
        H = Cs @ X
        dH = dC @ X + Y.conj().T @ (dB - _dense(dK @ X))
        return H, dH

    def eval_transfer_derivative(self, s):
        return self.transfer_and_derivative(s)[1]

    def __call__(self, s):
        return self.eval_transfer(s)

    # -- structure ---------------------------------------------------------

    @property
    def term_signature(self):
        """Scalar terms per slot; equal signatures mean equal structure."""
        return tuple(tuple(t for t, _ in terms)
                     for terms in (self.K_terms, self.B_terms, self.C_terms))

    def matrices(self):
        """All constant matrices as ``(slot, term, matrix)`` triples."""
        for slot, terms in (("K", self.K_terms), ("B", self.B_terms), ("C", self.C_terms)):
            for t, M in terms:
                yield slot, t, M

    def __repr__(self):
        kinds = ", ".join(t.kind for t, _ in self.K_terms)
        return f"StructuredSystem(n={self.n}, m={self.m}, p={self.p}, K=[{kinds}])"


eval_K = StructuredSystem.eval_K
eval_transfer = StructuredSystem.eval_transfer
eval_transfer_derivative = StructuredSystem.eval_transfer_derivative


# -- canonical structures ------------------------------------------------------

def _neg(X):
    return -_as_matrix(X, "matrix")


def _nonzero(X):
    X = _as_matrix(X, "matrix")
    return X.nnz > 0 if sps.issparse(X) else bool(np.any(X))


def make_first_order(E, A, B, C):
    """``C (sE - A)^{-1} B``."""
    return StructuredSystem(
        K_terms=[(Monomial(1), E), (Constant(), _neg(A))],
        B_terms=[(Constant(), B)],
        C_terms=[(Constant(), C)],
    )


def make_second_order(M, D, K, B, Cp, Cv=None):
    """``(Cp + s Cv)(s^2 M + s D + K)^{-1} B``; all-zero D or Cv are omitted."""
    K_terms = [(Monomial(2), M)]
    if D is not None and _nonzero(D):
        K_terms.append((Monomial(1), D))
    K_terms.append((Constant(), K))
    C_terms = [(Constant(), Cp)]
    if Cv is not None and _nonzero(Cv):
        C_terms.append((Monomial(1), Cv))
    return StructuredSystem(K_terms, [(Constant(), B)], C_terms)


def make_delay(E, A0, Ad, tau, B, C):
    """``C (sE - A0 - exp(-tau s) Ad)^{-1} B``."""
    return StructuredSystem(
        K_terms=[(Monomial(1), E), (Constant(), _neg(A0)), (ExpDelay(tau), _neg(Ad))],
        B_terms=[(Constant(), B)],
        C_terms=[(Constant(), C)],
    )


def make_viscoelastic(M, K, G, G0, Ginf, tau, alpha, B, C):
    """Sandwich beam with fractional Kelvin-Voigt core."""
    return StructuredSystem(
        K_terms=[(Monomial(2), M), (Constant(), K),
                 (FractionalKelvin(G0, Ginf, tau, alpha), G)],
        B_terms=[(Constant(), B)],
        C_terms=[(Constant(), C)],
    )


def make_gun(M, W1, W2, K, sigma1, sigma2, B, C):
    """``C (s^2 M + i(s^2 - sigma1^2)^{1/2} W1 + i(s^2 - sigma2^2)^{1/2} W2 + K)^{-1} B``."""
    return StructuredSystem(
        K_terms=[(Monomial(2), M), (SqrtShift(sigma1), W1),
                 (SqrtShift(sigma2), W2), (Constant(), K)],
        B_terms=[(Constant(), B)],
        C_terms=[(Constant(), C)],
    )


class TransferFunction:
    """Black-box transfer function from callables.

    ``H`` maps a complex point to a ``p x m`` array; ``dH`` (optional) to its
    derivative. Anything exposing ``eval_transfer`` and
    ``transfer_and_derivative`` can be used wherever this class is.
    """

    def __init__(self, H, dH=None):
        self._H = H
        self._dH = dH

    def eval_transfer(self, s):
        instrument.record("transfer")
        return np.atleast_2d(np.asarray(self._H(complex(s)), dtype=complex))

    def transfer_and_derivative(self, s):
        if self._dH is None:
            raise NotImplementedError("this transfer function has no derivative")
        instrument.record("derivative")
        return self.eval_transfer(s), np.atleast_2d(np.asarray(self._dH(complex(s)), dtype=complex))

    def eval_transfer_derivative(self, s):
        return self.transfer_and_derivative(s)[1]

    def __call__(self, s):
        return self.eval_transfer(s)
