"""Random and hand-made systems shared by the tests."""

import numpy as np

from strmor import make_first_order, make_second_order


def stable_poles(k, rng, lo=0.1, hi=10.0):
    """``k`` stable poles, closed under conjugation (pairs first, one real if k is odd)."""
    poles = []
    for _ in range(k // 2):
        re = -rng.uniform(lo, hi) / 5
        im = rng.uniform(lo, hi)
        poles += [complex(re, im), complex(re, -im)]
    if k % 2:
        poles.append(complex(-rng.uniform(lo, hi)))
    return np.array(poles)


def real_block_diag(poles):
    """Real ``A`` with the given conjugation-closed eigenvalues (2x2 rotation blocks)."""
    k = len(poles)
    A = np.zeros((k, k))
    i = 0
    while i < k:
        p = poles[i]
        if abs(p.imag) > 0:
            A[i:i + 2, i:i + 2] = [[p.real, p.imag], [-p.imag, p.real]]
            i += 2
        else:
            A[i, i] = p.real
            i += 1
    return A


def random_first_order(k, rng, m=1, p=1, poles=None):
    """Random real stable ``(I, A, B, C)`` system hidden behind a similarity."""
    poles = stable_poles(k, rng) if poles is None else np.asarray(poles)
    T = rng.standard_normal((k, k)) + 3 * np.eye(k)
    A = T @ real_block_diag(poles) @ np.linalg.inv(T)
    return make_first_order(np.eye(k), A, rng.standard_normal((k, m)), rng.standard_normal((p, k)))


def random_second_order(n, rng, m=1, p=1, velocity_output=False):
    """Random real mass-spring-damper system with SPD ``M, K`` and proportional damping."""
    X = rng.standard_normal((n, n))
    M = np.eye(n) + 0.1 * (X @ X.T) / n
    Y = rng.standard_normal((n, n))
    K = np.eye(n) + (Y @ Y.T)
    D = 0.01 * M + 0.02 * K
    Cv = rng.standard_normal((p, n)) if velocity_output else None
    return make_second_order(M, D, K, rng.standard_normal((n, m)), rng.standard_normal((p, n)), Cv)


def companion(M, D, K, B, Cp):
    """First-order companion form of ``Cp (s^2 M + s D + K)^{-1} B``."""
    n = M.shape[0]
    E = np.block([[np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), M]])
    A = np.block([[np.zeros((n, n)), np.eye(n)], [-K, -D]])
    Bf = np.vstack([np.zeros_like(B), B])
    Cf = np.hstack([Cp, np.zeros_like(Cp)])
    return make_first_order(E, A, Bf, Cf)


def fd_derivative(f, s, h=None):
    h = 1e-6 * (1 + abs(s)) if h is None else h
    return (f(s + h) - f(s - h)) / (2 * h)


def relerr(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), 1e-300))
