"""Deterministic synthetic benchmark systems."""

import numpy as np
import scipy.sparse as sps

from ..errors import BadIOSpec, BadSectioning
from ..system import make_delay, make_second_order


def _sections(n, k, what):
    if k < 1 or k > n:
        raise BadSectioning(f"cannot split {n} nodes into {k} {what} sections")
    return np.array_split(np.arange(n), k)


def generate_heated_rod(n=1000, tau=1.0, gain=1.0, m=1, p=1):
    """Finite-difference heated rod on [0, 1], Dirichlet ends, delayed cooling.

    ``B`` heats ``m`` equal contiguous sections uniformly; the rows of ``C``
    average the temperature over ``p`` sections.
    """
    if n < 3:
        raise ValueError("the rod needs n >= 3 nodes")
    ins, outs = _sections(n, m, "input"), _sections(n, p, "output")
    h2 = (n + 1) ** 2
    A0 = h2 * sps.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1], format="csr")
    Ad = -gain * sps.identity(n, format="csr")
    B = np.zeros((n, m))
    for j, idx in enumerate(ins):
        B[idx, j] = 1.0
    C = np.zeros((p, n))
    for i, idx in enumerate(outs):
        C[i, idx] = 1.0 / idx.size
    return make_delay(sps.identity(n, format="csr"), A0, Ad, tau, B, C)


def _io_matrix(spec, k, name):
    """Indicator rows/columns from a list of node indices, or an explicit matrix."""
    if spec is None:
        spec = [k - 1]
    arr = np.asarray(spec)
    if arr.ndim == 1:
        if arr.size == 0 or not np.issubdtype(arr.dtype, np.integer):
            raise BadIOSpec(f"{name}: expected a non-empty list of node indices")
        if arr.min() < 0 or arr.max() >= k:
            raise BadIOSpec(f"{name}: node index out of range 0..{k - 1}")
        out = np.zeros((k, arr.size))
        out[arr, np.arange(arr.size)] = 1.0
        return out
    if arr.ndim == 2 and arr.shape[0] == k:
        return arr.astype(float)
    raise BadIOSpec(f"{name}: shape {arr.shape} does not fit {k} masses")


def generate_msd_chain(k_masses, mass=1.0, stiffness=1.0, damping_ratio=0.0, io_spec=None):
    """Chain of equal masses and springs, fixed to the wall at both ends.

    Damping is stiffness-proportional, ``D = beta K`` with ``beta`` chosen so
    the first mode has the given damping ratio. ``io_spec`` is a dict with
    optional ``inputs`` and ``outputs``: lists of node indices (default: the
    last mass) or explicit ``k x m`` / ``k x p`` arrays.
    """
    if k_masses < 1:
        raise ValueError("k_masses must be >= 1")
    io_spec = {} if io_spec is None else dict(io_spec)
    unknown = set(io_spec) - {"inputs", "outputs"}
    if unknown:
        raise BadIOSpec(f"unknown io_spec keys {sorted(unknown)}")
    k = k_masses
    M = mass * np.eye(k)
    K = stiffness * (2 * np.eye(k) - np.eye(k, k=1) - np.eye(k, k=-1))
    if damping_ratio == 0:
        D = np.zeros((k, k))
    else:
        w1 = np.sqrt(np.linalg.eigvalsh(K / mass)[0])
        D = (2 * damping_ratio / w1) * K
    B = _io_matrix(io_spec.get("inputs"), k, "inputs")
    Cp = _io_matrix(io_spec.get("outputs"), k, "outputs").T
    return make_second_order(M, D, K, B, Cp)


def generate_modal_second_order(omegas=(10.0, 100.0, 1000.0), damping=1e-3):
    """Diagonal SISO oscillator bank ``M = I, D = damping diag(w), K = diag(w^2)``."""
    w = np.asarray(omegas, dtype=float)
    if w.ndim != 1 or w.size < 1 or np.any(w <= 0):
        raise ValueError("omegas must be a non-empty list of positive frequencies")
    n = w.size
    return make_second_order(np.eye(n), damping * np.diag(w), np.diag(w ** 2),
                             np.ones((n, 1)), np.ones((1, n)))


GENERATORS = {
    "heated_rod": generate_heated_rod,
    "msd_chain": generate_msd_chain,
    "modal": generate_modal_second_order,
}
