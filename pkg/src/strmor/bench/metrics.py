"""Pointwise and region errors on the imaginary axis."""

from dataclasses import dataclass

import numpy as np

from ..errors import SingularK


@dataclass(frozen=True)
class ErrorSeries:
    """Relative errors over a frequency grid; NaN marks points where K(s) was singular."""

    omegas: np.ndarray
    relerr: np.ndarray
    linf_region: float

    def __post_init__(self):
        if len(self.omegas) != len(self.relerr):
            raise ValueError("omegas and relerr must have equal length")


def _spec(X):
    X = np.atleast_2d(X)
    return float(np.linalg.norm(X, 2))


def _values(tf, omegas):
    """Transfer values at ``i omega``; ``None`` where the evaluation is singular.

    ``tf`` may also be a precomputed sequence of sampled values.
    """
    if not hasattr(tf, "eval_transfer"):
        vals = list(tf)
        if len(vals) != len(omegas):
            raise ValueError("sample table length does not match the grid")
        return [np.atleast_2d(v) for v in vals]
    out = []
    for w in omegas:
        try:
            out.append(np.atleast_2d(tf.eval_transfer(1j * w)))
        except (SingularK, np.linalg.LinAlgError):
            out.append(None)
    return out


def _norms(full, reduced, omegas):
    F, R = _values(full, omegas), _values(reduced, omegas)
    err = np.full(len(omegas), np.nan)
    ref = np.full(len(omegas), np.nan)
    for k, (h, hr) in enumerate(zip(F, R)):
        if h is None or hr is None:
            continue
        err[k] = _spec(h - hr)
        ref[k] = _spec(h)
    return err, ref


def _ratio_of_maxima(err, ref):
    ok = ~np.isnan(err)
    if not np.any(ok):
        return float("nan")
    den = ref[ok].max()
    return float(err[ok].max() / den) if den > 0 else float("nan")


def pointwise_relerr(full, reduced, omegas):
    """``||H - Hr||_2 / ||H||_2`` per grid point (largest singular values)."""
    omegas = np.asarray(omegas, dtype=float)
    err, ref = _norms(full, reduced, omegas)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = err / ref
    return ErrorSeries(omegas, rel, _ratio_of_maxima(err, ref))


def region_grid(region, n_grid):
    """Equidistant grid on each interval, ``n_grid`` points in total (split by length)."""
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    ivs = region.intervals
    lengths = np.array([hi - lo for lo, hi in ivs])
    if len(ivs) == 1:
        counts = [n_grid]
    elif lengths.sum() == 0:
        counts = [2] * len(ivs)
    else:
        counts = [max(2, int(round(n_grid * L / lengths.sum()))) for L in lengths]
    return np.concatenate([np.linspace(lo, hi, c) for (lo, hi), c in zip(ivs, counts)])


def linf_region_error(full, reduced, region, n_grid=1000):
    """``max ||H - Hr||_2 / max ||H||_2`` over an equidistant grid of the region."""
    omegas = region_grid(region, n_grid)
    return _ratio_of_maxima(*_norms(full, reduced, omegas))


def sigma_values(tf, omegas):
    """Largest singular value of ``H(i omega)``; NaN where singular."""
    return np.array([np.nan if h is None else _spec(h) for h in _values(tf, omegas)])
