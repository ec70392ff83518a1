"""IRKA-type fixed-point iterations on interpolation data.

``tf_irka`` iterates Hermite Loewner realizations of a black-box transfer
function; ``sptf_irka`` wraps it in an outer projection loop so the final
model keeps the structure of the full-order system.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import NoFiniteEigenvalues, StrMORError
from .interpolation import InterpolationData, build_tangential_bases, project, realify_bases
from .loewner import build_hermite_loewner, realify_loewner, sample

PAIR_TOL = 1e-6
REAL_TOL = 1e-10


@dataclass(frozen=True)
class IterationOptions:
    max_iter: int = 100
    conv_tol: float = 1e-3
    realify: bool = False
    strict_rhp: bool = False

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.conv_tol > 0:
            raise ValueError("conv_tol must be positive")


@dataclass(frozen=True)
class IterationRecord:
    points: tuple
    metric: float
    order: int


@dataclass
class ReductionReport:
    """Per-iteration history plus the cost counters of a reduction run.

    ``model_data`` holds the interpolation data the returned model was built
    from; ``final_data`` the update computed from it in the last iteration.
    """

    iterations: list = field(default_factory=list)
    converged: bool = False
    n_large_solves: int = 0
    wall_time: float = 0.0
    seed: int = None
    warnings: list = field(default_factory=list)
    final_data: InterpolationData = None
    model_data: InterpolationData = None

    @property
    def n_iter(self):
        return len(self.iterations)

    @property
    def metrics(self):
        return [rec.metric for rec in self.iterations]

    def to_dict(self, include_timing=True):
        def pts(data):
            if data is None:
                return None
            return [[float(z.real), float(z.imag)] for z in data.points]

        out = {
            "converged": self.converged,
            "n_iter": self.n_iter,
            "n_large_solves": self.n_large_solves,
            "seed": self.seed,
            "warnings": list(self.warnings),
            "iterations": [
                {"metric": rec.metric if np.isfinite(rec.metric) else None,
                 "order": rec.order,
                 "points": [[float(z.real), float(z.imag)] for z in rec.points]}
                for rec in self.iterations
            ],
            "final_points": pts(self.final_data),
            "model_points": pts(self.model_data),
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


def _sorted_points(points):
    pts = np.asarray(points, dtype=complex).ravel()
    return pts[np.lexsort((pts.imag, pts.real))]


def convergence_metric(old, new):
    """Relative change between two point sets, invariant to their order.

    Both sets are sorted by (Re, Im); different sizes give ``inf``.
    """
    old = old.points if isinstance(old, InterpolationData) else old
    new = new.points if isinstance(new, InterpolationData) else new
    a, b = _sorted_points(old), _sorted_points(new)
    if a.size != b.size:
        return float("inf")
    denom = np.linalg.norm(a)
    diff = np.linalg.norm(b - a)
    if denom == 0:
        return 0.0 if diff == 0 else float("inf")
    return float(diff / denom)


def _unit(v):
    v = np.asarray(v, dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0 or not np.isfinite(nrm):
        out = np.zeros_like(v)
        out[0] = 1
        return out
    v = v / nrm
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


def points_from_triples(triples, B, C, real_closure=True, strict_rhp=False):
    """Mirror images ``-lam`` with directions ``B^H y`` and ``C x``.

    Eigentriples whose eigenvalues are conjugate to within ``PAIR_TOL`` are
    merged into an exact pair ``(z, conj z)`` where ``z`` averages the two
    representatives; directions of the partner are the conjugates of the
    representative's. With ``real_closure``, near-real points are snapped
    to the real axis with real directions. Output order is deterministic:
    blocks sorted by ``(|Im|, Re)``, positive imaginary part first.
    """
    sig = [-t.lam for t in triples]
    bs = [_unit(B.conj().T @ t.y) for t in triples]
    cs = [_unit(C @ t.x) for t in triples]
    used = [False] * len(sig)
    blocks = []
    order = sorted(range(len(sig)), key=lambda i: (-np.sign(sig[i].imag), abs(sig[i].imag), sig[i].real))
    for i in order:
        if used[i]:
            continue
        s = sig[i]
        scale = max(1.0, abs(s))
        if abs(s.imag) <= REAL_TOL * scale:
            used[i] = True
            if real_closure:
                blocks.append([(complex(s.real), bs[i].real.astype(complex),
                                cs[i].real.astype(complex))])
            else:
                blocks.append([(s, bs[i], cs[i])])
            continue
        cands = [j for j in range(len(sig)) if not used[j] and j != i
                 and abs(sig[j] - np.conj(s)) <= PAIR_TOL * scale]
        used[i] = True
        if not cands:
            blocks.append([(s, bs[i], cs[i])])
            continue
        j = min(cands, key=lambda j: abs(sig[j] - np.conj(s)))
        used[j] = True
        rep, other = (i, j) if s.imag > 0 else (j, i)
        z = (sig[rep] + np.conj(sig[other])) / 2
        blocks.append([(z, bs[rep], cs[rep]), (np.conj(z), bs[rep].conj(), cs[rep].conj())])
    blocks.sort(key=lambda blk: (abs(blk[0][0].imag), blk[0][0].real))
    entries = [e for blk in blocks for e in blk]
    points = np.array([e[0] for e in entries])
    if strict_rhp:
        points = np.where(points.real < 0, -points.conj(), points)
    return InterpolationData(points, np.array([e[1] for e in entries]),
                             np.array([e[2] for e in entries]))


def finite_triples(rom):
    triples = [t for t in rom.eig() if t.finite]
    if not triples:
        raise NoFiniteEigenvalues("reduced pencil has no finite eigenvalues")
    return triples


def update_points_from_rom(rom, real_closure=True, strict_rhp=False):
    """Next interpolation data from the eigentriples of ``rom``."""
    return points_from_triples(finite_triples(rom), rom.B, rom.C, real_closure, strict_rhp)


def _annotate(exc, it):
    try:
        new = type(exc)(f"iteration {it}: {exc}")
    except TypeError:
        return exc
    new.__cause__ = exc
    return new


def tf_irka(tf, init, opts=IterationOptions()):
    """TF-IRKA on anything exposing ``transfer_and_derivative``.

    Returns ``(rom, report)``; ``rom`` is the Hermite Loewner realization of
    the last iteration (realified when ``opts.realify``).
    """
    t0 = time.perf_counter()
    report = ReductionReport()
    data = init
    rom = None
    for it in range(opts.max_iter):
        try:
            samples = sample(tf, data.points, derivative=True)
            rom = build_hermite_loewner(samples, data)
            if opts.realify:
                rom = realify_loewner(rom)
            new = update_points_from_rom(rom, real_closure=opts.realify, strict_rhp=opts.strict_rhp)
        except StrMORError as exc:
            raise _annotate(exc, it) from exc
        report.n_large_solves += 2 * len(data)
        if len(new) < len(data):
            report.warnings.append(
                f"iteration {it}: only {len(new)} finite eigenvalues for {len(data)} points")
        metric = convergence_metric(data, new)
        report.iterations.append(IterationRecord(tuple(data.points), metric, rom.order))
        report.model_data, report.final_data = data, new
        data = new
        if metric < opts.conv_tol:
            report.converged = True
            break
    report.wall_time = time.perf_counter() - t0
    return rom, report


def sptf_irka(sys, init, opts=IterationOptions(max_iter=50), inner_opts=None):
    """Structure-preserving TF-IRKA.

    Each outer step projects the full system onto tangential bases of the
    current data, runs TF-IRKA on the (small) projected transfer function,
    warm-started from the current data, and mirrors the resulting poles.
    Only the ``2 r`` basis solves per outer step touch order ``n``.
    """
    if inner_opts is None:
        inner_opts = IterationOptions(max_iter=100, conv_tol=opts.conv_tol,
                                      realify=opts.realify, strict_rhp=opts.strict_rhp)
    t0 = time.perf_counter()
    report = ReductionReport()
    data = init
    reduced = None
    for it in range(opts.max_iter):
        try:
            bases = build_tangential_bases(sys, data)
            if opts.realify:
                bases = realify_bases(bases, data)
            reduced = project(sys, bases)
            report.n_large_solves += bases.n_solves
            rom, inner = tf_irka(reduced, data, inner_opts)
            new = update_points_from_rom(rom, real_closure=opts.realify, strict_rhp=opts.strict_rhp)
        except StrMORError as exc:
            raise _annotate(exc, it) from exc
        if not inner.converged:
            report.warnings.append(f"iteration {it}: inner TF-IRKA did not converge")
        metric = convergence_metric(data, new)
        report.iterations.append(IterationRecord(tuple(data.points), metric, bases.order))
        report.model_data, report.final_data = data, new
        data = new
        if metric < opts.conv_tol:
            report.converged = True
            break
    report.wall_time = time.perf_counter() - t0
    return reduced, report
