"""Adaptive, frequency-region-targeted structure-preserving iteration.

Each step projects the full system onto tangential bases of the current
interpolation data, samples the projected transfer function (values only,
never derivatives), identifies a first-order Loewner surrogate from the
samples and takes the mirror images of the surrogate poles whose imaginary
parts fall in the frequency region as the next points. The reduced order is
the number of such poles, capped at ``r_max`` by pole dominance.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySelection, ImaginaryAxisPole, StrMORError
from .interpolation import build_tangential_bases, project, realify_bases
from .irka import (IterationOptions, IterationRecord, ReductionReport, _annotate,
                   convergence_metric, points_from_triples)
from .loewner import build_loewner, partition_samples, realify_loewner, sample, truncate_loewner
from .numerics import DEFAULTS

__all__ = ["FrequencyRegion", "StraikaOptions", "select_in_region", "pole_dominance",
           "straika", "convergence_metric", "default_sampling_points"]

_PAIR_TOL = 1e-8


class FrequencyRegion:
    """Union of closed frequency intervals ``[w1, w2]`` (rad/s), merged."""

    def __init__(self, intervals):
        ivs = []
        for lo, hi in intervals:
            lo, hi = float(lo), float(hi)
            if lo < 0 or hi < lo:
                raise ValueError(f"invalid frequency interval [{lo}, {hi}]")
            ivs.append((lo, hi))
        if not ivs:
            raise ValueError("a frequency region needs at least one interval")
        ivs.sort()
        merged = [list(ivs[0])]
        for lo, hi in ivs[1:]:
            if lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        self.intervals = tuple((lo, hi) for lo, hi in merged)

    @classmethod
    def interval(cls, lo, hi):
        return cls([(lo, hi)])

    def contains(self, w):
        return any(lo <= w <= hi for lo, hi in self.intervals)

    def to_list(self):
        return [[lo, hi] for lo, hi in self.intervals]

    def __repr__(self):
        return f"FrequencyRegion({self.to_list()})"

    def __eq__(self, other):
        return isinstance(other, FrequencyRegion) and self.intervals == other.intervals


def default_sampling_points(region, q=40):
    """``q`` log-spaced frequencies per interval on the imaginary axis, plus conjugates."""
    pts = []
    for lo, hi in region.intervals:
        if not (lo > 0 and np.isfinite(hi)):
            raise ValueError(
                f"cannot log-sample [{lo}, {hi}]; pass explicit sampling points")
        w = np.logspace(np.log10(lo), np.log10(hi), q) if hi > lo else np.full(1, lo)
        for wk in w:
            pts.extend([1j * wk, -1j * wk])
    return np.array(pts)


@dataclass(frozen=True)
class StraikaOptions:
    r_max: int = 20
    sampling_points: tuple = None
    q: int = 40
    include_boundary_pair: bool = True
    loewner_tol: float = DEFAULTS.svd_rel_tol
    iteration: IterationOptions = field(
        default_factory=lambda: IterationOptions(max_iter=50, realify=True))
    seed: int = 0
    dominance: str = "literal"

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError("r_max must be >= 1")
        if self.dominance not in ("literal", "residue"):
            raise ValueError(f"unknown dominance measure {self.dominance!r}")
        if self.sampling_points is not None and len(self.sampling_points) < 2:
            raise ValueError("need at least two sampling points")


def _conj_partner(t, triples):
    best, dist = None, np.inf
    for u in triples:
        if u is t:
            continue
        d = abs(u.lam - np.conj(t.lam))
        if d < dist:
            best, dist = u, d
    if best is not None and dist <= _PAIR_TOL * max(1.0, abs(t.lam)):
        return best
    return None


def _is_real_lam(lam):
    return abs(lam.imag) <= 1e-10 * max(1.0, abs(lam))


def select_in_region(triples, region, include_boundary=True):
    """Finite eigentriples with ``|Im lam|`` in the region.

    With ``include_boundary`` the nearest eigenvalue (with its conjugate)
    strictly below each interval's lower end and strictly above each upper
    end is kept as well. Nearness is the distance of ``|Im lam|`` to the
    endpoint; ties go to the eigenvalue closest to ``i * endpoint``.
    """
    finite = [t for t in triples if t.finite]
    inside = [t for t in finite if region.contains(abs(t.lam.imag))]
    keep = set(id(t) for t in inside)
    if include_boundary:
        outside = [t for t in finite if id(t) not in keep]
        for lo, hi in region.intervals:
            below = [t for t in outside if abs(t.lam.imag) < lo]
            above = [t for t in outside if abs(t.lam.imag) > hi]
            for group, target in ((below, lo), (above, hi)):
                if not group:
                    continue
                # ties in |Im| (e.g. several real poles) go to the pole closest to i*target
                t = min(group, key=lambda t: (abs(abs(t.lam.imag) - target),
                                              abs(t.lam - 1j * target), -t.lam.imag))
                keep.add(id(t))
                partner = None if _is_real_lam(t.lam) else _conj_partner(t, finite)
                if partner is not None:
                    keep.add(id(partner))
    return [t for t in finite if id(t) in keep]


def pole_dominance(triple, rom, measure="literal"):
    """Dominance of an eigenvalue of a first-order realization.

    ``"literal"`` evaluates ``||lam (C y)(x^H B)||_2 / |Re lam|`` with the
    unit-norm eigenvectors as stored on the triple. ``"residue"`` evaluates
    the scale-invariant ``||lam (C x)(y^H B)||_2 / (|y^H E x| |Re lam|)``.
    """
    lam = triple.lam
    if abs(lam.real) < 1e-14 * abs(lam):
        raise ImaginaryAxisPole(f"pole {lam} lies on the imaginary axis")
    x, y = triple.x, triple.y
    if measure == "literal":
        # rank one, so the spectral norm is the product of the vector norms
        val = abs(lam) * np.linalg.norm(rom.C @ y) * np.linalg.norm(x.conj() @ rom.B)
    elif measure == "residue":
        scale = abs(y.conj() @ rom.E @ x)
        if scale == 0:
            raise ValueError(f"y^H E x = 0 for pole {lam}; the residue is undefined")
        val = abs(lam) * np.linalg.norm(rom.C @ x) * np.linalg.norm(y.conj() @ rom.B) / scale
    else:
        raise ValueError(f"unknown dominance measure {measure!r}")
    return float(val / abs(lam.real))


def _cap_by_dominance(selected, rom, r_max, measure):
    """Keep the most dominant poles, never splitting a conjugate pair.

    Blocks are taken in order of decreasing dominance until the next block
    would exceed ``r_max``.
    """
    blocks, seen = [], set()
    for t in selected:
        if id(t) in seen:
            continue
        seen.add(id(t))
        block = [t]
        partner = None if _is_real_lam(t.lam) else _conj_partner(t, selected)
        if partner is not None and id(partner) not in seen:
            seen.add(id(partner))
            block.append(partner)
        d = max(pole_dominance(u, rom, measure) for u in block)
        blocks.append((d, block))
    blocks.sort(key=lambda db: -db[0])
    kept = []
    for _, block in blocks:
        if len(kept) + len(block) > r_max:
            break
        kept.extend(block)
    return kept


def straika(sys, init, region, opts=StraikaOptions()):
    """Run the adaptive iteration; returns ``(reduced_system, report)``."""
    t0 = time.perf_counter()
    it_opts = opts.iteration
    realify = it_opts.realify and sys.is_real
    theta = (np.asarray(opts.sampling_points, dtype=complex) if opts.sampling_points is not None
             else default_sampling_points(region, opts.q))
    report = ReductionReport(seed=opts.seed)
    if it_opts.realify and not sys.is_real:
        report.warnings.append("system is not real; realification disabled")
    data = init
    reduced = None
    for it in range(it_opts.max_iter):
        try:
            bases = build_tangential_bases(sys, data)
            if realify:
                bases = realify_bases(bases, data)
            reduced = project(sys, bases)
            report.n_large_solves += bases.n_solves
            # same directions every iteration, so the surrogate only changes with the model
            rng = np.random.default_rng(opts.seed)
            surrogate = build_loewner(partition_samples(sample(reduced, theta), rng=rng))
            if realify:
                surrogate = realify_loewner(surrogate)
            surrogate = truncate_loewner(surrogate, opts.loewner_tol)
            triples = [t for t in surrogate.eig() if t.finite]
            selected = select_in_region(triples, region, opts.include_boundary_pair)
            if not selected:
                freqs = sorted(abs(t.lam.imag) for t in triples)
                raise EmptySelection(
                    f"no surrogate pole in {region.to_list()}; available |Im lam|: "
                    + ", ".join(f"{w:.4g}" for w in freqs))
            if len(selected) > opts.r_max:
                selected = _cap_by_dominance(selected, surrogate, opts.r_max, opts.dominance)
                if not selected:
                    raise EmptySelection(f"r_max={opts.r_max} cannot hold the most dominant pole pair")
            new = points_from_triples(selected, surrogate.B, surrogate.C,
                                      real_closure=realify, strict_rhp=it_opts.strict_rhp)
        except StrMORError as exc:
            raise _annotate(exc, it) from exc
        metric = convergence_metric(data, new)
        report.iterations.append(IterationRecord(tuple(data.points), metric, bases.order))
        report.model_data, report.final_data = data, new
        data = new
        if metric < it_opts.conv_tol:
            report.converged = True
            break
    report.wall_time = time.perf_counter() - t0
    return reduced, report
