"""Experiment configs and the runner behind the command line.

A run reduces one system with one algorithm and writes, into ``out_dir``:

* ``report.json``: config, iteration history and errors (sorted keys)
* ``summary.csv``: one row ``algorithm,linf_error,n_iter,n_ls,t_c,mark_maxiter``
* ``errors.csv``, ``sigma_full.csv``, ``sigma_reduced.csv``: ``omega,value`` curves
* ``reduced.json`` plus Matrix Market files for the reduced model

Wall time is only written when ``record_timing`` is set, so that reruns with
the same config and seed produce byte-identical files.
"""

import csv
import io
import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from ..errors import StrMORError
from ..interpolation import InterpolationData
from ..irka import IterationOptions, sptf_irka, tf_irka
from ..straika import FrequencyRegion, StraikaOptions, straika
from ..system import make_first_order
from .generators import GENERATORS
from .io import load_system, save_system
from .metrics import linf_region_error, pointwise_relerr, sigma_values

ALGORITHMS = ("tfirka", "sptfirka", "straika")
SCHEMES = ("log_equidistant", "lin_equidistant", "single_center_pair", "explicit")
SEED_ENV = "STRMOR_SEED"
SUMMARY_FIELDS = ("algorithm", "linf_error", "n_iter", "n_ls", "t_c", "mark_maxiter")


@dataclass
class InitSpec:
    """How to place the initial interpolation points.

    ``bounds`` defaults to the first region interval. ``explicit`` takes
    ``points`` as ``[re, im]`` pairs and must be conjugation-closed.
    """

    scheme: str = "log_equidistant"
    count: int = None
    bounds: list = None
    points: list = None


@dataclass
class GridSpec:
    omega_min: float = None
    omega_max: float = None
    count: int = 500
    spacing: str = "log"


@dataclass
class ExperimentConfig:
    system: dict
    algorithm: str = "straika"
    region: list = field(default_factory=lambda: [[1.0, 100.0]])
    r: int = None
    r_max: int = None
    init: InitSpec = field(default_factory=InitSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    region_grid: int = 1000
    seed: int = 0
    out_dir: str = "results"
    max_iter: int = None
    conv_tol: float = 1e-3
    realify: bool = True
    include_boundary_pair: bool = True
    q: int = 40
    dominance: str = "literal"
    record_timing: bool = False
    algorithms: list = None

    def __post_init__(self):
        if isinstance(self.init, dict):
            self.init = InitSpec(**self.init)
        if isinstance(self.grid, dict):
            self.grid = GridSpec(**self.grid)
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        for a in self.algorithms or ():
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r} in 'algorithms'")
        if self.init.scheme not in SCHEMES:
            raise ValueError(f"init scheme must be one of {SCHEMES}, got {self.init.scheme!r}")
        if self.grid.count < 2:
            raise ValueError("evaluation grid needs at least 2 points")
        if self.grid.spacing not in ("log", "lin"):
            raise ValueError("grid spacing must be 'log' or 'lin'")
        if not ("generator" in self.system) ^ ("descriptor" in self.system):
            raise ValueError("system needs exactly one of 'generator' or 'descriptor'")
        FrequencyRegion(self.region)

    @property
    def frequency_region(self):
        return FrequencyRegion(self.region)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path, seed=None):
        """Load a config; ``seed`` beats ``$STRMOR_SEED`` beats the file."""
        path = Path(path)
        cfg = cls.from_dict(json.loads(path.read_text(encoding="utf-8")))
        src = cfg.system
        if "descriptor" in src and not Path(src["descriptor"]).is_absolute():
            cfg.system = dict(src, descriptor=str(path.parent / src["descriptor"]))
        env = os.environ.get(SEED_ENV)
        if seed is not None:
            cfg.seed = int(seed)
        elif env:
            cfg.seed = int(env)
        return cfg

    def to_dict(self):
        return asdict(self)


def build_system(source):
    if "descriptor" in source:
        return load_system(source["descriptor"])
    name = source["generator"]
    if name not in GENERATORS:
        raise ValueError(f"unknown generator {name!r}; choose from {sorted(GENERATORS)}")
    return GENERATORS[name](**source.get("params", {}))


def _directions(k, dim, rng):
    if dim == 1:
        return np.ones((k, 1))
    D = rng.standard_normal((k, dim))
    return D / np.linalg.norm(D, axis=1, keepdims=True)


def initial_data(cfg, sys, count, rng):
    """Conjugation-closed initial points on the imaginary axis.

    Each conjugate pair shares one real random direction; an odd ``count``
    adds a single real point at the centre frequency.
    """
    spec = cfg.init
    lo, hi = spec.bounds if spec.bounds is not None else cfg.frequency_region.intervals[0]
    if spec.scheme == "explicit":
        if not spec.points:
            raise ValueError("explicit init scheme needs 'points'")
        pts = np.array([complex(re, im) for re, im in spec.points])
    else:
        if spec.scheme == "single_center_pair":
            freqs = np.array([(lo + hi) / 2])
            n_real = 0
        else:
            if count is None or count < 1:
                raise ValueError(f"init scheme {spec.scheme!r} needs a positive count")
            k, n_real = divmod(count, 2)
            if spec.scheme == "log_equidistant":
                if lo <= 0:
                    raise ValueError("log_equidistant init needs a positive lower bound")
                freqs = np.logspace(np.log10(lo), np.log10(hi), k) if k else np.array([])
            else:
                freqs = np.linspace(lo, hi, k) if k else np.array([])
        pts = [z for w in freqs for z in (1j * w, -1j * w)]
        if n_real:
            pts.append(complex((lo + hi) / 2))
        pts = np.array(pts)
    return _with_directions(pts, sys, rng)


def _with_directions(pts, sys, rng):
    b = _directions(len(pts), sys.m, rng).astype(complex)
    c = _directions(len(pts), sys.p, rng).astype(complex)
    used = np.zeros(len(pts), bool)
    for i, s in enumerate(pts):
        if used[i] or s.imag == 0:
            continue
        used[i] = True
        for j in range(i + 1, len(pts)):
            if not used[j] and pts[j] == np.conj(s):
                b[j], c[j], used[j] = b[i].conj(), c[i].conj(), True
                break
    data = InterpolationData(pts, b, c)
    data.conjugate_partners()
    return data


def evaluation_grid(cfg):
    g = cfg.grid
    lo = g.omega_min if g.omega_min is not None else cfg.frequency_region.intervals[0][0]
    hi = g.omega_max if g.omega_max is not None else cfg.frequency_region.intervals[-1][1]
    if g.spacing == "log":
        if lo <= 0:
            lo = hi * 1e-4
        return np.logspace(np.log10(lo), np.log10(hi), g.count)
    return np.linspace(lo, hi, g.count)


@dataclass
class ExperimentResult:
    algorithm: str
    report: object
    reduced: object
    summary: dict
    error: str = None

    @property
    def converged(self):
        return self.report is not None and self.report.converged


def _run_algorithm(cfg, sys, rng):
    region = cfg.frequency_region
    realify = cfg.realify and sys.is_real
    if cfg.algorithm == "straika":
        r_max = cfg.r_max if cfg.r_max is not None else cfg.r
        if r_max is None:
            raise ValueError("straika needs r_max")
        count = cfg.init.count if cfg.init.count is not None else min(r_max, 2)
        init = initial_data(cfg, sys, count, rng)
        opts = StraikaOptions(
            r_max=r_max, q=cfg.q, include_boundary_pair=cfg.include_boundary_pair,
            iteration=IterationOptions(max_iter=cfg.max_iter or 50, conv_tol=cfg.conv_tol,
                                       realify=realify),
            seed=cfg.seed, dominance=cfg.dominance)
        return straika(sys, init, region, opts)
    if cfg.r is None:
        raise ValueError(f"{cfg.algorithm} needs r")
    init = initial_data(cfg, sys, cfg.init.count if cfg.init.count is not None else cfg.r, rng)
    if cfg.algorithm == "tfirka":
        opts = IterationOptions(max_iter=cfg.max_iter or 100, conv_tol=cfg.conv_tol, realify=realify)
        rom, rep = tf_irka(sys, init, opts)
        return make_first_order(rom.E, rom.A, rom.B, rom.C), rep
    opts = IterationOptions(max_iter=cfg.max_iter or 50, conv_tol=cfg.conv_tol, realify=realify)
    return sptf_irka(sys, init, opts)


def _fmt(x):
    return "nan" if x is None or not np.isfinite(x) else format(float(x), ".17g")


def _write_curve(path, omegas, values):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["omega", "value"])
        for om, v in zip(omegas, values):
            w.writerow([_fmt(om), _fmt(v)])


def summary_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def _json_safe(x):
    if isinstance(x, float) and not np.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    return x


def write_json(path, obj):
    Path(path).write_text(json.dumps(_json_safe(obj), indent=2, sort_keys=True, allow_nan=False)
                          + "\n", encoding="utf-8")


def run_experiment(cfg, sys=None):
    """Reduce, evaluate and write all output files; returns an :class:`ExperimentResult`.

    Algorithm failures are caught and recorded in ``report.json``; the
    result then carries the message in ``error``.
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if sys is None:
        sys = build_system(cfg.system)
    rng = np.random.default_rng(cfg.seed)
    payload = {"config": cfg.to_dict(), "full_order": sys.n}
    try:
        reduced, rep = _run_algorithm(cfg, sys, rng)
    except (StrMORError, np.linalg.LinAlgError, ValueError) as exc:
        payload["error"] = f"{type(exc).__name__}: {exc}"
        write_json(out / "report.json", payload)
        summary = {"algorithm": cfg.algorithm, "linf_error": "nan", "n_iter": "", "n_ls": "",
                   "t_c": "", "mark_maxiter": ""}
        (out / "summary.csv").write_text(summary_csv([summary]), encoding="utf-8")
        return ExperimentResult(cfg.algorithm, None, None, summary, payload["error"])

    omegas = evaluation_grid(cfg)
    series = pointwise_relerr(sys, reduced, omegas)
    linf = linf_region_error(sys, reduced, cfg.frequency_region, cfg.region_grid)
    _write_curve(out / "errors.csv", omegas, series.relerr)
    _write_curve(out / "sigma_full.csv", omegas, sigma_values(sys, omegas))
    _write_curve(out / "sigma_reduced.csv", omegas, sigma_values(reduced, omegas))
    save_system(reduced, out / "reduced.json", prefix="reduced")

    summary = {
        "algorithm": cfg.algorithm,
        "linf_error": _fmt(linf),
        "n_iter": rep.n_iter,
        "n_ls": rep.n_large_solves,
        "t_c": _fmt(rep.wall_time) if cfg.record_timing else "",
        "mark_maxiter": "" if rep.converged else "*",
    }
    payload.update({
        "reduced_order": reduced.n,
        "n_points": len(rep.model_data.points) if rep.model_data is not None else 0,
        "linf_error": linf,
        "report": rep.to_dict(include_timing=cfg.record_timing),
    })
    write_json(out / "report.json", payload)
    (out / "summary.csv").write_text(summary_csv([summary]), encoding="utf-8")
    return ExperimentResult(cfg.algorithm, rep, reduced, summary)


def compare(cfg):
    """Run every algorithm in ``cfg.algorithms`` on the same system; one subdirectory each."""
    algos = cfg.algorithms or list(ALGORITHMS)
    sys = build_system(cfg.system)
    results = []
    for a in algos:
        sub = replace(cfg, algorithm=a, out_dir=str(Path(cfg.out_dir) / a), algorithms=None)
        results.append(run_experiment(sub, sys))
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    (Path(cfg.out_dir) / "summary.csv").write_text(
        summary_csv([r.summary for r in results]), encoding="utf-8")
    return results
