"""Command line: ``strmor {generate,reduce,eval,compare} --config cfg.json``.

Exit codes: 0 success, 2 the algorithm hit its iteration limit (results are
still written), 1 any error.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .bench.experiment import (ExperimentConfig, build_system, compare, evaluation_grid,
                               run_experiment, _write_curve)
from .bench.io import save_system
from .bench.metrics import sigma_values

log = logging.getLogger("strmor")


def _config(args):
    cfg = ExperimentConfig.from_json(args.config, seed=args.seed)
    if args.out_dir is not None:
        cfg = replace(cfg, out_dir=args.out_dir)
    return cfg


def cmd_generate(cfg):
    path = save_system(build_system(cfg.system), Path(cfg.out_dir) / "system.json", prefix="system")
    log.info("wrote %s", path)
    return 0


def cmd_eval(cfg):
    sys_ = build_system(cfg.system)
    omegas = evaluation_grid(cfg)
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    _write_curve(Path(cfg.out_dir) / "sigma_full.csv", omegas, sigma_values(sys_, omegas))
    return 0


def _status(results):
    if any(r.error for r in results):
        for r in results:
            if r.error:
                log.error("%s failed: %s", r.algorithm, r.error)
        return 1
    if not all(r.converged for r in results):
        log.warning("iteration limit reached without convergence")
        return 2
    return 0


def cmd_reduce(cfg):
    res = run_experiment(cfg)
    if res.error is None:
        log.info("%s: r=%d linf=%s n_iter=%d", cfg.algorithm, res.reduced.n,
                 res.summary["linf_error"], res.report.n_iter)
    return _status([res])


def cmd_compare(cfg):
    return _status(compare(cfg))


COMMANDS = {"generate": cmd_generate, "reduce": cmd_reduce, "eval": cmd_eval,
            "compare": cmd_compare}


def build_parser():
    ap = argparse.ArgumentParser(prog="strmor", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config (JSON)")
        p.add_argument("--seed", type=int, default=None, help="overrides config and $STRMOR_SEED")
        p.add_argument("--out-dir", default=None)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        with np.errstate(all="ignore"):
            return COMMANDS[args.command](cfg)
    except Exception as exc:  # noqa: BLE001
        log.error("%s: %s", type(exc).__name__, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
