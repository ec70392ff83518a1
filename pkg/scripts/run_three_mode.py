"""Region-targeted reduction of the three-mode oscillator bank."""

import argparse
from pathlib import Path

from strmor.bench.experiment import ExperimentConfig, run_experiment

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=HERE / "configs" / "three_mode.json")
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    cfg = ExperimentConfig.from_json(args.config, seed=args.seed)
    res = run_experiment(cfg)
    if res.error:
        raise SystemExit(res.error)
    pts = sorted(res.report.final_data.points, key=lambda z: (abs(z.imag), z.imag))
    print(f"converged={res.converged} iterations={res.report.n_iter} order={res.reduced.n}")
    print("interpolation points:", ", ".join(f"{z:.4g}" for z in pts))
    print(f"linf region error: {res.summary['linf_error']}")
    print(f"outputs in {cfg.out_dir}")


if __name__ == "__main__":
    main()
