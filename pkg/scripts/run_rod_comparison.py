"""StrAIKA vs TF-IRKA vs SPTF-IRKA on the heated rod with delayed feedback."""

import argparse
from pathlib import Path

from strmor.bench.experiment import ExperimentConfig, compare

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=HERE / "configs" / "heated_rod.json")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical reruns)")
    args = ap.parse_args()
    cfg = ExperimentConfig.from_json(args.config, seed=args.seed)
    cfg.record_timing = args.timing
    results = compare(cfg)
    print(f"{'algorithm':<10} {'linf':>10} {'iters':>6} {'solves':>7} {'t_c':>8}")
    for r in results:
        s = r.summary
        if r.error:
            print(f"{r.algorithm:<10} failed: {r.error}")
            continue
        print(f"{s['algorithm']:<10} {float(s['linf_error']):>10.3e} {s['n_iter']:>5}{s['mark_maxiter']:1}"
              f" {s['n_ls']:>7} {s['t_c']:>8}")
    print(f"outputs in {cfg.out_dir}  (* = iteration limit reached)")


if __name__ == "__main__":
    main()
