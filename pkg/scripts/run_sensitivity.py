"""Run the sensitivity experiments and write one curve per experiment.

Example:
    python3 scripts/run_sensitivity.py --out results/sensitivity --experiments B1 B2 E
"""

import argparse
import time
from pathlib import Path

from labeltnc.io import write_curve
from labeltnc.synthbench import DEFAULT_MEASURES, EXPERIMENTS, build_schedule, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--experiments", nargs="+", default=list(EXPERIMENTS), type=str.upper,
                        choices=EXPERIMENTS)
    parser.add_argument("--measures", nargs="+", default=list(DEFAULT_MEASURES))
    parser.add_argument("--n-per-cluster", type=int, default=100)
    parser.add_argument("--mc-count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", default="results/sensitivity")
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for exp in args.experiments:
        t0 = time.perf_counter()
        schedule = build_schedule(exp, args.n_per_cluster, args.seed)
        curve = run_experiment(schedule, args.measures, args.mc_count, args.seed, threads=args.threads)
        write_curve(curve, out / exp.lower())
        print(f"{exp} ({schedule.parameter_name}), {time.perf_counter() - t0:.1f}s")
        print("  " + "  ".join(f"{c:>18s}" for c in ["param", *curve.columns]))
        for row in curve.rows:
            print("  " + "  ".join(f"{v:18.4f}" for v in row[1:]))


if __name__ == "__main__":
    main()
