"""Wall time of label_tnc as N, dimensionality and class count double.

Prints the best-of-repeats time per setting and the ratio to the previous
setting; linear cost shows up as ratios near 2 for N.
"""

import argparse
import time

import numpy as np

from labeltnc import CvmConfig, EvalPair, LabeledDataset, label_tnc


def make_pair(n, dim, k, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % k
    x = rng.normal(size=(n, dim)) + rng.normal(scale=2.0, size=(k, dim))[labels]
    return EvalPair(LabeledDataset(x, labels), LabeledDataset(x[:, :2] + rng.normal(size=(n, 2)), labels))


def best_time(pair, cfg, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        label_tnc(pair, cfg)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0],
                                     formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    parser.add_argument("--cvm", default="dsc", choices=["dsc", "ch_btwn"])
    parser.add_argument("--mc-count", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=15)
    parser.add_argument("--base-n", type=int, default=2000)
    args = parser.parse_args()

    cfg = CvmConfig(args.cvm, args.mc_count)
    n0 = args.base_n
    sweeps = {
        "N": [(n0 * 2**i, 50, 5) for i in range(3)],
        "dim": [(2 * n0, 50 * 2**i, 5) for i in range(3)],
        "k": [(2 * n0, 50, 5 * 2**i) for i in range(3)],
    }
    for name, settings in sweeps.items():
        prev = None
        for n, dim, k in settings:
            t = best_time(make_pair(n, dim, k), cfg, args.repeats)
            ratio = "" if prev is None else f"  x{t / prev:.2f}"
            print(f"{name:>4s}  N={n:<6d} dim={dim:<4d} k={k:<3d} {t * 1e3:8.2f} ms{ratio}")
            prev = t


if __name__ == "__main__":
    main()
