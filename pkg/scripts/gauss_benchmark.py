"""Test accuracy of loss-based decoding vs convex aggregation on 2-D Gaussians.

Writes one CSV row per (K, encoding) cell, suitable for plotting accuracy
against the number of classes.

    python3 scripts/gauss_benchmark.py --classes 3 7 11 --repeats 5 --out gauss.csv
"""

import argparse
import csv
import sys

from convagg.experiments import gauss_benchmark


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--classes", type=int, nargs="+", default=[3, 7, 11])
    ap.add_argument("--encodings", nargs="+", default=["aps", "ova"], choices=["aps", "ova", "ecoc"])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    ap.add_argument("--base-reg", type=float, default=1.0)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    fields = ["K", "encoding", "repeats", "loss_based_mean", "loss_based_std", "convex_mean",
              "convex_std", "mean_iterations", "mean_train_seconds", "mean_test_seconds"]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for K in args.classes:
        for enc in args.encodings:
            res = gauss_benchmark(K, enc, args.repeats, args.seed, args.lam, args.base_reg)
            writer.writerow(res.summary())
            fh.flush()
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
