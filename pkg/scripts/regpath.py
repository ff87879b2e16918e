"""Regularization path on the three-class fixture: weights and accuracy versus lambda.

    python3 scripts/regpath.py --seed 0 --out regpath.csv
"""

import argparse
import csv
import sys

import numpy as np

from convagg.decode import metrics
from convagg.discrepancy import LossKind, compute_phi
from convagg.model import AggregationModel
from convagg.pdip import solve
from convagg.synthgen import gen_three_class


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lo", type=float, default=-6, help="log10 of the smallest lambda")
    ap.add_argument("--hi", type=float, default=1, help="log10 of the largest lambda")
    ap.add_argument("--num", type=int, default=29)
    ap.add_argument("--out", help="CSV path (default stdout)")
    args = ap.parse_args()

    Q, y, C = gen_three_class(args.seed)
    phi = compute_phi(C, Q, y)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["lambda", "w_1", "w_2", "w_3", "train_accuracy", "iterations", "converged"])
    for lam in np.logspace(args.lo, args.hi, args.num):
        rep = solve(phi, lam)
        model = AggregationModel(rep.w_star, lam, LossKind.CROSS_ENTROPY, C)
        acc = metrics(y, model.posterior(Q)).accuracy
        w.writerow([f"{lam:.6g}"] + [f"{v:.6g}" for v in rep.w_star]
                   + [f"{acc:.4f}", rep.iterations, rep.converged])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
