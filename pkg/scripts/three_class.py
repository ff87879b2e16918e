"""Three-class broken-classifier experiment over several seeds.

Prints per-seed training accuracy of loss-based decoding and convex
aggregation, the learned weights, and the means.

    python3 scripts/three_class.py --seeds 10
"""

import argparse

import numpy as np

from convagg.experiments import three_class


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--lambda", dest="lam", type=float, default=1e-4)
    ap.add_argument("--loss", default="xent", choices=["xent", "exp"])
    args = ap.parse_args()

    rows = []
    print("seed  loss-based  convex   w1       w2       w3       w3/max(w1,w2)  iters")
    for seed in range(args.seeds):
        r = three_class(seed, args.lam, args.loss)
        w = r.weights
        rows.append((r.loss_based.accuracy, r.convex.accuracy, r.w3_ratio))
        print(f"{seed:4d}  {r.loss_based.accuracy:10.4f}  {r.convex.accuracy:6.4f}  "
              f"{w[0]:7.4f}  {w[1]:7.4f}  {w[2]:7.4f}  {r.w3_ratio:13.4g}  {r.report.iterations:5d}")
    a = np.array(rows)
    print(f"mean  {a[:, 0].mean():10.4f}  {a[:, 1].mean():6.4f}")
    print(f"seeds with w3/max(w1,w2) < 0.01: {(a[:, 2] < 0.01).sum()} of {len(a)}")


if __name__ == "__main__":
    main()
