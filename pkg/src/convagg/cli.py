"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 solver did not converge.
Set ``CONVAGG_LOG`` (e.g. ``DEBUG``) to change log verbosity.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time

import numpy as np

from . import base
from .decode import metrics, predict
from .discrepancy import LossKind, compute_phi
from .encoding import make_code
from .errors import ConvAggError
from .experiments import gauss_benchmark, repeat_seed, three_class
from .margin import generalization_bound
from .model import AggregationModel, load_code, save_code
from .pdip import SolverOptions, solve
from .synthgen import SynthConfig, gen_gauss, gen_three_class

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED = 0, 1, 2
DEFAULT_LAMBDAS = [10.0 ** e for e in range(-6, 2)]


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _opts(args) -> SolverOptions:
    return SolverOptions(max_iters=args.max_iters)


def _load_q_and_labels(args, C, model: AggregationModel | None = None, need_labels=True):
    """Q matrix and labels from --q/--labels or from --data (labels in last column)."""
    if args.q is not None:
        Q = base.ingest_q(args.q, C)
        y = None
        if getattr(args, "labels", None):
            y = base.read_labels(args.labels)
            if y.shape[0] != Q.shape[0]:
                raise InputError(f"{args.labels} has {y.shape[0]} labels, Q has {Q.shape[0]} rows")
        elif need_labels:
            raise InputError("--labels is required with --q")
        return Q, y, None
    if args.data is None:
        raise InputError("supply either --data or --q")
    if model is None:
        return None, None, base.read_dataset(args.data, C.K)
    arr = base.read_numeric_csv(args.data)
    if not model.base_models:
        raise InputError("model has no base classifiers; use --q")
    D = model.base_models[0].coefficients.size
    y = None
    if arr.shape[1] == D + 1:
        y = arr[:, -1].astype(np.int64)
    elif arr.shape[1] != D:
        raise InputError(f"{args.data}: expected {D} feature columns (optionally plus a label)")
    if need_labels and y is None:
        raise InputError(f"{args.data}: label column required")
    return model.q_from_features(arr[:, :D]), y, None


def cmd_codematrix(args) -> int:
    C = make_code(args.scheme, args.classes, args.seed)
    text = json.dumps(C.to_dict(), indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def run_train(args) -> int:
    C = load_code(args.code)
    loss = LossKind.parse(args.loss)
    t0 = time.perf_counter()
    base_models = []
    Q, y, data = _load_q_and_labels(args, C)
    if data is not None:
        base_models, Q = base.train_binary_problems(data, C, args.base_reg, args.seed)
        y = data.labels
    phi = compute_phi(C, Q, y, loss)
    rep = solve(phi, args.lam, _opts(args))
    elapsed = time.perf_counter() - t0
    model = AggregationModel(rep.w_star, args.lam, loss, C, rep.converged, rep.iterations,
                             base_models)
    model.save(args.out)
    acc = metrics(y, model.posterior(Q)).accuracy
    print(f"iterations: {rep.iterations}")
    print(f"final residual: {rep.final_residual:.3e}")
    print(f"duality gap: {rep.final_gap:.3e}")
    print(f"objective: {rep.objective_trace[-1]:.10g}")
    print(f"weights: {np.array2string(rep.w_star, precision=4)}")
    print(f"training accuracy: {acc:.4f}")
    print(f"train time: {elapsed:.3f} s")
    if not rep.converged:
        print(f"solver did not converge ({rep.status})", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_predict(args) -> int:
    model = AggregationModel.load(args.model)
    t0 = time.perf_counter()
    Q, _, _ = _load_q_and_labels(args, model.code, model, need_labels=False)
    P = model.posterior(Q)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["predicted_label"] + [f"p_{k + 1}" for k in range(model.K)])
    for lab, row in zip(predict(P), P):
        w.writerow([int(lab)] + [repr(float(v)) for v in row])
    _emit(buf.getvalue(), args.out)
    print(f"test time: {time.perf_counter() - t0:.3f} s", file=sys.stderr)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    model = AggregationModel.load(args.model)
    Q, y, _ = _load_q_and_labels(args, model.code, model, need_labels=True)
    m = metrics(y, model.posterior(Q))
    out = m.to_dict()
    if args.bound is not False:
        phi = compute_phi(model.code, Q, y, model.loss)
        out["bound"] = generalization_bound(model.weights, phi, args.bound, args.epsilon).to_dict()
    _emit(json.dumps(out, indent=2) + "\n", args.out)
    return EXIT_OK


def _confusion_text(cm) -> str:
    return "\n".join("  " + " ".join(f"{v:5d}" for v in row) for row in cm)


def run_synth(args) -> int:
    if args.experiment == "three-class":
        r = three_class(args.seed, args.lam, args.loss, _opts(args))
        print(f"loss-based decoding training accuracy: {r.loss_based.accuracy:.3f}")
        print(_confusion_text(r.loss_based.confusion))
        print(f"convex aggregation training accuracy: {r.convex.accuracy:.3f}")
        print(_confusion_text(r.convex.confusion))
        print(f"w* = {np.array2string(r.weights, precision=4)}")
        print(f"w3 / max(w1, w2) = {r.w3_ratio:.4g}")
        print(f"iterations: {r.report.iterations}")
        if args.emit:
            os.makedirs(args.emit, exist_ok=True)
            Q, y, C = gen_three_class(args.seed)
            base.write_q(os.path.join(args.emit, "q.csv"), Q)
            base.write_labels(os.path.join(args.emit, "labels.csv"), y)
            save_code(os.path.join(args.emit, "code.json"), C)
        return EXIT_OK if r.report.converged else EXIT_NONCONVERGED

    if args.classes < 3:
        raise InputError("--classes must be at least 3")
    if args.emit:
        os.makedirs(args.emit, exist_ok=True)
        train, test = gen_gauss(SynthConfig(seed=repeat_seed(args.seed, 0), K=args.classes))
        base.write_dataset(os.path.join(args.emit, "train.csv"), train)
        base.write_dataset(os.path.join(args.emit, "test.csv"), test)
    r = gauss_benchmark(args.classes, args.encoding, args.repeats, args.seed, args.lam,
                        args.base_reg, args.loss, opts=_opts(args))
    s = r.summary()
    print(f"K={s['K']} encoding={s['encoding']} repeats={s['repeats']}")
    print(f"loss-based decoding test accuracy: {s['loss_based_mean']:.4f} +- {s['loss_based_std']:.4f}")
    print(f"convex aggregation test accuracy:  {s['convex_mean']:.4f} +- {s['convex_std']:.4f}")
    print(f"mean PDIP iterations: {s['mean_iterations']:.1f}")
    print(f"mean train time: {s['mean_train_seconds']:.3f} s, mean test time: {s['mean_test_seconds']:.3f} s")
    return EXIT_OK


def run_regpath(args) -> int:
    loss = LossKind.parse(args.loss)
    if args.three_class_seed is not None:
        Q, y, C = gen_three_class(args.three_class_seed)
    else:
        if args.code is None:
            raise InputError("--code is required unless --three-class-seed is given")
        C = load_code(args.code)
        Q, y, data = _load_q_and_labels(args, C)
        if data is not None:
            _, Q = base.train_binary_problems(data, C, args.base_reg, args.seed)
            y = data.labels
    phi = compute_phi(C, Q, y, loss)
    lambdas = args.lambdas or DEFAULT_LAMBDAS
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lambda"] + [f"w_{j + 1}" for j in range(C.M)] + ["train_accuracy", "status"])
    for lam in lambdas:
        try:
            rep = solve(phi, lam, _opts(args))
        except ConvAggError as exc:
            w.writerow([repr(lam)] + [""] * C.M + ["", f"error: {exc.code}"])
            continue
        model = AggregationModel(rep.w_star, lam, loss, C)
        acc = metrics(y, model.posterior(Q)).accuracy
        w.writerow([repr(lam)] + [repr(float(v)) for v in rep.w_star] + [repr(acc), rep.status])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _add_solver_flags(p, lam=True):
    if lam:
        p.add_argument("--lambda", dest="lam", type=float, default=1e-4,
                       help="l2 regularization strength (default 1e-4)")
    p.add_argument("--loss", default="xent", choices=["xent", "exp"],
                   help="per-classifier loss: cross-entropy or exponential (default xent)")
    p.add_argument("--max-iters", type=int, default=200, help="PDIP iteration cap (default 200)")
    p.add_argument("--base-reg", type=float, default=1.0,
                   help="regularization of the built-in logistic base classifiers (default 1.0)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def _add_inputs(p, labels=True):
    p.add_argument("--data", help="CSV of features with the integer label in the last column")
    p.add_argument("--q", help="CSV of precomputed binary probabilities (N rows, M columns)")
    if labels:
        p.add_argument("--labels", help="CSV column of integer labels 1..K (with --q)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="convagg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("codematrix", help="generate a code matrix")
    p.add_argument("--scheme", required=True, choices=["ova", "aps", "ecoc"])
    p.add_argument("--classes", "-K", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_codematrix)

    p = sub.add_parser("train", help="learn aggregation weights")
    _add_inputs(p)
    p.add_argument("--code", required=True, help="code-matrix JSON")
    p.add_argument("--out", required=True, help="model JSON to write")
    _add_solver_flags(p)
    p.set_defaults(func=run_train)

    p = sub.add_parser("predict", help="write class posteriors")
    p.add_argument("--model", required=True)
    _add_inputs(p, labels=False)
    p.add_argument("--out", help="predictions CSV (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="accuracy, Brier score and confusion matrix")
    p.add_argument("--model", required=True)
    _add_inputs(p)
    p.add_argument("--out", help="metrics JSON (default stdout)")
    p.add_argument("--bound", nargs="?", type=float, const=None, default=False, metavar="B",
                   help="append the margin generalization bound; B defaults to |w|")
    p.add_argument("--epsilon", type=float, default=0.05, help="bound confidence (default 0.05)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="synthetic experiments")
    ex = p.add_subparsers(dest="experiment", required=True, parser_class=_Parser)
    q = ex.add_parser("three-class", help="three classes, one broken pairwise classifier")
    _add_solver_flags(q)
    q.add_argument("--emit", metavar="DIR", help="also write q.csv, labels.csv, code.json")
    q = ex.add_parser("gauss", help="K two-dimensional Gaussians, test accuracy")
    q.add_argument("--classes", "-K", type=int, default=11)
    q.add_argument("--encoding", choices=["aps", "ova", "ecoc"], default="aps")
    q.add_argument("--repeats", type=int, default=5)
    q.add_argument("--emit", metavar="DIR", help="also write train.csv/test.csv of the first repeat")
    _add_solver_flags(q)
    p.set_defaults(func=run_synth)

    p = sub.add_parser("regpath", help="weights and training accuracy over a lambda grid")
    _add_inputs(p)
    p.add_argument("--code", help="code-matrix JSON")
    p.add_argument("--three-class-seed", type=int, help="use the three-class synthetic fixture")
    p.add_argument("--lambdas", type=float, nargs="+",
                   help="lambda grid (default 1e-6 ... 1e1, one per decade)")
    p.add_argument("--out", help="CSV path (default stdout)")
    _add_solver_flags(p, lam=False)
    p.set_defaults(func=run_regpath)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("CONVAGG_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConvAggError, InputError, OSError) as exc:
        print(f"convagg: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
