"""Experiment drivers shared by the CLI, scripts/ and the acceptance tests."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .base import train_binary_problems, score
from .decode import EvalMetrics, loss_based_posterior, metrics
from .discrepancy import LossKind
from .encoding import make_code
from .model import AggregationModel, fit
from .pdip import SolveReport, SolverOptions
from .synthgen import SynthConfig, gen_gauss, gen_three_class


@dataclass
class ThreeClassResult:
    seed: int
    weights: np.ndarray
    loss_based: EvalMetrics
    convex: EvalMetrics
    report: SolveReport

    @property
    def w3_ratio(self) -> float:
        return float(self.weights[2] / self.weights[:2].max())


def three_class(seed: int = 0, lam: float = 1e-4, loss=LossKind.CROSS_ENTROPY,
                opts: SolverOptions = SolverOptions()) -> ThreeClassResult:
    Q, y, C = gen_three_class(seed)
    model, rep = fit(C, Q, y, lam, loss, opts)
    return ThreeClassResult(seed, model.weights, metrics(y, loss_based_posterior(C, Q)),
                            metrics(y, model.posterior(Q)), rep)


def repeat_seed(base_seed: int, repeat: int) -> int:
    return int(np.random.SeedSequence((base_seed, repeat)).generate_state(1)[0])


@dataclass
class GaussResult:
    K: int
    encoding: str
    loss_based_acc: list[float] = field(default_factory=list)
    convex_acc: list[float] = field(default_factory=list)
    train_seconds: list[float] = field(default_factory=list)
    test_seconds: list[float] = field(default_factory=list)
    iterations: list[int] = field(default_factory=list)

    def summary(self) -> dict:
        lb, cv = np.array(self.loss_based_acc), np.array(self.convex_acc)
        return {"K": self.K, "encoding": self.encoding, "repeats": len(lb),
                "loss_based_mean": float(lb.mean()), "loss_based_std": float(lb.std()),
                "convex_mean": float(cv.mean()), "convex_std": float(cv.std()),
                "mean_iterations": float(np.mean(self.iterations)),
                "mean_train_seconds": float(np.mean(self.train_seconds)),
                "mean_test_seconds": float(np.mean(self.test_seconds))}


def gauss_benchmark(K: int, encoding: str = "aps", repeats: int = 5, seed: int = 0,
                    lam: float = 1e-4, base_reg: float = 1.0, loss=LossKind.CROSS_ENTROPY,
                    per_class_train: int = 300, per_class_test: int = 1000,
                    opts: SolverOptions = SolverOptions()) -> GaussResult:
    """Test accuracy of loss-based decoding vs convex aggregation on 2-D Gaussians."""
    out = GaussResult(K, encoding)
    for r in range(repeats):
        rs = repeat_seed(seed, r)
        train, test = gen_gauss(SynthConfig(seed=rs, K=K, per_class_train=per_class_train,
                                            per_class_test=per_class_test))
        C = make_code(encoding, K, seed=rs)
        t0 = time.perf_counter()
        base_models, Q_train = train_binary_problems(train, C, base_reg)
        model, rep = fit(C, Q_train, train.labels, lam, loss, opts)
        model = AggregationModel(model.weights, lam, model.loss, C, rep.converged,
                                 rep.iterations, base_models)
        t1 = time.perf_counter()
        Q_test = score(base_models, test.features)
        cv = metrics(test.labels, model.posterior(Q_test))
        t2 = time.perf_counter()
        lb = metrics(test.labels, loss_based_posterior(C, Q_test))
        out.loss_based_acc.append(lb.accuracy)
        out.convex_acc.append(cv.accuracy)
        out.train_seconds.append(t1 - t0)
        out.test_seconds.append(t2 - t1)
        out.iterations.append(rep.iterations)
    return out
