"""Convex aggregation of binary classifiers into multiclass class-membership probabilities."""

from .decode import EvalMetrics, loss_based_posterior, metrics, posterior, predict
from .discrepancy import LossKind, PhiTensor, compute_phi, loss, rho
from .encoding import CodeEntry, CodeMatrix, Scheme, code_distance, gen_allpairs, gen_ecoc, gen_ova
from .model import AggregationModel, fit
from .objective import ObjectiveConfig, eval_objective, kl_total
from .pdip import SolveReport, SolverOptions, solve

__all__ = [
    "AggregationModel", "CodeEntry", "CodeMatrix", "EvalMetrics", "LossKind", "ObjectiveConfig",
    "PhiTensor", "Scheme", "SolveReport", "SolverOptions", "code_distance", "compute_phi",
    "eval_objective", "fit", "gen_allpairs", "gen_ecoc", "gen_ova", "kl_total", "loss",
    "loss_based_posterior", "metrics", "posterior", "predict", "rho", "solve",
]
