"""Regularized log-sum-exp objective, its cost-augmented variant, and derivatives.

For example i let ``Psi_i`` be the (K, M) stack of features ``phi_i^{k, y_i}``.
The objective is

    f(w) = 1/(tau N) sum_i logsumexp(tau * (shift_i + Psi_i w)) + lam/2 |w|^2

where ``shift_i[k] = 1 - delta(y_i, k)`` when cost augmentation is on and zero
otherwise.  ``tau = 1`` without the shift is the plain negative log-likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrepancy import PhiTensor
from .errors import NumericOverflow, ShapeError


@dataclass(frozen=True)
class ObjectiveConfig:
    lam: float = 1e-4
    tau: float = 1.0
    cost_augmented: bool = False

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if not self.tau >= 1:
            raise ValueError("tau must be >= 1")


@dataclass
class ObjectiveEval:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray | None = None


def logsumexp_rows(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise log-sum-exp and softmax of an (N, K) array, max-subtracted."""
    top = xi.max(axis=1, keepdims=True)
    e = np.exp(xi - top)
    s = e.sum(axis=1, keepdims=True)
    lse = top[:, 0] + np.log(s[:, 0])
    return lse, e / s


def cost_shift(phi: PhiTensor) -> np.ndarray:
    shift = np.ones((phi.N, phi.K))
    shift[np.arange(phi.N), phi.labels - 1] = 0.0
    return shift


def _scores(w: np.ndarray, phi: PhiTensor, cfg: ObjectiveConfig) -> np.ndarray:
    xi = phi.values @ w  # (N, K)
    if cfg.cost_augmented:
        xi = xi + cost_shift(phi)
    if cfg.tau != 1:
        xi = cfg.tau * xi
    return xi


def eval_objective(w, phi: PhiTensor, cfg: ObjectiveConfig = ObjectiveConfig(),
                   want_hessian: bool = True) -> ObjectiveEval:
    w = np.asarray(w, dtype=float)
    if w.shape != (phi.M,):
        raise ShapeError(f"w has shape {w.shape}, expected ({phi.M},)")
    if phi.N == 0:
        raise ShapeError("phi has no examples")
    N, tau, lam = phi.N, cfg.tau, cfg.lam

    lse, p = logsumexp_rows(_scores(w, phi, cfg))
    value = lse.sum() / (tau * N) + 0.5 * lam * (w @ w)
    # softmax-weighted feature average per example, (N, M)
    g_i = np.einsum("nk,nkm->nm", p, phi.values)
    grad = g_i.sum(axis=0) / N + lam * w

    hess = None
    if want_hessian:
        second = np.einsum("nkm,nk,nkl->ml", phi.values, p, phi.values, optimize=True)
        hess = (tau / N) * (second - g_i.T @ g_i)
        hess = 0.5 * (hess + hess.T)
        hess[np.diag_indices_from(hess)] += lam

    if not (np.isfinite(value) and np.isfinite(grad).all()):
        raise NumericOverflow("objective evaluation produced non-finite values")
    return ObjectiveEval(float(value), grad, hess)


def objective_value(w, phi: PhiTensor, cfg: ObjectiveConfig = ObjectiveConfig()) -> float:
    return eval_objective(w, phi, cfg, want_hessian=False).value


def per_example_nll(w, phi: PhiTensor) -> np.ndarray:
    """-log P(y_i | w, q_i) for every example."""
    lse, _ = logsumexp_rows(phi.values @ np.asarray(w, dtype=float))
    return lse


def kl_total(w, phi: PhiTensor) -> float:
    """Summed KL divergence between one-hot targets and model posteriors."""
    w = np.asarray(w, dtype=float)
    if w.shape != (phi.M,):
        raise ShapeError(f"w has shape {w.shape}, expected ({phi.M},)")
    return float(per_example_nll(w, phi).sum())
