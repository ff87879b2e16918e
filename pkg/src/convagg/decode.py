"""Class posteriors, label prediction, loss-based decoding and evaluation metrics.

Posteriors are plain arrays: shape (K,) for one probability vector ``q`` or
(N, K) for a batch.  Labels are 1-based and ties go to the lowest class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .discrepancy import LossKind, rho_matrix
from .encoding import CodeMatrix
from .errors import InvalidLabel, ShapeError


def softmax_neg(r: np.ndarray) -> np.ndarray:
    """Row-wise softmax of ``-r`` with max-subtraction."""
    r = np.atleast_2d(r)
    e = np.exp(-(r - r.min(axis=1, keepdims=True)))
    return e / e.sum(axis=1, keepdims=True)


def posterior(w, C: CodeMatrix, q, kind=LossKind.CROSS_ENTROPY) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    single = q.ndim == 1
    P = softmax_neg(rho_matrix(C, np.atleast_2d(q), w, kind))
    return P[0] if single else P


def loss_based_posterior(C: CodeMatrix, q) -> np.ndarray:
    """Posterior with uniform weights 1/M and the exponential loss."""
    return posterior(np.full(C.M, 1.0 / C.M), C, q, LossKind.EXPONENTIAL)


def predict(probs) -> np.ndarray | int:
    probs = np.asarray(probs)
    if probs.ndim == 1:
        return int(np.argmax(probs)) + 1
    return np.argmax(probs, axis=1) + 1


def predict_rho(w, C: CodeMatrix, Q, kind=LossKind.CROSS_ENTROPY) -> np.ndarray:
    """Hard decoding: the class with the smallest discrepancy."""
    return np.argmin(rho_matrix(C, np.atleast_2d(Q), w, kind), axis=1) + 1


@dataclass
class EvalMetrics:
    accuracy: float
    mse: float
    confusion: np.ndarray

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, "mse": self.mse,
                "confusion": self.confusion.tolist()}


def metrics(true_labels, posteriors) -> EvalMetrics:
    """Accuracy, mean Brier score against one-hot targets, and confusion counts.

    Confusion rows are true classes, columns predicted classes.
    """
    P = np.atleast_2d(np.asarray(posteriors, dtype=float))
    y = np.asarray(true_labels)
    N, K = P.shape
    if y.shape != (N,):
        raise ShapeError(f"{y.shape[0] if y.ndim else 0} labels for {N} posteriors")
    if (y < 1).any() or (y > K).any() or not np.all(np.mod(y, 1) == 0):
        raise InvalidLabel(f"labels must be integers in 1..{K}")
    y = y.astype(np.int64)
    T = np.zeros_like(P)
    T[np.arange(N), y - 1] = 1.0
    mse = float(((T - P) ** 2).sum(axis=1).mean())
    yhat = predict(P)
    confusion = np.zeros((K, K), dtype=np.int64)
    np.add.at(confusion, (y - 1, yhat - 1), 1)
    return EvalMetrics(float(np.trace(confusion) / N), mse, confusion)
