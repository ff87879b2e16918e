"""Per-classifier losses, weighted discrepancies and discrepancy-difference features."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .encoding import NEG, POS, CodeEntry, CodeMatrix
from .errors import InvalidLabel, InvalidProbability, InvalidWeights, ShapeError

EPS_Q = 1e-12


class LossKind(str, enum.Enum):
    CROSS_ENTROPY = "xent"
    EXPONENTIAL = "exp"

    @classmethod
    def parse(cls, value) -> "LossKind":
        if isinstance(value, LossKind):
            return value
        aliases = {"xent": cls.CROSS_ENTROPY, "cross-entropy": cls.CROSS_ENTROPY,
                   "crossentropy": cls.CROSS_ENTROPY, "exp": cls.EXPONENTIAL,
                   "exponential": cls.EXPONENTIAL}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown loss {value!r}") from None


def clip_probabilities(q) -> np.ndarray:
    """Validate that ``q`` lies in [0, 1] and clip it to [EPS_Q, 1 - EPS_Q]."""
    q = np.asarray(q, dtype=float)
    if not np.isfinite(q).all() or (q < 0).any() or (q > 1).any():
        raise InvalidProbability("probabilities must lie in [0, 1]")
    return np.clip(q, EPS_Q, 1.0 - EPS_Q)


def _loss_table(entries: np.ndarray, q: np.ndarray, kind: LossKind) -> np.ndarray:
    """Elementwise loss with ``entries`` and ``q`` broadcast together."""
    if kind is LossKind.CROSS_ENTROPY:
        return np.where(entries == POS, -np.log(q),
                        np.where(entries == NEG, -np.log1p(-q), 0.0))
    sign = np.where(entries == POS, 1.0, np.where(entries == NEG, -1.0, 0.0))
    return np.exp(-sign * (q - 0.5))


def loss(entry, q: float, kind=LossKind.CROSS_ENTROPY) -> float:
    """Loss of a single probability estimate against one code entry.

    DONTCARE gives 0 under cross-entropy and exp(0) = 1 under the exponential loss.
    """
    kind = LossKind.parse(kind)
    e = int(CodeEntry(int(entry)))
    qc = clip_probabilities(q)
    return float(_loss_table(np.asarray(e), qc, kind))


def loss_tensor(C: CodeMatrix, Q, kind=LossKind.CROSS_ENTROPY) -> np.ndarray:
    """All losses ``d(C[l, k], Q[i, l])`` as an (N, M, K) array."""
    kind = LossKind.parse(kind)
    Q = clip_probabilities(np.atleast_2d(Q))
    if Q.shape[1] != C.M:
        raise ShapeError(f"Q has {Q.shape[1]} columns, code matrix has {C.M} rows")
    return _loss_table(C.entries[None, :, :], Q[:, :, None], kind)


def _check_weights(w, M: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (M,):
        raise ShapeError(f"weight vector has shape {w.shape}, expected ({M},)")
    if (w < 0).any():
        raise InvalidWeights("aggregation weights must be nonnegative")
    return w


def rho(codeword, q, w, kind=LossKind.CROSS_ENTROPY) -> float:
    """Weighted discrepancy between one codeword (a code-matrix column) and ``q``."""
    kind = LossKind.parse(kind)
    codeword = np.asarray(codeword)
    q = np.asarray(q, dtype=float)
    if codeword.ndim != 1 or q.shape != codeword.shape:
        raise ShapeError("codeword and q must be vectors of equal length")
    w = _check_weights(w, codeword.size)
    return float(w @ _loss_table(codeword, clip_probabilities(q), kind))


def rho_matrix(C: CodeMatrix, Q, w, kind=LossKind.CROSS_ENTROPY) -> np.ndarray:
    """Discrepancies for every example and class, shape (N, K)."""
    w = _check_weights(w, C.M)
    return np.einsum("nmk,m->nk", loss_tensor(C, Q, kind), w)


def _check_labels(y, N: int, K: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (N,):
        raise ShapeError(f"expected {N} labels, got shape {y.shape}")
    if not np.issubdtype(y.dtype, np.integer):
        if not np.all(np.mod(y, 1) == 0):
            raise InvalidLabel("labels must be integers")
        y = y.astype(int)
    if (y < 1).any() or (y > K).any():
        raise InvalidLabel(f"labels must lie in 1..{K}")
    return y.astype(np.int64)


@dataclass(frozen=True, eq=False)
class PhiTensor:
    """Features ``values[i, j] = d(c_{y_i}, q_i) - d(c_j, q_i)``, shape (N, K, M).

    ``labels`` are 1-based.  The slice ``values[i, y_i - 1]`` is zero.
    """

    values: np.ndarray
    labels: np.ndarray

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def K(self) -> int:
        return self.values.shape[1]

    @property
    def M(self) -> int:
        return self.values.shape[2]

    def subset(self, idx) -> "PhiTensor":
        return PhiTensor(self.values[idx], self.labels[idx])


def compute_phi(C: CodeMatrix, Q, y, kind=LossKind.CROSS_ENTROPY) -> PhiTensor:
    D = loss_tensor(C, Q, kind)  # (N, M, K)
    N = D.shape[0]
    y = _check_labels(y, N, C.K)
    true_loss = D[np.arange(N), :, y - 1]  # (N, M)
    values = true_loss[:, None, :] - np.swapaxes(D, 1, 2)
    values[np.arange(N), y - 1, :] = 0.0
    return PhiTensor(values, y)


def phi_general(C: CodeMatrix, q, j: int, k: int, kind=LossKind.CROSS_ENTROPY) -> np.ndarray:
    """The vector with entries ``d(C[l, k], q[l]) - d(C[l, j], q[l])`` (1-based j, k)."""
    D = loss_tensor(C, np.atleast_2d(q), kind)[0]
    if not (1 <= j <= C.K and 1 <= k <= C.K):
        raise InvalidLabel(f"class indices must lie in 1..{C.K}")
    return D[:, k - 1] - D[:, j - 1]
