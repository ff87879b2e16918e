"""Binary base classifiers that produce the probability matrix Q.

Each code-matrix row defines a binary problem on the examples whose class is
not DONTCARE in that row.  The built-in learner is L2-regularized logistic
regression (penalty on the intercept too, as liblinear does) fitted by
damped Newton iterations.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .discrepancy import EPS_Q, clip_probabilities
from .encoding import POS, CodeMatrix
from .errors import (DegenerateBinaryProblem, DimensionMismatch, InvalidLabel,
                     InvalidProbability, ParseError)


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray  # (N, D)
    labels: np.ndarray  # (N,), 1..K
    K: int

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.labels).astype(np.int64)
        if X.shape[0] != y.shape[0]:
            raise DimensionMismatch("features and labels disagree on N")
        if not np.isfinite(X).all():
            raise ValueError("features must be finite")
        if (y < 1).any() or (y > self.K).any():
            raise InvalidLabel(f"labels must lie in 1..{self.K}")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    @property
    def N(self) -> int:
        return self.features.shape[0]

    @property
    def D(self) -> int:
        return self.features.shape[1]

    def check_all_classes(self) -> None:
        missing = sorted(set(range(1, self.K + 1)) - set(self.labels.tolist()))
        if missing:
            raise InvalidLabel(f"classes absent from training data: {missing}")


@dataclass
class BinaryModel:
    coefficients: np.ndarray
    intercept: float
    reg: float

    def decision(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.coefficients + self.intercept

    def predict_proba(self, X) -> np.ndarray:
        """Probability of the POS side for each row of ``X``."""
        t = self.decision(X)
        out = np.empty_like(t)
        pos = t >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
        et = np.exp(t[~pos])
        out[~pos] = et / (1.0 + et)
        return out

    def to_dict(self) -> dict:
        return {"coefficients": self.coefficients.tolist(), "intercept": self.intercept,
                "reg": self.reg}

    @classmethod
    def from_dict(cls, obj: dict) -> "BinaryModel":
        return cls(np.asarray(obj["coefficients"], dtype=float), float(obj["intercept"]),
                   float(obj["reg"]))


def _log1pexp(t):
    return np.logaddexp(0.0, t)


def fit_logistic(X: np.ndarray, t: np.ndarray, reg: float = 1.0, tol: float = 1e-8,
                 max_iter: int = 100) -> BinaryModel:
    """Minimize sum_i logloss(t_i, sigma(x_i.b + c)) + reg/2 (|b|^2 + c^2).

    ``t`` holds 0/1 targets.  Newton steps with backtracking; stops when the
    gradient norm is at most ``tol``.
    """
    if reg <= 0:
        raise ValueError("reg must be positive")
    A = np.hstack([X, np.ones((X.shape[0], 1))])
    theta = np.zeros(A.shape[1])
    sign = 2.0 * t - 1.0

    def f(th):
        return _log1pexp(-sign * (A @ th)).sum() + 0.5 * reg * th @ th

    fval = f(theta)
    for _ in range(max_iter):
        m = A @ theta
        p = 0.5 * (1.0 + np.tanh(0.5 * m))
        grad = A.T @ (p - t) + reg * theta
        if np.linalg.norm(grad) <= tol:
            break
        H = (A * (p * (1 - p))[:, None]).T @ A
        H[np.diag_indices_from(H)] += reg
        step = np.linalg.solve(H, -grad)
        a = 1.0
        while True:
            cand = theta + a * step
            fc = f(cand)
            if fc <= fval + 1e-4 * a * (grad @ step) or a < 1e-10:
                break
            a *= 0.5
        theta, fval = cand, fc
    return BinaryModel(theta[:-1].copy(), float(theta[-1]), float(reg))


def train_binary_problems(data: Dataset, C: CodeMatrix, reg: float = 1.0, seed: int = 0,
                          ) -> tuple[list[BinaryModel], np.ndarray]:
    """Fit one classifier per code row and score every example with each.

    The fit is deterministic; ``seed`` is accepted for interface stability.
    """
    del seed
    data.check_all_classes()
    if C.K != data.K:
        raise DimensionMismatch(f"code matrix has K={C.K}, data has K={data.K}")
    models = []
    for j in range(C.M):
        row = C.entries[j]
        target = row[data.labels - 1]
        used = target != -1
        t = (target[used] == POS).astype(float)
        if not (t.any() and (t == 0).any()):
            raise DegenerateBinaryProblem(j)
        models.append(fit_logistic(data.features[used], t, reg))
    return models, score(models, data.features)


def score(models: list[BinaryModel], X) -> np.ndarray:
    """Q matrix of shape (N, M) for feature matrix ``X``."""
    Q = np.column_stack([m.predict_proba(X) for m in models])
    return np.clip(Q, EPS_Q, 1.0 - EPS_Q)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_numeric_csv(path) -> np.ndarray:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise ParseError(f"{path} is empty")
    if not any(_is_number(c) for c in rows[0]):
        rows = rows[1:]  # header
    if not rows:
        raise ParseError(f"{path} has a header but no data")
    if len({len(r) for r in rows}) != 1:
        raise ParseError(f"{path}: rows have differing column counts")
    try:
        return np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def ingest_q(path, C: CodeMatrix | None = None) -> np.ndarray:
    """Read a Q-matrix CSV (N rows, M columns, optional header) and clip it."""
    Q = read_numeric_csv(path)
    if C is not None and Q.shape[1] != C.M:
        raise DimensionMismatch(f"{path} has {Q.shape[1]} columns, code matrix has M={C.M}")
    if not np.isfinite(Q).all() or (Q < 0).any() or (Q > 1).any():
        raise InvalidProbability(f"{path}: values must lie in [0, 1]")
    return clip_probabilities(Q)


def read_labels(path) -> np.ndarray:
    y = read_numeric_csv(path)
    if y.shape[1] != 1:
        raise ParseError(f"{path}: expected a single label column")
    y = y[:, 0]
    if not np.all(np.mod(y, 1) == 0):
        raise InvalidLabel(f"{path}: labels must be integers")
    return y.astype(np.int64)


def read_dataset(path, K: int | None = None) -> Dataset:
    """CSV with feature columns followed by an integer label column."""
    arr = read_numeric_csv(path)
    if arr.shape[1] < 2:
        raise ParseError(f"{path}: need at least one feature column and a label column")
    y = arr[:, -1]
    if not np.all(np.mod(y, 1) == 0):
        raise InvalidLabel(f"{path}: labels must be integers")
    y = y.astype(np.int64)
    return Dataset(arr[:, :-1], y, int(K if K is not None else y.max()))


def write_q(path, Q) -> None:
    Q = np.asarray(Q)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"q{j + 1}" for j in range(Q.shape[1])])
        w.writerows([[repr(float(v)) for v in row] for row in Q])


def write_labels(path, y) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label"])
        w.writerows([[int(v)] for v in y])


def write_dataset(path, data: Dataset) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"x{d + 1}" for d in range(data.D)] + ["label"])
        for x, y in zip(data.features, data.labels):
            w.writerow([repr(float(v)) for v in x] + [int(y)])
