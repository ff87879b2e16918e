"""The trained aggregation model and its JSON file format."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .base import BinaryModel, score
from .decode import posterior
from .discrepancy import LossKind, compute_phi
from .encoding import CodeMatrix
from .errors import ParseError
from .pdip import SolveReport, SolverOptions, solve


@dataclass
class AggregationModel:
    weights: np.ndarray
    lam: float
    loss: LossKind
    code: CodeMatrix
    converged: bool = True
    iterations: int = 0
    base_models: list[BinaryModel] = field(default_factory=list)

    @property
    def K(self) -> int:
        return self.code.K

    def posterior(self, Q) -> np.ndarray:
        return posterior(self.weights, self.code, Q, self.loss)

    def q_from_features(self, X) -> np.ndarray:
        if not self.base_models:
            raise ValueError("model carries no base classifiers; supply a Q matrix")
        return score(self.base_models, X)

    def to_dict(self) -> dict:
        d = {
            "weights": [float(v) for v in self.weights],
            "lambda": self.lam,
            "loss": self.loss.value,
            "code_matrix": self.code.to_dict(),
            "K": self.K,
            "converged": self.converged,
            "iterations": self.iterations,
        }
        if self.base_models:
            d["base_models"] = [m.to_dict() for m in self.base_models]
        return d

    @classmethod
    def from_dict(cls, obj: dict) -> "AggregationModel":
        try:
            code = CodeMatrix.from_dict(obj["code_matrix"])
            w = np.asarray(obj["weights"], dtype=float)
            model = cls(w, float(obj["lambda"]), LossKind.parse(obj["loss"]), code,
                        bool(obj.get("converged", True)), int(obj.get("iterations", 0)),
                        [BinaryModel.from_dict(m) for m in obj.get("base_models", [])])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed model file: {exc}") from exc
        if w.shape != (code.M,) or int(obj.get("K", code.K)) != code.K:
            raise ParseError("model weights/K disagree with the embedded code matrix")
        return model

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path) -> "AggregationModel":
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read model {path}: {exc}") from exc
        return cls.from_dict(obj)


def fit(C: CodeMatrix, Q, y, lam: float = 1e-4, loss=LossKind.CROSS_ENTROPY,
        opts: SolverOptions = SolverOptions()) -> tuple[AggregationModel, SolveReport]:
    """Learn aggregation weights from binary probability estimates ``Q`` and labels ``y``."""
    loss = LossKind.parse(loss)
    phi = compute_phi(C, Q, y, loss)
    rep = solve(phi, lam, opts)
    return AggregationModel(rep.w_star, lam, loss, C, rep.converged, rep.iterations), rep


def load_code(path) -> CodeMatrix:
    try:
        with open(path) as fh:
            return CodeMatrix.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read code matrix {path}: {exc}") from exc


def save_code(path, C: CodeMatrix) -> None:
    with open(path, "w") as fh:
        json.dump(C.to_dict(), fh, indent=2)
