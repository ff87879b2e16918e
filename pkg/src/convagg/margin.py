"""Large-margin view of the aggregation problem.

With ``s_ik = w . phi_i^{k, y_i}`` (the true-class discrepancy minus the
class-k discrepancy), the multiclass hinge loss is
``h_i = max_k (1 - delta(y_i, k) + s_ik)`` and the margin is
``nu_i = min_{k != y_i} (rho_k - rho_{y_i}) = -max_{k != y_i} s_ik``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .discrepancy import PhiTensor
from .errors import InvalidBoundParameter, ShapeError
from .objective import ObjectiveConfig, cost_shift, eval_objective
from .pdip import SolverOptions, solve

DEFAULT_TAUS = (1, 2, 4, 8, 16, 32, 64)


@dataclass
class MarginReport:
    margins: np.ndarray
    hinge_values: np.ndarray
    objective: float


@dataclass
class BoundReport:
    B: float
    empirical_loss: float
    complexity_term: float
    confidence_term: float
    total: float

    def to_dict(self) -> dict:
        return {k: float(v) for k, v in asdict(self).items()}


def _scores(w, phi: PhiTensor) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (phi.M,):
        raise ShapeError(f"w has shape {w.shape}, expected ({phi.M},)")
    return phi.values @ w


def _true_mask(phi: PhiTensor) -> np.ndarray:
    mask = np.zeros((phi.N, phi.K), dtype=bool)
    mask[np.arange(phi.N), phi.labels - 1] = True
    return mask


def margins(w, phi: PhiTensor) -> np.ndarray:
    s = _scores(w, phi)
    return -np.where(_true_mask(phi), -np.inf, s).max(axis=1)


def hinge_and_margin(w, phi: PhiTensor, lam: float = 0.0) -> MarginReport:
    s = _scores(w, phi)
    h = (cost_shift(phi) + s).max(axis=1)
    nu = -np.where(_true_mask(phi), -np.inf, s).max(axis=1)
    w = np.asarray(w, dtype=float)
    return MarginReport(nu, h, float(h.mean() + 0.5 * lam * (w @ w)))


def ramp(z) -> np.ndarray:
    return np.clip(1.0 - np.asarray(z, dtype=float), 0.0, 1.0)


def lm_objective(w, phi: PhiTensor, lam: float) -> float:
    return hinge_and_margin(w, phi, lam).objective


def subgradient_solve(phi: PhiTensor, lam: float, step0: float = 1.0, iters: int = 5000,
                      w0=None) -> np.ndarray:
    """Projected subgradient descent on the regularized mean hinge loss.

    Step ``step0 / sqrt(t)``; the hinge subgradient uses the first maximizing
    class.  Returns the iterate with the lowest objective seen.
    """
    N, M = phi.N, phi.M
    w = np.full(M, 1.0 / M) if w0 is None else np.array(w0, dtype=float)
    shift = cost_shift(phi)
    rows = np.arange(N)
    best_w, best_f = w.copy(), np.inf
    for t in range(1, iters + 1):
        xi = shift + phi.values @ w
        k = np.argmax(xi, axis=1)
        f = xi[rows, k].mean() + 0.5 * lam * (w @ w)
        if f < best_f:
            best_f, best_w = f, w.copy()
        g = phi.values[rows, k].sum(axis=0) / N + lam * w
        w = np.maximum(0.0, w - step0 / math.sqrt(t) * g)
    f = lm_objective(w, phi, lam)
    if f < best_f:
        best_w = w.copy()
    return best_w


def tau_annealed_solve(phi: PhiTensor, lam: float, tau_schedule=DEFAULT_TAUS,
                       opts: SolverOptions = SolverOptions(), cost_augmented: bool = True,
                       return_reports: bool = False):
    """Solve the stiffened objective for each tau in turn, warm-starting each stage.

    Each stage starts from the previous stage's primal and dual solution.
    """
    taus = list(tau_schedule)
    if not taus or taus[0] != 1 or any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("tau schedule must start at 1 and increase strictly")
    w0 = z0 = None
    reports = []
    for tau in taus:
        cfg = ObjectiveConfig(lam=lam, tau=tau, cost_augmented=cost_augmented)
        rep = solve(phi, lam, opts, cfg=cfg, w0=w0, z0=z0)
        reports.append(rep)
        w0, z0 = rep.w_star, rep.z_star
    w = reports[-1].w_star
    return (w, reports) if return_reports else w


def _l_tau_excess(w, phi: PhiTensor, tau: float) -> np.ndarray:
    """Per-example l_tau - h, computed as (1/tau) log sum exp(tau (xi - max xi))."""
    xi = cost_shift(phi) + _scores(w, phi)
    top = xi.max(axis=1, keepdims=True)
    return np.log(np.exp(tau * (xi - top)).sum(axis=1)) / tau


def sandwich_gap(w, phi: PhiTensor, tau: float) -> float:
    """Largest per-example gap between the stiffened log-sum-exp and the hinge loss.

    Always within [0, log(K) / tau].
    """
    if tau < 1:
        raise ValueError("tau must be >= 1")
    return float(_l_tau_excess(w, phi, tau).max())


def f_tau(w, phi: PhiTensor, lam: float, tau: float) -> float:
    return eval_objective(w, phi, ObjectiveConfig(lam=lam, tau=tau, cost_augmented=True),
                          want_hessian=False).value


def generalization_bound(w, phi: PhiTensor, B: float | None = None,
                         epsilon: float = 0.05) -> BoundReport:
    """Ramp-loss generalization bound for weight vectors with norm at most ``B``.

    ``B`` defaults to ``|w|``.
    """
    w = np.asarray(w, dtype=float)
    norm = float(np.linalg.norm(w))
    B = norm if B is None else float(B)
    if norm > B:
        raise InvalidBoundParameter(f"|w| = {norm:.6g} exceeds B = {B:.6g}")
    if not 0 < epsilon < 1:
        raise InvalidBoundParameter("epsilon must lie in (0, 1)")
    N = phi.N
    empirical = float(ramp(margins(w, phi)).mean())
    sq = (phi.values ** 2).sum(axis=2)
    sq[_true_mask(phi)] = np.inf
    complexity = 2.0 * B / N * math.sqrt(float(sq.min(axis=1).sum()))
    confidence = math.sqrt(9.0 * math.log(2.0 / epsilon) / (2.0 * N))
    return BoundReport(B, empirical, complexity, confidence, empirical + complexity + confidence)
