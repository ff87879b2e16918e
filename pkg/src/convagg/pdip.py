"""Primal-dual interior-point solver for  min f(w)  s.t.  w >= 0.

The iteration follows the usual perturbed-KKT scheme: the complementarity
target ``mu`` is set adaptively from the surrogate gap ``w @ z``, the Newton
step is reduced to an M x M system by eliminating ``dz`` and solved with
Jacobi-preconditioned CG, and a backtracking line search on the residual
norm keeps ``w > 0`` and ``z >= 0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .discrepancy import PhiTensor
from .errors import SolverBreakdown
from .objective import ObjectiveConfig, ObjectiveEval, eval_objective

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverOptions:
    alpha: float = 0.01
    beta: float = 0.5
    s_min: float = 0.5
    eps_fea: float = 1e-4
    eps_gap: float = 1e-4
    max_iters: int = 200
    pcg_tol: float = 1e-10
    pcg_max: int | None = None  # None -> 10 * M

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise ValueError("alpha must lie in (0, 0.5)")
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if not (self.eps_fea > 0 and self.eps_gap > 0 and self.pcg_tol > 0):
            raise ValueError("tolerances must be positive")


@dataclass
class SolverState:
    w: np.ndarray
    z: np.ndarray
    mu: float
    residual_norm: float
    gap: float
    iter: int = 0


@dataclass
class SolveReport:
    w_star: np.ndarray
    iterations: int
    final_residual: float
    final_gap: float
    objective_trace: list[float] = field(default_factory=list)
    converged: bool = False
    z_star: np.ndarray | None = None
    status: str = ""
    pcg_fallbacks: int = 0


class LineSearchFailure(RuntimeError):
    pass


def residual(w, z, mu: float, gradient) -> tuple[np.ndarray, float]:
    """Stacked residual ``[grad - z; z*w - mu]`` and its 2-norm."""
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    r = np.concatenate([np.asarray(gradient, dtype=float) - z, z * w - mu])
    return r, float(np.linalg.norm(r))


def pcg(A: np.ndarray, b: np.ndarray, tol: float = 1e-10, max_iter: int | None = None,
        ) -> tuple[np.ndarray, bool, int]:
    """Conjugate gradients on SPD ``A`` with the Jacobi preconditioner diag(A).

    Returns ``(x, converged, iterations)``; convergence means
    ``|b - A x| <= tol * |b|``.
    """
    n = b.size
    max_iter = 10 * n if max_iter is None else max_iter
    x = np.zeros(n)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return x, True, 0
    d = np.diag(A).copy()
    if (d <= 0).any():
        return x, False, 0
    inv_d = 1.0 / d
    r = b.copy()
    y = inv_d * r
    p = y.copy()
    ry = r @ y
    for it in range(1, max_iter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0:
            return x, False, it
        a = ry / pAp
        x += a * p
        r -= a * Ap
        if np.linalg.norm(r) <= tol * bnorm:
            # guard against drift of the recursive residual
            if np.linalg.norm(b - A @ x) <= tol * bnorm:
                return x, True, it
            r = b - A @ x
        y = inv_d * r
        ry_new = r @ y
        p = y + (ry_new / ry) * p
        ry = ry_new
    return x, False, max_iter


def _dense_solve(H: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        try:
            return np.linalg.solve(H, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverBreakdown(f"reduced Newton system is singular: {exc}") from exc
    return np.linalg.solve(L.T, np.linalg.solve(L, rhs))


def newton_step(w, z, mu: float, ev: ObjectiveEval, opts: SolverOptions = SolverOptions(),
                stats: dict | None = None) -> tuple[np.ndarray, np.ndarray]:
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    if ev.hessian is None:
        raise ValueError("newton_step needs the Hessian")
    H = ev.hessian + np.diag(z / w)
    g = ev.gradient - mu / w
    dw, ok, _ = pcg(H, -g, opts.pcg_tol, opts.pcg_max)
    if not ok:
        if stats is not None:
            stats["fallbacks"] = stats.get("fallbacks", 0) + 1
        dw = _dense_solve(H, -g)
    if not np.isfinite(dw).all():
        raise SolverBreakdown("non-finite Newton direction")
    dz = -(z / w) * dw - (z * w - mu) / w
    return dw, dz


def max_dual_step(z, dz) -> float:
    neg = dz < 0
    if not neg.any():
        return 1.0
    return float(min(1.0, np.min(-z[neg] / dz[neg])))


def line_search(w, z, dw, dz, mu: float, grad_fn, r_norm: float | None = None,
                opts: SolverOptions = SolverOptions()) -> float:
    """Backtracking step length on the residual norm.

    ``grad_fn(w)`` returns the objective gradient at ``w``.  ``r_norm`` is the
    residual norm at the current point (recomputed if omitted).
    """
    w = np.asarray(w, dtype=float)
    z = np.asarray(z, dtype=float)
    if r_norm is None:
        r_norm = residual(w, z, mu, grad_fn(w))[1]
    s = 0.99 * max_dual_step(z, dz)
    while s >= 1e-12:
        w_new = w + s * dw
        if (w_new > 0).all():
            z_new = z + s * dz
            new_norm = residual(w_new, z_new, mu, grad_fn(w_new))[1]
            if new_norm <= (1 - opts.alpha * s) * r_norm:
                return s
        s *= opts.beta
    raise LineSearchFailure("step length underflow")


def update_mu(gap: float, s: float, M: int, mu: float,
              opts: SolverOptions = SolverOptions()) -> float:
    return gap / (2 * M) if s >= opts.s_min else mu


def solve(phi: PhiTensor, lam: float = 1e-4, opts: SolverOptions = SolverOptions(),
          cfg: ObjectiveConfig | None = None, w0=None, z0=None) -> SolveReport:
    """Minimize the objective over the nonnegative orthant.

    ``cfg`` overrides the objective (defaults to the plain log-likelihood with
    ``lam``).  ``w0``/``z0`` warm-start the iterates; otherwise ``w = 1/M`` and
    ``z = 1``.
    """
    cfg = ObjectiveConfig(lam=lam) if cfg is None else cfg
    M = phi.M
    w = np.full(M, 1.0 / M) if w0 is None else np.array(w0, dtype=float)
    z = np.ones(M) if z0 is None else np.array(z0, dtype=float)
    if (w <= 0).any() or (z < 0).any():
        raise ValueError("initial iterates must satisfy w > 0, z >= 0")

    def grad_fn(x):
        return eval_objective(x, phi, cfg, want_hessian=False).gradient

    mu = float(w @ z) / (2 * M)
    s = 1.0
    ev = eval_objective(w, phi, cfg)
    trace = [ev.value]
    stats: dict = {}
    status = "max-iters"
    it = 0
    r_norm = residual(w, z, mu, ev.gradient)[1]
    converged = False
    while it < opts.max_iters:
        it += 1
        gap = float(w @ z)
        mu = update_mu(gap, s, M, mu, opts)
        r_norm = residual(w, z, mu, ev.gradient)[1]
        dw, dz = newton_step(w, z, mu, ev, opts, stats)
        try:
            s = line_search(w, z, dw, dz, mu, grad_fn, r_norm, opts)
        except LineSearchFailure:
            status = "line-search-failure"
            log.warning("line search failed at iteration %d", it)
            break
        w = w + s * dw
        z = z + s * dz
        ev = eval_objective(w, phi, cfg)
        trace.append(ev.value)
        gap = float(w @ z)
        mu_next = update_mu(gap, s, M, mu, opts)
        r_norm = residual(w, z, mu_next, ev.gradient)[1]
        log.debug("iter %d: f=%.10g |r|=%.3e gap=%.3e s=%.3g", it, ev.value, r_norm, gap, s)
        if r_norm <= opts.eps_fea and gap <= opts.eps_gap:
            converged = True
            status = "converged"
            break
    gap = float(w @ z)
    return SolveReport(
        w_star=w, iterations=it, final_residual=r_norm, final_gap=gap,
        objective_trace=trace, converged=converged, z_star=z, status=status,
        pcg_fallbacks=stats.get("fallbacks", 0),
    )
