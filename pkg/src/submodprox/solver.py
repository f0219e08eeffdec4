"""Accelerated proximal gradient for penalized least squares."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import setfn
from .errors import InputError, NumericalError
from .prox import ProxProblem, penalty_value_linf, prox

POWER_ITERS = 30
LIPSCHITZ_SAFETY = 1.1
FIXED_POINT_TOL = 1e-5
STEP_TOL = 1e-10


@dataclass
class LeastSquaresTask:
    X: np.ndarray
    y: np.ndarray
    lam: float
    penalty: setfn.SetFunction
    p: float = math.inf
    max_iters: int = 500
    tolerance: float = 1e-12

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.y = np.asarray(self.y, dtype=float).ravel()
        n, d = self.X.shape
        if self.y.size != n:
            raise InputError(f"X has {n} rows but y has {self.y.size} entries")
        if self.penalty.d != d:
            raise InputError(f"penalty has d={self.penalty.d}, X has {d} columns")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise InputError("X and y must be finite")
        if self.lam < 0:
            raise InputError("lambda must be nonnegative")


@dataclass
class FistaResult:
    w: np.ndarray
    objective: list = field(default_factory=list)
    iterations: int = 0
    restarts: int = 0
    fixed_point_residual: float = 0.0
    lipschitz: float = 0.0


def lipschitz_constant(X: np.ndarray, seed: int = 0) -> float:
    """Largest eigenvalue of ``X^T X`` by power iteration, times a safety factor."""
    v = np.random.default_rng(seed).standard_normal(X.shape[1])
    v /= np.linalg.norm(v) or 1.0
    ev = 0.0
    for _ in range(POWER_ITERS):
        u = X.T @ (X @ v)
        ev = float(np.linalg.norm(u))
        if ev == 0.0:
            break
        v = u / ev
    return LIPSCHITZ_SAFETY * ev


def fista(task: LeastSquaresTask, seed: int = 0) -> FistaResult:
    """FISTA with momentum restart.

    Stops once the relative objective change is below ``task.tolerance`` and
    the last step is negligible, or after ``task.max_iters`` iterations.

    The objective ``0.5 ||Xw - y||^2 + lam * Omega(w)`` drives the restart.
    For ``p = inf`` the penalty is evaluated directly; for finite ``p`` it is
    read off the prox optimality condition, which is exact because the
    penalty is positively homogeneous.
    """
    X, y, lam = task.X, task.y, float(task.lam)
    d = X.shape[1]
    L = lipschitz_constant(X, seed)
    if L == 0.0:
        L = 1.0
    linf = math.isinf(task.p)

    def grad(w):
        return X.T @ (X @ w - y)

    def step(v):
        """Proximal gradient step and the penalty value at its output."""
        u = v - grad(v) / L
        if lam == 0:
            return u, 0.0
        w = prox(ProxProblem(u, lam / L, task.penalty, task.p)).w
        if linf:
            return w, penalty_value_linf(w, task.penalty)
        # (u - w) L / lam is a subgradient of the homogeneous penalty at w
        return w, float((u - w) @ w) * L / lam

    def objective(w, pen):
        r = X @ w - y
        return 0.5 * float(r @ r) + lam * pen

    w = np.zeros(d)
    v = w.copy()
    t = 1.0
    trace = [objective(w, 0.0)]
    restarts = 0
    it = 0
    for it in range(1, task.max_iters + 1):
        w_new, pen = step(v)
        f_new = objective(w_new, pen)
        if f_new > trace[-1]:
            # drop momentum and take a plain proximal step from w
            restarts += 1
            t = 1.0
            w_new, pen = step(w)
            f_new = objective(w_new, pen)
            if f_new > trace[-1]:
                # a plain step cannot descend beyond rounding: w is stationary
                break
        t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        v = w_new + ((t - 1.0) / t_new) * (w_new - w)
        change = abs(trace[-1] - f_new) / max(1.0, abs(f_new))
        step_size = float(np.linalg.norm(w_new - w))
        w, t = w_new, t_new
        trace.append(f_new)
        if change < task.tolerance and step_size <= STEP_TOL * max(1.0, float(np.linalg.norm(w))):
            break
    residual = float(np.linalg.norm(step(w)[0] - w))
    if not np.all(np.isfinite(w)):
        raise NumericalError("FISTA iterate is not finite")
    return FistaResult(w, trace, it, restarts, residual, L)
