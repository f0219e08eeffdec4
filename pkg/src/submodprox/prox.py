"""Proximal operator of submodular penalties through parametric max-flow.

For a nondecreasing ``F`` the penalty is the dual-ball norm whose unit
dual ball is ``{s : |s|^r in P(F)}``; for ``p = inf`` this is the Lovasz
extension at ``|w|``.  For other submodular ``F`` (cuts, hypergraph cuts)
only ``p = inf`` is supported and the penalty is the Lovasz extension at
``w`` itself, e.g. total variation ``sum a_ij |w_i - w_j|`` for a cut.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import netrep, paraflow, setfn
from .errors import InputError, UnsupportedPenaltyError
from .maxflow import Counters
from .separable import Pieces, balanced_alpha, conjugate_exponent

__all__ = ["ProxProblem", "ProxResult", "SolveReport", "prox", "psi", "psi_prime", "phi",
           "penalty_value_linf", "balanced_alpha", "Pieces"]


def psi(tau, pieces: Pieces) -> np.ndarray:
    return pieces.psi(tau)


def psi_prime(tau, pieces: Pieces) -> np.ndarray:
    return pieces.psi_prime(tau)


def phi(alpha: float, pieces: Pieces) -> np.ndarray:
    return pieces.phi(alpha)


@dataclass
class ProxProblem:
    z: np.ndarray
    lam: float
    penalty: setfn.SetFunction
    p: float = math.inf

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float).ravel()
        self.lam = float(self.lam)
        self.p = float(self.p)
        if not np.all(np.isfinite(self.z)):
            raise InputError("z must be finite")
        if not self.lam > 0:
            raise InputError(f"lambda must be positive, got {self.lam}")
        if not self.p > 1:
            raise InputError(f"p must be in (1, inf], got {self.p}")
        if self.penalty.d != self.z.size:
            raise InputError(f"penalty has d={self.penalty.d} but z has length {self.z.size}")

    @property
    def r(self) -> float:
        return conjugate_exponent(self.p)

    @property
    def d(self) -> int:
        return self.z.size


@dataclass
class SolveReport:
    breakpoints: int
    counters: Counters
    wall_time: float
    beta: float = 0.0
    monotone_penalty: bool = True
    n_flows: int = 0
    chain: paraflow.CutChain | None = field(default=None, repr=False)

    def to_json(self) -> dict:
        return {
            "breakpoints": self.breakpoints,
            "pushes": self.counters.pushes,
            "relabels": self.counters.relabels,
            "global_relabels": self.counters.global_relabels,
            "max_flows": self.n_flows,
            "wall_time": self.wall_time,
            "beta": self.beta,
            "monotone_penalty": self.monotone_penalty,
        }


@dataclass
class ProxResult:
    w: np.ndarray
    tau: np.ndarray
    report: SolveReport


@dataclass(frozen=True)
class Reduction:
    """Everything the parametric solve needs, plus how to map ``tau`` back to ``w``."""

    F: setfn.SetFunction
    pieces: Pieces
    beta: float
    b: np.ndarray
    monotone: bool

    def weights(self, z, tau) -> np.ndarray:
        lam = self.pieces.lam
        if self.monotone:
            T = self.pieces.T
            t = np.clip(tau, 0.0, T)
            w = np.sign(z) * (np.abs(z) - lam * t ** (1.0 / self.pieces.r))
            w[tau >= T] = 0.0
            return w
        return z - lam * (tau - self.beta * self.b)


def reduce(problem: ProxProblem) -> Reduction:
    """Choose the separable pieces and the (possibly shifted) set function."""
    F = problem.penalty
    r = problem.r
    if setfn.is_nondecreasing(F):
        return Reduction(F, Pieces.for_signal(problem.z, problem.lam, r), 0.0,
                         np.zeros(problem.d), True)
    if r != 1.0:
        raise UnsupportedPenaltyError(
            "penalty set function is not nondecreasing; only p = inf is supported for it")
    Fs, shift = netrep.make_nondecreasing(F)
    y = problem.z + problem.lam * shift.beta * shift.b
    return Reduction(Fs, Pieces(y, problem.lam, 1.0, capped=False), shift.beta, shift.b, False)


def prox(problem: ProxProblem, global_relabel: bool = True) -> ProxResult:
    """``argmin_w 0.5 ||z - w||^2 + lam * Omega(w)`` and its dual levels ``tau``."""
    start = time.perf_counter()
    red = reduce(problem)
    net = netrep.with_parametric_arcs(netrep.represent(red.F))
    res = paraflow.solve_parametric(net, red.pieces, global_relabel=global_relabel)
    tau = paraflow.recover_tau(res.chain, red.pieces, red.F)
    w = red.weights(problem.z, tau)
    report = SolveReport(len(res.chain), res.counters, time.perf_counter() - start,
                         red.beta, red.monotone, res.n_flows, res.chain)
    return ProxResult(w, tau - red.beta * red.b, report)


def penalty_value_linf(w, F: setfn.SetFunction) -> float:
    """Penalty value for ``p = inf``: Lovasz extension at ``|w|`` or at ``w``."""
    w = np.asarray(w, dtype=float)
    if w.shape != (F.d,):
        raise InputError(f"w has shape {w.shape}, expected ({F.d},)")
    if isinstance(F, (setfn.GraphCut, setfn.HypergraphCut)):
        return F.total_variation(w)
    if setfn.is_nondecreasing(F):
        return setfn.lovasz(F, np.abs(w))
    if F.d <= setfn.SUBMODULAR_MAX_D and not setfn.is_submodular(F):
        raise UnsupportedPenaltyError("penalty value needs a submodular set function")
    return setfn.lovasz(F, w)
