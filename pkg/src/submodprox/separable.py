"""Separable convex pieces of the dual problem and their inverse derivatives.

Two kinds of pieces occur:

* capped pieces for nondecreasing penalties, with signal ``y = |z|`` and
  threshold ``T = (y / lam) ** r``.  ``psi`` is constant beyond ``T``.
* uncapped quadratic pieces (``r = 1``) for the total-variation type penalties,
  ``psi(t) = lam**2 t**2 / 2 - lam * y * t`` with a signed effective signal ``y``.

``phi`` is the inverse of ``psi'``.  Internally it is continued past ``alpha = 0``
by ``T + alpha`` so that every coordinate has a finite level even when the base
polytope forces ``tau > T``; those coordinates are thresholded to zero anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InputError, NumericalError

BISECT_TOL = 1e-8
BISECT_MAXITER = 200


def conjugate_exponent(p) -> float:
    """``r`` with ``1/p + 1/r = 1``; ``p = inf`` gives ``r = 1``."""
    p = float(p)
    if not p > 1:
        raise InputError(f"p must be in (1, inf], got {p}")
    return 1.0 if math.isinf(p) else p / (p - 1.0)


@dataclass(frozen=True, eq=False)
class Pieces:
    """Vector of separable pieces sharing ``lam`` and ``r``."""

    y: np.ndarray
    lam: float
    r: float = 1.0
    capped: bool = True

    def __post_init__(self):
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=float)))
        if not self.lam > 0:
            raise InputError(f"lambda must be positive, got {self.lam}")
        if self.r < 1:
            raise InputError(f"r must be >= 1, got {self.r}")
        if self.capped and np.any(self.y < 0):
            raise InputError("capped pieces need nonnegative signal |z|")
        if not self.capped and self.r != 1.0:
            raise InputError("uncapped pieces are only defined for r = 1")

    @classmethod
    def for_signal(cls, z, lam: float, r: float = 1.0) -> "Pieces":
        return cls(np.abs(np.asarray(z, dtype=float)), float(lam), float(r), True)

    @property
    def d(self) -> int:
        return self.y.size

    @property
    def T(self) -> np.ndarray:
        if not self.capped:
            return np.full(self.d, np.inf)
        return (self.y / self.lam) ** self.r

    def subset(self, idx) -> "Pieces":
        return Pieces(self.y[idx], self.lam, self.r, self.capped)

    # ------------------------------------------------------------ psi

    def psi(self, tau) -> np.ndarray:
        tau = self._check_tau(tau)
        lam, y, r = self.lam, self.y, self.r
        if not self.capped:
            return 0.5 * lam**2 * tau**2 - lam * y * tau
        u = np.minimum(tau, self.T) ** (1.0 / r)
        return 0.5 * lam**2 * u**2 - lam * y * u

    def psi_prime(self, tau) -> np.ndarray:
        tau = self._check_tau(tau)
        lam, y, r = self.lam, self.y, self.r
        if not self.capped:
            return lam**2 * tau - lam * y
        out = np.zeros_like(tau)
        inside = tau < self.T
        t, yy = tau[inside], y[inside]
        with np.errstate(divide="ignore"):
            u = t ** (1.0 / r)
            out[inside] = (lam**2 * u - lam * yy) / (r * t ** (1.0 - 1.0 / r)) if r != 1 \
                else lam**2 * t - lam * yy
        return out

    def _check_tau(self, tau) -> np.ndarray:
        tau = np.broadcast_to(np.asarray(tau, dtype=float), self.y.shape).copy()
        if np.any(tau < 0):
            raise InputError("psi is defined for tau >= 0 only")
        return tau

    # ------------------------------------------------------------ phi

    def phi(self, alpha: float) -> np.ndarray:
        """Inverse of ``psi'`` on ``alpha <= 0`` (capped) or all ``alpha`` (uncapped)."""
        if self.capped and alpha > 0:
            raise InputError(f"phi of a capped piece needs alpha <= 0, got {alpha}")
        return self.phi_ext(alpha)

    def phi_ext(self, alpha: float) -> np.ndarray:
        """``phi`` continued by ``T + alpha`` for positive ``alpha``."""
        lam, y, r = self.lam, self.y, self.r
        if alpha == -math.inf:
            return np.zeros(self.d)
        if not self.capped or r == 1.0:
            out = np.maximum(0.0, alpha / lam**2 + y / lam)
            if self.capped and alpha > 0:
                out = self.T + alpha
            return out
        if alpha > 0:
            return self.T + alpha
        if r == 2.0:
            return (lam * y / (lam**2 - 2.0 * alpha)) ** 2
        return self._phi_bisect(alpha)

    def zero_until(self) -> np.ndarray:
        """Largest ``alpha`` with ``phi_ext(alpha) == 0`` per piece (``-inf`` if none)."""
        if not self.capped or self.r == 1.0:
            return -self.lam * self.y
        return np.where(self.y > 0, -np.inf, 0.0)

    def _phi_bisect(self, alpha: float) -> np.ndarray:
        # solve (lam^2 u - lam y) / (r u^(r-1)) = alpha for u in (0, y/lam), tau = u^r
        lam, y, r = self.lam, self.y, self.r
        if alpha == 0:
            return self.T.copy()
        lo = np.zeros(self.d)
        hi = y / lam
        for _ in range(BISECT_MAXITER):
            mid = 0.5 * (lo + hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                g = (lam**2 * mid - lam * y) / (r * mid ** (r - 1.0))
            up = g < alpha
            lo = np.where(up, mid, lo)
            hi = np.where(up, hi, mid)
            if np.all(hi - lo <= 1e-15 * np.maximum(1.0, hi)):
                break
        return (0.5 * (lo + hi)) ** r


def balanced_alpha(pieces: Pieces, idx, c: float) -> float:
    """``alpha`` with ``sum_{i in idx} phi_i(alpha) = c`` using the continued ``phi``.

    Returns ``-inf`` when ``c <= 0`` and every piece is positive for all
    finite ``alpha``; for water-filling pieces it returns the largest ``alpha``
    at which the sum is still zero.
    """
    idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
    if idx.size == 0:
        raise InputError("balance needs a nonempty set")
    P = pieces.subset(idx)
    lam, y = P.lam, P.y
    c = float(c)
    if P.capped:
        total_T = float(P.T.sum())
        if c >= total_T:
            return (c - total_T) / idx.size
    if not P.capped or P.r == 1.0:
        return lam**2 * _water_level(y / lam, c)
    if c <= 0:
        return -math.inf
    if P.r == 2.0:
        return 0.5 * (lam**2 - lam * math.sqrt(float(np.sum(y**2)) / c))
    return _bisect_alpha(P, c)


def _water_level(q: np.ndarray, c: float) -> float:
    """``a`` with ``sum(max(0, a + q)) = c``; the largest ``a`` with sum 0 if ``c <= 0``."""
    q = np.sort(q)[::-1]
    if c <= 0:
        return -float(q[0])
    csum = np.cumsum(q)
    k = np.arange(1, q.size + 1)
    a = (c - csum) / k
    nxt = np.append(q[1:], -np.inf)
    ok = (a + q >= 0) & (a + nxt <= 0)
    hits = np.flatnonzero(ok)
    j = int(hits[0]) if hits.size else q.size - 1
    return float(a[j])


def _bisect_alpha(P: Pieces, c: float) -> float:
    f = lambda a: float(P.phi_ext(a).sum()) - c
    hi = 0.0
    lo = -1.0
    for _ in range(BISECT_MAXITER):
        if f(lo) < 0:
            break
        hi, lo = lo, 2.0 * lo
    else:
        raise NumericalError(f"could not bracket the balance level for c={c}")
    return brentq(f, lo, hi, xtol=BISECT_TOL * 1e-2, rtol=4 * np.finfo(float).eps,
                  maxiter=BISECT_MAXITER)
