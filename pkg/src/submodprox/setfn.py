"""Set functions behind structured sparsity penalties.

Every set function here is defined on the ground set ``{0, ..., d-1}`` and is
normalized so that ``F(empty) == 0``.  Subsets may be passed either as an
iterable of indices or as a boolean mask of length ``d``; all variants
evaluate many subsets at once through :meth:`SetFunction.evaluate_masks`,
which takes a ``(k, d)`` boolean matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, InputError

MOBIUS_MAX_D = 20
SUBMODULAR_MAX_D = 12
SUBMODULAR_TOL = 1e-9


def as_mask(A, d: int) -> np.ndarray:
    """Boolean membership vector of ``A`` (indices or mask) in ``{0..d-1}``."""
    if isinstance(A, np.ndarray) and A.dtype == bool:
        if A.shape != (d,):
            raise InputError(f"mask has shape {A.shape}, expected ({d},)")
        return A
    idx = np.fromiter((int(i) for i in A), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= d):
        raise InputError(f"subset index out of range for ground set of size {d}")
    m = np.zeros(d, dtype=bool)
    m[idx] = True
    return m


def all_masks(d: int) -> np.ndarray:
    """All ``2**d`` subsets as a boolean matrix; row ``k`` has bit ``i`` of ``k``."""
    k = np.arange(1 << d, dtype=np.int64)
    return ((k[:, None] >> np.arange(d)) & 1).astype(bool)


def _index_array(members, d: int) -> np.ndarray:
    idx = np.unique(np.asarray(list(members), dtype=np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= d):
        raise InputError(f"member index out of range for ground set of size {d}")
    return idx


class SetFunction:
    """Base class.  Subclasses implement :meth:`evaluate_masks`."""

    d: int

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, A) -> float:
        return self.eval(A)

    def eval(self, A) -> float:
        m = as_mask(A, self.d)
        return float(self.evaluate_masks(m[None, :])[0])

    def table(self) -> np.ndarray:
        """Values on all subsets, indexed by bitmask (``d <= 20``)."""
        if self.d > MOBIUS_MAX_D:
            raise CapacityError(f"d={self.d} too large for full enumeration")
        return self.evaluate_masks(all_masks(self.d))

    def __add__(self, other: "SetFunction") -> "Sum":
        return Sum((self, other))


@dataclass(frozen=True, eq=False)
class GroupCover(SetFunction):
    """``F(A) = sum_g w_g * min(|A & g|, 1)``; zero-weight groups are dropped."""

    d: int
    groups: tuple = ()

    def __init__(self, d: int, groups: Iterable[tuple[float, Iterable[int]]]):
        kept = []
        for w, members in groups:
            w = float(w)
            if w < 0 or not np.isfinite(w):
                raise InputError(f"group weight must be nonnegative and finite, got {w}")
            idx = _index_array(members, d)
            if w > 0 and idx.size:
                kept.append((w, idx))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "groups", tuple(kept))

    def evaluate_masks(self, masks):
        out = np.zeros(masks.shape[0])
        for w, idx in self.groups:
            out += w * masks[:, idx].any(axis=1)
        return out


@dataclass(frozen=True, eq=False)
class GraphCut(SetFunction):
    """Undirected cut function ``F(A) = sum_{i in A, j notin A} a_ij``."""

    d: int
    edges: tuple = ()

    def __init__(self, d: int, edges: Iterable[tuple[int, int, float]]):
        rows = []
        for i, j, a in edges:
            i, j, a = int(i), int(j), float(a)
            if not (0 <= i < d and 0 <= j < d):
                raise InputError(f"edge ({i}, {j}) out of range for d={d}")
            if a < 0 or not np.isfinite(a):
                raise InputError(f"edge weight must be nonnegative and finite, got {a}")
            if i != j and a > 0:
                rows.append((i, j, a))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "edges", tuple(rows))

    @property
    def arrays(self):
        if not self.edges:
            return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
        i, j, a = zip(*self.edges)
        return np.array(i), np.array(j), np.array(a, dtype=float)

    def evaluate_masks(self, masks):
        i, j, a = self.arrays
        return (masks[:, i] != masks[:, j]).astype(float) @ a

    def total_variation(self, w) -> float:
        i, j, a = self.arrays
        w = np.asarray(w, dtype=float)
        return float(a @ np.abs(w[i] - w[j]))


@dataclass(frozen=True, eq=False)
class HypergraphCut(SetFunction):
    """``F(A) = sum of a_e over hyperedges e that A cuts``."""

    d: int
    hyperedges: tuple = ()

    def __init__(self, d: int, hyperedges: Iterable[tuple[float, Iterable[int]]]):
        kept = []
        for a, members in hyperedges:
            a = float(a)
            if a < 0 or not np.isfinite(a):
                raise InputError(f"hyperedge weight must be nonnegative and finite, got {a}")
            idx = _index_array(members, d)
            if a > 0 and idx.size >= 2:
                kept.append((a, idx))
        object.__setattr__(self, "d", int(d))
        object.__setattr__(self, "hyperedges", tuple(kept))

    def evaluate_masks(self, masks):
        out = np.zeros(masks.shape[0])
        for a, idx in self.hyperedges:
            sub = masks[:, idx]
            out += a * (sub.any(axis=1) & ~sub.all(axis=1))
        return out

    def total_variation(self, w) -> float:
        w = np.asarray(w, dtype=float)
        return float(sum(a * (w[idx].max() - w[idx].min()) for a, idx in self.hyperedges))


def _key(members) -> frozenset:
    return frozenset(int(i) for i in members)


@dataclass(frozen=True, eq=False)
class CubicMobius(SetFunction):
    """Set function given by Mobius coefficients of order at most three.

    ``c1`` maps an index, ``c2`` an index pair and ``c3`` an index triple to a
    coefficient.  The constant ``c0`` is accepted for completeness but dropped
    so that ``F(empty) == 0``.
    """

    d: int
    c1: Mapping = field(default_factory=dict)
    c2: Mapping = field(default_factory=dict)
    c3: Mapping = field(default_factory=dict)
    c0: float = 0.0

    def __init__(self, d: int, c1=None, c2=None, c3=None, c0: float = 0.0):
        object.__setattr__(self, "d", int(d))
        terms = {}
        for order, coeffs in ((1, c1), (2, c2), (3, c3)):
            for members, c in (coeffs or {}).items():
                if order == 1 and not isinstance(members, (tuple, list, frozenset, set)):
                    members = (members,)
                key = _key(members)
                if len(key) != order:
                    raise InputError(f"order-{order} coefficient keyed by {sorted(key)}")
                if min(key) < 0 or max(key) >= d:
                    raise InputError(f"coefficient index out of range for d={d}")
                if c:
                    terms[key] = terms.get(key, 0.0) + float(c)
        object.__setattr__(self, "c1", {next(iter(k)): v for k, v in terms.items() if len(k) == 1})
        object.__setattr__(self, "c2", {k: v for k, v in terms.items() if len(k) == 2})
        object.__setattr__(self, "c3", {k: v for k, v in terms.items() if len(k) == 3})
        object.__setattr__(self, "c0", 0.0)

    def evaluate_masks(self, masks):
        out = np.zeros(masks.shape[0])
        for i, c in self.c1.items():
            out += c * masks[:, i]
        for key, c in itertools.chain(self.c2.items(), self.c3.items()):
            out += c * masks[:, sorted(key)].all(axis=1)
        return out


@dataclass(frozen=True, eq=False)
class WeightedTruncation(SetFunction):
    """``F(A) = min(w(A), y)`` with ``w >= 0`` and ``y >= 0``."""

    w: np.ndarray
    y: float

    def __init__(self, w, y: float):
        w = np.asarray(w, dtype=float)
        if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError("truncation weights must be a finite nonnegative vector")
        if y < 0 or not np.isfinite(y):
            raise InputError(f"truncation level must be nonnegative, got {y}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "y", float(y))

    @property
    def d(self) -> int:
        return self.w.size

    def evaluate_masks(self, masks):
        return np.minimum(masks.astype(float) @ self.w, self.y)


@dataclass(frozen=True, eq=False)
class Sum(SetFunction):
    parts: tuple

    def __init__(self, parts: Sequence[SetFunction]):
        parts = tuple(parts)
        if not parts:
            raise InputError("Sum needs at least one part")
        dims = {p.d for p in parts}
        if len(dims) != 1:
            raise InputError(f"Sum parts have mismatched dimensions {sorted(dims)}")
        object.__setattr__(self, "parts", parts)

    @property
    def d(self) -> int:
        return self.parts[0].d

    def evaluate_masks(self, masks):
        return sum(p.evaluate_masks(masks) for p in self.parts)


@dataclass(frozen=True, eq=False)
class Shifted(SetFunction):
    """``F(A) + beta * b(A)``."""

    base: SetFunction
    beta: float
    b: np.ndarray

    def __init__(self, base: SetFunction, beta: float, b):
        b = np.asarray(b, dtype=float)
        if b.shape != (base.d,):
            raise InputError(f"shift vector has shape {b.shape}, expected ({base.d},)")
        if np.any(b < 0):
            raise InputError("shift vector must be nonnegative")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "beta", float(beta))
        object.__setattr__(self, "b", b)

    @property
    def d(self) -> int:
        return self.base.d

    def evaluate_masks(self, masks):
        return self.base.evaluate_masks(masks) + self.beta * (masks.astype(float) @ self.b)


@dataclass(frozen=True, eq=False)
class TableFunction(SetFunction):
    """Arbitrary set function given by its values on all subsets (by bitmask)."""

    values: np.ndarray

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        n = values.size
        d = n.bit_length() - 1
        if n != 1 << d:
            raise InputError(f"table size {n} is not a power of two")
        object.__setattr__(self, "values", values - values[0])

    @property
    def d(self) -> int:
        return self.values.size.bit_length() - 1

    def evaluate_masks(self, masks):
        bits = masks.astype(np.int64) @ (1 << np.arange(self.d, dtype=np.int64))
        return self.values[bits]


# ---------------------------------------------------------------- Mobius


@dataclass
class MobiusTable:
    """Mobius coefficients ``F^(k)(B)`` keyed by the frozenset ``B``."""

    d: int
    coeffs: dict = field(default_factory=dict)
    c0: float = 0.0

    @property
    def order(self) -> int:
        return max((len(k) for k, v in self.coeffs.items() if v != 0), default=0)

    def of_order(self, k: int) -> dict:
        return {B: v for B, v in self.coeffs.items() if len(B) == k and v != 0}

    def reconstruct(self, A) -> float:
        A = frozenset(np.flatnonzero(as_mask(A, self.d)).tolist())
        return self.c0 + sum(v for B, v in self.coeffs.items() if B <= A)

    def add(self, B, value: float) -> None:
        B = frozenset(B)
        if not B:
            self.c0 += value
            return
        v = self.coeffs.get(B, 0.0) + value
        if v == 0.0:
            self.coeffs.pop(B, None)
        else:
            self.coeffs[B] = v

    def __add__(self, other: "MobiusTable") -> "MobiusTable":
        if other.d != self.d:
            raise InputError("Mobius tables of different dimension")
        out = MobiusTable(self.d, dict(self.coeffs), self.c0)
        for B, v in other.coeffs.items():
            out.add(B, v)
        out.c0 += other.c0
        return out

    def to_function(self) -> CubicMobius:
        if self.order > 3:
            raise InputError("only tables of order <= 3 convert to CubicMobius")
        c1 = {next(iter(B)): v for B, v in self.coeffs.items() if len(B) == 1}
        return CubicMobius(self.d, c1, self.of_order(2), self.of_order(3))


def _indicator_union_table(d: int, weight: float, members: np.ndarray) -> MobiusTable:
    # weight * min(|A & e|, 1) has coefficient weight * (-1)^(|Y|+1) on nonempty Y within e
    if members.size > MOBIUS_MAX_D:
        raise CapacityError(f"group of size {members.size} too large for Mobius expansion")
    t = MobiusTable(d)
    for k in range(1, members.size + 1):
        sign = 1.0 if k % 2 else -1.0
        for Y in itertools.combinations(members.tolist(), k):
            t.add(Y, sign * weight)
    return t


def _structured_mobius(F: SetFunction) -> MobiusTable | None:
    d = F.d
    if isinstance(F, GraphCut):
        t = MobiusTable(d)
        for i, j, a in F.edges:
            t.add((i,), a)
            t.add((j,), a)
            t.add((i, j), -2.0 * a)
        return t
    if isinstance(F, HypergraphCut):
        t = MobiusTable(d)
        for a, idx in F.hyperedges:
            t = t + _indicator_union_table(d, a, idx)
            t.add(idx.tolist(), -a)
        return t
    if isinstance(F, GroupCover):
        t = MobiusTable(d)
        for w, idx in F.groups:
            t = t + _indicator_union_table(d, w, idx)
        return t
    if isinstance(F, CubicMobius):
        t = MobiusTable(d)
        for i, v in F.c1.items():
            t.add((i,), v)
        for B, v in itertools.chain(F.c2.items(), F.c3.items()):
            t.add(B, v)
        return t
    if isinstance(F, Shifted):
        base = mobius(F.base)
        for i in np.flatnonzero(F.b):
            base.add((int(i),), F.beta * F.b[i])
        return base
    if isinstance(F, Sum):
        tables = [mobius(p) for p in F.parts]
        out = tables[0]
        for t in tables[1:]:
            out = out + t
        return out
    return None


def mobius_transform(values: np.ndarray) -> np.ndarray:
    """In-place-style fast Mobius inversion over the subset lattice."""
    v = np.array(values, dtype=float)
    d = v.size.bit_length() - 1
    for i in range(d):
        v = v.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return v.reshape(-1)


def mobius(F: SetFunction, tol: float = 1e-12) -> MobiusTable:
    """Mobius coefficients of ``F``.

    Structured variants use closed forms; anything else is inverted from its
    full value table, which needs ``d <= 20``.
    """
    try:
        t = _structured_mobius(F)
    except CapacityError:
        t = None
        if F.d > MOBIUS_MAX_D:
            raise
    if t is not None:
        return t
    if F.d > MOBIUS_MAX_D:
        raise CapacityError(f"d={F.d} exceeds {MOBIUS_MAX_D} and {type(F).__name__} has no closed form")
    coef = mobius_transform(F.table())
    scale = max(1.0, float(np.abs(coef).max()))
    t = MobiusTable(F.d, c0=float(coef[0]))
    for k in np.flatnonzero(np.abs(coef) > tol * scale):
        if k:
            t.coeffs[frozenset(i for i in range(F.d) if (k >> i) & 1)] = float(coef[k])
    return t


# ---------------------------------------------------------------- Lovasz extension


def lovasz(F: SetFunction, w) -> float:
    """Lovasz extension of ``F`` at ``w`` (greedy over the sorted coordinates).

    Ties are broken by ascending index.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (F.d,):
        raise InputError(f"vector has shape {w.shape}, expected ({F.d},)")
    order = np.argsort(-w, kind="stable")
    prefixes = np.zeros((F.d + 1, F.d), dtype=bool)
    for k, j in enumerate(order):
        prefixes[k + 1:, j] = True
    vals = F.evaluate_masks(prefixes)
    return float(w[order] @ np.diff(vals))


def greedy_base(F: SetFunction, w) -> np.ndarray:
    """Greedy vertex of the base polytope for the ordering of ``w`` (descending)."""
    w = np.asarray(w, dtype=float)
    order = np.argsort(-w, kind="stable")
    prefixes = np.zeros((F.d + 1, F.d), dtype=bool)
    for k, j in enumerate(order):
        prefixes[k + 1:, j] = True
    x = np.empty(F.d)
    x[order] = np.diff(F.evaluate_masks(prefixes))
    return x


def is_submodular(F: SetFunction, tol: float = SUBMODULAR_TOL) -> bool:
    """Exhaustive check of the diminishing-returns inequalities (``d <= 12``).

    Checking ``F(A+i) + F(A+j) >= F(A+i+j) + F(A)`` for all ``A`` and
    ``i, j`` outside ``A`` is equivalent to the pairwise lattice inequality.
    """
    d = F.d
    if d > SUBMODULAR_MAX_D:
        raise CapacityError(f"d={d} exceeds {SUBMODULAR_MAX_D} for the exhaustive check")
    v = F.table()
    k = np.arange(1 << d)
    for i in range(d):
        for j in range(i + 1, d):
            base = k[((k >> i) & 1 == 0) & ((k >> j) & 1 == 0)]
            gap = v[base | (1 << i)] + v[base | (1 << j)] - v[base | (1 << i) | (1 << j)] - v[base]
            if gap.min() < -tol:
                return False
    return True


def is_nondecreasing(F: SetFunction, tol: float = SUBMODULAR_TOL) -> bool:
    """``F(V - i) <= F(V)`` for every ``i``; sufficient for submodular ``F``."""
    d = F.d
    masks = np.ones((d + 1, d), dtype=bool)
    masks[np.arange(d), np.arange(d)] = False
    vals = F.evaluate_masks(masks)
    return bool(np.all(vals[:d] <= vals[d] + tol))
