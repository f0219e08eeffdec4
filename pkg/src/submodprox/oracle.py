"""Exponential-time reference routines used to check the flow-based code.

Everything here enumerates subsets and refuses inputs beyond a budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import setfn
from .errors import CapacityError, InputError
from .netrep import SINK, SOURCE, FlowNetwork
from .separable import balanced_alpha

TIE_TOL = 1e-10


@dataclass(frozen=True)
class OracleBudget:
    max_d: int = 12
    max_subsets: int = 1 << 20

    def check(self, d: int, extra: int = 0) -> None:
        if d > self.max_d or (1 << (d + extra)) > self.max_subsets:
            raise CapacityError(f"instance with d={d} (+{extra}) exceeds the oracle budget")


DEFAULT_BUDGET = OracleBudget()


@dataclass(frozen=True)
class SFMResult:
    value: float
    minimal: np.ndarray
    maximal: np.ndarray


def brute_sfm(G, d: int | None = None, budget: OracleBudget = DEFAULT_BUDGET) -> SFMResult:
    """Minimize a set function by enumerating all subsets.

    ``G`` is a :class:`SetFunction` or a callable on boolean mask rows.
    Minimal and maximal minimizers are the intersection and union of all
    value-optimal sets, which are optimal themselves for submodular ``G``.
    """
    if d is None:
        d = G.d
    budget.check(d)
    masks = setfn.all_masks(d)
    vals = G.evaluate_masks(masks) if hasattr(G, "evaluate_masks") else np.array([G(m) for m in masks])
    best = float(vals.min())
    opt = masks[vals <= best + TIE_TOL]
    return SFMResult(best, opt.all(axis=0), opt.any(axis=0))


def decomposition_prox(problem, budget: OracleBudget = DEFAULT_BUDGET) -> np.ndarray:
    """Dual levels ``tau`` by the recursive split-on-a-minimizer scheme.

    Uses the same separable pieces and nondecreasing shift as the flow path
    (``prox.reduce``) but minimizes each parametric function exhaustively.
    The returned ``tau`` is un-shifted, like ``prox(...).tau``.
    """
    from .prox import reduce

    d = problem.d
    budget.check(d)
    red = reduce(problem)
    F, pieces = red.F, red.pieces
    tau = np.zeros(d)
    stack = [(np.zeros(d, dtype=bool), np.ones(d, dtype=bool))]
    while stack:
        low, S = stack.pop()
        idx = np.flatnonzero(S)
        k = idx.size
        if k == 0:
            continue
        sub = setfn.all_masks(k)
        full = np.repeat(low[None, :], sub.shape[0], axis=0)
        full[:, idx] |= sub
        base = F.evaluate_masks(low[None, :])[0]
        vals = F.evaluate_masks(full) - base
        alpha = balanced_alpha(pieces, idx, vals[-1])
        ph = pieces.phi_ext(alpha)[idx]
        g = vals - sub @ ph
        best = g.min()
        proper = np.flatnonzero(g[1:-1] <= best + TIE_TOL) + 1
        if proper.size == 0:
            tau[idx] = ph
            continue
        A = sub[proper[np.argmin(sub[proper].sum(axis=1))]]
        inner = np.zeros(d, dtype=bool)
        inner[idx[A]] = True
        stack.append((low, inner))
        stack.append((low | inner, S & ~inner))
    return tau - red.beta * red.b


def decomposition_weights(problem, budget: OracleBudget = DEFAULT_BUDGET) -> np.ndarray:
    from .prox import reduce

    red = reduce(problem)
    tau = decomposition_prox(problem, budget)
    return red.weights(problem.z, tau + red.beta * red.b)


def _cut_matrix(net: FlowNetwork, caps, side: np.ndarray) -> np.ndarray:
    """Cut capacities for boolean source-side rows ``side`` (n_nodes columns)."""
    caps = np.asarray(caps, dtype=float)
    crossing = side[:, net.tails] & ~side[:, net.heads]
    finite = np.where(np.isinf(caps), 0.0, caps)
    vals = crossing.astype(float) @ finite
    if np.isinf(caps).any():
        hits_inf = crossing[:, np.isinf(caps)].any(axis=1)
        vals = np.where(hits_inf, np.inf, vals)
    return vals


def _aux_components(net: FlowNetwork, aux: np.ndarray) -> list[np.ndarray]:
    is_aux = np.zeros(net.n_nodes, dtype=bool)
    is_aux[aux] = True
    parent = {int(v): int(v) for v in aux}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in zip(net.tails.tolist(), net.heads.tolist()):
        if is_aux[u] and is_aux[v]:
            parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in aux.tolist():
        groups.setdefault(find(v), []).append(v)
    return [np.array(g, dtype=np.int64) for g in groups.values()]


def verify_representation(net: FlowNetwork, F, tol: float = 1e-9,
                          budget: OracleBudget = OracleBudget(max_d=20)) -> bool:
    """Check ``F(A) == min_Y cut({s} | A | Y) + offset`` for every ``A``.

    Auxiliary nodes joined by arcs are enumerated together; separate groups
    only interact through the fixed terminal and data nodes, so the minimum
    over ``Y`` is the sum of the per-group minima.  Each group together with
    the data nodes must fit the enumeration budget.
    """
    d = net.d
    aux = np.flatnonzero(net.node_data < 0)
    aux = aux[(aux != SOURCE) & (aux != SINK)]
    if np.any(net.params >= 0):
        raise InputError("representation check expects a network without parametric arcs")
    comps = _aux_components(net, aux)
    widest = max((c.size for c in comps), default=0)
    if d + widest > 20:
        raise CapacityError(f"d + |W| = {d + widest} exceeds 20")
    budget.check(d, widest)
    data_nodes = np.empty(d, dtype=np.int64)
    data_nodes[net.node_data[net.node_data >= 0]] = np.flatnonzero(net.node_data >= 0)
    A_masks = setfn.all_masks(d)
    side = np.zeros((A_masks.shape[0], net.n_nodes), dtype=bool)
    side[:, SOURCE] = True
    side[:, data_nodes] = A_masks
    is_aux = np.zeros(net.n_nodes, dtype=bool)
    is_aux[aux] = True
    touches = is_aux[net.tails] | is_aux[net.heads]
    total = _cut_matrix(_arc_subset(net, ~touches), net.caps[~touches], side)
    for comp in comps:
        in_comp = np.zeros(net.n_nodes, dtype=bool)
        in_comp[comp] = True
        arcs = in_comp[net.tails] | in_comp[net.heads]
        sub = _arc_subset(net, arcs)
        Y = setfn.all_masks(comp.size)
        best = np.full(A_masks.shape[0], np.inf)
        for y in Y:
            side[:, comp] = y
            best = np.minimum(best, _cut_matrix(sub, net.caps[arcs], side))
        side[:, comp] = False
        total = total + best
    target = F.evaluate_masks(A_masks)
    return bool(np.all(np.abs(total + net.offset - target) <= tol))


def _arc_subset(net: FlowNetwork, keep: np.ndarray) -> FlowNetwork:
    return FlowNetwork(net.d, net.n_nodes, net.tails[keep], net.heads[keep], net.caps[keep],
                       net.params[keep], net.node_data, net.offset)


@dataclass(frozen=True)
class MinCutResult:
    value: float
    optimal_sides: list


def brute_mincut(net: FlowNetwork, caps=None, phi=None,
                 budget: OracleBudget = OracleBudget(max_d=20)) -> MinCutResult:
    """Enumerate every s-t cut; return the minimum and all optimal source sides."""
    inner = [v for v in range(net.n_nodes) if v not in (SOURCE, SINK)]
    budget.check(len(inner))
    if caps is None:
        caps = net.capacities(phi)
    masks = setfn.all_masks(len(inner))
    side = np.zeros((masks.shape[0], net.n_nodes), dtype=bool)
    side[:, SOURCE] = True
    side[:, inner] = masks
    vals = _cut_matrix(net, caps, side)
    best = float(vals.min())
    tol = 1e-9 * max(1.0, abs(best))
    opt = [frozenset(np.flatnonzero(row).tolist()) for row in side[vals <= best + tol]]
    return MinCutResult(best, opt)


def fused_1d_oracle(z, lam: float, weights=None) -> np.ndarray:
    """Exact prox of ``lam * sum_k a_k |w_{k+1} - w_k|`` on a chain.

    Dynamic program over the derivative of the message function: each stage
    stores the knots of a piecewise-linear increasing derivative, clips it to
    ``[-lam a_k, lam a_k]`` and adds the next quadratic.  The clip points give
    the backtracking intervals.
    """
    z = np.asarray(z, dtype=float).ravel()
    n = z.size
    if n == 0:
        return z.copy()
    a = np.ones(n - 1) if weights is None else np.asarray(weights, dtype=float)
    if a.shape != (n - 1,) or np.any(a < 0):
        raise InputError("chain weights must be nonnegative with length d - 1")
    lam = float(lam)
    # derivative of the message: base linear piece (slope, offset) left of all
    # knots, plus (slope, offset) increments at each knot position
    pos: list[float] = []
    dslope: list[float] = []
    doff: list[float] = []
    base_slope, base_off = 1.0, -z[0]
    lo_clip = np.empty(n - 1)
    hi_clip = np.empty(n - 1)
    for k in range(n - 1):
        t = lam * a[k]
        left = _solve_level(pos, dslope, doff, base_slope, base_off, -t)
        right = _solve_level(pos, dslope, doff, base_slope, base_off, t)
        lo_clip[k], hi_clip[k] = left, right
        s_in, o_in = _piece_at(pos, dslope, doff, base_slope, base_off, left)
        keep = [i for i, p in enumerate(pos) if left < p < right]
        pos = [left] + [pos[i] for i in keep]
        dslope = [s_in] + [dslope[i] for i in keep]
        doff = [o_in + t] + [doff[i] for i in keep]
        s_end, o_end = _piece_at(pos, dslope, doff, 0.0, -t, right)
        pos.append(right)
        dslope.append(-s_end)
        doff.append(t - o_end)
        # clipped derivative plus that of 0.5 (b - z_{k+1})^2
        base_slope, base_off = 1.0, -t - z[k + 1]
    b = np.empty(n)
    b[-1] = _solve_level(pos, dslope, doff, base_slope, base_off, 0.0)
    for k in range(n - 2, -1, -1):
        b[k] = min(max(b[k + 1], lo_clip[k]), hi_clip[k])
    return b


def _piece_at(pos, dslope, doff, s, o, x):
    # linear piece of the derivative just right of x
    for p, ds, do in zip(pos, dslope, doff):
        if p <= x:
            s += ds
            o += do
        else:
            break
    return s, o


def _solve_level(pos, dslope, doff, s, o, level):
    # derivative is continuous and increasing; find x with value == level
    for i in range(len(pos) + 1):
        right = pos[i] if i < len(pos) else np.inf
        if s > 0:
            x = (level - o) / s
            left = pos[i - 1] if i > 0 else -np.inf
            slack = 1e-12 * (1.0 + abs(x))
            if left - slack <= x <= right + slack:
                return min(max(x, left), right)
        elif o == level:
            return pos[i - 1] if i > 0 else right
        if i < len(pos):
            s += dslope[i]
            o += doff[i]
    raise InputError("derivative level not attained")
