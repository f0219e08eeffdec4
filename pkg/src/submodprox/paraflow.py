"""Divide-and-conquer parametric max-flow over the source-arc parameter ``alpha``.

Source arcs ``s -> v`` carry ``phi_v(alpha)``, nondecreasing in ``alpha``; all
other capacities are constant.  Minimum cuts then nest as ``alpha`` grows and
the solver recovers the whole chain of data-node sets with their levels by
repeatedly splitting an interval at the ``alpha`` that balances the two
trivial cuts, warm-starting every max-flow from the flow of the interval's
lower end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import maxflow
from .errors import InputError, NumericalError
from .netrep import SINK, SOURCE, FlowNetwork
from .separable import Pieces, balanced_alpha

TIE_TOL = 1e-10


@dataclass
class CutChain:
    """Nested data sets ``A_1 < A_2 < ...`` with their levels.

    ``levels[j]`` holds the data indices entering at ``alphas[j]``; the chain
    sets are the cumulative unions.  ``increments[j]`` is the balance target
    ``sum phi(alphas[j])`` over that level.
    """

    d: int
    alphas: list = field(default_factory=list)
    levels: list = field(default_factory=list)
    increments: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def breakpoints(self) -> np.ndarray:
        return np.asarray(self.alphas, dtype=float)

    def sets(self) -> list[np.ndarray]:
        """Cumulative chain sets as boolean masks (excluding the empty set)."""
        out = []
        mask = np.zeros(self.d, dtype=bool)
        for lev in self.levels:
            mask = mask.copy()
            mask[lev] = True
            out.append(mask)
        return out

    def minimizer_at(self, alpha: float) -> np.ndarray:
        """Minimal source side (data part) of a min cut at ``alpha``."""
        mask = np.zeros(self.d, dtype=bool)
        for a, lev in zip(self.alphas, self.levels):
            if a < alpha - TIE_TOL:
                mask[lev] = True
        return mask

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "breakpoints": [float(a) for a in self.alphas],
            "levels": [sorted(int(i) for i in lev) for lev in self.levels],
            "increments": [float(c) for c in self.increments],
        }


@dataclass
class ParametricResult:
    chain: CutChain
    tau: np.ndarray
    counters: maxflow.Counters
    alpha0: float
    n_flows: int


def trivial_balance(net: FlowNetwork) -> float:
    """Constant part of ``cap(U - t) - cap({s})``; the parametric arcs must make up for it."""
    into_t = (net.heads == SINK) & (net.tails != SOURCE)
    from_s = (net.tails == SOURCE) & (net.heads != SINK) & (net.params < 0)
    return float(net.caps[into_t].sum() - net.caps[from_s].sum())


def alpha_bounds(net: FlowNetwork, pieces: Pieces) -> tuple[float, float]:
    """Lower end ``alpha_0`` where no data node is worth putting on the source side, and 0.

    For each data node the margin is its sink capacity minus constant inflow
    from non-source nodes; ``alpha_0`` sits one unit below the smallest
    ``psi'`` at that margin, clipped into the domain of ``psi``.
    """
    data = net.data_nodes
    if data.size == 0:
        return 0.0, 0.0
    const = net.params < 0
    sink_cap = np.zeros(net.n_nodes)
    np.add.at(sink_cap, net.tails[const & (net.heads == SINK)],
              net.caps[const & (net.heads == SINK)])
    inflow = np.zeros(net.n_nodes)
    inner = const & (net.tails != SOURCE)
    np.add.at(inflow, net.heads[inner], net.caps[inner])
    with np.errstate(invalid="ignore"):
        margin = sink_cap[data] - inflow[data]
    idx = net.node_data[data]
    T = pieces.T[idx]
    floor = np.minimum(T, 1e-6)
    margin = np.where(np.isnan(margin), floor, margin)
    margin = np.clip(margin, floor, T)
    sub = pieces.subset(idx)
    alpha0 = float(np.min(sub.psi_prime(margin))) - 1.0
    return min(alpha0, 0.0), 0.0


def _data_of(net: FlowNetwork, nodes) -> np.ndarray:
    nodes = np.fromiter(nodes, dtype=np.int64)
    nd = net.node_data[nodes]
    return np.sort(nd[nd >= 0])


def solve_parametric(net: FlowNetwork, pieces: Pieces, global_relabel: bool = True,
                     alpha0: float | None = None) -> ParametricResult:
    """Chain of min-cut data sets over all ``alpha`` and the levels ``tau = phi(alpha)``.

    The first max-flow is computed from scratch at ``alpha_0``; every later
    one is a warm restart from the flow at the lower end of its interval on a
    network where the already-decided nodes are shrunk into the terminals.
    """
    if not np.any(net.params >= 0):
        raise InputError("network has no parametric source arcs")
    if pieces.d != net.d:
        raise InputError(f"pieces have d={pieces.d}, network d={net.d}")
    if alpha0 is None:
        alpha0, _ = alpha_bounds(net, pieces)
    counters = maxflow.Counters()
    blocks: list[tuple[float, np.ndarray]] = []
    n_flows = 0
    depth_limit = net.n_nodes + 2
    # stack items: network, flow at lo (None = compute cold), lo, hi, forced alpha
    stack = [(net, None, -math.inf, math.inf, alpha0, 0)]
    while stack:
        sub, flow_lo, lo, hi, forced, depth = stack.pop()
        if depth > depth_limit:
            raise NumericalError("parametric recursion failed to shrink the network")
        data = _data_of(sub, range(sub.n_nodes))
        if data.size == 0:
            continue
        if lo == hi:
            blocks.append((lo, data))
            continue
        if forced is not None:
            alpha = forced
        else:
            alpha = balanced_alpha(pieces, data, trivial_balance(sub))
            alpha = min(max(alpha, lo), hi)
        caps_a = sub.capacities(pieces.phi_ext(alpha))
        if forced is not None:
            state = maxflow.FlowState(sub, caps_a, global_relabel=global_relabel).solve()
            saved = None
        else:
            caps_lo = sub.capacities(pieces.phi_ext(lo))
            if flow_lo is None:
                cold = maxflow.FlowState(sub, caps_lo, global_relabel=global_relabel).solve()
                counters += cold.counters
                flow_lo = cold.flows()
            saved = flow_lo
            state = maxflow.FlowState(sub, caps_lo, flow=flow_lo, global_relabel=global_relabel)
            maxflow.warm_restart(state, caps_a)
        n_flows += 1
        counters += state.counters
        C = maxflow.min_cut(state, "minimal").source_side
        Cmax = maxflow.min_cut(state, "maximal").source_side
        low_data = _data_of(sub, C)
        high_data = _data_of(sub, set(range(sub.n_nodes)) - Cmax)
        if low_data.size == 0 and high_data.size == 0:
            blocks.append((alpha, data))
            continue
        mid = np.setdiff1d(data, np.union1d(low_data, high_data))
        if mid.size:
            blocks.append((alpha, mid))
        if high_data.size:
            up = maxflow.contract_full(sub, Cmax)
            stack.append((up.network, up.transfer(state.flows()), alpha, hi, None, depth + 1))
        if low_data.size:
            down = maxflow.contract_full(sub, set(range(sub.n_nodes)) - C)
            f = None if saved is None else down.transfer(saved)
            stack.append((down.network, f, lo, alpha, None, depth + 1))
    chain = _assemble(net.d, blocks, pieces)
    tau = np.zeros(net.d)
    for a, lev in zip(chain.alphas, chain.levels):
        tau[lev] = pieces.phi_ext(a)[lev]
    return ParametricResult(chain, tau, counters, alpha0, n_flows)


def _defer_flat(blocks, pieces: Pieces):
    """Move nodes whose level is still zero just above their block to where it starts growing.

    A block at ``a`` is a tie between two minimizers.  A member with
    ``phi_i = 0`` on a neighbourhood above ``a`` adds nothing to the balance,
    and for a nondecreasing function it adds nothing to ``F`` either, so the
    minimal minimizer only takes it once ``phi_i`` becomes positive.
    """
    start = pieces.zero_until()
    out = []
    for a, lev in blocks:
        lev = np.asarray(lev, dtype=np.int64)
        late = start[lev] > a + TIE_TOL * max(1.0, abs(a))
        if late.any():
            out.extend((float(start[i]), np.array([i])) for i in lev[late])
            lev = lev[~late]
        if lev.size:
            out.append((a, lev))
    return out


def _assemble(d: int, blocks, pieces: Pieces) -> CutChain:
    blocks = sorted(_defer_flat(blocks, pieces), key=lambda b: b[0])
    chain = CutChain(d)
    for a, lev in blocks:
        if chain.alphas and abs(a - chain.alphas[-1]) <= TIE_TOL * max(1.0, abs(a)):
            chain.levels[-1] = np.union1d(chain.levels[-1], lev)
        else:
            chain.alphas.append(float(a))
            chain.levels.append(np.asarray(lev, dtype=np.int64))
    seen = np.concatenate(chain.levels) if chain.levels else np.zeros(0, dtype=np.int64)
    if seen.size != d or np.unique(seen).size != d:
        raise NumericalError("parametric solve did not assign every data node exactly once")
    chain.increments = [float(pieces.phi_ext(a)[lev].sum())
                        for a, lev in zip(chain.alphas, chain.levels)]
    return chain


def recover_tau(chain: CutChain, pieces: Pieces, F=None) -> np.ndarray:
    """Levels ``tau`` from the chain by re-solving each level's balance.

    With a set function ``F`` the targets are ``F(A_j) - F(A_{j-1})``;
    otherwise the increments stored in the chain are used.
    """
    if F is not None:
        masks = chain.sets()
        if masks:
            vals = F.evaluate_masks(np.array(masks))
            incs = np.diff(np.concatenate([[0.0], vals]))
        else:
            incs = np.zeros(0)
    else:
        incs = np.asarray(chain.increments, dtype=float)
    tau = np.zeros(chain.d)
    for lev, c in zip(chain.levels, incs):
        a = balanced_alpha(pieces, lev, float(c))
        if math.isnan(a):
            raise NumericalError(f"balance for level {lev.tolist()} with target {c} failed")
        tau[lev] = pieces.phi_ext(a)[lev]
    return tau
