"""FIFO preflow-push maximum flow with warm restarts and min-cut extraction.

The residual graph stores every network arc ``k`` as the pair ``2k``
(forward) and ``2k + 1`` (reverse).  The reverse residual always equals the
flow on the arc, so flows survive capacity changes and contraction.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, InputError
from .netrep import SINK, SOURCE, FlowNetwork

EPS = 1e-12


@dataclass
class Counters:
    pushes: int = 0
    relabels: int = 0
    global_relabels: int = 0

    @property
    def work(self) -> int:
        return self.pushes + self.relabels

    def __iadd__(self, other: "Counters") -> "Counters":
        self.pushes += other.pushes
        self.relabels += other.relabels
        self.global_relabels += other.global_relabels
        return self


@dataclass(frozen=True)
class Cut:
    source_side: frozenset
    capacity: float


def _effective_caps(network: FlowNetwork, caps) -> list:
    """Capacities with infinite source arcs replaced by a dominating finite bound."""
    caps = np.asarray(caps, dtype=float)
    if caps.shape != (network.n_arcs,):
        raise InputError(f"expected {network.n_arcs} capacities, got {caps.shape}")
    if np.any(caps < 0) or np.any(np.isnan(caps)):
        raise InputError("capacities must be nonnegative")
    inf_src = np.isinf(caps) & (network.tails == SOURCE)
    if not inf_src.any():
        return caps.tolist()
    _check_finite_value(network, caps)
    finite = caps[np.isfinite(caps)]
    out = caps.copy()
    out[inf_src] = float(finite.sum()) + 1.0
    return out.tolist()


def _check_finite_value(network: FlowNetwork, caps) -> None:
    adj = [[] for _ in range(network.n_nodes)]
    for u, v, c in zip(network.tails.tolist(), network.heads.tolist(), caps.tolist()):
        if math.isinf(c):
            adj[u].append(v)
    seen = {SOURCE}
    stack = [SOURCE]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v == SINK:
                raise InputError("source reaches sink through infinite arcs; flow is unbounded")
            if v not in seen:
                seen.add(v)
                stack.append(v)


class FlowState:
    """Preflow on a fixed network together with labels and counters."""

    def __init__(self, network: FlowNetwork, caps, flow=None, global_relabel: bool = True):
        self.network = network
        self.n = n = network.n_nodes
        m = network.n_arcs
        self.global_relabel = global_relabel
        self.counters = Counters()
        self.cap = _effective_caps(network, caps)
        tails = network.tails.tolist()
        heads = network.heads.tolist()
        flow = [0.0] * m if flow is None else np.asarray(flow, dtype=float).tolist()
        self.head = [0] * (2 * m)
        self.res = [0.0] * (2 * m)
        self.adj = [[] for _ in range(n)]
        self.excess = [0.0] * n
        for k in range(m):
            u, v, f = tails[k], heads[k], flow[k]
            if f < -EPS or f > self.cap[k] + 1e-9:
                raise ContractViolation(f"initial flow {f} violates capacity on arc {k}")
            f = min(max(f, 0.0), self.cap[k])
            self.head[2 * k] = v
            self.head[2 * k + 1] = u
            self.res[2 * k] = self.cap[k] - f
            self.res[2 * k + 1] = f
            self.adj[u].append(2 * k)
            self.adj[v].append(2 * k + 1)
            self.excess[u] -= f
            self.excess[v] += f
        self.label = [0] * n
        self.cursor = [0] * n

    # ------------------------------------------------------------ inspection

    def flows(self) -> np.ndarray:
        return np.array(self.res[1::2], dtype=float)

    @property
    def value(self) -> float:
        return self.excess[SINK]

    def _active(self, v: int) -> bool:
        return v != SOURCE and v != SINK and self.excess[v] > EPS

    def is_maximum(self) -> bool:
        if any(self._active(v) for v in range(self.n)):
            return False
        return SINK not in self._reach_from_source()

    def _reach_from_source(self) -> set:
        res, head, adj = self.res, self.head, self.adj
        seen = {SOURCE}
        stack = [SOURCE]
        while stack:
            u = stack.pop()
            for a in adj[u]:
                v = head[a]
                if res[a] > EPS and v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    def _reach_to_sink(self) -> set:
        res, head, adj = self.res, self.head, self.adj
        seen = {SINK}
        stack = [SINK]
        while stack:
            v = stack.pop()
            for a in adj[v]:
                u = head[a]
                if res[a ^ 1] > EPS and u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen

    # ------------------------------------------------------------ algorithm

    def _bfs_labels(self) -> None:
        n, res, head, adj = self.n, self.res, self.head, self.adj
        label = [2 * n] * n
        label[SINK] = 0
        queue = deque([SINK])
        while queue:
            v = queue.popleft()
            dv = label[v] + 1
            for a in adj[v]:
                u = head[a]
                if label[u] == 2 * n and u != SOURCE and res[a ^ 1] > EPS:
                    label[u] = dv
                    queue.append(u)
        label[SOURCE] = n
        queue = deque([SOURCE])
        while queue:
            v = queue.popleft()
            dv = label[v] + 1
            for a in adj[v]:
                u = head[a]
                if label[u] == 2 * n and res[a ^ 1] > EPS:
                    label[u] = dv
                    queue.append(u)
        self.label = label
        self.cursor = [0] * n
        self.counters.global_relabels += 1

    def _initial_labels(self) -> None:
        if self.global_relabel:
            self._bfs_labels()
        else:
            self.label = [0] * self.n
            self.label[SOURCE] = self.n
            self.cursor = [0] * self.n

    def _saturate_source(self) -> None:
        res, head, excess = self.res, self.head, self.excess
        for a in self.adj[SOURCE]:
            if a & 1:
                continue
            delta = res[a]
            if delta > 0:
                v = head[a]
                res[a] = 0.0
                res[a ^ 1] += delta
                excess[SOURCE] -= delta
                excess[v] += delta

    def _discharge(self) -> None:
        n = self.n
        res, head, adj, excess = self.res, self.head, self.adj, self.excess
        label, cursor = self.label, self.cursor
        c = self.counters
        queue = deque(v for v in range(n) if self._active(v))
        queued = [False] * n
        for v in queue:
            queued[v] = True
        since_global = 0
        cap_labels = 2 * n
        while queue:
            u = queue.popleft()
            queued[u] = False
            arcs = adj[u]
            deg = len(arcs)
            while excess[u] > EPS:
                i = cursor[u]
                lu = label[u]
                while i < deg:
                    a = arcs[i]
                    r = res[a]
                    if r > EPS:
                        v = head[a]
                        if lu == label[v] + 1:
                            ex = excess[u]
                            delta = ex if ex < r else r
                            res[a] = r - delta
                            res[a ^ 1] += delta
                            excess[u] = ex - delta
                            excess[v] += delta
                            c.pushes += 1
                            if not queued[v] and v != SOURCE and v != SINK:
                                queue.append(v)
                                queued[v] = True
                            if excess[u] <= EPS:
                                break
                    i += 1
                cursor[u] = i
                if excess[u] <= EPS:
                    break
                # relabel
                best = cap_labels
                for a in arcs:
                    if res[a] > EPS:
                        lv = label[head[a]]
                        if lv < best:
                            best = lv
                label[u] = best + 1 if best < cap_labels else cap_labels
                cursor[u] = 0
                c.relabels += 1
                since_global += 1
                if label[u] >= cap_labels:
                    break
                if self.global_relabel and since_global >= n:
                    since_global = 0
                    self._bfs_labels()
                    label, cursor = self.label, self.cursor

    def solve(self) -> "FlowState":
        self._saturate_source()
        self._initial_labels()
        self._discharge()
        return self


def max_flow(network: FlowNetwork, caps=None, *, phi=None, global_relabel: bool = True) -> FlowState:
    """Maximum flow from scratch.  ``caps`` defaults to ``network.capacities(phi)``."""
    if network.n_nodes < 2:
        raise InputError("network needs a source and a sink")
    if caps is None:
        caps = network.capacities(phi)
    return FlowState(network, caps, global_relabel=global_relabel).solve()


def warm_restart(state: FlowState, caps) -> FlowState:
    """Re-solve ``state`` in place after a monotone capacity change.

    Source arcs may only grow, sink arcs may only shrink and every other arc
    keeps its capacity.  Source arcs are saturated, sink arcs carrying more
    than their new capacity are cut back (the surplus stays at the tail) and
    the preflow is discharged again from distance labels.
    """
    net = state.network
    new = _effective_caps(net, caps)
    old = state.cap
    tails, heads = net.tails.tolist(), net.heads.tolist()
    res, excess = state.res, state.excess
    for k, (u, v) in enumerate(zip(tails, heads)):
        if new[k] == old[k]:
            continue
        if u == SOURCE:
            if new[k] < old[k] - 1e-12:
                raise ContractViolation(f"source arc {k} capacity decreased")
        elif v == SINK:
            if new[k] > old[k] + 1e-12:
                raise ContractViolation(f"sink arc {k} capacity increased")
            f = res[2 * k + 1]
            if f > new[k]:
                res[2 * k + 1] = new[k]
                excess[u] += f - new[k]
                excess[v] -= f - new[k]
                f = new[k]
        else:
            raise ContractViolation(f"inner arc {k} capacity changed")
        res[2 * k] = new[k] - res[2 * k + 1]
    state.cap = new
    return state.solve()


def min_cut(state: FlowState, side: str = "minimal") -> Cut:
    """Inclusion-minimal or inclusion-maximal source side of a minimum cut."""
    if side not in ("minimal", "maximal"):
        raise InputError(f"side must be 'minimal' or 'maximal', got {side!r}")
    if not state.is_maximum():
        raise ContractViolation("min_cut called on a flow that is not maximum")
    if side == "minimal":
        C = state._reach_from_source()
    else:
        C = set(range(state.n)) - state._reach_to_sink()
    return Cut(frozenset(C), cut_capacity(state.network, state.cap, C))


def cut_capacity(network: FlowNetwork, caps, C) -> float:
    inside = np.zeros(network.n_nodes, dtype=bool)
    inside[list(C)] = True
    crossing = inside[network.tails] & ~inside[network.heads]
    return float(np.asarray(caps, dtype=float)[crossing].sum())


# ---------------------------------------------------------------- contraction


@dataclass(frozen=True)
class Contraction:
    """Result of shrinking a node set into a terminal."""

    network: FlowNetwork
    node_map: np.ndarray
    arc_map: np.ndarray = field(repr=False)

    def transfer(self, flows) -> np.ndarray:
        """Flows of the parent network mapped onto the contracted arcs."""
        flows = np.asarray(flows, dtype=float)
        keep = self.arc_map >= 0
        return np.bincount(self.arc_map[keep], weights=flows[keep],
                           minlength=self.network.n_arcs)


def contract_full(network: FlowNetwork, shrink) -> Contraction:
    shrink = set(int(v) for v in shrink)
    has_s, has_t = SOURCE in shrink, SINK in shrink
    if has_s == has_t:
        raise InputError("shrink set must contain exactly one terminal")
    target = SOURCE if has_s else SINK
    node_map = np.empty(network.n_nodes, dtype=np.int64)
    nxt = 2
    for v in range(network.n_nodes):
        if v in shrink:
            node_map[v] = target
        elif v in (SOURCE, SINK):
            node_map[v] = v
        else:
            node_map[v] = nxt
            nxt += 1
    t = node_map[network.tails]
    h = node_map[network.heads]
    p = network.params.copy()
    # loops vanish; arcs joining the two terminals cross every cut and touch no
    # inner node, so dropping them keeps the flow conserved
    keep = (t != h) & ~((t <= SINK) & (h <= SINK))
    key = np.stack([t, h, p], axis=1)[keep]
    uniq, inv = np.unique(key, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    caps = np.zeros(len(uniq))
    np.add.at(caps, inv, network.caps[keep])
    arc_map = np.full(network.n_arcs, -1, dtype=np.int64)
    arc_map[keep] = inv
    node_data = np.full(nxt, -1, dtype=np.int64)
    mask = node_map >= 2
    node_data[node_map[mask]] = network.node_data[mask]
    offset = network.offset
    net = FlowNetwork(network.d, nxt, uniq[:, 0].copy(), uniq[:, 1].copy(), caps,
                      uniq[:, 2].copy(), node_data, offset)
    return Contraction(net, node_map, arc_map)


def contract(network: FlowNetwork, shrink) -> FlowNetwork:
    """Shrink ``shrink`` (holding exactly one terminal) into that terminal."""
    return contract_full(network, shrink).network
