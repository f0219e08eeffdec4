"""Flow networks that graph-represent submodular set functions.

A network represents ``F`` when, for every ``A``,
``F(A) = min_Y cut({s} | A | Y) + offset`` with ``Y`` ranging over subsets of
the auxiliary nodes.  Node ``0`` is the source, node ``1`` the sink, nodes
``2 .. d+1`` the data nodes and the remaining ones are auxiliary.

Infinite capacities are stored as ``math.inf`` and never added to finite
quantities by the flow code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import setfn
from .errors import ConstructionError, InputError, UnsupportedPenaltyError

SOURCE = 0
SINK = 1
INF = math.inf
CAPACITY_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FlowNetwork:
    """Directed network with constant arcs and parametric source arcs.

    ``params[k] >= 0`` marks arc ``k`` as parametric: its capacity at a given
    parameter is ``caps[k] + phi[params[k]]``.  ``node_data[v]`` is the data
    index of node ``v`` or ``-1``.
    """

    d: int
    n_nodes: int
    tails: np.ndarray
    heads: np.ndarray
    caps: np.ndarray
    params: np.ndarray
    node_data: np.ndarray
    offset: float = 0.0

    @property
    def n_arcs(self) -> int:
        return int(self.tails.size)

    @property
    def n_aux(self) -> int:
        return int(np.count_nonzero(self.node_data < 0)) - 2

    @property
    def data_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.node_data >= 0)

    def node_kind(self, v: int) -> str:
        if v == SOURCE:
            return "s"
        if v == SINK:
            return "t"
        return "d" if self.node_data[v] >= 0 else "a"

    def capacities(self, phi=None) -> np.ndarray:
        """Arc capacities with parametric arcs evaluated at ``phi`` (per data index)."""
        caps = self.caps.copy()
        par = self.params >= 0
        if par.any():
            if phi is None:
                raise InputError("network has parametric arcs; phi values required")
            caps[par] += np.asarray(phi, dtype=float)[self.params[par]]
        return caps

    def validate(self) -> None:
        if np.any(self.caps < 0) or np.any(np.isnan(self.caps)):
            raise ConstructionError("negative or NaN capacity in network")
        par = self.params >= 0
        if np.any(self.tails[par] != SOURCE):
            raise ConstructionError("parametric arcs must leave the source")
        if np.any(self.node_data[self.heads[par]] != self.params[par]):
            raise ConstructionError("parametric arc must enter its own data node")
        if np.unique(self.params[par]).size != int(par.sum()):
            raise ConstructionError("more than one parametric arc per data node")


class _Builder:
    """Accumulates arcs, merging parallel ones by adding capacities."""

    def __init__(self, d: int):
        self.d = d
        self.n_nodes = d + 2
        self.arcs: dict[tuple[int, int, int], float] = {}
        self.offset = 0.0

    def data(self, i: int) -> int:
        return i + 2

    def new_aux(self) -> int:
        self.n_nodes += 1
        return self.n_nodes - 1

    def arc(self, u: int, v: int, cap: float, param: int = -1) -> None:
        if cap < 0:
            if cap < -CAPACITY_TOL:
                raise ConstructionError(f"negative capacity {cap} on arc ({u}, {v})")
            cap = 0.0
        if u == v or (cap == 0 and param < 0):
            return
        key = (u, v, param)
        self.arcs[key] = self.arcs.get(key, 0.0) + cap

    def build(self) -> FlowNetwork:
        node_data = np.full(self.n_nodes, -1, dtype=np.int64)
        node_data[2:self.d + 2] = np.arange(self.d)
        if self.arcs:
            keys = np.array(list(self.arcs.keys()), dtype=np.int64)
            caps = np.array(list(self.arcs.values()), dtype=float)
        else:
            keys = np.zeros((0, 3), dtype=np.int64)
            caps = np.zeros(0)
        net = FlowNetwork(self.d, self.n_nodes, keys[:, 0].copy(), keys[:, 1].copy(),
                          caps, keys[:, 2].copy(), node_data, float(self.offset))
        net.validate()
        return net


def _absorb(b: _Builder, net: FlowNetwork) -> None:
    """Copy ``net`` into builder ``b`` with fresh auxiliary nodes."""
    if net.d != b.d:
        raise InputError(f"cannot combine networks with d={net.d} and d={b.d}")
    remap = np.empty(net.n_nodes, dtype=np.int64)
    remap[SOURCE], remap[SINK] = SOURCE, SINK
    for v in range(2, net.n_nodes):
        remap[v] = b.data(int(net.node_data[v])) if net.node_data[v] >= 0 else b.new_aux()
    for u, v, c, p in zip(net.tails, net.heads, net.caps, net.params):
        b.arc(int(remap[u]), int(remap[v]), float(c), int(p))
    b.offset += net.offset


def combine(fragments) -> FlowNetwork:
    """Union of networks sharing ``s``, ``t`` and the data nodes."""
    fragments = list(fragments)
    if not fragments:
        raise InputError("combine needs at least one network")
    b = _Builder(fragments[0].d)
    for net in fragments:
        _absorb(b, net)
    return b.build()


def represent_truncation(w, y: float) -> FlowNetwork:
    """``min(w(A), y)``: one auxiliary node ``u`` with arcs ``v -> u`` and ``u -> t``."""
    w = np.asarray(w, dtype=float)
    if np.any(w < 0) or y < 0:
        raise InputError("truncation needs nonnegative weights and level")
    b = _Builder(w.size)
    u = b.new_aux()
    for i in np.flatnonzero(w):
        b.arc(b.data(int(i)), u, float(w[i]))
    b.arc(u, SINK, float(y))
    return b.build()


def _linear_terms(b: _Builder, c1: dict, H1: dict | None = None) -> None:
    H1 = H1 or {}
    for i in range(b.d):
        c = c1.get(i, 0.0) - H1.get(i, 0.0)
        if c > 0:
            b.arc(b.data(i), SINK, c)
        elif c < 0:
            b.arc(SOURCE, b.data(i), -c)


def _source_capacity(b: _Builder) -> float:
    return sum(c for (u, _, _), c in b.arcs.items() if u == SOURCE)


def _table_parts(table: setfn.MobiusTable):
    c1 = {next(iter(B)): v for B, v in table.coeffs.items() if len(B) == 1}
    higher = {B: v for B, v in table.coeffs.items() if len(B) >= 2 and v != 0}
    return c1, higher


def represent_negative_terms(table: setfn.MobiusTable) -> FlowNetwork:
    """Functions whose Mobius coefficients of order >= 2 are all nonpositive.

    Each negative term ``B`` gets an auxiliary node ``w_B`` fed by the source
    with capacity ``-F^(|B|)(B)`` and joined to every member of ``B`` by an
    infinite arc.
    """
    c1, higher = _table_parts(table)
    bad = [sorted(B) for B, v in higher.items() if v > 0]
    if bad:
        raise InputError(f"positive higher-order coefficient on {bad[0]}")
    b = _Builder(table.d)
    _linear_terms(b, c1)
    for B, v in sorted(higher.items(), key=lambda kv: sorted(kv[0])):
        w = b.new_aux()
        b.arc(SOURCE, w, -v)
        for i in sorted(B):
            b.arc(w, b.data(i), INF)
    b.offset = -_source_capacity(b)
    return b.build()


def represent_order3(table: setfn.MobiusTable, check_submodular: bool = True) -> FlowNetwork:
    """Submodular functions of order at most three.

    Positive cubic terms get a node ``w_B`` with infinite arcs from ``B`` and
    an arc to the sink; their mass is compensated on the pair and singleton
    terms through ``H(A) = sum of F^(3)(B) over positive triples B containing A``.
    """
    if table.order > 3:
        raise InputError(f"order-{table.order} coefficient present; at most 3 allowed")
    d = table.d
    if check_submodular and d <= setfn.SUBMODULAR_MAX_D:
        if not setfn.is_submodular(table.to_function()):
            raise ConstructionError("function is not submodular")
    c1, higher = _table_parts(table)
    c2 = {B: v for B, v in higher.items() if len(B) == 2}
    c3 = {B: v for B, v in higher.items() if len(B) == 3}
    pos3 = {B: v for B, v in c3.items() if v > 0}
    H1: dict[int, float] = {}
    H2: dict[frozenset, float] = {}
    for B, v in pos3.items():
        for i in B:
            H1[i] = H1.get(i, 0.0) + v
        for pair in _pairs(B):
            H2[pair] = H2.get(pair, 0.0) + v

    b = _Builder(d)
    _linear_terms(b, c1, H1)
    for pair in sorted(set(c2) | set(H2), key=sorted):
        cap = -c2.get(pair, 0.0) - H2.get(pair, 0.0)
        if cap < -CAPACITY_TOL:
            raise ConstructionError(
                f"pair {sorted(pair)} has capacity {cap:.3g} < 0; function is not submodular")
        if cap <= 0:
            continue
        w = b.new_aux()
        b.arc(SOURCE, w, cap)
        for i in sorted(pair):
            b.arc(w, b.data(i), INF)
    for B, v in sorted(c3.items(), key=lambda kv: sorted(kv[0])):
        w = b.new_aux()
        if v > 0:
            b.arc(w, SINK, v)
            for i in sorted(B):
                b.arc(b.data(i), w, INF)
        else:
            b.arc(SOURCE, w, -v)
            for i in sorted(B):
                b.arc(w, b.data(i), INF)
    b.offset = -_source_capacity(b)
    return b.build()


def _pairs(B):
    items = sorted(B)
    return [frozenset((items[i], items[j])) for i in range(len(items)) for j in range(i + 1, len(items))]


def represent_cut(F: setfn.GraphCut) -> FlowNetwork:
    """Plain cut function: arcs ``i -> j`` and ``j -> i`` with capacity ``a_ij``."""
    b = _Builder(F.d)
    for i, j, a in F.edges:
        b.arc(b.data(i), b.data(j), a)
        b.arc(b.data(j), b.data(i), a)
    return b.build()


def add_modular(net: FlowNetwork, m) -> FlowNetwork:
    """Network for ``F + m(.)``: positive parts go to sink arcs, negative to source arcs."""
    m = np.asarray(m, dtype=float)
    b = _Builder(net.d)
    _absorb(b, net)
    for i in np.flatnonzero(m):
        if m[i] > 0:
            b.arc(b.data(int(i)), SINK, float(m[i]))
        else:
            b.arc(SOURCE, b.data(int(i)), float(-m[i]))
            b.offset += float(m[i])
    return b.build()


def represent(F: setfn.SetFunction) -> FlowNetwork:
    """Pick a construction for ``F`` by variant."""
    if isinstance(F, setfn.WeightedTruncation):
        return represent_truncation(F.w, F.y)
    if isinstance(F, setfn.GroupCover):
        parts = []
        for w, idx in F.groups:
            vec = np.zeros(F.d)
            vec[idx] = w
            parts.append(represent_truncation(vec, w))
        return combine(parts) if parts else _Builder(F.d).build()
    if isinstance(F, setfn.GraphCut):
        return represent_cut(F)
    if isinstance(F, setfn.HypergraphCut):
        parts = []
        for a, idx in F.hyperedges:
            vec = np.zeros(F.d)
            vec[idx] = a
            parts.append(represent_truncation(vec, a))
            neg = setfn.MobiusTable(F.d, {frozenset(idx.tolist()): -a})
            parts.append(represent_negative_terms(neg))
        return combine(parts) if parts else _Builder(F.d).build()
    if isinstance(F, setfn.Sum):
        return combine(represent(p) for p in F.parts)
    if isinstance(F, setfn.Shifted):
        return add_modular(represent(F.base), F.beta * F.b)
    table = setfn.mobius(F)
    _, higher = _table_parts(table)
    if all(v <= 0 for v in higher.values()):
        return represent_negative_terms(table)
    if table.order <= 3:
        if F.d <= setfn.SUBMODULAR_MAX_D and not setfn.is_submodular(F):
            raise UnsupportedPenaltyError(
                "order <= 3 but not submodular; no graph representation")
        return represent_order3(table, check_submodular=False)
    raise UnsupportedPenaltyError(
        f"order-{table.order} function with positive higher-order terms is neither a "
        "truncation nor of order <= 3, so no graph representation is known")


# ---------------------------------------------------------------- nondecreasing shift


@dataclass(frozen=True)
class NondecreasingShift:
    beta: float
    b: np.ndarray


def make_nondecreasing(F: setfn.SetFunction, b=None):
    """Shift ``F`` by ``beta * b`` so that it becomes nondecreasing.

    ``beta = max(0, max_i (F(V - i) - F(V)) / b_i)``; ``b`` defaults to ones.
    Returns the shifted function and the shift.  When ``beta == 0`` the
    function is returned unchanged.
    """
    d = F.d
    b = np.ones(d) if b is None else np.asarray(b, dtype=float)
    if b.shape != (d,) or np.any(b < 0):
        raise InputError("shift vector must be nonnegative with one entry per element")
    masks = np.ones((d + 1, d), dtype=bool)
    masks[np.arange(d), np.arange(d)] = False
    vals = F.evaluate_masks(masks)
    drop = vals[:d] - vals[d]
    need = drop > setfn.SUBMODULAR_TOL
    if np.any(need & (b <= 0)):
        raise InputError("shift vector is zero where F decreases")
    beta = float(np.max(drop[need] / b[need])) if need.any() else 0.0
    shift = NondecreasingShift(beta, b)
    if beta == 0.0:
        return F, shift
    return setfn.Shifted(F, beta, b), shift


def with_offset(net: FlowNetwork, offset: float) -> FlowNetwork:
    return replace(net, offset=float(offset))


def with_parametric_arcs(net: FlowNetwork) -> FlowNetwork:
    """Add one parametric arc ``s -> v`` per data node (capacity ``phi_i`` at solve time)."""
    if np.any(net.params >= 0):
        return net
    data = net.data_nodes
    m = data.size
    return FlowNetwork(
        net.d, net.n_nodes,
        np.concatenate([net.tails, np.full(m, SOURCE, dtype=np.int64)]),
        np.concatenate([net.heads, data]),
        np.concatenate([net.caps, np.zeros(m)]),
        np.concatenate([net.params, net.node_data[data]]),
        net.node_data, net.offset)
