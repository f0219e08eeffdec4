"""Plain-text formats for penalties, vectors and flow networks.

All formats are whitespace separated with ``#`` comments and 0-based element
indices.  Networks use a DIMACS-style format with 1-based node ids::

    p pmax <n> <m>
    n <id> s | t | d <data-index> | a
    a <tail> <head> <cap> | inf | param <data-index>
    o <offset>
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from . import setfn
from .errors import InputError
from .netrep import SINK, SOURCE, FlowNetwork


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _num(tok: str, no: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise InputError(f"line {no}: expected a number, got {tok!r}") from None
    if math.isnan(v):
        raise InputError(f"line {no}: NaN is not allowed")
    return v


def _idx(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise InputError(f"line {no}: expected an index, got {tok!r}") from None


def read_text(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


# ---------------------------------------------------------------- vectors


def parse_vector(text: str) -> np.ndarray:
    vals = [_num(tok, no) for no, toks in _lines(text) for tok in toks]
    return np.array(vals, dtype=float)


def format_vector(v) -> str:
    return " ".join(repr(float(x)) for x in np.asarray(v, dtype=float)) + "\n"


# ---------------------------------------------------------------- penalties


def _members(toks, no):
    return [_idx(t, no) for t in toks]


def parse_groups(text: str, d: int) -> setfn.GroupCover:
    groups = []
    for no, toks in _lines(text):
        if len(toks) < 2:
            raise InputError(f"line {no}: a group needs a weight and at least one member")
        groups.append((_num(toks[0], no), _members(toks[1:], no)))
    return setfn.GroupCover(d, groups)


def format_groups(F: setfn.GroupCover) -> str:
    return "".join(f"{w!r} " + " ".join(str(i) for i in idx) + "\n" for w, idx in F.groups)


def parse_edges(text: str, d: int) -> setfn.GraphCut:
    edges = []
    for no, toks in _lines(text):
        if len(toks) != 3:
            raise InputError(f"line {no}: expected 'i j weight'")
        edges.append((_idx(toks[0], no), _idx(toks[1], no), _num(toks[2], no)))
    return setfn.GraphCut(d, edges)


def format_edges(F: setfn.GraphCut) -> str:
    return "".join(f"{i} {j} {a!r}\n" for i, j, a in F.edges)


def parse_hyperedges(text: str, d: int) -> setfn.HypergraphCut:
    hyper = []
    for no, toks in _lines(text):
        if len(toks) < 2:
            raise InputError(f"line {no}: a hyperedge needs a weight and members")
        hyper.append((_num(toks[0], no), _members(toks[1:], no)))
    return setfn.HypergraphCut(d, hyper)


def format_hyperedges(F: setfn.HypergraphCut) -> str:
    return "".join(f"{a!r} " + " ".join(str(i) for i in idx) + "\n" for a, idx in F.hyperedges)


def parse_cubic(text: str, d: int) -> setfn.CubicMobius:
    """Lines ``coef i [j [k]]``; the number of indices gives the order."""
    c = {1: {}, 2: {}, 3: {}}
    for no, toks in _lines(text):
        if not 2 <= len(toks) <= 4:
            raise InputError(f"line {no}: expected 'coef i [j [k]]'")
        members = tuple(_members(toks[1:], no))
        if len(set(members)) != len(members):
            raise InputError(f"line {no}: repeated index")
        key = members[0] if len(members) == 1 else frozenset(members)
        c[len(members)][key] = c[len(members)].get(key, 0.0) + _num(toks[0], no)
    return setfn.CubicMobius(d, c[1], c[2], c[3])


def format_cubic(F: setfn.CubicMobius) -> str:
    out = [f"{v!r} {i}\n" for i, v in sorted(F.c1.items())]
    for coeffs in (F.c2, F.c3):
        for B, v in sorted(coeffs.items(), key=lambda kv: sorted(kv[0])):
            out.append(f"{v!r} " + " ".join(str(i) for i in sorted(B)) + "\n")
    return "".join(out)


def parse_truncation(text: str, d: int | None = None) -> setfn.WeightedTruncation:
    """Two lines: ``y <level>`` and ``w <w0> <w1> ...``."""
    y = w = None
    for no, toks in _lines(text):
        if toks[0] == "y" and len(toks) == 2:
            y = _num(toks[1], no)
        elif toks[0] == "w":
            w = [_num(t, no) for t in toks[1:]]
        else:
            raise InputError(f"line {no}: expected 'y <level>' or 'w <weights>'")
    if y is None or w is None:
        raise InputError("truncation description needs both a 'y' and a 'w' line")
    if d is not None and len(w) != d:
        raise InputError(f"truncation has {len(w)} weights, expected {d}")
    return setfn.WeightedTruncation(w, y)


def format_truncation(F: setfn.WeightedTruncation) -> str:
    return f"y {F.y!r}\nw " + " ".join(repr(float(x)) for x in F.w) + "\n"


PENALTY_PARSERS = {
    "group": parse_groups,
    "cut": parse_edges,
    "hypergraph": parse_hyperedges,
    "cubic": parse_cubic,
    "truncation": parse_truncation,
}


def load_penalty(kind: str, path, d: int) -> setfn.SetFunction:
    if kind not in PENALTY_PARSERS:
        raise InputError(f"unknown penalty kind {kind!r}")
    return PENALTY_PARSERS[kind](read_text(path), d)


# ---------------------------------------------------------------- networks


def format_dimacs(net: FlowNetwork) -> str:
    out = [f"p pmax {net.n_nodes} {net.n_arcs}\n"]
    for v in range(net.n_nodes):
        kind = net.node_kind(v)
        extra = f" {int(net.node_data[v])}" if kind == "d" else ""
        out.append(f"n {v + 1} {kind}{extra}\n")
    for u, v, c, p in zip(net.tails, net.heads, net.caps, net.params):
        if p >= 0:
            if c != 0:
                raise InputError("parametric arcs with a constant part are not representable")
            cap = f"param {int(p)}"
        else:
            cap = "inf" if math.isinf(c) else repr(float(c))
        out.append(f"a {u + 1} {v + 1} {cap}\n")
    if net.offset:
        out.append(f"o {net.offset!r}\n")
    return "".join(out)


def parse_dimacs(text: str) -> FlowNetwork:
    header = None
    nodes: dict[int, tuple[str, int]] = {}
    arcs = []
    offset = 0.0
    for no, toks in _lines(text):
        tag = toks[0]
        if tag == "c":
            continue
        if tag == "p":
            if len(toks) != 4 or toks[1] not in ("pmax", "max"):
                raise InputError(f"line {no}: expected 'p pmax <n> <m>'")
            header = (_idx(toks[2], no), _idx(toks[3], no))
        elif tag == "n":
            if len(toks) < 3:
                raise InputError(f"line {no}: malformed node line")
            nid, kind = _idx(toks[1], no), toks[2]
            if kind == "d":
                if len(toks) != 4:
                    raise InputError(f"line {no}: data node needs an index")
                nodes[nid] = ("d", _idx(toks[3], no))
            elif kind in ("s", "t", "a"):
                nodes[nid] = (kind, -1)
            else:
                raise InputError(f"line {no}: unknown node kind {kind!r}")
        elif tag == "a":
            if len(toks) not in (4, 5):
                raise InputError(f"line {no}: malformed arc line")
            u, v = _idx(toks[1], no), _idx(toks[2], no)
            if toks[3] == "param":
                if len(toks) != 5:
                    raise InputError(f"line {no}: 'param' needs a data index")
                arcs.append((u, v, 0.0, _idx(toks[4], no), no))
            elif toks[3] == "inf":
                arcs.append((u, v, math.inf, -1, no))
            else:
                c = _num(toks[3], no)
                if c < 0:
                    raise InputError(f"line {no}: negative capacity")
                arcs.append((u, v, c, -1, no))
        elif tag == "o":
            offset = _num(toks[1], no)
        else:
            raise InputError(f"line {no}: unknown line type {tag!r}")
    if header is None:
        raise InputError("missing 'p pmax' header")
    n, m = header
    if len(arcs) != m:
        raise InputError(f"header announces {m} arcs, found {len(arcs)}")
    for nid in range(1, n + 1):
        nodes.setdefault(nid, ("a", -1))
    if len(nodes) != n:
        raise InputError(f"node ids outside 1..{n}")
    srcs = [i for i, (k, _) in nodes.items() if k == "s"]
    sinks = [i for i, (k, _) in nodes.items() if k == "t"]
    if len(srcs) != 1 or len(sinks) != 1:
        raise InputError("network needs exactly one source and one sink")
    order = srcs + sinks + sorted(i for i in nodes if i not in (srcs[0], sinks[0]))
    remap = {nid: k for k, nid in enumerate(order)}
    node_data = np.array([nodes[nid][1] for nid in order], dtype=np.int64)
    data = node_data[node_data >= 0]
    if np.unique(data).size != data.size:
        raise InputError("duplicate data index")
    d = int(data.max()) + 1 if data.size else 0
    tails, heads, caps, params = [], [], [], []
    for u, v, c, p, no in arcs:
        if u not in remap or v not in remap:
            raise InputError(f"line {no}: arc endpoint outside 1..{n}")
        tails.append(remap[u])
        heads.append(remap[v])
        caps.append(c)
        params.append(p)
    net = FlowNetwork(d, n, np.array(tails, dtype=np.int64), np.array(heads, dtype=np.int64),
                      np.array(caps, dtype=float), np.array(params, dtype=np.int64),
                      node_data, offset)
    try:
        net.validate()
    except Exception as e:
        raise InputError(str(e)) from None
    assert remap[srcs[0]] == SOURCE and remap[sinks[0]] == SINK
    return net
