"""Runtime scaling of the flow-based prox on random group and fused instances."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import oracle, setfn
from .errors import InputError
from .prox import ProxProblem, prox

CSV_COLUMNS = ["d", "mean_time", "std_time", "mean_pushes", "mean_relabels",
               "mean_breakpoints", "oracle_mean_time", "oracle_max_abs_diff"]


@dataclass
class BenchConfig:
    penalty: str = "group"
    dims: list = field(default_factory=lambda: [100, 200, 400])
    instances: int = 10
    p: float = math.inf
    lam: float = 0.1
    seed: int = 0
    output: str | None = None
    threads: int = 1
    oracle_max_d: int = 10

    def __post_init__(self):
        if self.penalty not in ("group", "cut"):
            raise InputError(f"bench penalty must be 'group' or 'cut', got {self.penalty!r}")
        dims = [int(x) for x in self.dims]
        if any(x <= 0 for x in dims) or any(b <= a for a, b in zip(dims, dims[1:])):
            raise InputError("dimension schedule must be positive and increasing")
        self.dims = dims
        if self.instances < 1:
            raise InputError("instances must be at least 1")


def random_groups(d: int, rng: np.random.Generator) -> setfn.GroupCover:
    """Between d/20 and d/10 groups with 30 to 100 members each (capped at d)."""
    lo, hi = max(1, d // 20), max(1, d // 10)
    n_groups = int(rng.integers(lo, hi + 1))
    groups = []
    for _ in range(n_groups):
        size = int(rng.integers(min(30, d), min(100, d) + 1))
        groups.append((1.0, rng.choice(d, size=size, replace=False)))
    return setfn.GroupCover(d, groups)


def random_sparse_graph(d: int, rng: np.random.Generator) -> setfn.GraphCut:
    """Connected sparse graph: a random spanning tree plus about d/2 extra edges."""
    perm = rng.permutation(d)
    edges = {}
    for k in range(1, d):
        i, j = int(perm[k]), int(perm[rng.integers(k)])
        edges[(min(i, j), max(i, j))] = None
    for _ in range(d // 2):
        i, j = (int(x) for x in rng.choice(d, size=2, replace=False))
        edges[(min(i, j), max(i, j))] = None
    weights = 1.0 - rng.random(len(edges))  # uniform in (0, 1]
    return setfn.GraphCut(d, [(i, j, float(w)) for (i, j), w in zip(edges, weights)])


def make_instance(config: BenchConfig, d: int, rng: np.random.Generator) -> ProxProblem:
    z = rng.uniform(-1.0, 1.0, d)
    F = random_groups(d, rng) if config.penalty == "group" else random_sparse_graph(d, rng)
    return ProxProblem(z, config.lam, F, config.p)


def generate(config: BenchConfig) -> dict[int, list[ProxProblem]]:
    rng = np.random.default_rng(config.seed)
    return {d: [make_instance(config, d, rng) for _ in range(config.instances)]
            for d in config.dims}


def _time_one(problem: ProxProblem):
    start = time.perf_counter()
    res = prox(problem)
    return time.perf_counter() - start, res


def run_bench(config: BenchConfig) -> list[dict]:
    """Time the prox on every generated instance; one CSV row per dimension."""
    instances = generate(config)
    rows = []
    with ThreadPoolExecutor(max_workers=max(1, config.threads)) as pool:
        for d in config.dims:
            runs = list(pool.map(_time_one, instances[d]))
            times = np.array([t for t, _ in runs])
            row = {
                "d": d,
                "mean_time": float(times.mean()),
                "std_time": float(times.std()),
                "mean_pushes": float(np.mean([r.report.counters.pushes for _, r in runs])),
                "mean_relabels": float(np.mean([r.report.counters.relabels for _, r in runs])),
                "mean_breakpoints": float(np.mean([r.report.breakpoints for _, r in runs])),
                "oracle_mean_time": "",
                "oracle_max_abs_diff": "",
            }
            if d <= config.oracle_max_d:
                otimes, diffs = [], []
                for prob, (_, res) in zip(instances[d], runs):
                    start = time.perf_counter()
                    w = oracle.decomposition_weights(prob)
                    otimes.append(time.perf_counter() - start)
                    diffs.append(float(np.max(np.abs(w - res.w))))
                row["oracle_mean_time"] = float(np.mean(otimes))
                row["oracle_max_abs_diff"] = max(diffs)
            rows.append(row)
    if config.output is not None:
        write_csv(rows, config.output)
    return rows


def write_csv(rows: list[dict], path) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        raise InputError(f"cannot write {path}: {e.strerror}") from None
