import csv

import numpy as np
import pytest

from submodprox import bench, setfn
from submodprox.errors import InputError


def test_generators_shapes():
    rng = np.random.default_rng(0)
    G = bench.random_groups(200, rng)
    assert 10 <= len(G.groups) <= 20
    assert all(30 <= idx.size <= 100 for _, idx in G.groups)
    C = bench.random_sparse_graph(50, rng)
    assert len(C.edges) >= 49
    # connected: every proper subset is cut by some edge
    assert C.eval([0]) > 0
    assert all(0 < a <= 1 for _, _, a in C.edges)


def test_generate_is_seeded():
    cfg = bench.BenchConfig("cut", [20], instances=2, seed=5)
    a, b = bench.generate(cfg), bench.generate(cfg)
    assert np.array_equal(a[20][0].z, b[20][0].z)


def test_run_bench_rows_and_csv(tmp_path):
    out = tmp_path / "b.csv"
    cfg = bench.BenchConfig("group", [8, 40], instances=2, output=str(out), threads=2)
    rows = bench.run_bench(cfg)
    assert [r["d"] for r in rows] == [8, 40]
    assert rows[0]["oracle_max_abs_diff"] <= 1e-8
    assert rows[1]["oracle_mean_time"] == ""
    with open(out) as fh:
        read = list(csv.DictReader(fh))
    assert list(read[0]) == bench.CSV_COLUMNS and len(read) == 2


@pytest.mark.parametrize("kwargs", [dict(penalty="tree"), dict(dims=[10, 5]),
                                    dict(dims=[0]), dict(instances=0)])
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        bench.BenchConfig(**kwargs)


def test_empty_schedule_writes_header_only(tmp_path):
    out = tmp_path / "e.csv"
    assert bench.run_bench(bench.BenchConfig(dims=[], output=str(out))) == []
    assert out.read_text().strip() == ",".join(bench.CSV_COLUMNS)
