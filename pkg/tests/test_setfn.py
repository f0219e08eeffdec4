import itertools

import numpy as np
import pytest

from generators import random_cubic, random_graph, random_groups, random_hypergraph
from submodprox import setfn
from submodprox.errors import InputError


def brute_lovasz(F, w):
    """Lovasz extension as the integral of F over the level sets of w."""
    levels = np.unique(np.r_[w, 0.0])
    total = 0.0
    for lo, hi in zip(levels[:-1], levels[1:]):
        mask = w >= hi
        total += (hi - lo) * F.eval(mask)
    total += levels[0] * F.eval(np.ones(F.d, dtype=bool))
    return total


def test_group_cover_values():
    F = setfn.GroupCover(4, [(2.0, [0, 1]), (1.0, [1, 2, 3])])
    assert F.eval([]) == 0
    assert F.eval([0]) == 2
    assert F.eval([1]) == 3
    assert F.eval([3]) == 1
    assert F.eval([0, 3]) == 3


def test_graph_cut_and_total_variation():
    F = setfn.GraphCut(3, [(0, 1, 1.0), (1, 2, 2.0)])
    assert F.eval([1]) == 3
    assert F.eval([0, 1, 2]) == 0
    w = np.array([3.0, 1.0, 4.0])
    assert F.total_variation(w) == pytest.approx(2 + 6)
    assert setfn.lovasz(F, w) == pytest.approx(8)


def test_hypergraph_cut_values():
    F = setfn.HypergraphCut(4, [(1.5, [0, 1, 2])])
    assert F.eval([0]) == 1.5
    assert F.eval([0, 1, 2]) == 0
    assert F.eval([3]) == 0
    w = np.array([1.0, -2.0, 0.5, 9.0])
    assert F.total_variation(w) == pytest.approx(1.5 * 3.0)


def test_truncation_values():
    F = setfn.WeightedTruncation([1.0, 2.0, 0.5], 2.5)
    assert F.eval([0]) == 1.0
    assert F.eval([0, 1]) == 2.5
    assert F.eval([2]) == 0.5


def test_cubic_drops_constant_and_rejects_bad_keys():
    F = setfn.CubicMobius(3, {0: 1.0}, {(0, 1): -0.5}, {(0, 1, 2): 0.25}, c0=7.0)
    assert F.eval([]) == 0
    assert F.eval([0, 1, 2]) == pytest.approx(0.75)
    with pytest.raises(InputError):
        setfn.CubicMobius(3, c2={(0, 1, 2): 1.0})
    with pytest.raises(InputError):
        setfn.CubicMobius(3, c1={5: 1.0})


@pytest.mark.parametrize("seed", range(10))
def test_structured_mobius_matches_fast_transform(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 8))
    for F in (random_groups(d, rng), random_graph(d, rng), random_hypergraph(max(d, 2), rng),
              random_cubic(max(d, 3), rng)):
        table = setfn.mobius(F)
        generic = setfn.mobius(setfn.TableFunction(F.table()))
        masks = setfn.all_masks(F.d)
        a = np.array([table.reconstruct(m) for m in masks])
        b = np.array([generic.reconstruct(m) for m in masks])
        assert np.allclose(a, F.table(), atol=1e-9)
        assert np.allclose(b, F.table(), atol=1e-9)


def test_mobius_transform_against_explicit_sums():
    rng = np.random.default_rng(0)
    d = 5
    vals = np.r_[0.0, rng.normal(size=(1 << d) - 1)]
    coef = setfn.mobius_transform(vals)
    for k in range(1 << d):
        subs = [j for j in range(1 << d) if j & k == j]
        expect = sum((-1) ** (bin(k).count("1") - bin(j).count("1")) * vals[j] for j in subs)
        assert coef[k] == pytest.approx(expect, abs=1e-12)


@pytest.mark.parametrize("seed", range(8))
def test_lovasz_matches_level_set_integral(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 7))
    F = random_groups(d, rng) + random_graph(d, rng)
    w = rng.normal(size=d)
    assert setfn.lovasz(F, w) == pytest.approx(brute_lovasz(F, w), abs=1e-10)
    x = setfn.greedy_base(F, w)
    assert x.sum() == pytest.approx(F.eval(np.ones(d, dtype=bool)))
    assert x @ w == pytest.approx(setfn.lovasz(F, w))


def test_submodularity_and_monotonicity_checks():
    assert setfn.is_submodular(setfn.GroupCover(3, [(1.0, [0, 1, 2])]))
    supermodular = setfn.CubicMobius(3, c2={(0, 1): 1.0})
    assert not setfn.is_submodular(supermodular)
    assert setfn.is_nondecreasing(setfn.GroupCover(3, [(1.0, [0, 1])]))
    assert not setfn.is_nondecreasing(setfn.GraphCut(2, [(0, 1, 1.0)]))


def test_shifted_and_sum():
    G = setfn.GraphCut(2, [(0, 1, 1.0)])
    S = setfn.Shifted(G, 2.0, [1.0, 1.0])
    assert S.eval([0]) == 3.0
    assert S.eval([0, 1]) == 4.0
    T = G + setfn.GroupCover(2, [(1.0, [0])])
    assert T.eval([0]) == 2.0
    with pytest.raises(InputError):
        setfn.Shifted(G, 1.0, [1.0, -1.0])


def test_table_function_rejects_bad_size():
    with pytest.raises(InputError):
        setfn.TableFunction(np.zeros(6))


def test_all_masks_enumerates_every_subset():
    masks = setfn.all_masks(3)
    assert masks.shape == (8, 3)
    assert {tuple(m) for m in masks} == set(itertools.product([False, True], repeat=3))
