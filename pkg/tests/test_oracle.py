import numpy as np
import pytest

from generators import chain_graph, random_groups
from submodprox import netrep, oracle, setfn
from submodprox.errors import CapacityError
from submodprox.prox import ProxProblem

cp = pytest.importorskip("cvxpy")


def test_brute_sfm_minimal_and_maximal():
    # F(A) = |A| - 2 [A contains {0,1}] has minimizers {} and {0,1}
    F = setfn.CubicMobius(3, {0: 1.0, 1: 1.0, 2: 1.0}, {(0, 1): -2.0})
    res = oracle.brute_sfm(F)
    assert res.value == 0.0
    assert not res.minimal.any()
    assert list(res.maximal) == [True, True, False]


def test_brute_sfm_accepts_callables():
    res = oracle.brute_sfm(lambda m: -float(m.sum()), d=3)
    assert res.value == -3 and res.minimal.all()


def test_budget_enforced():
    with pytest.raises(CapacityError):
        oracle.brute_sfm(setfn.GroupCover(13, [(1.0, [0])]))
    F = setfn.GroupCover(13, [(1.0, [0])])
    with pytest.raises(CapacityError):
        oracle.decomposition_prox(ProxProblem(np.ones(13), 1.0, F))


def test_verify_representation_detects_wrong_function():
    F = setfn.GroupCover(3, [(1.0, [0, 1]), (1.0, [1, 2])])
    net = netrep.represent(F)
    assert oracle.verify_representation(net, F)
    assert not oracle.verify_representation(net, setfn.GroupCover(3, [(1.0, [0, 1, 2])]))


def test_brute_mincut_optimal_family():
    from test_maxflow import DIAMOND
    res = oracle.brute_mincut(DIAMOND)
    assert res.value == pytest.approx(3.0)
    assert all(0 in C and 1 not in C for C in res.optimal_sides)


def test_decomposition_tau_in_base_polytope():
    rng = np.random.default_rng(0)
    F = random_groups(5, rng)
    tau = oracle.decomposition_prox(ProxProblem(rng.normal(size=5), 0.5, F))
    masks = setfn.all_masks(5)
    assert np.all(masks @ tau <= F.evaluate_masks(masks) + 1e-9)
    assert tau.sum() == pytest.approx(F.eval(np.ones(5, dtype=bool)))


def test_fused_examples():
    assert np.allclose(oracle.fused_1d_oracle([3.0, 1.0], 0.5), [2.5, 1.5])
    assert np.allclose(oracle.fused_1d_oracle([2.0, 2.0, 2.0], 1.0), [2.0, 2.0, 2.0])
    assert np.allclose(oracle.fused_1d_oracle([1.0, 5.0, 0.0], 100.0), [2.0, 2.0, 2.0])
    assert np.allclose(oracle.fused_1d_oracle([4.0], 1.0), [4.0])


@pytest.mark.parametrize("seed", range(15))
def test_fused_against_solver(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 30))
    z = rng.normal(size=n)
    a = rng.uniform(0, 1, n - 1)
    a[rng.random(n - 1) < 0.2] = 0.0
    lam = float(rng.choice([0.1, 1.0, 5.0]))
    w = cp.Variable(n)
    cp.Problem(cp.Minimize(0.5 * cp.sum_squares(z - w)
                           + lam * cp.sum(cp.multiply(a, cp.abs(cp.diff(w)))))).solve(
        solver="CLARABEL", tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)
    assert np.allclose(oracle.fused_1d_oracle(z, lam, a), w.value, atol=1e-6)


def test_fused_matches_decomposition_on_small_chain():
    rng = np.random.default_rng(1)
    z = rng.normal(size=7)
    problem = ProxProblem(z, 0.4, chain_graph(7))
    assert np.allclose(oracle.fused_1d_oracle(z, 0.4), oracle.decomposition_weights(problem),
                       atol=1e-10)
