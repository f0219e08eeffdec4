import numpy as np
import pytest

from generators import chain_graph
from submodprox import setfn
from submodprox.errors import InputError
from submodprox.prox import ProxProblem, prox
from submodprox.solver import LeastSquaresTask, fista, lipschitz_constant

G = setfn.GroupCover(10, [(1.0, [0, 1, 2, 3]), (0.5, [3, 4, 5]), (2.0, [6, 7, 8, 9])])


def test_lipschitz_bounds_top_eigenvalue():
    X = np.random.default_rng(0).normal(size=(20, 8))
    top = np.linalg.eigvalsh(X.T @ X).max()
    assert top <= lipschitz_constant(X) <= 1.2 * top


def test_zero_lambda_is_least_squares():
    rng = np.random.default_rng(1)
    X, y = rng.normal(size=(20, 10)), rng.normal(size=20)
    res = fista(LeastSquaresTask(X, y, 0.0, G, max_iters=5000, tolerance=1e-16))
    assert np.linalg.norm(X.T @ (X @ res.w - y)) < 1e-6


@pytest.mark.parametrize("p", [np.inf, 2.0])
def test_monotone_trace_and_residual(p):
    rng = np.random.default_rng(2)
    X, y = rng.normal(size=(20, 10)), rng.normal(size=20)
    res = fista(LeastSquaresTask(X, y, 1.0, G, p))
    assert np.all(np.diff(res.objective) <= 1e-12 * abs(res.objective[0]))
    assert res.fixed_point_residual <= 1e-5
    assert res.iterations <= 500


@pytest.mark.parametrize("p", [np.inf, 2.0])
def test_identity_design_is_one_prox(p):
    y = np.random.default_rng(3).normal(size=10)
    res = fista(LeastSquaresTask(np.eye(10), y, 0.7, G, p))
    assert np.allclose(res.w, prox(ProxProblem(y, 0.7, G, p)).w, atol=1e-8)


def test_total_variation_recovers_piecewise_constant_signal():
    rng = np.random.default_rng(4)
    signal = np.repeat([1.0, -2.0, 0.5], 10)
    X = np.eye(30)
    res = fista(LeastSquaresTask(X, signal + 0.05 * rng.normal(size=30), 0.3, chain_graph(30)))
    assert np.max(np.abs(res.w - signal)) < 0.3
    assert np.all(np.diff(res.objective) <= 1e-12 * abs(res.objective[0]))


def test_task_validation():
    with pytest.raises(InputError):
        LeastSquaresTask(np.ones((3, 10)), np.ones(4), 1.0, G)
    with pytest.raises(InputError):
        LeastSquaresTask(np.ones((3, 5)), np.ones(3), 1.0, G)
    with pytest.raises(InputError):
        LeastSquaresTask(np.ones((3, 10)), np.ones(3), -1.0, G)
