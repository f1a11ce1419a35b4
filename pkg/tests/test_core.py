import numpy as np
import pytest
from scipy.linalg import expm

from bivarfun import config
from bivarfun.blocking import Partition, PartitionTree, build_tree, precompute_sylvesters
from bivarfun.core import EvalOptions, corollary_2x2, fun2_diag, fun2m, fun2m_rec, frechet_derivative, kronecker_apply
from bivarfun.dense import sylvester_bartels_stewart
from bivarfun.errors import AnalyticityError, ArgumentError, DerivativeRequiredError
from bivarfun.function import BivariateFunction
from bivarfun.function_registry import builtin_function
from bivarfun.util import complex_gaussian

f1 = builtin_function('f1')
exp_sum = builtin_function('f3h:exp')
add = BivariateFunction('x+y', lambda x, y: x + y)


def relative(X, Y):
    return np.linalg.norm(X - Y) / np.linalg.norm(Y)


def shifted(rng, n, shift, scale=0.3):
    return shift * np.eye(n) + scale * rng.standard_normal((n, n))


def test_fun2m_sylvester():
    rng = np.random.default_rng(0)
    A, B = shifted(rng, 8, 2.0), shifted(rng, 6, 2.0)
    C = complex_gaussian(rng, (8, 6))
    X, report = fun2m(f1, A, B, C)
    assert report.path == 'schur'
    assert relative(X, sylvester_bartels_stewart(A, B.T, C)) < 1e-10
    residual = np.linalg.norm(A @ X + X @ B.T - C) / (np.linalg.norm(A) + np.linalg.norm(B)) / np.linalg.norm(X)
    assert residual < 1e-11


def test_fun2m_exp():
    rng = np.random.default_rng(1)
    A, B = shifted(rng, 7, 0.0, 0.5), shifted(rng, 5, 0.0, 0.5)
    C = rng.standard_normal((7, 5))
    expected = expm(A) @ C @ expm(B.T)
    X, report = fun2m(exp_sum, A, B, C)
    assert relative(X, expected) < 1e-10
    assert report.max_digits >= 16
    assert report.n_blocks_A >= 1 and report.n_blocks_B >= 1
    assert report.wall_time >= 0
    Y, report = fun2m(exp_sum, A, B, C, EvalOptions(atom_method='taylor'))
    assert relative(Y, expected) < 1e-10
    assert report.max_digits == 16
    assert relative(X, Y) < 1e-10


def test_paths():
    rng = np.random.default_rng(2)
    H = rng.standard_normal((4, 4))
    normal = H + H.T
    general = shifted(rng, 3, 0.0, 0.5)
    C = complex_gaussian(rng, (4, 3))
    X, report = fun2m(exp_sum, np.diag([1.0, 2, 3, 4]), np.diag([0.5, 1, 2]), C)
    assert report.path == 'diag'
    assert report.max_digits == 0
    assert np.allclose(X, np.exp(np.add.outer([1.0, 2, 3, 4], [0.5, 1, 2])) * C)
    X, report = fun2m(exp_sum, normal, general, C)
    assert report.path == 'diagA'
    assert report.n_blocks_A == 4
    assert relative(X, expm(normal) @ C @ expm(general.T)) < 1e-10
    X, report = fun2m(exp_sum, general, normal[:3, :3], C[:3].T)
    assert report.path == 'diagB'
    assert relative(X, expm(general) @ C[:3].T @ expm(normal[:3, :3].T)) < 1e-10
    X, report = fun2m(exp_sum, np.zeros((0, 0)), general, np.zeros((0, 3)))
    assert report.path == 'empty'
    assert X.shape == (0, 3)


def test_fun2_diag():
    A = np.array([[1.0, 2], [0, 3]])
    B = np.array([[0.5]])
    C = np.array([[1.0], [1.0]])
    assert relative(fun2_diag(exp_sum, A, B, C), expm(A) @ C * np.exp(0.5)) < 1e-13


def test_shape_errors():
    with pytest.raises(ArgumentError):
        fun2m(f1, np.eye(2), np.eye(3), np.ones((3, 2)))
    with pytest.raises(ArgumentError):
        fun2m(f1, np.ones((2, 3)), np.eye(3), np.ones((2, 3)))
    with pytest.raises(ArgumentError):
        fun2m(f1, [[np.nan]], [[1]], [[1]])


def test_error_report():
    with pytest.raises(AnalyticityError) as info:
        fun2m(builtin_function('sqrt_sum'), -2 * np.eye(2), -np.eye(2), np.ones((2, 2)))
    assert info.value.report.path == 'diag'


def test_linearity():
    rng = np.random.default_rng(3)
    A, B = shifted(rng, 6, 1.0, 0.4), shifted(rng, 6, 1.0, 0.4)
    C1, C2 = complex_gaussian(rng, (6, 6)), complex_gaussian(rng, (6, 6))
    alpha = 0.7 - 1.3j
    X1, _ = fun2m(f1, A, B, C1)
    X2, _ = fun2m(f1, A, B, C2)
    X, _ = fun2m(f1, A, B, alpha * C1 + C2)
    assert relative(X, alpha * X1 + X2) < 1e-11


def test_similarity():
    rng = np.random.default_rng(4)
    A, B = shifted(rng, 5, 0.0, 0.5), shifted(rng, 4, 0.0, 0.5)
    C = complex_gaussian(rng, (5, 4))
    SA = np.eye(5) + 0.1 * rng.standard_normal((5, 5))
    SB = np.eye(4) + 0.1 * rng.standard_normal((4, 4))
    X, _ = fun2m(exp_sum, A, B, C)
    Y, _ = fun2m(exp_sum, SA @ A @ np.linalg.inv(SA), SB @ B @ np.linalg.inv(SB), SA @ C @ SB.T)
    assert relative(Y, SA @ X @ SB.T) < 1e-9


def test_corollary_2x2():
    X = corollary_2x2(add, [[1, 1], [0, 2]], np.zeros((2, 2)), np.ones((2, 2)))
    assert np.allclose(X, [[2, 2], [2, 2]])
    C = np.array([[1.0, 2], [3, 4]])
    assert np.allclose(corollary_2x2(f1, np.diag([1.0, 2]), np.diag([3.0, 4]), C), C / [[4, 5], [5, 6]])
    rng = np.random.default_rng(5)
    for _ in range(5):
        A = np.triu(complex_gaussian(rng, (2, 2))) + 3 * np.eye(2)
        B = np.triu(complex_gaussian(rng, (2, 2))) + 3 * np.eye(2)
        C = complex_gaussian(rng, (2, 2))
        assert relative(corollary_2x2(f1, A, B, C), sylvester_bartels_stewart(A, B, C)) < 1e-12


def test_corollary_2x2_confluent():
    A = np.array([[1.0, 1], [0, 1]])
    B = np.array([[0.5, 2], [0, 0.5]])
    C = np.array([[1.0, -1], [2, 0.5]])
    X = corollary_2x2(exp_sum, A, B, C)
    assert relative(X, expm(A) @ C @ expm(B)) < 1e-13
    with pytest.raises(DerivativeRequiredError):
        corollary_2x2(BivariateFunction('opaque', lambda x, y: np.exp(x + y)), A, B, C)
    with pytest.raises(ArgumentError):
        corollary_2x2(f1, [[1, 0], [1, 1]], B, C)


def two_leaf_tree(T):
    tree = PartitionTree((range(0, 1), range(1, 2)), (PartitionTree((range(0, 1),)), PartitionTree((range(1, 2),))))
    return precompute_sylvesters(T, tree, gamma=10, delta=0.1)


def test_fun2m_rec_2x2():
    A = np.array([[1.0, 0.7], [0, 2.0]])
    B = np.array([[3.0, -0.4], [0, 5.0]])
    C = np.array([[1.0, 2], [-1, 0.5]])
    for f in (f1, exp_sum):
        X = fun2m_rec(f, A, B, C, two_leaf_tree(A), two_leaf_tree(B))
        assert np.allclose(X, corollary_2x2(f, A, B, C), rtol=1e-13, atol=1e-13)


def split_tree(T, p):
    m = T.shape[0]
    first, second = range(0, p), range(p, m)
    tree = PartitionTree((first, second), (PartitionTree((first,)), PartitionTree((second,))))
    return precompute_sylvesters(T, tree, gamma=10, delta=0.1, merge=False)


@pytest.mark.parametrize('atom_method', ['diag', 'taylor'])
def test_fun2m_rec_two_blocks(atom_method):
    A = np.array([[1.0, 0.2, 0.5, -0.3], [0, 1.05, 0.4, 0.1], [0, 0, 3.0, 0.2], [0, 0, 0, 3.1]])
    B = np.array([[0.5, 0.1, 0.3], [0, 0.55, -0.2], [0, 0, -1.0]])
    C = np.random.default_rng(10).standard_normal((4, 3))
    tree_a, tree_b = split_tree(A, 2), split_tree(B, 2)
    X = fun2m_rec(exp_sum, A, B, C, tree_a, tree_b, EvalOptions(atom_method=atom_method))
    assert relative(X, expm(A) @ C @ expm(B)) < 1e-13
    # leaves recombine through the Sylvester solution of each split
    V = tree_a.sylvester_solution
    assert np.linalg.norm(A[:2, :2] @ V - V @ A[2:, 2:] - A[:2, 2:]) < 1e-14


def clustered_triangular(rng):
    values = np.array([0, 0.05, 1, 1.05, 1.1, 2, 3, 3.05])
    T = np.diag(values) + 0.2 * np.triu(complex_gaussian(rng, (8, 8)), 1)
    return T, Partition(np.arange(8), (2, 3, 1, 2), 0.1)


def test_strategy_invariance():
    rng = np.random.default_rng(6)
    A, PA = clustered_triangular(rng)
    B, PB = clustered_triangular(rng)
    C = complex_gaussian(rng, (8, 8))
    results = []
    for strategy in ('balanced', 'single'):
        tree_a = precompute_sylvesters(A, build_tree(PA, strategy), gamma=10, delta=0.1, merge=False)
        tree_b = precompute_sylvesters(B, build_tree(PB, strategy), gamma=10, delta=0.1, merge=False, side='B')
        results.append(fun2m_rec(exp_sum, A, B, C, tree_a, tree_b, EvalOptions(strategy=strategy)))
    assert relative(results[0], results[1]) < 1e-12
    assert relative(results[0], expm(A) @ C @ expm(B)) < 1e-11


def test_config_defaults_flow():
    config.set_atom_method('taylor')
    assert EvalOptions().atom_method == 'taylor'
    rng = np.random.default_rng(7)
    A = shifted(rng, 4, 0.0, 0.5)
    _, report = fun2m(exp_sum, A, A, np.eye(4))
    assert report.max_digits == 16


def test_frechet_derivative():
    rng = np.random.default_rng(8)
    A = 0.5 * rng.standard_normal((6, 6))
    E = rng.standard_normal((6, 6))
    L = frechet_derivative('exp', A, E)
    t = 1e-5
    difference = (expm(A + t * E) - expm(A - t * E)) / (2 * t)
    assert np.linalg.norm(L - difference) <= 1e-6 * np.linalg.norm(L)


def test_kronecker_apply():
    rng = np.random.default_rng(9)
    A, B = 0.5 * rng.standard_normal((4, 4)), 0.5 * rng.standard_normal((3, 3))
    C = rng.standard_normal((4, 3))
    X = kronecker_apply('exp', A, B, C)
    K = np.kron(A, np.eye(3)) + np.kron(np.eye(4), B)
    assert relative(X.reshape(-1), expm(K) @ C.reshape(-1)) < 1e-10
    with pytest.raises(ArgumentError):
        kronecker_apply('cosh', A, B, C)
