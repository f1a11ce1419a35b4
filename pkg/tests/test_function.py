import math
from cmath import isclose

import numpy as np
import pytest

from bivarfun.errors import AnalyticityError, ArgumentError, DerivativeRequiredError
from bivarfun.function import BivariateFunction
from bivarfun.function_registry import FunctionRegistry, builtin, builtin_function
from bivarfun.series import compose_exp, exp_series, on_branch_cut, power_series


def test_series():
    assert np.allclose(power_series(4, 0.5, 2, 1.0), [2, 0.25, -1 / 64])
    a = np.array([0.3, 0.5, 0, 0, 0], dtype=complex)
    assert np.allclose(compose_exp(a), exp_series(0.3, 4, 0.5))
    assert list(on_branch_cut([-1, 0, 1j, 1, -1 + 1e-3j])) == [True, True, False, False, False]


def test_f1():
    f = builtin_function('f1')
    assert isclose(f(1, 2), 1 / 3)
    assert isclose(f.partial(1, 1, 1, 1), 0.25)
    assert isclose(f.partial(2, 0, 1, 1), 0.25)
    assert f.expression == '1/(x+y)'
    assert repr(f) == "<BivariateFunction('f1')>"


def test_expressions():
    assert builtin_function('sqrt_sum').expression == 'sqrt(x+y)'
    assert builtin_function('exp_over_sum').expression == 'exp(x+y)/(x+y)'


def test_sum_table():
    f = builtin_function('f3h', 'exp')
    c = f.taylor_table(0.1, 0.2, 4, 0.5)
    assert isclose(c[2, 1], math.exp(0.3) * 0.5 ** 3 / 2)
    assert c[3, 2] == 0


def test_divided_difference():
    f = builtin_function('f2g', 'exp')
    assert f.name == 'f2g:exp'
    assert isclose(f(0, 0), 1)
    assert isclose(f(1, 2), math.exp(2) - math.exp(1))
    assert isclose(f(1, 1 + 1e-9), math.exp(1), rel_tol=1e-8)
    c = f.taylor_table(0, 0, 3, 1.0)
    assert isclose(c[0, 0], 1, abs_tol=1e-14)
    assert isclose(c[1, 1], 1 / 6, abs_tol=1e-14)
    assert isclose(c[2, 0], 1 / 6, abs_tol=1e-14)
    assert isclose(f.partial(1, 0, 0, 0), 0.5, abs_tol=1e-14)


def test_divided_difference_sqrt():
    f = builtin_function('f2g:sqrt')
    assert isclose(f(4, 9), 1 / 5)
    assert isclose(f(4, 4), 0.25)


def test_inv_sqrt_sum_diff():
    f = builtin_function('inv_sqrt_sum_diff')
    x, y = 2.0, 1.0
    s = x + y
    assert isclose(f(x, y), 1 / (math.sqrt(s) * (x - y)))
    c = f.taylor_table(x, y, 3, 1.0)
    fx = -0.5 * s ** -1.5 / (x - y) - s ** -0.5 / (x - y) ** 2
    fy = -0.5 * s ** -1.5 / (x - y) + s ** -0.5 / (x - y) ** 2
    assert isclose(c[0, 0], f(x, y))
    assert isclose(c[1, 0], fx)
    assert isclose(c[0, 1], fy)
    assert f.is_singular(1, 1)


def test_singular_set():
    f = builtin_function('sqrt_sum')
    assert f.is_singular(-1, -1)
    assert not f.is_singular(1, -0.5)
    with pytest.raises(AnalyticityError) as info:
        f.check_analytic([1, -2], [0.5, 1])
    assert info.value.point == (-2, 0.5)
    f.check_analytic([1, 2j], [1, 3])


def test_grid():
    f = builtin_function('f1')
    F = f.grid([1, 2], [1, 2, 3])
    assert F.shape == (2, 3)
    assert isclose(F[1, 2], 0.2)


def test_user_function():
    f = BivariateFunction('x*y', lambda x, y: x * y,
                          partial=lambda i, j, x, y: (x if i == 0 else 1) * (y if j == 0 else 1) if i <= 1 and j <= 1 else 0)
    assert f(2, 3) == 6
    c = f.taylor_table(2, 3, 2, 1.0)
    assert np.allclose(c, [[6, 2, 0], [3, 1, 0], [0, 0, 0]])
    g = BivariateFunction('opaque', lambda x, y: x + y)
    assert not g.has_derivatives
    with pytest.raises(DerivativeRequiredError):
        g.partial(1, 0, 0, 0)


def test_registry():
    assert 'inv_sqrt_sum_diff' in builtin
    assert len(builtin.names) == 10
    with pytest.raises(ArgumentError):
        builtin_function('cosh_sum')
    with pytest.raises(ArgumentError):
        builtin_function('f2g')
    registry = FunctionRegistry()
    registry.register(builtin_function('f1'))
    with pytest.raises(ArgumentError):
        registry.register(builtin_function('f1'))
    registry.register(builtin_function('f1'), name='sylvester')
    assert registry.get_function('sylvester').name == 'f1'
