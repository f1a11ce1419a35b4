from __future__ import annotations

import functools
import re
from typing import Iterable, Optional

import numpy as np
from scipy.signal import convolve2d
from scipy.special import comb

from .errors import ArgumentError
from .function import BivariateFunction
from .series import KERNELS, Kernel, on_branch_cut, power_series

# relative gap below which divided differences use their integral form
_DIVIDED_DIFFERENCE_GAP = 1e-2
_QUADRATURE_EXTRA_NODES = 16


@functools.lru_cache(maxsize=32)
def _binomial_table(order: int) -> np.ndarray:
    """B[i, j] = C(i + j, i) for i + j <= order, zero elsewhere."""
    i = np.arange(order + 1)
    total = i[:, None] + i[None, :]
    B = np.where(total <= order, comb(total, i[:, None]), 0.0)
    B.setflags(write=False)
    return B


def _spread(t: np.ndarray, order: int) -> np.ndarray:
    """T[i, j] = t[i + j] on i + j <= order, zero elsewhere."""
    i = np.arange(order + 1)
    total = i[:, None] + i[None, :]
    return np.where(total <= order, t[np.minimum(total, order)], 0)


def _substitute(expression: str, argument: str) -> str:
    """'exp(s)/s' -> 'exp(x+y)/(x+y)'"""
    text = re.sub(r"\bs\b", f"({argument})", expression)
    return text.replace(f"(({argument}))", f"({argument})")


@functools.lru_cache(maxsize=8)
def _gauss_legendre(nodes: int):
    s, w = np.polynomial.legendre.leggauss(nodes)
    return (s + 1) / 2, w / 2


def sum_function(name: str, kernel: Kernel) -> BivariateFunction:
    """
    f(x, y) = h(x + y) for a univariate kernel h.

    All mixed partials of total order k equal h^(k)(x + y), so the scaled
    table is c[i, j] = t[i + j] C(i + j, i) from the scaled series of h.
    """

    def evaluate(x, y):
        return kernel.evaluate(np.asarray(x) + np.asarray(y))

    def evaluate_mp(mp, x, y):
        return kernel.evaluate_mp(mp, x + y)

    def table(x, y, order, scale):
        t = kernel.series(x + y, order, scale)
        with np.errstate(all='ignore'):
            return _spread(t, order) * _binomial_table(order)

    def singular(x, y):
        return kernel.singular(np.asarray(x) + np.asarray(y))

    expression = _substitute(kernel.expression, "x+y")
    return BivariateFunction(name, evaluate, evaluate_mp=evaluate_mp, table=table,
                             conj_symmetric=True, singular=singular, expression=expression)


def divided_difference(kernel: Kernel) -> BivariateFunction:
    """
    f(x, y) = (g(x) - g(y)) / (x - y), extended by g'(x) on x = y.

    Close to the diagonal the integral form f(x, y) = int_0^1 g'(y + t (x - y)) dt
    is used, which also yields the Taylor table by differentiating under the
    integral:

        c[i, j] = (k + 1) C(k, i) int_0^1 t^i (1 - t)^j t_{k+1}(z(t)) / rho dt,

    with k = i + j, z(t) = y + t (x - y) and t_k the scaled series of g.
    """
    if kernel.derivative is None:
        raise ArgumentError(f"g = {kernel.name} has no derivative for its divided difference")
    nodes, weights = _gauss_legendre(20)

    def evaluate(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=complex), np.asarray(y, dtype=complex))
        d = x - y
        near = np.abs(d) <= _DIVIDED_DIFFERENCE_GAP * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))
        with np.errstate(all='ignore'):
            out = np.array((kernel.evaluate(x) - kernel.evaluate(y)) / np.where(near, 1, d), dtype=complex)
            if np.any(near):
                z = y[near][..., None] + nodes * d[near][..., None]
                out[near] = kernel.derivative(z) @ weights
        return out

    def evaluate_mp(mp, x, y):
        if x == y:
            return kernel.derivative_mp(mp, x)
        scale = max(1, abs(x), abs(y))
        loss = max(0, int(mp.ceil(-mp.log10(abs(x - y) / scale))))
        with mp.extradps(loss + 5):
            value = (kernel.evaluate_mp(mp, x) - kernel.evaluate_mp(mp, y)) / (x - y)
        return +value

    def table(x, y, order, scale):
        t, w = _gauss_legendre(order // 2 + _QUADRATURE_EXTRA_NODES)
        z = y + t * (x - y)
        e = np.array([kernel.series(zq, order + 1, scale)[1:] for zq in z])
        e *= np.arange(1, order + 2) / scale
        k = np.arange(order + 1)
        ti = t[:, None] ** k
        tj = (1 - t)[:, None] ** k
        total = np.minimum(k[:, None] + k[None, :], order)
        with np.errstate(all='ignore'):
            c = np.einsum('q,qi,qj,qij->ij', w, ti, tj, e[:, total])
            return np.where(_binomial_table(order) > 0, c * _binomial_table(order), 0)

    def singular(x, y):
        return kernel.singular(x) | kernel.singular(y)

    return BivariateFunction(f'f2g:{kernel.name}', evaluate, evaluate_mp=evaluate_mp, table=table,
                             conj_symmetric=True, singular=singular,
                             expression=f"({_substitute(kernel.expression, 'x')} - "
                                        f"{_substitute(kernel.expression, 'y')})/(x-y)")


def inv_sqrt_sum_diff() -> BivariateFunction:
    """
    f(x, y) = 1 / (sqrt(x + y) (x - y)).

    The table is the two-dimensional Cauchy product of the tables of
    1/sqrt(x + y) and 1/(x - y).
    """

    def evaluate(x, y):
        x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
        with np.errstate(all='ignore'):
            return 1 / (np.sqrt(x + y) * (x - y))

    def evaluate_mp(mp, x, y):
        return 1 / (mp.sqrt(x + y) * (x - y))

    def table(x, y, order, scale):
        binomial = _binomial_table(order)
        signs = (-1.0) ** np.arange(order + 1)
        with np.errstate(all='ignore'):
            P = _spread(power_series(x + y, -0.5, order, scale), order) * binomial
            Q = _spread(power_series(x - y, -1, order, scale), order) * binomial * signs[None, :]
            product = convolve2d(P, Q)[:order + 1, :order + 1]
        return np.where(binomial > 0, product, 0)

    def singular(x, y):
        x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
        return on_branch_cut(x + y) | (x == y)

    return BivariateFunction('inv_sqrt_sum_diff', evaluate, evaluate_mp=evaluate_mp, table=table,
                             conj_symmetric=True, singular=singular,
                             expression='1/(sqrt(x+y)(x-y))')


class FunctionRegistry:
    def __init__(self, functions: Iterable[BivariateFunction] = ()):
        self._name_to_function = {}
        for function in functions:
            self.register(function)

    def register(self, function: BivariateFunction, name: Optional[str] = None):
        name = name or function.name
        if name in self._name_to_function:
            raise ArgumentError(f"Function '{name}' is already registered")
        self._name_to_function[name] = function

    def get_function(self, name: str) -> BivariateFunction:
        if function := self._name_to_function.get(name):
            return function
        raise ArgumentError(f"Function '{name}' not found")

    def __contains__(self, name):
        return name in self._name_to_function

    @property
    def names(self):
        return list(self._name_to_function)


builtin = FunctionRegistry([
    sum_function('f1', KERNELS['inv']),
    divided_difference(KERNELS['exp']),
    divided_difference(KERNELS['sqrt']),
    sum_function('f3h:exp', KERNELS['exp']),
    sum_function('f3h:sqrt', KERNELS['sqrt']),
    sum_function('sqrt_sum', KERNELS['sqrt']),
    sum_function('inv_sqrt_sum', KERNELS['inv_sqrt']),
    sum_function('exp_over_sum', KERNELS['exp_over']),
    sum_function('exp_sqrt_sum', KERNELS['exp_sqrt']),
    inv_sqrt_sum_diff(),
])

# the four functions of the accuracy experiments
BENCHMARK_FUNCTIONS = ('sqrt_sum', 'inv_sqrt_sum', 'exp_over_sum', 'exp_sqrt_sum')


def builtin_function(name: str, inner: Optional[str] = None) -> BivariateFunction:
    """
    Look up a built-in function.

    :param str name: f1, f2g, f3h, sqrt_sum, inv_sqrt_sum, exp_over_sum,
        exp_sqrt_sum or inv_sqrt_sum_diff; f2g and f3h also accept the
        spelled-out form 'f2g:exp'
    :param str inner: univariate g or h (exp, sqrt) for f2g and f3h
    :raises ArgumentError: on unknown names
    """
    if inner is not None:
        name = f'{name}:{inner}'
    elif name in ('f2g', 'f3h'):
        raise ArgumentError(f"Function '{name}' needs a univariate function, e.g. '{name}:exp'")
    return builtin.get_function(name)
