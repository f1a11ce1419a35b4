"""
Univariate kernels h(s) behind the built-in bivariate functions.

Every kernel knows how to evaluate itself on numpy arrays and on mpmath
scalars, and how to produce scaled Taylor coefficients

    t_k = h^(k)(s0) rho^k / k!,    k = 0..order,

i.e. the coefficients of h(s0 + rho z) in z. Scaling by the expansion
radius keeps high orders representable without factorials.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

# relative distance to the negative real axis treated as "on the cut"
CUT_TOLERANCE = 1e-8


def power_series(s0: complex, alpha: float, order: int, rho: float) -> np.ndarray:
    """Coefficients of (s0 + rho z)^alpha, principal branch."""
    t = np.empty(order + 1, dtype=complex)
    with np.errstate(all='ignore'):
        w = rho / complex(s0)
        t[0] = complex(s0) ** alpha
        for k in range(1, order + 1):
            t[k] = t[k - 1] * ((alpha - k + 1) / k) * w
    return t


def exp_series(s0: complex, order: int, rho: float) -> np.ndarray:
    t = np.empty(order + 1, dtype=complex)
    with np.errstate(all='ignore'):
        t[0] = np.exp(complex(s0))
        for k in range(1, order + 1):
            t[k] = t[k - 1] * rho / k
    return t


def compose_exp(a: np.ndarray) -> np.ndarray:
    """Coefficients of exp(a(z)) from those of a(z)."""
    order = a.size - 1
    e = np.empty(order + 1, dtype=complex)
    j = np.arange(order + 1)
    with np.errstate(all='ignore'):
        e[0] = np.exp(a[0])
        for k in range(1, order + 1):
            e[k] = np.sum(j[1:k + 1] * a[1:k + 1] * e[k - 1::-1][:k]) / k
    return e


def exp_over_series(s0, order, rho):
    with np.errstate(all='ignore'):
        return np.convolve(exp_series(s0, order, rho), power_series(s0, -1, order, rho))[:order + 1]


def exp_sqrt_series(s0, order, rho):
    return compose_exp(power_series(s0, 0.5, order, rho))


def on_branch_cut(s) -> np.ndarray:
    s = np.asarray(s, dtype=complex)
    return (s.real <= 0) & (np.abs(s.imag) <= CUT_TOLERANCE * np.maximum(1.0, np.abs(s)))


def at_zero(s) -> np.ndarray:
    return np.asarray(s, dtype=complex) == 0


def never(s) -> np.ndarray:
    return np.zeros(np.shape(s), dtype=bool)


@dataclass(frozen=True)
class Kernel:
    name: str
    expression: str
    evaluate: Callable
    evaluate_mp: Callable
    series: Callable
    singular: Callable = never
    derivative: Optional[Callable] = None
    derivative_mp: Optional[Callable] = None


def _inv(s):
    with np.errstate(all='ignore'):
        return 1 / np.asarray(s, dtype=complex)


def _inv_sqrt(s):
    with np.errstate(all='ignore'):
        return 1 / np.sqrt(np.asarray(s, dtype=complex))


def _exp_over(s):
    s = np.asarray(s, dtype=complex)
    with np.errstate(all='ignore'):
        return np.exp(s) / s


def _exp_sqrt(s):
    return np.exp(np.sqrt(np.asarray(s, dtype=complex)))


def _sqrt_derivative(s):
    with np.errstate(all='ignore'):
        return 0.5 / np.sqrt(np.asarray(s, dtype=complex))


KERNELS = {
    'exp': Kernel(
        'exp', 'exp(s)',
        evaluate=lambda s: np.exp(np.asarray(s, dtype=complex)),
        evaluate_mp=lambda mp, s: mp.exp(s),
        series=exp_series,
        derivative=lambda s: np.exp(np.asarray(s, dtype=complex)),
        derivative_mp=lambda mp, s: mp.exp(s),
    ),
    'sqrt': Kernel(
        'sqrt', 'sqrt(s)',
        evaluate=lambda s: np.sqrt(np.asarray(s, dtype=complex)),
        evaluate_mp=lambda mp, s: mp.sqrt(s),
        series=lambda s0, order, rho: power_series(s0, 0.5, order, rho),
        singular=on_branch_cut,
        derivative=_sqrt_derivative,
        derivative_mp=lambda mp, s: 1 / (2 * mp.sqrt(s)),
    ),
    'inv': Kernel(
        'inv', '1/s',
        evaluate=_inv,
        evaluate_mp=lambda mp, s: 1 / s,
        series=lambda s0, order, rho: power_series(s0, -1, order, rho),
        singular=at_zero,
    ),
    'inv_sqrt': Kernel(
        'inv_sqrt', '1/sqrt(s)',
        evaluate=_inv_sqrt,
        evaluate_mp=lambda mp, s: 1 / mp.sqrt(s),
        series=lambda s0, order, rho: power_series(s0, -0.5, order, rho),
        singular=on_branch_cut,
    ),
    'exp_over': Kernel(
        'exp_over', 'exp(s)/s',
        evaluate=_exp_over,
        evaluate_mp=lambda mp, s: mp.exp(s) / s,
        series=exp_over_series,
        singular=at_zero,
    ),
    'exp_sqrt': Kernel(
        'exp_sqrt', 'exp(sqrt(s))',
        evaluate=_exp_sqrt,
        evaluate_mp=lambda mp, s: mp.exp(mp.sqrt(s)),
        series=exp_sqrt_series,
        singular=on_branch_cut,
    ),
}
