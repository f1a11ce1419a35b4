from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np

from .errors import AnalyticityError, DerivativeRequiredError
from .mparith import PrecisionContext


class BivariateFunction:
    """
    Class used to represent the scalar kernel f(x, y) of f{A,B}(C).

    Creation: f = BivariateFunction(name, evaluate[, evaluate_mp, table, partial, ...])

    evaluate: callable (x, y) -> complex
        vectorized over numpy arrays, principal branches for all roots.

    evaluate_mp: callable (mp, x, y) -> mpc, optional
        the same function on mpmath scalars, ``mp`` being the MPContext to
        compute in. Without it multiprecision callers fall back to the
        double precision value.

    table: callable (x, y, order, scale) -> ndarray, optional
        scaled Taylor table c[i, j] = f^(i,j)(x, y) scale^(i+j) / (i! j!)
        for i + j <= order (zero elsewhere).

    partial: callable (i, j, x, y) -> complex, optional
        mixed partial derivative f^(i,j). Either ``table`` or ``partial``
        enables the Taylor evaluator; each is derived from the other when
        only one is given.

    Example
    -------
    >>> product = BivariateFunction('x*y', lambda x, y: x * y,
    ...                             partial=lambda i, j, x, y: ...)

    Properties
    ----------
    name: str
    conj_symmetric: bool
        f(conj x, conj y) == conj f(x, y), required by the real 2x2 formula.
    has_derivatives: bool
        whether mixed partials are available
    """

    def __init__(self, name: str, evaluate: Callable, evaluate_mp: Optional[Callable] = None,
                 table: Optional[Callable] = None, partial: Optional[Callable] = None,
                 conj_symmetric: bool = False, singular: Optional[Callable] = None,
                 max_order: Optional[int] = None, expression: str = ''):
        self._name = name
        self._evaluate = evaluate
        self._evaluate_mp = evaluate_mp
        self._table = table
        self._partial = partial
        self._conj_symmetric = conj_symmetric
        self._singular = singular
        self._max_order = max_order
        self._expression = expression or name

    @property
    def name(self):
        return self._name

    @property
    def expression(self):
        return self._expression

    @property
    def conj_symmetric(self):
        return self._conj_symmetric

    @property
    def max_order(self):
        return self._max_order

    @property
    def has_derivatives(self):
        return self._table is not None or self._partial is not None

    def __call__(self, x, y) -> complex:
        return complex(self._evaluate(complex(x), complex(y)))

    def grid(self, xs, ys) -> np.ndarray:
        """
        F[i, j] = f(xs[i], ys[j]).
        """
        X, Y = np.meshgrid(np.asarray(xs, dtype=complex), np.asarray(ys, dtype=complex), indexing='ij')
        with np.errstate(all='ignore'):
            F = np.asarray(self._evaluate(X, Y), dtype=complex)
        return np.broadcast_to(F, X.shape).copy()

    def evaluate_mp(self, x, y, ctx: PrecisionContext):
        """
        f(x, y) computed in the arithmetic of ``ctx``.
        """
        mp = ctx.mp
        if self._evaluate_mp is None:
            return mp.mpc(self(complex(x), complex(y)))
        return +mp.mpc(self._evaluate_mp(mp, mp.mpc(x), mp.mpc(y)))

    def is_singular(self, x, y) -> bool:
        if self._singular is None:
            return False
        return bool(np.any(self._singular(complex(x), complex(y))))

    def check_analytic(self, xs, ys):
        """
        :raises AnalyticityError: naming the first pair (xs[i], ys[j]) on the
            singular set
        """
        if self._singular is None:
            return
        X, Y = np.meshgrid(np.asarray(xs, dtype=complex), np.asarray(ys, dtype=complex), indexing='ij')
        hits = np.argwhere(np.broadcast_to(self._singular(X, Y), X.shape))
        if hits.size:
            i, j = (int(v) for v in hits[0])
            point = (complex(X[i, j]), complex(Y[i, j]))
            raise AnalyticityError(f"{self.name} is not analytic at (x, y) = {point}", point=point)

    def _check_order(self, order: int):
        if not self.has_derivatives:
            raise DerivativeRequiredError(f"{self.name} provides no partial derivatives")
        if self._max_order is not None and order > self._max_order:
            raise DerivativeRequiredError(
                f"{self.name} provides partials up to order {self._max_order}, {order} requested")

    def partial(self, i: int, j: int, x, y) -> complex:
        self._check_order(i + j)
        if self._partial is not None:
            return complex(self._partial(i, j, complex(x), complex(y)))
        c = self._table(complex(x), complex(y), i + j, 1.0)[i, j]
        return complex(c * math.factorial(i) * math.factorial(j))

    def taylor_table(self, x, y, order: int, scale: float = 1.0) -> np.ndarray:
        """
        c[i, j] = f^(i,j)(x, y) scale^(i+j) / (i! j!) for i + j <= order.
        """
        self._check_order(order)
        if self._table is not None:
            return self._table(complex(x), complex(y), order, scale)
        c = np.zeros((order + 1, order + 1), dtype=complex)
        for i in range(order + 1):
            for j in range(order + 1 - i):
                log_weight = (i + j) * math.log(scale) - math.lgamma(i + 1) - math.lgamma(j + 1)
                c[i, j] = self._partial(i, j, complex(x), complex(y)) * math.exp(log_weight)
        return c

    def __repr__(self):
        return f"<BivariateFunction('{self}')>"

    def __str__(self):
        return self.name
