"""
Arbitrary precision complex matrices.

Precision is carried by the matrix: every ``MpMatrix`` holds a
``PrecisionContext`` whose private ``mpmath.MPContext`` performs all of its
arithmetic, so switching precision is always an explicit conversion.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import mpmath
import numpy as np

from . import constant
from .errors import ArgumentError, SingularityError


@functools.lru_cache(maxsize=None)
def _mp_context(digits: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = math.ceil(digits * math.log2(10))
    return ctx


@dataclass(frozen=True)
class PrecisionContext:
    """
    Working precision in decimal digits, 16 to 4096.
    """
    digits: int

    def __post_init__(self):
        if not isinstance(self.digits, int) or isinstance(self.digits, bool):
            raise ArgumentError(f"{self.digits!r} is not an integer digit count.")
        if not constant.MIN_DIGITS <= self.digits <= constant.MAX_DIGITS:
            raise ArgumentError(
                f"{self.digits} digits outside [{constant.MIN_DIGITS}, {constant.MAX_DIGITS}]")

    @property
    def bits(self) -> int:
        return math.ceil(self.digits * math.log2(10))

    @property
    def unit_roundoff(self) -> float:
        return 10.0 ** -self.digits

    @property
    def mp(self) -> mpmath.MPContext:
        return _mp_context(self.digits)


class MpMatrix:
    """
    Dense matrix of ``mpc`` entries, stored as a numpy object array, all
    rounded to ``ctx``.
    """

    def __init__(self, data: np.ndarray, ctx: PrecisionContext):
        if data.ndim != 2:
            raise ArgumentError(f"MpMatrix data must be two-dimensional, got shape {data.shape}")
        self.data = data
        self.ctx = ctx

    @classmethod
    def zeros(cls, rows: int, cols: int, ctx: PrecisionContext) -> MpMatrix:
        zero = ctx.mp.mpc(0)
        data = np.empty((rows, cols), dtype=object)
        data.fill(zero)
        return cls(data, ctx)

    @classmethod
    def identity(cls, n: int, ctx: PrecisionContext) -> MpMatrix:
        M = cls.zeros(n, n, ctx)
        one = ctx.mp.mpc(1)
        for i in range(n):
            M.data[i, i] = one
        return M

    @property
    def shape(self):
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __repr__(self):
        return f"MpMatrix({self.rows}x{self.cols}, digits={self.ctx.digits})"

    def diagonal(self) -> list:
        return [self.data[i, i] for i in range(min(self.shape))]

    def to_context(self, ctx: PrecisionContext) -> MpMatrix:
        """Round every entry to ``ctx``."""
        if ctx == self.ctx:
            return self
        mpc = ctx.mp.mpc
        data = np.empty(self.shape, dtype=object)
        for idx, z in np.ndenumerate(self.data):
            data[idx] = +mpc(z)
        return MpMatrix(data, ctx)

    def copy(self) -> MpMatrix:
        return MpMatrix(self.data.copy(), self.ctx)

    def transpose(self) -> MpMatrix:
        return MpMatrix(self.data.T.copy(), self.ctx)


class Demoted(NamedTuple):
    matrix: np.ndarray
    overflow: bool


def promote(X, ctx: PrecisionContext) -> MpMatrix:
    """Exact embedding of a double precision matrix."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise ArgumentError(f"expected a matrix, got shape {X.shape}")
    mpc = ctx.mp.mpc
    data = np.empty(X.shape, dtype=object)
    for idx, z in np.ndenumerate(X):
        data[idx] = mpc(z.real, z.imag)
    return MpMatrix(data, ctx)


def demote(X: MpMatrix) -> Demoted:
    """Round to the nearest doubles; entries beyond double range become inf."""
    out = np.empty(X.shape, dtype=complex)
    for idx, z in np.ndenumerate(X.data):
        out[idx] = complex(z)
    return Demoted(out, not bool(np.all(np.isfinite(out))))


def _target(ctx: Optional[PrecisionContext], *matrices: MpMatrix) -> PrecisionContext:
    if ctx is not None:
        return ctx
    contexts = {M.ctx for M in matrices}
    if len(contexts) != 1:
        digits = sorted(c.digits for c in contexts)
        raise ArgumentError(f"operands at different precisions {digits}; name a target context")
    return contexts.pop()


def mp_matmul(X: MpMatrix, Y: MpMatrix, ctx: Optional[PrecisionContext] = None) -> MpMatrix:
    if X.cols != Y.rows:
        raise ArgumentError(f"cannot multiply shapes {X.shape} and {Y.shape}")
    target = _target(ctx, X, Y)
    if X.cols == 0:
        return MpMatrix.zeros(X.rows, Y.cols, target)
    mp = target.mp
    a, b = X.to_context(target).data, Y.to_context(target).data.T
    out = np.empty((X.rows, Y.cols), dtype=object)
    for i in range(X.rows):
        row = a[i]
        for j in range(Y.cols):
            out[i, j] = mp.fdot(row, b[j])
    return MpMatrix(out, target)


def mp_triangular_solve(T: MpMatrix, B: MpMatrix, side: str = 'left',
                        ctx: Optional[PrecisionContext] = None) -> MpMatrix:
    """
    Solve T X = B (side='left') or X T = B (side='right') for upper triangular T.
    """
    if T.rows != T.cols:
        raise ArgumentError(f"T must be square, got shape {T.shape}")
    target = _target(ctx, T, B)
    mp = target.mp
    t, b = T.to_context(target).data, B.to_context(target).data
    m = T.rows
    for i in range(m):
        if t[i, i] == 0:
            raise SingularityError(f"T[{i},{i}] is zero", pair=(i, i))
    out = np.empty(B.shape, dtype=object)
    if side == 'left':
        if B.rows != m:
            raise ArgumentError(f"cannot solve {T.shape} against {B.shape}")
        for c in range(B.cols):
            x = [None] * m
            for i in reversed(range(m)):
                s = b[i, c] - mp.fdot(t[i, i + 1:], x[i + 1:]) if i < m - 1 else b[i, c]
                x[i] = s / t[i, i]
            out[:, c] = x
    elif side == 'right':
        if B.cols != m:
            raise ArgumentError(f"cannot solve {B.shape} against {T.shape}")
        for r in range(B.rows):
            x = [None] * m
            for j in range(m):
                s = b[r, j] - mp.fdot(x[:j], t[:j, j]) if j > 0 else b[r, j]
                x[j] = s / t[j, j]
            out[r, :] = x
    else:
        raise ArgumentError(f"side must be 'left' or 'right', got {side!r}")
    return MpMatrix(out, target)


def mp_hadamard(X: MpMatrix, Y: MpMatrix, ctx: Optional[PrecisionContext] = None) -> MpMatrix:
    if X.shape != Y.shape:
        raise ArgumentError(f"shapes {X.shape} and {Y.shape} differ")
    target = _target(ctx, X, Y)
    return MpMatrix(X.to_context(target).data * Y.to_context(target).data, target)


def mp_norm_fro(X: MpMatrix):
    mp = X.ctx.mp
    return mp.sqrt(mp.fsum(z.real * z.real + z.imag * z.imag for z in X.data.flat))


def mp_triangular_eig(T: MpMatrix):
    """
    Eigenvectors of an upper triangular matrix with distinct diagonal.

    Column j solves (T - d_j I) v = 0 on the leading (j+1) x (j+1) block by
    back substitution with v_j = 1.

    :return: (V, D) with V unit upper triangular and D = diag(T) exactly
    :raises SingularityError: on exactly repeated diagonal entries;
        perturb the diagonal and retry
    """
    if T.rows != T.cols:
        raise ArgumentError(f"T must be square, got shape {T.shape}")
    mp = T.ctx.mp
    t = T.data
    m = T.rows
    d = [t[i, i] for i in range(m)]
    seen = {}
    for i, z in enumerate(d):
        key = z._mpc_
        if key in seen:
            raise SingularityError(f"diagonal entries {seen[key]} and {i} coincide; re-perturb",
                                   pair=(seen[key], i))
        seen[key] = i
    V = MpMatrix.identity(m, T.ctx)
    v = V.data
    for j in range(1, m):
        col = [None] * (j + 1)
        col[j] = v[j, j]
        for i in reversed(range(j)):
            s = mp.fdot(t[i, i + 1:j + 1], col[i + 1:j + 1])
            col[i] = -s / (d[i] - d[j])
        v[:j + 1, j] = col
    D = MpMatrix.zeros(m, m, T.ctx)
    for i in range(m):
        D.data[i, i] = d[i]
    return V, D


def mp_normalize_columns(V: MpMatrix) -> MpMatrix:
    """Scale every column to unit Euclidean norm."""
    mp = V.ctx.mp
    out = V.copy()
    for j in range(V.cols):
        column = out.data[:, j]
        norm = mp.sqrt(mp.fsum(z.real * z.real + z.imag * z.imag for z in column))
        out.data[:, j] = [z / norm for z in column]
    return out
