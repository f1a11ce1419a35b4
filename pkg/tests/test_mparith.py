from math import isclose

import numpy as np
import pytest

from bivarfun.errors import ArgumentError, SingularityError
from bivarfun.mparith import (MpMatrix, PrecisionContext, demote, mp_hadamard, mp_matmul, mp_norm_fro,
                              mp_normalize_columns, mp_triangular_eig, mp_triangular_solve, promote)
from bivarfun.util import complex_gaussian

ctx32 = PrecisionContext(32)


def test_precision_context():
    assert PrecisionContext(16).bits == 54
    assert isclose(PrecisionContext(100).unit_roundoff, 1e-100)
    for digits in (15, 4097, 20.5, True):
        with pytest.raises(ArgumentError):
            PrecisionContext(digits)


def test_promote_demote_exact():
    X = complex_gaussian(np.random.default_rng(0), (3, 4))
    M = promote(X, ctx32)
    assert M.shape == (3, 4)
    back = demote(M)
    assert not back.overflow
    assert np.array_equal(back.matrix, X)


def test_demote_overflow():
    M = MpMatrix.identity(2, ctx32)
    M.data[0, 0] = ctx32.mp.mpf('1e400')
    assert demote(M).overflow


def test_mp_matmul():
    rng = np.random.default_rng(1)
    X, Y = complex_gaussian(rng, (3, 5)), complex_gaussian(rng, (5, 2))
    Z = mp_matmul(promote(X, ctx32), promote(Y, ctx32))
    assert Z.ctx == ctx32
    assert np.allclose(demote(Z).matrix, X @ Y, rtol=1e-14, atol=1e-14)
    with pytest.raises(ArgumentError):
        mp_matmul(promote(X, ctx32), promote(Y, PrecisionContext(40)))
    assert mp_matmul(promote(X, ctx32), promote(Y, PrecisionContext(40)), ctx32).ctx == ctx32


def test_mp_matmul_associative():
    rng = np.random.default_rng(7)
    X, Y, Z = (promote(complex_gaussian(rng, shape), ctx32) for shape in ((4, 6), (6, 5), (5, 3)))
    left = mp_matmul(mp_matmul(X, Y), Z)
    right = mp_matmul(X, mp_matmul(Y, Z))
    gap = mp_norm_fro(MpMatrix(left.data - right.data, ctx32))
    scale = mp_norm_fro(X) * mp_norm_fro(Y) * mp_norm_fro(Z)
    assert gap <= 100 * ctx32.unit_roundoff * scale


def test_mp_triangular_solve():
    rng = np.random.default_rng(2)
    T = np.triu(complex_gaussian(rng, (4, 4))) + 3 * np.eye(4)
    B = complex_gaussian(rng, (4, 2))
    X = demote(mp_triangular_solve(promote(T, ctx32), promote(B, ctx32))).matrix
    assert np.allclose(T @ X, B)
    Y = demote(mp_triangular_solve(promote(T, ctx32), promote(B.T, ctx32), 'right')).matrix
    assert np.allclose(Y @ T, B.T)
    with pytest.raises(SingularityError):
        mp_triangular_solve(promote(np.zeros((2, 2)), ctx32), promote(np.ones((2, 1)), ctx32))
    with pytest.raises(ArgumentError):
        mp_triangular_solve(promote(T, ctx32), promote(B, ctx32), 'up')


def test_mp_triangular_eig():
    T = np.array([[1, 2, 3], [0, 2, 1], [0, 0, 4 + 1j]])
    V, D = mp_triangular_eig(promote(T, ctx32))
    Vd, Dd = demote(V).matrix, demote(D).matrix
    assert np.allclose(np.diag(Vd), 1)
    assert np.array_equal(np.diag(Dd), np.diag(T))
    assert np.allclose(T @ Vd, Vd @ Dd)
    with pytest.raises(SingularityError) as info:
        mp_triangular_eig(promote([[1, 1], [0, 1]], ctx32))
    assert info.value.pair == (0, 1)


def test_mp_norms():
    M = promote([[3, 0], [0, 4j]], ctx32)
    assert isclose(float(mp_norm_fro(M)), 5.0)
    N = demote(mp_normalize_columns(promote([[3, 1], [4, 0]], ctx32))).matrix
    assert np.allclose(np.linalg.norm(N, axis=0), 1)
    H = demote(mp_hadamard(M, M)).matrix
    assert np.allclose(H, [[9, 0], [0, -16]])


def test_to_context():
    M = promote([[1 / 3]], PrecisionContext(16))
    assert M.to_context(PrecisionContext(16)) is M
    wide = M.to_context(PrecisionContext(64))
    assert wide.ctx.digits == 64
    assert complex(wide.data[0, 0]) == 1 / 3
