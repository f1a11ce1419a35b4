"""
Double precision complex dense linear algebra.

Everything here works on ``numpy`` arrays of dtype complex128: Schur
factorization (Householder Hessenberg reduction followed by shifted complex
QR), Givens based reordering of Schur forms, triangular Sylvester solvers and
norm estimates.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import solve_triangular

from . import constant
from .errors import ArgumentError, FactorizationError, SingularityError
from .util import complex_gaussian

logger = logging.getLogger(__name__)


def as_matrix(X, name: str = 'matrix', square: bool = False) -> np.ndarray:
    """
    Convert to a finite two-dimensional complex array.

    :param X: array-like
    :param str name: used in error messages
    :param bool square: require a square shape
    :rtype: numpy.ndarray
    """
    M = np.asarray(X, dtype=complex)
    if M.ndim != 2:
        raise ArgumentError(f"{name} must be two-dimensional, got shape {M.shape}")
    if square and M.shape[0] != M.shape[1]:
        raise ArgumentError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ArgumentError(f"{name} has non-finite entries")
    return M


def matmul(X, Y) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    Y = np.asarray(Y, dtype=complex)
    if X.ndim != 2 or Y.ndim != 2 or X.shape[1] != Y.shape[0]:
        raise ArgumentError(f"cannot multiply shapes {X.shape} and {Y.shape}")
    return X @ Y


@dataclass(frozen=True)
class GivensRotation:
    """
    Plane rotation G = [[c, s], [-conj(s), c]] acting on indices (i, i + 1).
    """
    c: float
    s: complex
    i: int

    @classmethod
    def zeroing(cls, a: complex, b: complex, i: int) -> GivensRotation:
        """
        Rotation with G @ [a, b] = [r, 0].
        """
        abs_a = abs(a)
        if b == 0:
            return cls(1.0, 0j, i)
        if abs_a == 0:
            return cls(0.0, 1 + 0j, i)
        r = math.hypot(abs_a, abs(b))
        return cls(abs_a / r, complex((a / abs_a) * np.conj(b) / r), i)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.c, self.s], [-np.conj(self.s), self.c]], dtype=complex)

    def apply_left(self, M: np.ndarray, columns: slice = slice(None)):
        """M[i:i+2, columns] <- G @ M[i:i+2, columns], in place."""
        c, s, i = self.c, self.s, self.i
        x, y = M[i, columns].copy(), M[i + 1, columns]
        M[i, columns] = c * x + s * y
        M[i + 1, columns] = c * y - s.conjugate() * x

    def apply_right(self, M: np.ndarray, rows: slice = slice(None)):
        """M[rows, i:i+2] <- M[rows, i:i+2] @ G^H, in place."""
        c, s, i = self.c, self.s, self.i
        x, y = M[rows, i].copy(), M[rows, i + 1]
        M[rows, i] = c * x + s.conjugate() * y
        M[rows, i + 1] = c * y - s * x


@dataclass(frozen=True)
class SchurForm:
    """
    A = Q T Q^H with Q unitary and T upper triangular.
    """
    Q: np.ndarray
    T: np.ndarray

    @property
    def size(self) -> int:
        return self.T.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diag(self.T).copy()

    def reconstruct(self) -> np.ndarray:
        return self.Q @ self.T @ self.Q.conj().T


def _hessenberg(A: np.ndarray):
    H = A.copy()
    m = H.shape[0]
    Q = np.eye(m, dtype=complex)
    for k in range(m - 2):
        x = H[k + 1:, k]
        if not np.any(x[1:]):
            continue
        norm_x = np.linalg.norm(x)
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x.copy()
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        H[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ H[k + 1:, :])
        H[:, k + 1:] -= 2.0 * np.outer(H[:, k + 1:] @ v, v.conj())
        Q[:, k + 1:] -= 2.0 * np.outer(Q[:, k + 1:] @ v, v.conj())
        H[k + 2:, k] = 0
    return H, Q


def _wilkinson_shift(H: np.ndarray, hi: int) -> complex:
    a, b = H[hi - 1, hi - 1], H[hi - 1, hi]
    c, d = H[hi, hi - 1], H[hi, hi]
    half_trace = (a + d) / 2
    disc = np.sqrt(((a - d) / 2) ** 2 + b * c)
    mu1, mu2 = half_trace + disc, half_trace - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _qr_sweep(H: np.ndarray, Q: np.ndarray, lo: int, hi: int, shift: complex):
    n = H.shape[0]
    x, y = H[lo, lo] - shift, H[lo + 1, lo]
    for k in range(lo, hi):
        if k > lo:
            x, y = H[k, k - 1], H[k + 1, k - 1]
        g = GivensRotation.zeroing(x, y, k)
        g.apply_left(H, columns=slice(max(lo, k - 1), n))
        g.apply_right(H, rows=slice(0, min(k + 2, hi) + 1))
        g.apply_right(Q)
        if k > lo:
            H[k + 1, k - 1] = 0


def schur(A) -> SchurForm:
    """
    Complex Schur decomposition A = Q T Q^H.

    Householder reduction to Hessenberg form, then single-shift QR sweeps
    with Wilkinson shifts (exceptional shifts after 10 and 20 stalled
    iterations). A subdiagonal entry is deflated once
    |H[i+1, i]| <= u (|H[i, i]| + |H[i+1, i+1]|).

    :param A: square matrix
    :rtype: SchurForm
    :raises FactorizationError: after 30 m QR sweeps without convergence
    """
    A = as_matrix(A, 'A', square=True)
    m = A.shape[0]
    if m == 0:
        return SchurForm(np.zeros((0, 0), dtype=complex), np.zeros((0, 0), dtype=complex))
    H, Q = _hessenberg(A)
    norm_h = np.linalg.norm(H)
    budget = constant.SCHUR_SWEEPS_PER_EIGENVALUE * m
    iterations = 0
    stalled = 0
    hi = m - 1
    while hi > 0:
        diagonal = np.abs(np.diag(H)[:hi + 1])
        scale = diagonal[:-1] + diagonal[1:]
        scale[scale == 0] = norm_h
        small = np.flatnonzero(np.abs(np.diag(H, -1)[:hi]) <= constant.U * scale)
        lo = int(small[-1]) + 1 if small.size else 0
        if lo:
            H[lo, lo - 1] = 0
        if lo == hi:
            hi -= 1
            stalled = 0
            continue
        if iterations >= budget:
            raise FactorizationError(f"QR iteration did not converge after {iterations} sweeps",
                                     iterations=iterations)
        iterations += 1
        stalled += 1
        if stalled in (10, 20):
            shift = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            shift = _wilkinson_shift(H, hi)
        _qr_sweep(H, Q, lo, hi, shift)
    logger.debug("schur: m=%d converged after %d sweeps", m, iterations)
    return SchurForm(Q, np.triu(H))


def _swap_adjacent(T: np.ndarray, Q: np.ndarray, k: int) -> bool:
    t11, t22 = T[k, k], T[k + 1, k + 1]
    if abs(t11 - t22) <= 4 * constant.U * max(abs(t11), abs(t22)):
        logger.debug("reorder_schur: skipped swap of equal eigenvalues at %d", k)
        return False
    m = T.shape[0]
    g = GivensRotation.zeroing(T[k, k + 1], t22 - t11, k)
    g.apply_left(T, columns=slice(k, m))
    g.apply_right(T, rows=slice(0, k + 2))
    g.apply_right(Q)
    T[k, k], T[k + 1, k + 1] = t22, t11
    T[k + 1, k] = 0
    return True


def reorder_schur(S: SchurForm, target_order: Sequence[int]) -> SchurForm:
    """
    Reorder a Schur form so that the new diagonal is
    ``old_diagonal[target_order]``, by adjacent Givens swaps.

    :param SchurForm S: factorization to reorder
    :param target_order: permutation of range(m) (0-based)
    :rtype: SchurForm
    """
    order = [int(p) for p in target_order]
    m = S.size
    if sorted(order) != list(range(m)):
        raise ArgumentError(f"{target_order} is not a permutation of 0..{m - 1}")
    if order == list(range(m)):
        return S
    T, Q = S.T.copy(), S.Q.copy()
    current = list(range(m))
    pending = list(order)
    for p in range(m):
        wanted = pending[p]
        k = current.index(wanted)
        while k > p:
            if _swap_adjacent(T, Q, k - 1):
                current[k - 1], current[k] = current[k], current[k - 1]
            else:
                # equal diagonal entries: the one at k - 1 moves on in place
                # of wanted, which takes over its later target
                twin = current[k - 1]
                pending[pending.index(twin, p + 1)] = wanted
                wanted = twin
            k -= 1
    return SchurForm(Q, T)


def sylvester_tri(A11, A22, C) -> np.ndarray:
    """
    Solve A11 V - V A22 = C for upper triangular A11 (p x p), A22 (q x q).

    Column sweep: (A11 - A22[j, j] I) v_j = c_j + sum_{i<j} v_i A22[i, j].

    :raises SingularityError: when A11[i, i] == A22[j, j] exactly
    """
    A11 = as_matrix(A11, 'A11', square=True)
    A22 = as_matrix(A22, 'A22', square=True)
    C = as_matrix(C, 'C')
    p, q = A11.shape[0], A22.shape[0]
    if C.shape != (p, q):
        raise ArgumentError(f"C must have shape {(p, q)}, got {C.shape}")
    V = np.zeros((p, q), dtype=complex)
    if p == 0 or q == 0:
        return V
    d11 = np.diag(A11)
    identity = np.eye(p)
    for j in range(q):
        shift = A22[j, j]
        hits = np.flatnonzero(d11 == shift)
        if hits.size:
            i = int(hits[0])
            raise SingularityError(f"A11[{i},{i}] equals A22[{j},{j}] = {shift}", pair=(i, j))
        rhs = C[:, j] + V[:, :j] @ A22[:j, j]
        V[:, j] = solve_triangular(A11 - shift * identity, rhs)
    return V


def _bartels_stewart_triangular(TA: np.ndarray, TB: np.ndarray, C: np.ndarray) -> np.ndarray:
    m, n = C.shape
    X = np.zeros((m, n), dtype=complex)
    rhs = C.copy()
    p, q = m, 0
    while p > 0 and q < n:
        a22, b11 = TA[p - 1, p - 1], TB[q, q]
        # scalar (2,1) block
        X[p - 1, q] = rhs[p - 1, q] / (a22 + b11)
        if p > 1:
            X[:p - 1, q] = solve_triangular(TA[:p - 1, :p - 1] + b11 * np.eye(p - 1),
                                            rhs[:p - 1, q] - TA[:p - 1, p - 1] * X[p - 1, q])
        if q < n - 1:
            X[p - 1, q + 1:] = solve_triangular(TB[q + 1:, q + 1:] + a22 * np.eye(n - q - 1),
                                                rhs[p - 1, q + 1:] - X[p - 1, q] * TB[q, q + 1:],
                                                trans='T')
        if p > 1 and q < n - 1:
            rhs[:p - 1, q + 1:] -= (np.outer(TA[:p - 1, p - 1], X[p - 1, q + 1:])
                                    + np.outer(X[:p - 1, q], TB[q, q + 1:]))
        p -= 1
        q += 1
    return X


def sylvester_bartels_stewart(A, B, C) -> np.ndarray:
    """
    Solve A X + X B = C.

    Both coefficients are Schur reduced; the triangular equation is then
    peeled one row of A and one column of B at a time: the scalar (2,1)
    entry, the first column, the last row, and an update of the remaining
    top-right block.

    :raises SingularityError: when lambda + mu vanishes to working accuracy
    """
    A = as_matrix(A, 'A', square=True)
    B = as_matrix(B, 'B', square=True)
    C = as_matrix(C, 'C')
    m, n = A.shape[0], B.shape[0]
    if C.shape != (m, n):
        raise ArgumentError(f"C must have shape {(m, n)}, got {C.shape}")
    if m == 0 or n == 0:
        return np.zeros((m, n), dtype=complex)
    SA, SB = schur(A), schur(B)
    lam, mu = SA.eigenvalues, SB.eigenvalues
    sums = np.abs(lam[:, None] + mu[None, :])
    scale = 4 * constant.U * (np.abs(lam)[:, None] + np.abs(mu)[None, :])
    hits = np.argwhere(sums <= scale)
    if hits.size:
        i, j = (int(v) for v in hits[0])
        raise SingularityError(f"eigenvalues {lam[i]} of A and {mu[j]} of B sum to zero", pair=(i, j))
    Ct = SA.Q.conj().T @ C @ SB.Q
    Y = _bartels_stewart_triangular(SA.T, SB.T, Ct)
    return SA.Q @ Y @ SB.Q.conj().T


def spectral_norm(X) -> float:
    """
    Largest singular value.

    Exact SVD up to 3 x 3, otherwise power iteration on X^H X from a fixed
    random start (relative tolerance 1e-6, at most 200 iterations).
    """
    X = np.asarray(X, dtype=complex)
    if X.size == 0:
        return 0.0
    scale = float(np.max(np.abs(X)))
    if scale == 0 or not math.isfinite(scale):
        return scale
    if max(X.shape) <= 3:
        return float(np.linalg.norm(X, 2))
    Y = X / scale
    rng = np.random.default_rng(0)
    v = complex_gaussian(rng, Y.shape[1])
    v /= np.linalg.norm(v)
    estimate = 0.0
    for _ in range(constant.NORM_MAX_ITERATIONS):
        w = Y.conj().T @ (Y @ v)
        value = float(np.linalg.norm(w))
        if value == 0:
            break
        v = w / value
        converged = abs(value - estimate) <= constant.NORM_TOLERANCE * value
        estimate = value
        if converged:
            break
    return scale * math.sqrt(estimate)


def cond_estimate(V) -> float:
    """
    ||V|| ||V^-1|| for an upper triangular V, inverse by back substitution.

    :return: condition number, math.inf when the inverse overflows
    :raises SingularityError: on a zero diagonal entry
    """
    V = as_matrix(V, 'V', square=True)
    zeros = np.flatnonzero(np.diag(V) == 0)
    if zeros.size:
        i = int(zeros[0])
        raise SingularityError(f"V[{i},{i}] is zero", pair=(i, i))
    m = V.shape[0]
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        inverse = solve_triangular(V, np.eye(m, dtype=complex))
    if not np.all(np.isfinite(inverse)):
        return math.inf
    value = spectral_norm(V) * spectral_norm(inverse)
    return value if math.isfinite(value) else math.inf


def is_normal(A) -> bool:
    """||A^H A - A A^H||_F <= 10 m u ||A||_F^2."""
    A = np.asarray(A, dtype=complex)
    m = A.shape[0]
    if m <= 1:
        return True
    AH = A.conj().T
    commutator = np.linalg.norm(AH @ A - A @ AH)
    return commutator <= 10 * m * constant.U * np.linalg.norm(A) ** 2


def triangular_eigenvectors(T) -> np.ndarray:
    """
    Eigenvectors of an upper triangular matrix in double precision, columns
    of unit norm. Shifts smaller than u ||T|| are replaced by u ||T||, so
    defective inputs give an ill-conditioned but finite basis.
    """
    T = np.asarray(T, dtype=complex)
    m = T.shape[0]
    V = np.eye(m, dtype=complex)
    smallest = constant.U * max(np.linalg.norm(T), np.finfo(float).tiny)
    for j in range(1, m):
        M = T[:j, :j] - T[j, j] * np.eye(j)
        d = np.diag(M).copy()
        tiny = np.abs(d) < smallest
        d[tiny] = smallest
        np.fill_diagonal(M, d)
        V[:j, j] = solve_triangular(M, -T[:j, j])
        V[:, j] /= np.linalg.norm(V[:, j])
    return V


def eig(A):
    """
    Eigendecomposition A = S diag(lam) S^-1 through the Schur form.

    Normal matrices keep the unitary Schur vectors; otherwise the triangular
    eigenvectors are mapped back by Q.

    :return: (S, lam)
    """
    S = schur(A)
    lam = S.eigenvalues
    if is_normal(A):
        return S.Q, lam
    return S.Q @ triangular_eigenvectors(S.T), lam
