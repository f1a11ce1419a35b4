"""
Evaluation of bivariate matrix functions on atomic blocks.

All evaluators here take upper triangular A (m x m), B (n x n) and
C (m x n) and return

    f{A, B^T}(C) = sum over the spectra of f(x, y) (xI - A)^-1 C (yI - B)^-1,

so that f = x gives A C and f = y gives C B. Two interchangeable
evaluators are provided: a truncated bivariate Taylor expansion with
certified degree, and a randomized perturb-and-diagonalize scheme in
adaptive multiprecision.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import solve_triangular

from . import config, constant
from .blocking import cluster
from .dense import as_matrix, spectral_norm
from .errors import (AnalyticityError, ArgumentError, ContractError, ConvergenceError,
                     PerturbationError, PrecisionLimitError)
from .function import BivariateFunction
from .mparith import (MpMatrix, PrecisionContext, demote, mp_hadamard, mp_matmul, mp_norm_fro,
                      mp_normalize_columns, mp_triangular_eig, mp_triangular_solve, promote)
from .util import digits_for, substream

logger = logging.getLogger(__name__)

# order of the first Taylor table; doubled on demand
_INITIAL_TABLE_ORDER = 20
# relative asymmetry tolerated in rotation form
_ROTATION_TOLERANCE = 1e-14


def _triangular_args(A, B, C):
    A = as_matrix(A, 'A', square=True)
    B = as_matrix(B, 'B', square=True)
    C = as_matrix(C, 'C')
    if C.shape != (A.shape[0], B.shape[0]):
        raise ArgumentError(f"C must have shape {(A.shape[0], B.shape[0])}, got {C.shape}")
    for name, M in (('A', A), ('B', B)):
        if np.any(np.tril(M, -1) != 0):
            raise ArgumentError(f"{name} must be upper triangular")
    return A, B, C


def eigenvalue_grid(A, B) -> List[Tuple[complex, complex]]:
    """Distinct pairs of Lambda(A) x Lambda(B) for triangular A, B."""
    lam = np.unique(np.diag(np.asarray(A, dtype=complex)))
    mu = np.unique(np.diag(np.asarray(B, dtype=complex)))
    return [(complex(x), complex(y)) for x in lam for y in mu]


# Taylor expansion


@dataclass(frozen=True)
class TaylorPlan:
    """
    Expansion point, nilpotent-part size and certified degree of a Taylor
    evaluation. ``bound`` is the larger of the center and grid remainder
    estimates at ``degree``.
    """
    center: Tuple[complex, complex]
    theta: float
    degree: int
    epsilon: float
    bound: float = 0.0

    @property
    def rho(self) -> float:
        """Scale of the Taylor tables and of the nilpotent parts."""
        return self.theta if self.theta > 0 else 1.0


def _antidiagonal(c: np.ndarray, k: int) -> float:
    i = np.arange(k + 1)
    return float(np.sum(np.abs(c[i, k - i])))


def taylor_remainder_bound(f: BivariateFunction, plan: TaylorPlan, grid, normC: float) -> float:
    """
    theta^(k+1) ||C|| max over the grid of sum_{i+j=k+1} |f^(i,j)| / (i! j!).

    Taken over a finite grid of points this is a heuristic rather than a
    guaranteed bound.
    """
    if plan.theta == 0 or normC == 0:
        return 0.0
    k1 = plan.degree + 1
    worst = max((_antidiagonal(f.taylor_table(x, y, k1, plan.rho), k1) for x, y in grid), default=0.0)
    return normC * worst


def plan_taylor(f: BivariateFunction, A, B, C, epsilon: float, k_max: int) -> TaylorPlan:
    """
    Smallest degree whose remainder estimate at the trace-mean center, and
    then on the eigenvalue grid, is at most epsilon.

    :raises ConvergenceError: when no degree up to k_max qualifies
    """
    m, n = A.shape[0], B.shape[0]
    lam, mu = complex(np.trace(A) / m), complex(np.trace(B) / n)
    NA = A - lam * np.eye(m)
    NB = B - mu * np.eye(n)
    theta = constant.NORM_INFLATION * max(spectral_norm(NA), spectral_norm(NB))
    normC = spectral_norm(C)
    if theta == 0 or normC == 0:
        return TaylorPlan((lam, mu), theta, 0, epsilon)
    grid = eigenvalue_grid(A, B)
    order = min(_INITIAL_TABLE_ORDER, k_max + 1)
    table = f.taylor_table(lam, mu, order, theta)
    if not np.all(np.isfinite(table)):
        raise AnalyticityError(f"{f.name} is not analytic at the expansion point {(lam, mu)}", point=(lam, mu))
    grid_tables, grid_order = [], -1
    bound = math.inf
    for k in range(k_max + 1):
        if k + 1 > order:
            order = min(2 * order, k_max + 1)
            table = f.taylor_table(lam, mu, order, theta)
        bound = normC * _antidiagonal(table, k + 1)
        if not bound <= epsilon:
            continue
        if grid_order < k + 1:
            grid_order = order
            grid_tables = [f.taylor_table(x, y, grid_order, theta) for x, y in grid]
        grid_bound = normC * max(_antidiagonal(c, k + 1) for c in grid_tables)
        if grid_bound <= epsilon:
            return TaylorPlan((lam, mu), theta, k, epsilon, max(bound, grid_bound))
        bound = grid_bound
    raise ConvergenceError(f"no Taylor degree up to {k_max} reaches {epsilon:.3g}, remainder bound {bound:.3g}",
                           bound=bound)


def _horner(c: np.ndarray, NA: np.ndarray, NB: np.ndarray, C: np.ndarray) -> np.ndarray:
    """sum_{i+j<=k} c[i, j] NA^i C NB^j, Horner in NA outside and NB inside."""
    k = c.shape[0] - 1

    def row(i):
        D = c[i, k - i] * C
        for j in range(k - i - 1, -1, -1):
            D = D @ NB + c[i, j] * C
        return D

    acc = row(k)
    for i in range(k - 1, -1, -1):
        acc = NA @ acc + row(i)
    return acc


def evaluate_taylor(f: BivariateFunction, A, B, C, plan: TaylorPlan) -> np.ndarray:
    """
    Taylor polynomial of degree ``plan.degree`` around ``plan.center``
    applied to C, with the roles of A and B swapped when n > m.
    """
    A, B, C = (np.asarray(M, dtype=complex) for M in (A, B, C))
    m, n = C.shape
    lam, mu = plan.center
    rho = plan.rho
    c = f.taylor_table(lam, mu, plan.degree, rho)
    NA = (A - lam * np.eye(m)) / rho
    NB = (B - mu * np.eye(n)) / rho
    if n > m:
        return _horner(c.T, NB.T, NA.T, C.T).T
    return _horner(c, NA, NB, C)


def fun2_atom_taylor(f: BivariateFunction, A, B, C, epsilon: Optional[float] = None,
                     k_max: Optional[int] = None):
    """
    Truncated bivariate Taylor expansion of f{A, B^T}(C).

    :param float epsilon: absolute truncation tolerance, config default u
    :param int k_max: largest admissible degree, config default 150
    :return: (X, TaylorPlan)
    :raises DerivativeRequiredError: if f has no partial derivatives
    :raises ConvergenceError: if no degree up to k_max is certified
    """
    A, B, C = _triangular_args(A, B, C)
    epsilon = config.get_epsilon() if epsilon is None else epsilon
    k_max = config.get_k_max() if k_max is None else k_max
    m, n = C.shape
    if m == 0 or n == 0:
        return np.zeros((m, n), dtype=complex), TaylorPlan((0j, 0j), 0.0, 0, epsilon)
    f.check_analytic(np.diag(A), np.diag(B))
    plan = plan_taylor(f, A, B, C, epsilon, k_max)
    X = evaluate_taylor(f, A, B, C, plan)
    logger.debug("taylor atom %dx%d: degree=%d theta=%.3g bound=%.3g", m, n, plan.degree, plan.theta, plan.bound)
    return X, plan


# perturb and diagonalize


@dataclass(frozen=True)
class DiagPlan:
    """
    Precision bookkeeping of a perturb-and-diagonalize evaluation.
    """
    kappa_A: float
    kappa_B: float
    u_h: float
    digits: int
    perturbation_scale: Tuple[float, float]
    refinements: int


def kappa_estimate_heuristic(T, delta1: float) -> float:
    """
    Estimate of the condition number of the eigenvector matrix of a
    triangular T with distinct diagonal.

    The diagonal is clustered at delta1; a cluster of size m contributes
    m zeta (zeta + 1)^(m - 2) with zeta the ratio of its largest
    off-diagonal entry to its smallest eigenvalue gap, computed on the
    principal submatrix of the cluster.

    :param T: numpy array or MpMatrix
    :return: at least 1, math.inf when a cluster has a zero gap
    """
    data = T.data if isinstance(T, MpMatrix) else np.asarray(T, dtype=complex)
    diagonal = [data[i, i] for i in range(data.shape[0])]
    estimate = 1.0
    for idx in cluster([complex(d) for d in diagonal], delta1):
        size = idx.size
        if size < 2:
            continue
        pairs = [(int(i), int(j)) for a, i in enumerate(idx) for j in idx[a + 1:]]
        gap = min(float(abs(diagonal[i] - diagonal[j])) for i, j in pairs)
        if gap == 0:
            return math.inf
        zeta = max(float(abs(data[i, j])) for i, j in pairs) / gap
        try:
            value = size * zeta * (zeta + 1) ** (size - 2)
        except OverflowError:
            return math.inf
        estimate = max(estimate, value)
    return estimate


def _comparison_matrix(V: np.ndarray) -> np.ndarray:
    U = -np.abs(np.triu(V, 1))
    np.fill_diagonal(U, np.abs(np.diag(V)))
    return U


def greedy_kappa_refine(V: MpMatrix, u_h: float) -> float:
    """
    Condition number of a triangular eigenvector matrix, as cheaply as the
    matrix allows.

    1. in double precision, accepted when at most 1e14;
    2. ||V|| ||U^-1|| with U the comparison matrix, accepted when
       ||U^-1|| <= 1e4 ||V^-1||;
    3. in multiprecision at unit roundoff u_h (Frobenius norms).

    :return: the condition number, math.inf on overflow
    """
    Vd, overflow = demote(V)
    m = V.rows
    if not overflow and np.all(np.diag(Vd) != 0):
        identity = np.eye(m)
        with np.errstate(all='ignore'):
            inverse = solve_triangular(Vd, identity.astype(complex))
        if np.all(np.isfinite(inverse)):
            norm_v, norm_inverse = spectral_norm(Vd), spectral_norm(inverse)
            kappa = norm_v * norm_inverse
            if kappa <= constant.GREEDY_DOUBLE_LIMIT:
                return kappa
            with np.errstate(all='ignore'):
                comparison_inverse = solve_triangular(_comparison_matrix(Vd), identity)
            if np.all(np.isfinite(comparison_inverse)):
                norm_comparison = spectral_norm(comparison_inverse)
                if norm_comparison <= constant.GREEDY_COMPARISON_RATIO * norm_inverse:
                    return norm_v * norm_comparison
    ctx = PrecisionContext(digits_for(u_h))
    Vh = V.to_context(ctx)
    inverse = mp_triangular_solve(Vh, MpMatrix.identity(m, ctx))
    kappa = float(mp_norm_fro(Vh) * mp_norm_fro(inverse))
    logger.debug("kappa refined in multiprecision at %d digits: %.3g", ctx.digits, kappa)
    return kappa if math.isfinite(kappa) else math.inf


class PerturbedBlock:
    """
    Triangular block made diagonalizable by a random diagonal perturbation.

    Each diagonal entry moves by ||T|| u / sqrt(m) in a uniformly random
    direction; the perturbed matrix is held at 32 digits, or at the
    precision of T when T is an MpMatrix carrying more. Eigenvector
    matrices (unit columns), their inverses and refined condition numbers
    are cached per precision, so one block serves every leaf pair it takes
    part in.
    """

    def __init__(self, T, rng: np.random.Generator, delta1: float):
        if isinstance(T, MpMatrix):
            digits = max(constant.PERTURBATION_DIGITS, T.ctx.digits)
            source, T = T, demote(T).matrix
        else:
            digits = constant.PERTURBATION_DIGITS
            T = np.asarray(T, dtype=complex)
            source = T
        self.size = T.shape[0]
        self.delta1 = delta1
        norm = spectral_norm(T) or 1.0
        self.scale = norm * constant.U / math.sqrt(self.size) if self.size > 1 else 0.0
        ctx = PrecisionContext(digits)
        mp = ctx.mp
        for _ in range(constant.MAX_PERTURBATIONS):
            matrix = source.to_context(ctx).copy() if isinstance(source, MpMatrix) else promote(source, ctx)
            if self.scale:
                for i, phase in enumerate(rng.uniform(0, 2 * math.pi, self.size)):
                    matrix.data[i, i] = matrix.data[i, i] + mp.mpf(self.scale) * mp.expj(phase)
            if len({z._mpc_ for z in matrix.diagonal()}) == self.size:
                break
        else:
            raise PerturbationError(f"diagonal entries still coincide after {constant.MAX_PERTURBATIONS} "
                                    f"random perturbations")
        self.matrix = matrix
        self._eigenvectors: Dict[int, Tuple[MpMatrix, MpMatrix]] = {}
        self._refined: Dict[int, float] = {}
        self._factors: Dict[Tuple[int, int], Tuple[MpMatrix, MpMatrix, list]] = {}
        self._double_factors: Dict[int, Tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    @functools.cached_property
    def kappa_estimate(self) -> float:
        """
        Upper estimate of the condition number of the eigenvector matrix.

        KAPPA_SAFETY times the larger of the clustered formula and the
        condition number of the eigenvectors at the precision of the block.
        A block of order one has condition number exactly 1.
        """
        if self.size < 2:
            return 1.0
        heuristic = kappa_estimate_heuristic(self.matrix, self.delta1)
        if not math.isfinite(heuristic):
            return math.inf
        measured = self.refined_kappa(self.matrix.ctx.digits)
        return constant.KAPPA_SAFETY * max(heuristic, measured)

    def eigenvectors(self, digits: int) -> Tuple[MpMatrix, MpMatrix]:
        if digits not in self._eigenvectors:
            V, D = mp_triangular_eig(self.matrix.to_context(PrecisionContext(digits)))
            self._eigenvectors[digits] = (mp_normalize_columns(V), D)
        return self._eigenvectors[digits]

    def refined_kappa(self, digits: int) -> float:
        if digits not in self._refined:
            V = self.eigenvectors(digits)[0]
            self._refined[digits] = greedy_kappa_refine(V, V.ctx.unit_roundoff)
        return self._refined[digits]

    def factors(self, eig_digits: int, ctx: PrecisionContext) -> Tuple[MpMatrix, MpMatrix, list]:
        """
        (V, V^-1, eigenvalues) from the eigenvectors computed at
        ``eig_digits``, rounded to ``ctx``.
        """
        key = (eig_digits, ctx.digits)
        if key not in self._factors:
            V, D = self.eigenvectors(eig_digits)
            inverse = mp_triangular_solve(V, MpMatrix.identity(V.rows, V.ctx))
            mpc = ctx.mp.mpc
            self._factors[key] = (V.to_context(ctx), inverse.to_context(ctx), [+mpc(z) for z in D.diagonal()])
        return self._factors[key]

    def double_factors(self, eig_digits: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if eig_digits not in self._double_factors:
            V, D = self.eigenvectors(eig_digits)
            inverse = mp_triangular_solve(V, MpMatrix.identity(V.rows, V.ctx))
            eigenvalues = np.array([complex(z) for z in D.diagonal()])
            self._double_factors[eig_digits] = (demote(V).matrix, demote(inverse).matrix, eigenvalues)
        return self._double_factors[eig_digits]


def _round_digits(digits: int) -> int:
    step = constant.DIGITS_STEP
    return min(constant.MAX_DIGITS, -(-digits // step) * step)


def _eigen_digits(kappa_a: float, kappa_b: float) -> int:
    u_h = constant.U / (kappa_a * kappa_b)
    return _round_digits(digits_for(min(constant.U ** 2, u_h) / max(kappa_a, kappa_b)))


def _evaluate_double(f, block_a: PerturbedBlock, block_b: PerturbedBlock, eig_digits: int, C) -> np.ndarray:
    Va, inverse_a, lam = block_a.double_factors(eig_digits)
    Vb, inverse_b, mu = block_b.double_factors(eig_digits)
    return Va @ (f.grid(lam, mu) * (inverse_a @ C @ Vb)) @ inverse_b


def diagonalized_product(f: BivariateFunction, VA: MpMatrix, DA: MpMatrix, VB: MpMatrix, DB: MpMatrix,
                         C, ctx: PrecisionContext) -> MpMatrix:
    """
    VA (F o (VA^-1 C VB)) VB^-1 with F[i, j] = f(DA[i, i], DB[j, j]), all in
    the arithmetic of ``ctx``.

    :param C: ndarray or MpMatrix
    """
    VA, VB = VA.to_context(ctx), VB.to_context(ctx)
    C = C.to_context(ctx) if isinstance(C, MpMatrix) else promote(C, ctx)
    F = MpMatrix.zeros(VA.rows, VB.rows, ctx)
    for i, x in enumerate(DA.diagonal()):
        for j, y in enumerate(DB.diagonal()):
            F.data[i, j] = f.evaluate_mp(x, y, ctx)
    Y = mp_matmul(mp_triangular_solve(VA, C, 'left'), VB)
    Y = mp_matmul(VA, mp_hadamard(F, Y))
    return mp_triangular_solve(VB, Y, 'right')


def _evaluate_mp(f, block_a: PerturbedBlock, block_b: PerturbedBlock, eig_digits: int, C,
                 ctx: PrecisionContext) -> np.ndarray:
    VA, inverse_a, lam = block_a.factors(eig_digits, ctx)
    VB, inverse_b, mu = block_b.factors(eig_digits, ctx)
    F = MpMatrix.zeros(len(lam), len(mu), ctx)
    for i, x in enumerate(lam):
        for j, y in enumerate(mu):
            F.data[i, j] = f.evaluate_mp(x, y, ctx)
    Y = mp_matmul(mp_matmul(inverse_a, promote(C, ctx)), VB)
    result = demote(mp_matmul(mp_matmul(VA, mp_hadamard(F, Y)), inverse_b))
    if result.overflow:
        logger.warning("diag atom %dx%d overflowed double range", *C.shape)
    return result.matrix


def fun2_atom_diag(f: BivariateFunction, A, B, C, seed: Optional[int] = None, delta1: Optional[float] = None,
                   block_a: Optional[PerturbedBlock] = None, block_b: Optional[PerturbedBlock] = None):
    """
    Perturb-and-diagonalize evaluation of f{A, B^T}(C).

    The triangular A and B are perturbed on the diagonal, the condition
    numbers of their eigenvector matrices are estimated, the eigenvectors
    are computed at unit roundoff min(u^2, u_h) / max(kappa_A, kappa_B) with
    u_h = u / (kappa_A kappa_B), the estimates are checked a posteriori (at
    most three passes, raising them when they were too optimistic) and the
    diagonalized formula is finally evaluated at unit roundoff u_h: with
    numpy in double precision when u_h needs at most 16 digits, in
    multiprecision otherwise.

    :param int seed: master seed of the perturbations, config default
    :param float delta1: clustering radius of the condition estimate
    :param PerturbedBlock block_a: precomputed perturbation of A, reused
        across calls sharing the same block
    :return: (X, DiagPlan)
    :raises PerturbationError: when random perturbations keep colliding
    :raises PrecisionLimitError: when more than 4096 digits are required
    """
    A, B, C = _triangular_args(A, B, C)
    m, n = C.shape
    if m == 0 or n == 0:
        return np.zeros((m, n), dtype=complex), DiagPlan(1.0, 1.0, constant.U, constant.MIN_DIGITS, (0.0, 0.0), 0)
    seed = config.get_seed() if seed is None else seed
    delta1 = config.get_delta1() if delta1 is None else delta1
    f.check_analytic(np.diag(A), np.diag(B))
    if block_a is None:
        block_a = PerturbedBlock(A, substream(seed, 'perturb-A'), delta1)
    if block_b is None:
        block_b = PerturbedBlock(B, substream(seed, 'perturb-B'), delta1)

    kappa_a, kappa_b = block_a.kappa_estimate, block_b.kappa_estimate
    eig_digits = 0
    refinements = 0
    settled = False
    while refinements < constant.MAX_REFINEMENTS:
        if not math.isfinite(kappa_a * kappa_b):
            raise PrecisionLimitError(f"eigenvector condition numbers are unbounded "
                                      f"(kappa_A={kappa_a:.3g}, kappa_B={kappa_b:.3g})")
        refinements += 1
        eig_digits = _eigen_digits(kappa_a, kappa_b)
        refined_a = block_a.refined_kappa(eig_digits)
        refined_b = block_b.refined_kappa(eig_digits)
        if refined_a <= kappa_a and refined_b <= kappa_b:
            kappa_a, kappa_b = max(1.0, refined_a), max(1.0, refined_b)
            settled = True
            break
        logger.debug("eigenvector condition above estimate: kappa_A %.3g -> %.3g, kappa_B %.3g -> %.3g",
                     kappa_a, refined_a, kappa_b, refined_b)
        kappa_a, kappa_b = max(kappa_a, refined_a), max(kappa_b, refined_b)
    if not settled:
        logger.warning("eigenvector condition estimates still rising after %d passes (kappa_A=%.3g, kappa_B=%.3g)",
                       refinements, kappa_a, kappa_b)
        if not math.isfinite(kappa_a * kappa_b):
            raise PrecisionLimitError(f"eigenvector condition numbers are unbounded "
                                      f"(kappa_A={kappa_a:.3g}, kappa_B={kappa_b:.3g})")

    u_h = constant.U / (kappa_a * kappa_b)
    eig_digits = max(eig_digits, _eigen_digits(kappa_a, kappa_b))
    digits = digits_for(u_h)
    if digits <= constant.MIN_DIGITS:
        X = _evaluate_double(f, block_a, block_b, eig_digits, C)
    else:
        digits = _round_digits(digits)
        X = _evaluate_mp(f, block_a, block_b, eig_digits, C, PrecisionContext(digits))
    plan = DiagPlan(kappa_a, kappa_b, u_h, digits, (block_a.scale, block_b.scale), refinements)
    logger.debug("diag atom %dx%d: %s", m, n, plan)
    return X, plan


# real 2x2 blocks


def _rotation_parameters(M, name):
    M = np.asarray(M)
    if np.iscomplexobj(M):
        if np.any(M.imag != 0):
            raise ArgumentError(f"{name} must be real")
        M = M.real
    M = np.asarray(M, dtype=float)
    if M.shape == (1, 1):
        return complex(M[0, 0], 0.0)
    if M.shape != (2, 2):
        raise ArgumentError(f"{name} must be 1x1 or 2x2, got shape {M.shape}")
    scale = max(np.max(np.abs(M)), np.finfo(float).tiny)
    if abs(M[0, 0] - M[1, 1]) > _ROTATION_TOLERANCE * scale or abs(M[0, 1] + M[1, 0]) > _ROTATION_TOLERANCE * scale:
        raise ArgumentError(f"{name} is not of the form [[a, b], [-b, a]]")
    return complex(M[0, 0], M[0, 1])


def _rotation(g: complex) -> np.ndarray:
    return np.array([[g.real, g.imag], [-g.imag, g.real]])


def real_2x2_block(f: BivariateFunction, A, B, C) -> np.ndarray:
    """
    f{A, B^T}(C) in real arithmetic for A = [[a, b], [-b, a]] and
    B = [[c, d], [-d, c]], from the two values f(z, w) and f(z, conj w)
    with z = a + ib, w = c + id. Either of A, B may instead be a real 1x1
    matrix, in which case the univariate rotation formula applies.

    :raises ContractError: if f is not symmetric under conjugation
    """
    if not f.conj_symmetric:
        raise ContractError(f"{f.name} does not satisfy f(conj x, conj y) = conj f(x, y)")
    z = _rotation_parameters(A, 'A')
    w = _rotation_parameters(B, 'B')
    C = np.asarray(C)
    if np.iscomplexobj(C):
        if np.any(C.imag != 0):
            raise ArgumentError("C must be real")
        C = C.real
    C = np.asarray(C, dtype=float)
    m, n = np.shape(A)[0], np.shape(B)[0]
    if C.shape != (m, n):
        raise ArgumentError(f"C must have shape {(m, n)}, got {C.shape}")
    if m == 1 and n == 1:
        return f(z, w).real * C
    if n == 1:
        return _rotation(f(z, w)) @ C
    if m == 1:
        return C @ _rotation(f(z, w))
    same, crossed = f(z, w), f(z, w.conjugate())
    (c11, c12), (c21, c22) = C
    q1 = (c21 - c12) * same.imag + (c11 + c22) * same.real
    # the crossed terms carry c12 + c21: diagonalize both rotations with
    # P = [[1, 1], [i, -i]] and expand P diag(f) P^-1 C P diag(f) P^-1
    q2 =(c11 - c22) * crossed.real + (c12 + c21) * crossed.imag
    q3 = (c22 - c11) * crossed.imag + (c12 + c21) * crossed.real
    q4 = (c11 + c22) * same.imag + (c12 - c21) * same.real
    return 0.5 * np.array([[q1 + q2, q3 + q4], [q3 - q4, q1 - q2]])
