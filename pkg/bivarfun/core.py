"""
Evaluation of bivariate matrix functions

    f{A, B}(C) = sum over the spectra of f(x, y) (xI - A)^-1 C (yI - B^T)^-1

for dense A (m x m), B (n x n) and C (m x n).

``fun2m`` takes the diagonal fast paths when A and/or B are normal and
otherwise Schur-reduces both sides, blocks their spectra and recurses over
the split trees down to atomic blocks.
"""
from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import solve

from . import config, constant
from .atom import PerturbedBlock, fun2_atom_diag, fun2_atom_taylor
from .blocking import PartitionTree, blocking, build_tree, precompute_sylvesters
from .config import ATOM_METHODS, STRATEGIES
from .dense import as_matrix, eig, is_normal, reorder_schur, schur
from .errors import ArgumentError, BivarfunError, DerivativeRequiredError
from .function import BivariateFunction
from .function_registry import builtin_function
from .util import is_confluent, substream

logger = logging.getLogger(__name__)

_EIGENVECTOR_COND_LIMIT = constant.U ** -0.5


def _number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


@dataclass
class EvalOptions:
    """
    Parameters of one evaluation; unset fields take the current ``config``
    values.
    """
    atom_method: str = field(default_factory=config.get_atom_method)
    delta: float = field(default_factory=config.get_delta)
    delta1: float = field(default_factory=config.get_delta1)
    n_min: int = field(default_factory=config.get_n_min)
    strategy: str = field(default_factory=config.get_strategy)
    epsilon: float = field(default_factory=config.get_epsilon)
    gamma: float = field(default_factory=config.get_gamma)
    k_max: int = field(default_factory=config.get_k_max)
    seed: int = field(default_factory=config.get_seed)

    def __post_init__(self):
        if self.atom_method not in ATOM_METHODS:
            raise ArgumentError(f"{self.atom_method!r} is not one of {', '.join(ATOM_METHODS)}.")
        if self.strategy not in STRATEGIES:
            raise ArgumentError(f"{self.strategy!r} is not one of {', '.join(STRATEGIES)}.")
        if not (_number(self.delta) and self.delta > 0):
            raise ArgumentError(f"delta={self.delta} is not positive.")
        if not (_number(self.delta1) and 0 < self.delta1 < self.delta):
            raise ArgumentError(f"delta1={self.delta1} is not in (0, delta={self.delta}).")
        if not (_number(self.epsilon) and 0 < self.epsilon < 1):
            raise ArgumentError(f"epsilon={self.epsilon} is not in (0, 1).")
        if not (isinstance(self.n_min, int) and self.n_min >= 1):
            raise ArgumentError(f"n_min={self.n_min} is not a positive integer.")
        if not (_number(self.gamma) and self.gamma > 0):
            raise ArgumentError(f"gamma={self.gamma} is not positive.")
        if not (isinstance(self.k_max, int) and self.k_max >= 0):
            raise ArgumentError(f"k_max={self.k_max} is not a nonnegative integer.")
        if not (isinstance(self.seed, int) and self.seed >= 0):
            raise ArgumentError(f"seed={self.seed} is not a nonnegative integer.")


@dataclass
class EvalReport:
    """
    Diagnostics of one ``fun2m`` call. ``max_digits`` is the largest
    working precision any atomic evaluation used, 16 for double and 0 when
    no atom ran (empty operands and the normal fast path).
    """
    n_blocks_A: int = 0
    n_blocks_B: int = 0
    max_digits: int = 0
    max_taylor_degree: int = 0
    merges: int = 0
    wall_time: float = 0.0
    path: str = ''
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return asdict(self)


# diagonal fast paths


def _conforming(A, B, C):
    A = as_matrix(A, 'A', square=True)
    B = as_matrix(B, 'B', square=True)
    C = as_matrix(C, 'C')
    if C.shape != (A.shape[0], B.shape[0]):
        raise ArgumentError(f"C must have shape {(A.shape[0], B.shape[0])}, got {C.shape}")
    return A, B, C


def fun2_diag(f: BivariateFunction, A, B, C) -> np.ndarray:
    """
    S_A (F o C~) S_B^T with A = S_A diag(lam) S_A^-1, B = S_B diag(mu) S_B^-1,
    F[i, j] = f(lam_i, mu_j) and C~ = S_A^-1 C S_B^-T.

    Eigenvector matrices with condition number above 1/sqrt(u) are used
    anyway; a warning is logged.

    :raises AnalyticityError: if some f(lam_i, mu_j) is not defined
    """
    A, B, C = _conforming(A, B, C)
    SA, lam = eig(A)
    SB, mu = eig(B)
    for label, S in (('A', SA), ('B', SB)):
        kappa = np.linalg.cond(S) if S.size else 1.0
        if not kappa <= _EIGENVECTOR_COND_LIMIT:
            logger.warning("diag: eigenvector matrix of %s is ill-conditioned (cond=%.3g)", label, kappa)
    f.check_analytic(lam, mu)
    Ct = solve(SB, solve(SA, C).T).T
    return SA @ (f.grid(lam, mu) * Ct) @ SB.T


# Schur path


@dataclass
class _Side:
    """Reordered Schur form of one coefficient with its split tree."""
    label: str
    Q: np.ndarray
    T: np.ndarray
    tree: PartitionTree
    blocks: Dict[Tuple[int, int], PerturbedBlock] = field(default_factory=dict)

    @classmethod
    def scalar(cls, label: str, value: complex) -> _Side:
        block = range(0, 1)
        return cls(label, np.eye(1, dtype=complex), np.full((1, 1), value, dtype=complex),
                   PartitionTree((block,)))

    def leaf_block(self, node: PartitionTree, opts: EvalOptions) -> PerturbedBlock:
        key = (node.start, node.stop)
        if key not in self.blocks:
            rng = substream(opts.seed, f'perturb-{self.label}-{node.start}:{node.stop}')
            self.blocks[key] = PerturbedBlock(self.T[node.start:node.stop, node.start:node.stop], rng, opts.delta1)
        return self.blocks[key]


def _prepare(M: np.ndarray, label: str, opts: EvalOptions, report: EvalReport) -> _Side:
    S = schur(M)
    P = blocking(S, opts.delta)
    S = reorder_schur(S, P.permutation)
    diag = opts.atom_method == 'diag'
    tree = build_tree(P, opts.strategy, opts.n_min if diag else 1)
    tree = precompute_sylvesters(S.T, tree, opts.gamma, opts.delta, merge=diag, side=label)
    merges = sum(1 for leaf in tree.leaves() if leaf.merged)
    kept = [node for node in tree.internal_nodes() if node.ratio > opts.gamma / opts.delta]
    report.merges += merges
    for node in kept:
        report.warnings.append(f"ill-conditioned Sylvester solution kept on {label} "
                               f"idx={node.start}:{node.stop} r={node.ratio:.3g}")
    logger.debug("side %s: %d atomic blocks, %d leaves, %d merges", label, P.count,
                 sum(1 for _ in tree.leaves()), merges)
    return _Side(label, S.Q, S.T, tree)


class _Recursion:
    """
    Splitting recursion over the trees of two prepared sides, evaluating
    f{T_A, T_B^T} on the triangular level.
    """

    def __init__(self, f: BivariateFunction, side_a: _Side, side_b: _Side, opts: EvalOptions,
                 report: EvalReport):
        self.f = f
        self.side_a = side_a
        self.side_b = side_b
        self.opts = opts
        self.report = report

    def atom(self, na: PartitionTree, nb: PartitionTree, C: np.ndarray) -> np.ndarray:
        A = self.side_a.T[na.start:na.stop, na.start:na.stop]
        B = self.side_b.T[nb.start:nb.stop, nb.start:nb.stop]
        if self.opts.atom_method == 'taylor':
            X, plan = fun2_atom_taylor(self.f, A, B, C, self.opts.epsilon, self.opts.k_max)
            self.report.max_taylor_degree = max(self.report.max_taylor_degree, plan.degree)
            self.report.max_digits = max(self.report.max_digits, 16)
            return X
        X, plan = fun2_atom_diag(self.f, A, B, C, self.opts.seed, self.opts.delta1,
                                 block_a=self.side_a.leaf_block(na, self.opts),
                                 block_b=self.side_b.leaf_block(nb, self.opts))
        self.report.max_digits = max(self.report.max_digits, plan.digits)
        return X

    def __call__(self, na: PartitionTree, nb: PartitionTree, C: np.ndarray) -> np.ndarray:
        if na.size == 0 or nb.size == 0:
            return np.zeros((na.size, nb.size), dtype=complex)
        if na.is_leaf and nb.is_leaf:
            return self.atom(na, nb, C)
        if nb.is_leaf:
            a1, a2 = na.children
            p = na.split
            V = na.sylvester_solution
            F1 = self(a1, nb, C[:p] + V @ C[p:])
            F2 = self(a2, nb, C[p:])
            return np.vstack([F1 - V @ F2, F2])
        if na.is_leaf:
            b1, b2 = nb.children
            q = nb.split
            W = nb.sylvester_solution
            F1 = self(na, b1, C[:, :q])
            F3 = self(na, b2, C[:, q:] - C[:, :q] @ W)
            return np.hstack([F1, F1 @ W + F3])
        a1, a2 = na.children
        b1, b2 = nb.children
        p, q = na.split, nb.split
        V, W = na.sylvester_solution, nb.sylvester_solution
        C11, C12, C21, C22 = C[:p, :q], C[:p, q:], C[p:, :q], C[p:, q:]
        VC21 = V @ C21
        F1 = self(a1, b1, C11 + VC21)
        F2 = self(a2, b1, C21)
        F3 = self(a1, b2, C12 - C11 @ W - VC21 @ W + V @ C22)
        F4 = self(a2, b2, C22 - C21 @ W)
        VF2 = V @ F2
        return np.block([[F1 - VF2, F1 @ W - VF2 @ W + F3 - V @ F4],
                         [F2, F2 @ W + F4]])


def fun2m_rec(f: BivariateFunction, A, B, C, tree_a: PartitionTree, tree_b: PartitionTree,
              opts: Optional[EvalOptions] = None, report: Optional[EvalReport] = None) -> np.ndarray:
    """
    Recursive evaluation of f{A, B^T}(C) for upper triangular A and B whose
    split trees carry their Sylvester solutions.

    Both sides are split while both nodes are internal; when one of them is
    a leaf only the other one is split. Pairs of leaves go to the atomic
    evaluator selected by ``opts.atom_method``.
    """
    A, B, C = _conforming(A, B, C)
    opts = opts or EvalOptions()
    report = report if report is not None else EvalReport()
    side_a = _Side('A', np.eye(A.shape[0], dtype=complex), A, tree_a)
    side_b = _Side('B', np.eye(B.shape[0], dtype=complex), B, tree_b)
    return _Recursion(f, side_a, side_b, opts, report)(tree_a, tree_b, C)


def _schur_path(f, side_a: _Side, side_b: _Side, C, opts, report) -> np.ndarray:
    Ct = side_a.Q.conj().T @ C @ side_b.Q
    F = _Recursion(f, side_a, side_b, opts, report)(side_a.tree, side_b.tree, Ct)
    return side_a.Q @ F @ side_b.Q.conj().T


def _count_leaves(side: _Side) -> int:
    return sum(1 for _ in side.tree.leaves())


def fun2_diagA(f: BivariateFunction, A, B, C, opts: Optional[EvalOptions] = None,
               report: Optional[EvalReport] = None) -> np.ndarray:
    """
    f{A, B}(C) for diagonalizable A = S diag(lam) S^-1: row j of
    f{diag(lam), B}(S^-1 C) is the univariate function f(lam_j, .) of B^T
    applied to row j, evaluated through the Schur path of B^T.
    """
    A, B, C = _conforming(A, B, C)
    opts = opts or EvalOptions()
    report = report if report is not None else EvalReport()
    S, lam = eig(A)
    Ct = solve(S, C)
    side_b = _prepare(B.T, 'B', opts, report)
    report.n_blocks_A, report.n_blocks_B = len(lam), _count_leaves(side_b)
    rows = [_schur_path(f, _Side.scalar('A', value), side_b, Ct[j:j + 1, :], opts, report)
            for j, value in enumerate(lam)]
    return S @ np.vstack(rows) if rows else np.zeros(C.shape, dtype=complex)


def fun2_diagB(f: BivariateFunction, A, B, C, opts: Optional[EvalOptions] = None,
               report: Optional[EvalReport] = None) -> np.ndarray:
    """
    f{A, B}(C) for diagonalizable B = S diag(mu) S^-1: column j of
    f{A, diag(mu)}(C S^-T) is the univariate function f(., mu_j) of A applied
    to column j, evaluated through the Schur path of A.
    """
    A, B, C = _conforming(A, B, C)
    opts = opts or EvalOptions()
    report = report if report is not None else EvalReport()
    S, mu = eig(B)
    Ct = solve(S, C.T).T
    side_a = _prepare(A, 'A', opts, report)
    report.n_blocks_A, report.n_blocks_B = _count_leaves(side_a), len(mu)
    columns = [_schur_path(f, side_a, _Side.scalar('B', value), Ct[:, j:j + 1], opts, report)
               for j, value in enumerate(mu)]
    return np.hstack(columns) @ S.T if columns else np.zeros(C.shape, dtype=complex)


def fun2m(f: BivariateFunction, A, B, C, opts: Optional[EvalOptions] = None) -> Tuple[np.ndarray, EvalReport]:
    """
    Evaluate f{A, B}(C).

    Normal A and B go through ``fun2_diag``, a single normal side through
    ``fun2_diagA``/``fun2_diagB``; otherwise both sides are Schur reduced,
    blocked, split and evaluated recursively, and the result is mapped
    back: Q_A F Q_B'^H with B' = B^T.

    :param BivariateFunction f: function to apply
    :param opts: EvalOptions, config defaults when omitted
    :return: (X, EvalReport)
    :raises BivarfunError: with the partial report attached as ``exc.report``
    """
    A, B, C = _conforming(A, B, C)
    opts = opts or EvalOptions()
    report = EvalReport()
    m, n = C.shape
    start = time.perf_counter()
    try:
        if m == 0 or n == 0:
            report.path = 'empty'
            X = np.zeros((m, n), dtype=complex)
        elif is_normal(A) and is_normal(B):
            report.path = 'diag'
            report.n_blocks_A, report.n_blocks_B, report.max_digits = m, n, 0
            X = fun2_diag(f, A, B, C)
        elif is_normal(A):
            report.path = 'diagA'
            X = fun2_diagA(f, A, B, C, opts, report)
        elif is_normal(B):
            report.path = 'diagB'
            X = fun2_diagB(f, A, B, C, opts, report)
        else:
            report.path = 'schur'
            side_a = _prepare(A, 'A', opts, report)
            side_b = _prepare(B.T, 'B', opts, report)
            report.n_blocks_A, report.n_blocks_B = _count_leaves(side_a), _count_leaves(side_b)
            X = _schur_path(f, side_a, side_b, C, opts, report)
    except BivarfunError as exc:
        report.wall_time = time.perf_counter() - start
        exc.report = report
        raise
    report.wall_time = time.perf_counter() - start
    logger.info("fun2m %s: %dx%d path=%s blocks=(%d, %d) digits=%d degree=%d merges=%d time=%.3fs",
                f.name, m, n, report.path, report.n_blocks_A, report.n_blocks_B, report.max_digits,
                report.max_taylor_degree, report.merges, report.wall_time)
    return X, report


def _divided_x(f, x1, x2, y):
    if is_confluent(x1, x2):
        return f.partial(1, 0, x1, y)
    return (f(x2, y) - f(x1, y)) / (x2 - x1)


def _divided_y(f, x, y1, y2):
    if is_confluent(y1, y2):
        return f.partial(0, 1, x, y1)
    return (f(x, y2) - f(x, y1)) / (y2 - y1)


def _divided_xy(f, x1, x2, y1, y2):
    confluent_x, confluent_y = is_confluent(x1, x2), is_confluent(y1, y2)
    if confluent_x and confluent_y:
        return f.partial(1, 1, x1, y1)
    if confluent_x:
        return (f.partial(1, 0, x1, y2) - f.partial(1, 0, x1, y1)) / (y2 - y1)
    if confluent_y:
        return (f.partial(0, 1, x2, y1) - f.partial(0, 1, x1, y1)) / (x2 - x1)
    return (f(x2, y2) - f(x2, y1) - f(x1, y2) + f(x1, y1)) / ((x2 - x1) * (y2 - y1))


def corollary_2x2(f: BivariateFunction, A, B, C) -> np.ndarray:
    """
    Closed form of f{A, B^T}(C) for upper triangular 2 x 2 A and B:

        F o C + [[c21 a12 Dx(mu1), c22 a12 Dx(mu2) + c11 b12 Dy(lam1) + c21 a12 b12 DxDy],
                 [0,               c21 b12 Dy(lam2)]]

    with Dx, Dy the divided differences of f over (lam1, lam2) and
    (mu1, mu2). Confluent eigenvalues switch to partial derivatives.

    :raises DerivativeRequiredError: on confluent eigenvalues when f has no
        partial derivatives
    """
    A, B, C = _conforming(A, B, C)
    if A.shape != (2, 2) or B.shape != (2, 2):
        raise ArgumentError(f"A and B must be 2x2, got {A.shape} and {B.shape}")
    if A[1, 0] != 0 or B[1, 0] != 0:
        raise ArgumentError("A and B must be upper triangular")
    (l1, a12), (_, l2) = A
    (m1, b12), (_, m2) = B
    (c11, c12), (c21, c22) = C
    f.check_analytic([l1, l2], [m1, m2])
    try:
        X = f.grid([l1, l2], [m1, m2]) * C
        if a12 != 0:
            X[0, 0] += c21 * a12 * _divided_x(f, l1, l2, m1)
            X[0, 1] += c22 * a12 * _divided_x(f, l1, l2, m2)
        if b12 != 0:
            X[0, 1] += c11 * b12 * _divided_y(f, l1, m1, m2)
            X[1, 1] += c21 * b12 * _divided_y(f, l2, m1, m2)
        if a12 != 0 and b12 != 0:
            X[0, 1] += c21 * a12 * b12 * _divided_xy(f, l1, l2, m1, m2)
    except DerivativeRequiredError as exc:
        raise DerivativeRequiredError(f"confluent eigenvalues need partial derivatives of {f.name}") from exc
    return X


def _resolve(function: Union[str, BivariateFunction], family: str) -> BivariateFunction:
    if isinstance(function, BivariateFunction):
        return function
    return builtin_function(family, function)


def frechet_derivative(g: Union[str, BivariateFunction], A, E, opts: Optional[EvalOptions] = None) -> np.ndarray:
    """
    Frechet derivative of the matrix function g at A in the direction E,
    f2{A, A^T}(E) with f2 the divided difference of g.

    :param g: 'exp', 'sqrt' or a divided-difference BivariateFunction
    """
    A = as_matrix(A, 'A', square=True)
    return fun2m(_resolve(g, 'f2g'), A, A.T, E, opts)[0]


def kronecker_apply(h: Union[str, BivariateFunction], A, B, C, opts: Optional[EvalOptions] = None) -> np.ndarray:
    """
    h(A (x) I + I (x) B) applied to the row-major vectorization of C,
    returned as a matrix: f3{A, B}(C) with f3(x, y) = h(x + y).

    :param h: 'exp', 'sqrt' or a BivariateFunction of x + y
    """
    return fun2m(_resolve(h, 'f3h'), A, B, C, opts)[0]
