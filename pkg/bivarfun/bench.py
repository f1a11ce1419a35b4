"""
Reference evaluations and the experiment drivers.

``diag_baseline`` diagonalizes in double precision, ``diag_hp`` runs the
perturb-and-diagonalize scheme on the whole Schur forms at estimated
precision and ``diag_hp_oracle`` does the same at a fixed number of digits
(128 for the benchmark reference). ``kappa_f_estimate`` measures how much
f{A, B}(C) moves under a random relative perturbation of A and B of size
1e-32.
"""
from __future__ import annotations

import csv
import logging
import math
import statistics
import time
from dataclasses import asdict, dataclass, fields
from typing import Callable, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from . import config, constant
from .atom import PerturbedBlock, diagonalized_product, fun2_atom_diag
from .core import EvalOptions, EvalReport, _conforming, fun2_diag, fun2m
from .dense import schur, spectral_norm
from .errors import ArgumentError, BivarfunError
from .function import BivariateFunction
from .function_registry import BENCHMARK_FUNCTIONS, builtin_function
from .gallery import GalleryCase
from .mparith import MpMatrix, PrecisionContext, demote, promote
from .util import complex_gaussian, substream

logger = logging.getLogger(__name__)

EXPERIMENT_2_CASES = ('jordbloc', 'grcar', 'smoke', 'kahan', 'lesp', 'sampling', 'grcar-rand')
TIMING_REPEATS = 3


def diag_baseline(f: BivariateFunction, A, B, C) -> np.ndarray:
    """
    f{A, B}(C) by diagonalizing A and B in double precision, whatever the
    conditioning of their eigenvector matrices.
    """
    return fun2_diag(f, A, B, C)


def _schur_pair(A, B, C):
    A, B, C = _conforming(A, B, C)
    SA, SB = schur(A), schur(B.T)
    return SA, SB, SA.Q.conj().T @ C @ SB.Q


def diag_hp(f: BivariateFunction, A, B, C, seed: Optional[int] = None,
            delta1: Optional[float] = None) -> Tuple[np.ndarray, int]:
    """
    Perturb-and-diagonalize on the full Schur forms, digits estimated from
    the eigenvector condition numbers.

    :return: (X, digits of the final evaluation)
    """
    SA, SB, Ct = _schur_pair(A, B, C)
    X, plan = fun2_atom_diag(f, SA.T, SB.T, Ct, seed, delta1)
    return SA.Q @ X @ SB.Q.conj().T, plan.digits


def _triangular_oracle(f: BivariateFunction, TA, TB, Ct, digits: int, seed: int) -> MpMatrix:
    ctx = PrecisionContext(digits)
    delta1 = config.get_delta1()
    block_a = PerturbedBlock(TA, substream(seed, 'oracle-A'), delta1)
    block_b = PerturbedBlock(TB, substream(seed, 'oracle-B'), delta1)
    VA, DA = block_a.eigenvectors(digits)
    VB, DB = block_b.eigenvectors(digits)
    return diagonalized_product(f, VA, DA, VB, DB, Ct, ctx)


def diag_hp_oracle(f: BivariateFunction, A, B, C, digits: int = constant.ORACLE_DIGITS,
                   seed: Optional[int] = None) -> np.ndarray:
    """
    Reference value of f{A, B}(C): Schur forms in double precision, then the
    full triangular matrices perturbed, diagonalized and evaluated at
    ``digits`` decimal digits.
    """
    seed = config.get_seed() if seed is None else seed
    SA, SB, Ct = _schur_pair(A, B, C)
    if Ct.size == 0:
        return np.zeros(Ct.shape, dtype=complex)
    f.check_analytic(SA.eigenvalues, SB.eigenvalues)
    Y = demote(_triangular_oracle(f, SA.T, SB.T, Ct, digits, seed)).matrix
    return SA.Q @ Y @ SB.Q.conj().T


def _triangular_perturbation(rng: np.random.Generator, T: np.ndarray, size: float, ctx: PrecisionContext) -> MpMatrix:
    E = np.triu(complex_gaussian(rng, T.shape))
    E *= size / spectral_norm(E)
    base = promote(T, ctx)
    return MpMatrix(base.data + promote(E, ctx).data, ctx)


def kappa_f_estimate(f: BivariateFunction, A, B, C, seed: Optional[int] = None,
                     digits: int = constant.ORACLE_DIGITS) -> float:
    """
    One-sample estimate of the relative condition number of f{A, B}(C).

    Random perturbations of relative size h = 1e-32, upper triangular in the
    Schur bases of A and B^T, are applied and the difference quotient
    ||f(A + dA, B + dB) - f(A, B)|| / (h ||f(A, B)||) is evaluated at
    ``digits`` digits. The estimate is a lower bound for the condition
    number and usually of its order of magnitude.
    """
    seed = config.get_seed() if seed is None else seed
    SA, SB, Ct = _schur_pair(A, B, C)
    if Ct.size == 0 or not np.any(Ct):
        return 0.0
    f.check_analytic(SA.eigenvalues, SB.eigenvalues)
    ctx = PrecisionContext(digits)
    h = constant.KAPPA_F_STEP
    rng = substream(seed, 'kappa-f')
    TA = _triangular_perturbation(rng, SA.T, h * spectral_norm(SA.T), ctx)
    TB = _triangular_perturbation(rng, SB.T, h * spectral_norm(SB.T), ctx)
    base = _triangular_oracle(f, promote(SA.T, ctx), promote(SB.T, ctx), Ct, digits, seed)
    moved = _triangular_oracle(f, TA, TB, Ct, digits, seed)
    norm = spectral_norm(demote(base).matrix)
    if norm == 0:
        return 0.0
    difference = demote(MpMatrix(moved.data - base.data, ctx)).matrix
    return spectral_norm(difference) / (h * norm)


def relative_error(X, reference) -> float:
    """||X - reference|| / ||reference|| in the spectral norm."""
    norm = spectral_norm(reference)
    gap = spectral_norm(np.asarray(X) - np.asarray(reference))
    return gap / norm if norm > 0 else gap


@dataclass
class ExperimentRow:
    test: str
    size: int
    method: str
    err: float
    time_s: float
    nA: int = 0
    nB: int = 0
    digits: int = 0
    maxdeg: int = 0
    kfu: float = math.nan

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, record) -> ExperimentRow:
        values = {}
        for field in fields(cls):
            if field.name not in record:
                raise ArgumentError(f"CSV record lacks column '{field.name}'")
            kind = {'str': str, 'int': int, 'float': float}[field.type]
            values[field.name] = kind(record[field.name])
        return cls(**values)


CSV_COLUMNS = tuple(field.name for field in fields(ExperimentRow))


def write_csv(rows: Iterable[ExperimentRow], stream: TextIO):
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator='\n')
    writer.writeheader()
    for row in rows:
        writer.writerow(row.to_dict())


def read_csv(stream: TextIO) -> List[ExperimentRow]:
    return [ExperimentRow.from_dict(record) for record in csv.DictReader(stream)]


# experiment drivers


def _reference(f, A, B, C, seed) -> Tuple[Optional[np.ndarray], float]:
    try:
        reference = diag_hp_oracle(f, A, B, C, seed=seed)
        kfu = kappa_f_estimate(f, A, B, C, seed=seed) * constant.U
    except BivarfunError as exc:
        logger.warning("no reference for %s: %s", f.name, exc)
        return None, math.nan
    return reference, kfu


def _error(X, reference) -> float:
    return math.nan if reference is None else relative_error(X, reference)


def _fun2m_row(test, f, A, B, C, method, opts, reference, kfu) -> ExperimentRow:
    n = A.shape[0]
    try:
        X, report = fun2m(f, A, B, C, opts)
        err = _error(X, reference)
    except BivarfunError as exc:
        logger.warning("%s n=%d %s failed: %s", test, n, method, exc)
        report, err = getattr(exc, 'report', EvalReport()), math.nan
    row = ExperimentRow(test, n, method, err, report.wall_time, report.n_blocks_A, report.n_blocks_B,
                        report.max_digits, report.max_taylor_degree, kfu)
    logger.info("row %s", row)
    return row


def _baseline_rows(test, f, A, B, C, seed, reference, kfu) -> List[ExperimentRow]:
    n = A.shape[0]
    rows = []
    start = time.perf_counter()
    try:
        err = _error(diag_baseline(f, A, B, C), reference)
    except BivarfunError as exc:
        logger.warning("%s n=%d diag failed: %s", test, n, exc)
        err = math.nan
    rows.append(ExperimentRow(test, n, 'diag', err, time.perf_counter() - start, n, n, 16, 0, kfu))
    start = time.perf_counter()
    try:
        X, digits = diag_hp(f, A, B, C, seed)
        err = _error(X, reference)
    except BivarfunError as exc:
        logger.warning("%s n=%d diag_hp failed: %s", test, n, exc)
        err, digits = math.nan, 0
    rows.append(ExperimentRow(test, n, 'diag_hp', err, time.perf_counter() - start, 1, 1, digits, 0, kfu))
    for row in rows:
        logger.info("row %s", row)
    return rows


def experiment_1(sizes: Sequence[int] = (32, 64), seed: Optional[int] = None) -> List[ExperimentRow]:
    """
    Taylor against diagonalization on the atomic blocks: rand-eig and
    grcar-rand with f = 1/sqrt(x + y).
    """
    seed = config.get_seed() if seed is None else seed
    f = builtin_function('inv_sqrt_sum')
    rows = []
    for name in ('rand-eig', 'grcar-rand'):
        for n in sizes:
            case = GalleryCase(name, n, seed)
            (A, B), C = case.generate(), case.rhs()
            reference, kfu = _reference(f, A, B, C, seed)
            for atom in ('diag', 'taylor'):
                opts = EvalOptions(atom_method=atom, seed=seed)
                rows.append(_fun2m_row(f'{name}:{f.name}', f, A, B, C, f'fun2m-{atom}', opts, reference, kfu))
    return rows


def experiment_2(sizes: Sequence[int] = (64,), seed: Optional[int] = None,
                 cases: Sequence[str] = EXPERIMENT_2_CASES,
                 functions: Sequence[str] = BENCHMARK_FUNCTIONS) -> List[ExperimentRow]:
    """
    Ill-conditioned gallery cases: fun2m against the diag and diag_hp
    baselines for the four benchmark functions.
    """
    seed = config.get_seed() if seed is None else seed
    rows = []
    for name in cases:
        for n in sizes:
            case = GalleryCase(name, n, seed)
            (A, B), C = case.generate(), case.rhs()
            for function_name in functions:
                f = builtin_function(function_name)
                test = f'{name}:{f.name}'
                reference, kfu = _reference(f, A, B, C, seed)
                rows.append(_fun2m_row(test, f, A, B, C, 'fun2m', EvalOptions(seed=seed), reference, kfu))
                rows.extend(_baseline_rows(test, f, A, B, C, seed, reference, kfu))
    return rows


def _median_time(run: Callable[[], np.ndarray]) -> Tuple[np.ndarray, float]:
    timings = []
    for _ in range(TIMING_REPEATS):
        start = time.perf_counter()
        X = run()
        timings.append(time.perf_counter() - start)
    return X, statistics.median(timings)


def experiment_3(sizes: Sequence[int] = (64, 128, 256, 512), seed: Optional[int] = None) -> List[ExperimentRow]:
    """
    Timing sweep on randn with f = 1/(sqrt(x + y) (x - y)). Without an
    oracle at these sizes ``err`` is the relative gap between fun2m and
    the diag baseline.
    """
    seed = config.get_seed() if seed is None else seed
    f = builtin_function('inv_sqrt_sum_diff')
    rows = []
    for n in sizes:
        case = GalleryCase('randn', n, seed)
        (A, B), C = case.generate(), case.rhs()
        test = f'randn:{f.name}'
        opts = EvalOptions(seed=seed)
        reports = []

        def run_fun2m():
            X, report = fun2m(f, A, B, C, opts)
            reports.append(report)
            return X

        try:
            X, elapsed = _median_time(run_fun2m)
            Y, elapsed_diag = _median_time(lambda: diag_baseline(f, A, B, C))
        except BivarfunError as exc:
            logger.warning("%s n=%d failed: %s", test, n, exc)
            continue
        gap = relative_error(X, Y)
        report = reports[-1]
        rows.append(ExperimentRow(test, n, 'fun2m', gap, elapsed, report.n_blocks_A, report.n_blocks_B,
                                  report.max_digits, report.max_taylor_degree, math.nan))
        rows.append(ExperimentRow(test, n, 'diag', gap, elapsed_diag, n, n, 16, 0, math.nan))
        logger.info("rows %s", rows[-2:])
    return rows


EXPERIMENTS = {1: experiment_1, 2: experiment_2, 3: experiment_3}
