import io
import math

import numpy as np
import pytest
from scipy.linalg import expm

from bivarfun.bench import (CSV_COLUMNS, ExperimentRow, diag_baseline, diag_hp, diag_hp_oracle, experiment_2,
                            experiment_3, kappa_f_estimate, read_csv, relative_error, write_csv)
from bivarfun.errors import AnalyticityError, ArgumentError
from bivarfun.function_registry import builtin_function
from bivarfun.util import complex_gaussian

f1 = builtin_function('f1')
exp_sum = builtin_function('f3h:exp')


def test_oracle_scalar():
    X = diag_hp_oracle(f1, [[1]], [[1]], [[1]])
    assert X.shape == (1, 1)
    assert abs(X[0, 0] - 0.5) < 1e-15


def test_oracle_exp():
    rng = np.random.default_rng(0)
    A, B = 0.5 * rng.standard_normal((4, 4)), 0.5 * rng.standard_normal((3, 3))
    C = complex_gaussian(rng, (4, 3))
    X = diag_hp_oracle(exp_sum, A, B, C, digits=40)
    assert relative_error(X, expm(A) @ C @ expm(B.T)) < 1e-13
    assert relative_error(diag_hp_oracle(exp_sum, A, B, C, digits=64), X) < 1e-14
    with pytest.raises(AnalyticityError):
        diag_hp_oracle(builtin_function('sqrt_sum'), -np.eye(2), -np.eye(2), np.ones((2, 2)))


def test_baselines_on_normal_matrices():
    rng = np.random.default_rng(1)
    H, K = complex_gaussian(rng, (5, 5)), complex_gaussian(rng, (4, 4))
    A, B = 0.3 * (H + H.conj().T), 0.3 * (K + K.conj().T)
    C = complex_gaussian(rng, (5, 4))
    expected = diag_baseline(exp_sum, A, B, C)
    assert relative_error(expected, expm(A) @ C @ expm(B.T)) < 1e-12
    X, digits = diag_hp(exp_sum, A, B, C, seed=0)
    assert relative_error(X, expected) < 1e-12
    assert digits >= 16


def test_kappa_f_estimate():
    assert kappa_f_estimate(f1, np.eye(2), np.eye(2), np.zeros((2, 2))) == 0.0
    kappa = kappa_f_estimate(f1, [[1]], [[1]], [[1]], seed=0)
    assert 0 <= kappa <= 1 + 1e-6
    rng = np.random.default_rng(2)
    A = 0.5 * rng.standard_normal((3, 3))
    kappa = kappa_f_estimate(exp_sum, A, A, np.eye(3), seed=0, digits=64)
    assert math.isfinite(kappa) and kappa >= 0


def test_relative_error():
    assert relative_error([[1.0]], [[2.0]]) == pytest.approx(0.5)
    assert relative_error([[1.0]], [[0.0]]) == pytest.approx(1.0)


def test_csv_round_trip():
    rows = [ExperimentRow('grcar:sqrt_sum', 64, 'fun2m', 1.5e-15, 0.25, 12, 12, 32, 0, 3.2e-14),
            ExperimentRow('grcar:sqrt_sum', 64, 'diag', 2e-3, 0.01, 64, 64, 16)]
    stream = io.StringIO()
    write_csv(rows, stream)
    text = stream.getvalue()
    assert text.splitlines()[0] == ','.join(CSV_COLUMNS)
    back = read_csv(io.StringIO(text))
    assert back[0] == rows[0]
    assert back[1].method == 'diag' and back[1].nA == 64
    assert math.isnan(back[1].kfu)


def test_csv_missing_column():
    with pytest.raises(ArgumentError):
        read_csv(io.StringIO('test,size\nrandn,4\n'))


def test_experiment_2_schema():
    rows = experiment_2(sizes=(4,), seed=0, cases=('grcar',), functions=('exp_over_sum',))
    assert [row.method for row in rows] == ['fun2m', 'diag', 'diag_hp']
    assert all(row.test == 'grcar:exp_over_sum' and row.size == 4 for row in rows)
    assert rows[1].digits == 16
    assert rows[2].nA == rows[2].nB == 1


def test_experiment_3_schema():
    rows = experiment_3(sizes=(6,), seed=0)
    assert [row.method for row in rows] == ['fun2m', 'diag']
    assert rows[0].test == 'randn:inv_sqrt_sum_diff'
    assert rows[0].err == rows[1].err
    assert all(math.isnan(row.kfu) and row.time_s >= 0 for row in rows)
