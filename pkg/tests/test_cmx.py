import numpy as np
import pytest

from bivarfun import cmx
from bivarfun.errors import ArgumentError


def test_dumps():
    text = cmx.dumps([[1, 2j], [3, 4]])
    assert text.splitlines() == ['cmx 2 2', '1 0', '3 0', '0 2', '4 0']


def test_loads():
    X = cmx.loads("cmx 2 1\n1.5 -2\n0 0.25\n")
    assert X.shape == (2, 1)
    assert X[0, 0] == 1.5 - 2j
    assert X[1, 0] == 0.25j


def test_exact_digits(tmp_path):
    X = np.array([[1 / 3 + 1j / 7, np.pi], [np.e, -1e-300 + 1e300j]])
    cmx.write_cmx(tmp_path / 'x.cmx', X)
    assert np.array_equal(cmx.read_cmx(tmp_path / 'x.cmx'), X)


@pytest.mark.parametrize('text', [
    '',
    'mat 1 1\n1 0\n',
    'cmx 1\n1 0\n',
    'cmx 2 2\n1 0\n',
    'cmx 1 1\n1\n',
    'cmx 1 1\nnan 0\n',
    'cmx 1 1\none 0\n',
    'cmx -1 1\n',
])
def test_malformed(text):
    with pytest.raises(ArgumentError):
        cmx.loads(text)
