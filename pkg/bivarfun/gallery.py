"""
Test matrices for the accuracy and timing experiments.

The structured generators follow the classical test-matrix gallery
definitions with their default parameters; the named cases combine them
with random parts the way the experiments use them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.linalg import block_diag, qr, solve

from .dense import schur
from .errors import ArgumentError
from .util import complex_gaussian, substream

CASES = ('rand-eig', 'randn', 'jordbloc', 'grcar', 'smoke', 'kahan', 'lesp', 'sampling', 'grcar-rand')

# size of the structured part of lesp, sampling and jordbloc
STRUCTURED_SIZE = {'lesp': 32, 'sampling': 32, 'jordbloc': 8}


def grcar(n: int, k: int = 3) -> np.ndarray:
    """
    Grcar matrix: -1 on the subdiagonal, 1 on the diagonal and on the first
    k superdiagonals. Its eigenvalues are highly sensitive.
    """
    A = np.eye(n) - np.eye(n, k=-1)
    for d in range(1, k + 1):
        A += np.eye(n, k=d)
    return A


def smoke(n: int) -> np.ndarray:
    """
    Smoke matrix: diag(w, w^2, ..., w^n) with w = exp(2 pi i / n), ones on
    the superdiagonal and A[n-1, 0] = 1.
    """
    w = np.exp(2j * math.pi / n)
    A = np.diag(w ** np.arange(1, n + 1)) + np.eye(n, k=1)
    A[n - 1, 0] = 1
    return A


def kahan(n: int, theta: float = 1.2, pert: float = 25) -> np.ndarray:
    """
    Kahan matrix diag(1, s, ..., s^(n-1)) (I - c * strict upper ones) with
    s = sin(theta), c = cos(theta), plus pert * eps * diag(n, ..., 1) to keep
    the computed rank at n.
    """
    s, c = math.sin(theta), math.cos(theta)
    R = np.eye(n) - c * np.triu(np.ones((n, n)), 1)
    R = np.diag(s ** np.arange(n)) @ R
    return R + pert * np.finfo(float).eps * np.diag(np.arange(n, 0, -1.0))


def lesp(n: int) -> np.ndarray:
    """
    Tridiagonal matrix with subdiagonal 2..n, diagonal -(5, 7, ..., 2n + 3)
    and superdiagonal 1/2, ..., 1/n. Its real negative eigenvalues are
    sensitive to perturbations.
    """
    k = np.arange(2, n + 1, dtype=float)
    return np.diag(-(2 * np.arange(1, n + 1) + 3.0)) + np.diag(k, -1) + np.diag(1 / k, 1)


def sampling(n: int) -> np.ndarray:
    """
    Sampling matrix for the points x = 1..n: A[i, j] = x_i / (x_i - x_j) off
    the diagonal, and A[j, j] the sum of the off-diagonal entries of column
    j. The eigenvalues are 0, 1, ..., n - 1, badly conditioned.
    """
    x = np.arange(1, n + 1, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        A = x[:, None] / (x[:, None] - x[None, :])
    np.fill_diagonal(A, 0)
    np.fill_diagonal(A, A.sum(axis=0))
    return A


def jordan_block(n: int, eigenvalue: complex) -> np.ndarray:
    return eigenvalue * np.eye(n, dtype=complex) + np.eye(n, k=1)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Q factor of a complex Gaussian matrix."""
    Q, _ = qr(complex_gaussian(rng, (n, n)))
    return Q


def _unit_random(rng: np.random.Generator, n: int) -> np.ndarray:
    R = complex_gaussian(rng, (n, n))
    return R / np.linalg.norm(R, 2)


def rand_eig(rng: np.random.Generator, n: int) -> np.ndarray:
    """
    V D V^-1 with D = diag(U[1, 2] + i N(0, 1)) and V complex Gaussian.
    """
    d = rng.uniform(1, 2, n) + 1j * rng.standard_normal(n)
    V = complex_gaussian(rng, (n, n))
    return solve(V.T, (V * d).T).T


def _case_matrix(name: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if name == 'rand-eig':
        return rand_eig(rng, n)
    if name == 'randn':
        return complex_gaussian(rng, (n, n))
    if name == 'jordbloc':
        J = block_diag(jordan_block(8, 0.1), _unit_random(rng, n - 8) + np.eye(n - 8))
        Q = random_unitary(rng, n)
        return Q @ J @ Q.conj().T
    if name == 'grcar':
        return grcar(n).astype(complex)
    if name == 'smoke':
        return schur(smoke(n)).T
    if name == 'kahan':
        return kahan(n).astype(complex)
    if name == 'lesp':
        return -block_diag(schur(lesp(32)).T, _unit_random(rng, n - 32) - np.eye(n - 32))
    if name == 'sampling':
        return block_diag(sampling(32), _unit_random(rng, n - 32) + np.eye(n - 32)).astype(complex)
    raise ArgumentError(f"Case '{name}' not found")


@dataclass(frozen=True)
class GalleryCase:
    """
    A named test case at size n.

    Example
    -------
    >>> A, B = GalleryCase('jordbloc', 16, seed=3).generate()
    >>> C = GalleryCase('jordbloc', 16, seed=3).rhs()

    Every matrix is drawn from its own named substream of ``seed``, so the
    same (name, size, seed) reproduces the same matrices bit for bit.
    """
    name: str
    size: int
    seed: int = 0

    def __post_init__(self):
        if self.name not in CASES:
            raise ArgumentError(f"Case '{self.name}' not found, choose one of {', '.join(CASES)}")
        if not isinstance(self.size, int) or isinstance(self.size, bool):
            raise ArgumentError(f"size {self.size!r} is not an integer")
        minimum = STRUCTURED_SIZE.get(self.name, 0) + 1
        if self.size < minimum:
            raise ArgumentError(f"case '{self.name}' needs n >= {minimum}, got {self.size}")

    def _stream(self, label: str) -> np.random.Generator:
        return substream(self.seed, f'{self.name}:{self.size}:{label}')

    def generate(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        :return: (A, B), complex n x n
        """
        n = self.size
        if self.name == 'grcar-rand':
            return grcar(n).astype(complex), rand_eig(self._stream('B'), n)
        return _case_matrix(self.name, n, self._stream('A')), _case_matrix(self.name, n, self._stream('B'))

    def rhs(self) -> np.ndarray:
        """C with N(0, 1) real and imaginary parts."""
        return complex_gaussian(self._stream('C'), (self.size, self.size))
