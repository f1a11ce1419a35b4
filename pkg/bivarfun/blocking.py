"""
Eigenvalue blocking of Schur forms and the split trees of the recursion.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .config import STRATEGIES
from .dense import SchurForm, spectral_norm, sylvester_tri
from .errors import ArgumentError, ConsistencyError, SingularityError

logger = logging.getLogger(__name__)


def cluster(eigenvalues, delta: float) -> List[np.ndarray]:
    """
    Connected components of the graph joining eigenvalues at distance <= delta.

    Components come sorted by ascending mean real part (ties by smallest
    index), members in ascending index order.

    :rtype: list of index arrays
    """
    lam = np.asarray(eigenvalues, dtype=complex).ravel()
    m = lam.size
    if m == 0:
        return []
    close = np.abs(lam[:, None] - lam[None, :]) <= delta
    count, labels = connected_components(csr_matrix(close), directed=False)
    components = [np.flatnonzero(labels == k) for k in range(count)]
    components.sort(key=lambda idx: (float(np.mean(lam[idx].real)), int(idx[0])))
    return components


@dataclass(frozen=True)
class Partition:
    """
    Atomic blocks of a Schur form.

    ``permutation[p]`` is the original position of the eigenvalue that sits at
    position p after reordering; block k covers the reordered positions
    ``blocks[k]``.
    """
    permutation: np.ndarray = field(compare=False)
    sizes: Tuple[int, ...]
    delta: float

    @property
    def size(self) -> int:
        return int(sum(self.sizes))

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def blocks(self) -> List[range]:
        ranges, start = [], 0
        for size in self.sizes:
            ranges.append(range(start, start + size))
            start += size
        return ranges

    @property
    def original_blocks(self) -> List[np.ndarray]:
        return [self.permutation[b.start:b.stop] for b in self.blocks]


def blocking(S: SchurForm, delta: float) -> Partition:
    """
    Group the eigenvalues of a Schur form into delta-connected blocks.

    :param SchurForm S: factorization to partition
    :param float delta: separation parameter, > 0
    :rtype: Partition
    """
    if not delta > 0:
        raise ArgumentError(f"delta must be positive, got {delta}")
    components = cluster(S.eigenvalues, delta)
    if components:
        permutation = np.concatenate(components)
    else:
        permutation = np.zeros(0, dtype=int)
    partition = Partition(permutation, tuple(len(c) for c in components), delta)
    logger.debug("blocking: m=%d delta=%g blocks=%s", S.size, delta, partition.sizes)
    return partition


@dataclass(frozen=True)
class PartitionTree:
    """
    Node of the split tree over the atomic blocks of a reordered Schur form.

    Internal nodes carry the solution V of T11 V - V T22 = T12 for their
    split; leaves carry none. ``merged`` marks a node collapsed into a leaf
    because that solution was too ill-conditioned.
    """
    blocks: Tuple[range, ...]
    children: Tuple['PartitionTree', ...] = ()
    sylvester_solution: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    merged: bool = False
    ratio: float = 0.0

    @property
    def start(self) -> int:
        return self.blocks[0].start if self.blocks else 0

    @property
    def stop(self) -> int:
        return self.blocks[-1].stop if self.blocks else 0

    @property
    def size(self) -> int:
        return self.stop - self.start

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def depth(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + max(child.depth for child in self.children)

    @property
    def split(self) -> int:
        """Size of the left child."""
        return self.children[0].size

    def leaves(self) -> Iterator[PartitionTree]:
        if self.is_leaf:
            yield self
            return
        for child in self.children:
            yield from child.leaves()

    def internal_nodes(self) -> Iterator[PartitionTree]:
        if self.is_leaf:
            return
        yield self
        for child in self.children:
            yield from child.internal_nodes()


def _split_point(sizes: List[int], strategy: str) -> int:
    if strategy == 'single':
        return len(sizes) - 1
    total = sum(sizes)
    best, best_gap, left = 1, None, 0
    for k in range(1, len(sizes)):
        left += sizes[k - 1]
        gap = abs(total - 2 * left)
        if best_gap is None or gap < best_gap:
            best, best_gap = k, gap
    return best


def _build(blocks: Tuple[range, ...], strategy: str, n_min: int) -> PartitionTree:
    size = sum(len(b) for b in blocks)
    if len(blocks) <= 1 or size <= n_min:
        return PartitionTree(blocks)
    k = _split_point([len(b) for b in blocks], strategy)
    return PartitionTree(blocks, (_build(blocks[:k], strategy, n_min), _build(blocks[k:], strategy, n_min)))


def build_tree(P: Partition, strategy: str = 'balanced', n_min: int = 1) -> PartitionTree:
    """
    Recursive split tree over the atomic blocks of ``P``.

    balanced: the two sides hold as equal cardinalities as block boundaries
    allow, ties going to the smaller left side. single: the right child is
    the last block. Nodes of total size <= n_min are not split further.

    :rtype: PartitionTree (without Sylvester solutions)
    """
    if strategy not in STRATEGIES:
        raise ArgumentError(f"strategy must be one of {STRATEGIES}, got {strategy!r}")
    if n_min < 1:
        raise ArgumentError(f"n_min must be >= 1, got {n_min}")
    return _build(tuple(P.blocks), strategy, n_min)


def precompute_sylvesters(T, tree: PartitionTree, gamma: float, delta: float,
                          merge: bool = True, side: str = 'A') -> PartitionTree:
    """
    Solve the Sylvester equation of every internal node, parents first.

    A node whose solution has r = ||V|| / ||T12|| > gamma / delta is collapsed
    into a merged leaf when ``merge`` is set; otherwise it is kept and a
    warning is logged.

    :param T: upper triangular matrix the tree was built over
    :param str side: 'A' or 'B', used in log lines
    :return: a new tree; the input tree is left untouched
    :raises ConsistencyError: on an exact eigenvalue collision across a split
    """
    T = np.asarray(T, dtype=complex)
    threshold = gamma / delta

    def visit(node: PartitionTree) -> PartitionTree:
        if node.is_leaf:
            return node
        s, mid, e = node.start, node.children[0].stop, node.stop
        T12 = T[s:mid, mid:e]
        try:
            V = sylvester_tri(T[s:mid, s:mid], T[mid:e, mid:e], T12)
        except SingularityError as exc:
            raise ConsistencyError(f"eigenvalue collision across the split {s}:{mid}:{e} of {side}") from exc
        norm_t12 = spectral_norm(T12)
        r = spectral_norm(V) / norm_t12 if norm_t12 > 0 else 0.0
        if r > threshold:
            if merge:
                logger.info("MERGE side=%s idx=%d:%d r=%.6g thresh=%.6g", side, s, e, r, threshold)
                return PartitionTree(node.blocks, merged=True, ratio=r)
            logger.warning("ill-conditioned Sylvester solution kept side=%s idx=%d:%d r=%.6g thresh=%.6g",
                           side, s, e, r, threshold)
        return replace(node, children=tuple(visit(child) for child in node.children),
                       sylvester_solution=V, ratio=r)

    return visit(tree)
