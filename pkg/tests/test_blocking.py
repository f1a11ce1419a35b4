import logging

import numpy as np
import pytest

from bivarfun.blocking import PartitionTree, blocking, build_tree, cluster, precompute_sylvesters
from bivarfun.dense import SchurForm, schur, spectral_norm
from bivarfun.errors import ArgumentError, ConsistencyError


def diagonal_schur(values, upper=0.0):
    T = np.diag(np.asarray(values, dtype=complex)) + upper * np.triu(np.ones((len(values), len(values))), 1)
    return SchurForm(np.eye(len(values), dtype=complex), T)


def test_cluster():
    components = cluster([0, 0.05, 0.2, 1, 1.08], 0.1)
    assert [list(c) for c in components] == [[0, 1], [2], [3, 4]]
    assert cluster([], 0.1) == []
    # transitively connected
    assert len(cluster([0, 0.09, 0.18, 0.27], 0.1)) == 1


def test_cluster_permutation_invariant():
    rng = np.random.default_rng(3)
    chain = 0.09 * np.arange(8) + 5
    lam = np.concatenate([rng.uniform(0, 4, 12) + 0.3j * rng.standard_normal(12), chain])
    components = [frozenset(lam[idx]) for idx in cluster(lam, 0.1)]
    assert frozenset(chain.astype(complex)) in components
    for _ in range(5):
        shuffled = lam[rng.permutation(lam.size)]
        assert [frozenset(shuffled[idx]) for idx in cluster(shuffled, 0.1)] == components


def test_blocking():
    P = blocking(diagonal_schur([1, 0, 1.05]), 0.1)
    assert list(P.permutation) == [1, 0, 2]
    assert P.sizes == (1, 2)
    assert P.count == 2
    assert P.size == 3
    assert [list(b) for b in P.blocks] == [[0], [1, 2]]
    assert [list(b) for b in P.original_blocks] == [[1], [0, 2]]
    with pytest.raises(ArgumentError):
        blocking(diagonal_schur([1, 2]), 0)


def test_blocking_separation():
    S = schur(np.random.default_rng(0).standard_normal((12, 12)))
    P = blocking(S, 0.1)
    lam = S.eigenvalues
    blocks = P.original_blocks
    for a in range(len(blocks)):
        for b in range(a + 1, len(blocks)):
            assert np.min(np.abs(lam[blocks[a]][:, None] - lam[blocks[b]][None, :])) > 0.1


def test_build_tree():
    P = blocking(diagonal_schur([0, 0.05, 1, 2]), 0.1)
    assert P.sizes == (2, 1, 1)
    tree = build_tree(P, 'balanced')
    assert tree.split == 2
    assert tree.children[0].is_leaf
    assert tree.children[1].split == 1
    assert tree.depth == 3
    assert [leaf.size for leaf in tree.leaves()] == [2, 1, 1]
    single = build_tree(P, 'single')
    assert single.split == 3
    assert single.children[0].split == 2
    assert build_tree(P, n_min=4).is_leaf
    assert len(list(build_tree(P, n_min=2).leaves())) == 2
    with pytest.raises(ArgumentError):
        build_tree(P, 'random')
    with pytest.raises(ArgumentError):
        build_tree(P, n_min=0)


def test_build_tree_balanced_ties():
    P = blocking(diagonal_schur([0, 1, 2]), 0.1)
    assert build_tree(P).split == 1


def test_precompute_sylvesters():
    T = np.array([[0, 1, 1], [0, 1, 1], [0, 0, 1.05]], dtype=complex)
    P = blocking(SchurForm(np.eye(3, dtype=complex), T), 0.1)
    tree = precompute_sylvesters(T, build_tree(P), gamma=10, delta=0.1)
    V = tree.sylvester_solution
    assert np.linalg.norm(T[:1, :1] @ V - V @ T[1:, 1:] - T[:1, 1:]) < 1e-14
    assert tree.ratio == pytest.approx(spectral_norm(V) / spectral_norm(T[:1, 1:]))
    assert not tree.merged
    assert build_tree(P).sylvester_solution is None


def test_merge(caplog):
    T = np.array([[0, 1, 1], [0, 1, 1], [0, 0, 1.05]], dtype=complex)
    P = blocking(SchurForm(np.eye(3, dtype=complex), T), 0.1)
    with caplog.at_level(logging.INFO, logger='bivarfun.blocking'):
        merged = precompute_sylvesters(T, build_tree(P), gamma=1e-3, delta=0.1, side='B')
    assert merged.is_leaf and merged.merged
    assert merged.size == 3
    assert 'MERGE side=B idx=0:3' in caplog.text
    caplog.clear()
    with caplog.at_level(logging.WARNING, logger='bivarfun.blocking'):
        kept = precompute_sylvesters(T, build_tree(P), gamma=1e-3, delta=0.1, merge=False)
    assert not kept.is_leaf
    assert 'ill-conditioned' in caplog.text


def test_collision_across_split():
    leaf0, leaf1 = PartitionTree((range(0, 1),)), PartitionTree((range(1, 2),))
    tree = PartitionTree((range(0, 1), range(1, 2)), (leaf0, leaf1))
    with pytest.raises(ConsistencyError):
        precompute_sylvesters([[1, 1], [0, 1]], tree, gamma=10, delta=0.1)
