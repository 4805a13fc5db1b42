"""
稀疏 Cholesky 分解测试脚本 (符号分析、数值分解、三角求解)
"""

import sys
import os
import numpy as np
import pytest
import scipy.linalg as sla
import scipy.sparse as sp

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.exceptions import DimensionMismatchError, StructureMismatchError
from hybrid_kkt.sparse_core import (
    CompressedColumnMatrix,
    Permutation,
    NotSpdFailure,
    NumericCholesky,
    analyze,
    symbolic_cholesky,
    numeric_cholesky,
    factor_solve,
)


def random_spd(n: int, density: float, rng: np.random.Generator) -> np.ndarray:
    """随机稀疏对称严格对角占优矩阵"""
    B = sp.random(n, n, density=density, random_state=rng).toarray()
    S = B + B.T
    return S + np.diag(np.abs(S).sum(axis=1) + 1.0)


def test_symbolic_tridiagonal_has_no_fill():
    """测试三对角结构无填充"""
    n = 5
    rows = np.concatenate([np.arange(n), np.arange(1, n)])
    cols = np.concatenate([np.arange(n), np.arange(n - 1)])
    pattern = CompressedColumnMatrix.from_triplets(rows, cols, np.ones(len(rows)), (n, n))
    sym = symbolic_cholesky(pattern, Permutation.identity(n))

    assert sym.col_counts.tolist() == [2, 2, 2, 2, 1]
    assert sym.etree.tolist() == [1, 2, 3, 4, -1]
    print("  三对角符号分解测试通过")


def test_symbolic_arrow_first_fills_completely():
    """测试箭头顶点在前时 L 完全稠密"""
    n = 8
    rows = np.concatenate([np.arange(n), np.arange(1, n)])
    cols = np.concatenate([np.arange(n), np.zeros(n - 1, dtype=int)])
    pattern = CompressedColumnMatrix.from_triplets(rows, cols, np.ones(len(rows)), (n, n))
    sym = symbolic_cholesky(pattern, Permutation.identity(n))

    assert sym.col_counts.tolist() == list(range(n, 0, -1))
    print("  箭头结构最坏填充测试通过")


def test_symbolic_matches_dense_cholesky_pattern():
    """测试符号结构与稠密 Cholesky 因子的非零结构一致 (n=60)"""
    rng = np.random.default_rng(17)
    n = 60
    A = random_spd(n, 0.04, rng)
    sym = analyze(CompressedColumnMatrix.from_dense(A, lower=True))

    perm = sym.ordering.perm
    L_dense = sla.cholesky(A[np.ix_(perm, perm)], lower=True)
    dense_pattern = set(zip(*np.nonzero(L_dense)))
    symbolic_pattern = set(zip(sym.l_pattern.row_idx.tolist(), sym.l_pattern.col_idx.tolist()))

    assert dense_pattern <= symbolic_pattern, "符号结构必须覆盖所有数值非零"
    assert symbolic_pattern == dense_pattern, "随机数值下符号结构应与稠密因子结构相同"
    print("  稠密结构预言机测试通过")


def test_numeric_small_cases():
    """测试数值分解的小例子"""
    D = CompressedColumnMatrix.diagonal([4.0, 9.0])
    factor = numeric_cholesky(D, analyze(D, "natural"))
    assert isinstance(factor, NumericCholesky)
    assert factor.diagonal().tolist() == [2.0, 3.0]

    A = CompressedColumnMatrix.from_triplets([0, 1, 1], [0, 0, 1], [1.0, 2.0, 1.0], (2, 2))
    failure = numeric_cholesky(A, analyze(A, "natural"))
    assert isinstance(failure, NotSpdFailure), "不定矩阵应返回 NotSpdFailure"
    assert failure.column == 1
    assert failure.pivot == pytest.approx(-3.0)
    print("  数值分解小例子测试通过")


def test_numeric_reconstruction():
    """测试 A = BᵀB + I (n=200) 的重构误差"""
    rng = np.random.default_rng(23)
    n = 200
    B = sp.random(n, n, density=0.02, random_state=rng).toarray()
    A = B.T @ B + np.eye(n)
    A_lower = CompressedColumnMatrix.from_dense(A, lower=True)
    factor = numeric_cholesky(A_lower, analyze(A_lower))
    assert isinstance(factor, NumericCholesky)

    perm = factor.symbolic.ordering.perm
    L = factor.to_lower_matrix().to_dense()
    err = np.linalg.norm(A[np.ix_(perm, perm)] - L @ L.T) / np.linalg.norm(A)
    print(f"  重构相对误差: {err:.2e}")
    assert err <= 1e-12
    assert np.all(factor.diagonal() > 0)


def test_numeric_detects_negative_eigenvalue():
    """测试含负特征值的对称矩阵必然分解失败 (稠密特征值预言机对照)"""
    rng = np.random.default_rng(29)
    for trial in range(10):
        n = int(rng.integers(5, 80))
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        eig = rng.uniform(0.5, 2.0, size=n)
        negative = trial % 2 == 0
        if negative:
            eig[rng.integers(n)] = -rng.uniform(0.1, 1.0)
        A = Q @ np.diag(eig) @ Q.T
        A = 0.5 * (A + A.T)
        assert (np.linalg.eigvalsh(A)[0] < 0) == negative

        A_lower = CompressedColumnMatrix.from_dense(A, lower=True, keep_zeros=True)
        result = numeric_cholesky(A_lower, analyze(A_lower))
        if negative:
            assert isinstance(result, NotSpdFailure), f"第 {trial} 个不定矩阵未被检出"
        else:
            assert isinstance(result, NumericCholesky), f"第 {trial} 个正定矩阵分解失败"
    print("  负特征值检测测试通过")


def test_numeric_structure_mismatch():
    """测试结构超出符号分解时报错"""
    D = CompressedColumnMatrix.diagonal([1.0, 1.0])
    sym = analyze(D)
    A = CompressedColumnMatrix.from_triplets([0, 1, 1], [0, 0, 1], [2.0, 1.0, 2.0], (2, 2))
    assert not sym.matches(A)
    with pytest.raises(StructureMismatchError):
        numeric_cholesky(A, sym)
    print("  结构不匹配测试通过")


def test_symbolic_reused_across_values():
    """测试同一结构的两个矩阵复用一个符号分解"""
    rng = np.random.default_rng(31)
    A = random_spd(40, 0.08, rng)
    A_lower = CompressedColumnMatrix.from_dense(A, lower=True)
    sym = analyze(A_lower)
    scaled = A_lower.with_values(A_lower.values * 2.0)

    f1 = numeric_cholesky(A_lower, sym)
    f2 = numeric_cholesky(scaled, sym)
    assert f1.symbolic is f2.symbolic
    assert np.allclose(f2.l_values, np.sqrt(2.0) * f1.l_values, rtol=1e-12, atol=1e-14 * np.abs(f1.l_values).max())
    print("  符号分解复用测试通过")


def test_factor_solve():
    """测试三角求解"""
    I = CompressedColumnMatrix.identity(3)
    b = np.array([1.0, -2.0, 3.0])
    assert factor_solve(numeric_cholesky(I, analyze(I)), b).tolist() == b.tolist()

    D = CompressedColumnMatrix.diagonal([2.0, 4.0])
    assert np.allclose(factor_solve(numeric_cholesky(D, analyze(D)), [2.0, 8.0]), [1.0, 2.0])

    rng = np.random.default_rng(37)
    n = 150
    A = random_spd(n, 0.03, rng)
    A_lower = CompressedColumnMatrix.from_dense(A, lower=True)
    factor = numeric_cholesky(A_lower, analyze(A_lower))
    b = rng.standard_normal(n)
    x = factor_solve(factor, b)
    expected = sla.solve(A, b, assume_a="pos")
    assert np.linalg.norm(x - expected) / np.linalg.norm(expected) <= 1e-10
    backward = np.linalg.norm(A @ x - b) / (np.abs(A).sum(axis=1).max() * np.linalg.norm(x) + np.linalg.norm(b))
    assert backward <= 1e-12

    with pytest.raises(DimensionMismatchError):
        factor_solve(factor, np.ones(n + 1))
    print("  三角求解测试通过")


if __name__ == "__main__":
    print("开始测试稀疏 Cholesky 分解...")
    test_symbolic_tridiagonal_has_no_fill()
    test_symbolic_arrow_first_fills_completely()
    test_symbolic_matches_dense_cholesky_pattern()
    test_numeric_small_cases()
    test_numeric_reconstruction()
    test_numeric_detects_negative_eigenvalue()
    test_numeric_structure_mismatch()
    test_symbolic_reused_across_values()
    test_factor_solve()
    print("所有 Cholesky 测试通过!")
