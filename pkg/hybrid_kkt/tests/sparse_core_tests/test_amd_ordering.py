"""
填充缩减排序测试脚本
"""

import sys
import os
import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.exceptions import DimensionMismatchError
from hybrid_kkt.sparse_core import (
    CompressedColumnMatrix,
    amd_order,
    rcm_order,
    natural_order,
    compute_ordering,
    symbolic_cholesky,
)


def arrow_pattern(n: int) -> CompressedColumnMatrix:
    """第 0 行/列稠密的箭头结构 (下三角)"""
    rows = np.concatenate([np.arange(n), np.arange(1, n)])
    cols = np.concatenate([np.arange(n), np.zeros(n - 1, dtype=int)])
    return CompressedColumnMatrix.from_triplets(rows, cols, np.ones(len(rows)), (n, n))


def grid_laplacian_pattern(width: int) -> CompressedColumnMatrix:
    """width×width 五点差分网格的下三角结构"""
    n = width * width
    rows, cols = list(range(n)), list(range(n))
    for i in range(n):
        if (i + 1) % width:
            rows.append(i + 1)
            cols.append(i)
        if i + width < n:
            rows.append(i + width)
            cols.append(i)
    return CompressedColumnMatrix.from_triplets(rows, cols, np.ones(len(rows)), (n, n))


def test_amd_diagonal_is_identity():
    """测试对角结构的 AMD 排序为恒等置换"""
    P = amd_order(CompressedColumnMatrix.identity(6))
    assert P.perm.tolist() == list(range(6)), "平局按最小索引打破, 应得恒等置换"
    print("  对角结构测试通过")


def test_amd_orders_arrow_vertex_last():
    """测试箭头结构的箭头顶点被排在最后且无填充"""
    n = 10
    pattern = arrow_pattern(n)
    P = amd_order(pattern)

    assert P.perm[n - 1] == 0, f"箭头顶点应最后消去, 实际顺序 {P.perm.tolist()}"
    sym = symbolic_cholesky(pattern, P)
    assert sym.nnz_l == pattern.nnz, "箭头顶点最后消去时不应产生填充"
    print("  箭头结构测试通过")


def test_amd_beats_natural_on_grid():
    """测试网格 Laplacian 上 AMD 的 nnz(L) 不超过自然顺序"""
    pattern = grid_laplacian_pattern(10)
    amd_nnz = int(symbolic_cholesky(pattern, amd_order(pattern)).col_counts.sum())
    natural_nnz = int(symbolic_cholesky(pattern, natural_order(pattern)).col_counts.sum())

    print(f"  nnz(L): AMD={amd_nnz}, 自然顺序={natural_nnz}")
    assert amd_nnz <= natural_nnz, "AMD 的填充不应多于自然顺序"


def test_amd_deterministic_bijection():
    """测试 AMD 输出为确定的双射"""
    rng = np.random.default_rng(21)
    n = 60
    mask = rng.random((n, n)) < 0.06
    rows, cols = np.nonzero(np.tril(mask | mask.T))
    pattern = CompressedColumnMatrix.from_triplets(rows, cols, np.ones(len(rows)), (n, n))

    first = amd_order(pattern)
    second = amd_order(pattern)
    assert sorted(first.perm.tolist()) == list(range(n)), "输出应为双射"
    assert np.array_equal(first.perm, second.perm), "相同输入应得到相同排序"
    print("  确定性测试通过")


def test_other_orderings_and_dispatch():
    """测试 RCM、自然顺序与按名称分派"""
    pattern = grid_laplacian_pattern(5)
    rcm = rcm_order(pattern)
    assert sorted(rcm.perm.tolist()) == list(range(25))
    assert compute_ordering(pattern, "natural").perm.tolist() == list(range(25))
    assert np.array_equal(compute_ordering(pattern, "amd").perm, amd_order(pattern).perm)

    with pytest.raises(ValueError):
        compute_ordering(pattern, "nested_dissection")
    with pytest.raises(DimensionMismatchError):
        amd_order(CompressedColumnMatrix.zeros(3, 2))
    print("  排序分派测试通过")


if __name__ == "__main__":
    print("开始测试填充缩减排序...")
    test_amd_diagonal_is_identity()
    test_amd_orders_arrow_vertex_last()
    test_amd_beats_natural_on_grid()
    test_amd_deterministic_bijection()
    test_other_orderings_and_dispatch()
    print("所有排序测试通过!")
