"""
稀疏 Cholesky 分解: 符号分析(消元树 + 行子树)、左视单纯形数值分解、三角求解

数值分解不做任何主元选取, 只沿用符号分析给出的对称置换 P, 分解
P A Pᵀ = L Lᵀ。当某一列的主元候选值不大于 pivot_floor 时返回 NotSpdFailure,
这是驱动正则化阶梯的正常结果, 不抛异常。
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from ..exceptions import DimensionMismatchError, StructureMismatchError
from .amd_ordering import OrderingMethod, compute_ordering
from .csc_matrix import (
    CompressedColumnMatrix,
    Permutation,
    symmetric_lower_pattern,
    symmetric_permute,
)

logger = logging.getLogger(__name__)

DEFAULT_RELATIVE_PIVOT_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class SymbolicFactor:
    """
    符号分解结果, 在结构相同的矩阵序列中复用

    Attributes:
        ordering: 填充缩减置换 P
        etree: P A Pᵀ 的消元树 (根节点父亲为 -1)
        col_counts: L 每列非零个数
        l_col_ptr: L 结构的列偏移
        l_row_idx: L 结构的行索引 (每列对角元在首位)
        source_pattern: 被分析矩阵的对称化下三角结构
        permuted_pattern: P A Pᵀ 的下三角结构
        source_to_permuted: source_pattern 元素到 permuted_pattern 元素的位置映射
    """
    ordering: Permutation
    etree: np.ndarray
    col_counts: np.ndarray
    l_col_ptr: np.ndarray
    l_row_idx: np.ndarray
    source_pattern: CompressedColumnMatrix
    permuted_pattern: CompressedColumnMatrix
    source_to_permuted: np.ndarray

    @property
    def n(self) -> int:
        return self.ordering.size

    @property
    def nnz_l(self) -> int:
        return int(self.l_col_ptr[-1])

    @property
    def l_pattern(self) -> CompressedColumnMatrix:
        return CompressedColumnMatrix(
            self.n, self.n, self.l_col_ptr, self.l_row_idx, np.zeros(self.nnz_l), check=False
        )

    def matches(self, A_lower: CompressedColumnMatrix) -> bool:
        """A_lower 的结构是否落在被分析的结构之内"""
        try:
            self._locate(A_lower)
        except StructureMismatchError:
            return False
        return True

    def _locate(self, A_lower: CompressedColumnMatrix) -> np.ndarray:
        n = self.n
        if A_lower.shape != (n, n):
            raise StructureMismatchError(f"矩阵维度 {A_lower.shape} 与符号分解阶数 {n} 不一致")
        if not A_lower.is_lower():
            raise StructureMismatchError("数值分解要求下三角存储")
        src = self.source_pattern
        src_keys = src.col_idx * n + src.row_idx
        keys = A_lower.col_idx * n + A_lower.row_idx
        pos = np.searchsorted(src_keys, keys)
        if np.any(pos >= len(src_keys)) or np.any(src_keys[np.minimum(pos, len(src_keys) - 1)] != keys):
            raise StructureMismatchError("矩阵含有符号分解结构之外的元素")
        return pos


@dataclass(frozen=True)
class NotSpdFailure:
    """
    数值分解失败: 第 column 列(置换后)主元候选值不大于 pivot_floor

    Attributes:
        column: 置换后的列号
        original_index: 对应的原始行列号
        pivot: 失败时的主元候选值
        pivot_floor: 使用的绝对主元下限
    """
    column: int
    original_index: int
    pivot: float
    pivot_floor: float


@dataclass(frozen=True, eq=False)
class NumericCholesky:
    """数值 Cholesky 因子, L 的数值与 symbolic.l_row_idx 对齐"""
    symbolic: SymbolicFactor
    l_values: np.ndarray

    @property
    def n(self) -> int:
        return self.symbolic.n

    @property
    def nnz_l(self) -> int:
        return self.symbolic.nnz_l

    def diagonal(self) -> np.ndarray:
        return self.l_values[self.symbolic.l_col_ptr[:-1]]

    def to_lower_matrix(self) -> CompressedColumnMatrix:
        sym = self.symbolic
        return CompressedColumnMatrix(sym.n, sym.n, sym.l_col_ptr, sym.l_row_idx, self.l_values, check=False)


def _elimination_tree(col_ptr, row_idx, n: int) -> np.ndarray:
    """上三角结构(列 k 只含 i < k 的行)的消元树, 带路径压缩"""
    parent = [-1] * n
    ancestor = [-1] * n
    for k in range(n):
        for p in range(col_ptr[k], col_ptr[k + 1]):
            i = row_idx[p]
            while i != -1 and i < k:
                inext = ancestor[i]
                ancestor[i] = k
                if inext == -1:
                    parent[i] = k
                i = inext
    return np.asarray(parent, dtype=np.int64)


def symbolic_cholesky(pattern: CompressedColumnMatrix, ordering: Permutation) -> SymbolicFactor:
    """
    符号 Cholesky 分解

    Args:
        pattern: 方阵结构(下三角或完整存储均可, 内部对称化并补全对角)
        ordering: 对称置换

    Returns:
        SymbolicFactor: 消元树与 L 的精确结构

    Raises:
        DimensionMismatchError: 置换大小与矩阵阶数不一致
    """
    source = symmetric_lower_pattern(pattern)
    n = source.nrows
    if ordering.size != n:
        raise DimensionMismatchError(f"置换大小({ordering.size})与矩阵阶数({n})不一致")

    permuted = symmetric_permute(source, ordering)
    # P A Pᵀ 的上三角按列存储, 即下三角存储的转置
    upper = permuted.transpose()
    up_ptr = upper.col_ptr.tolist()
    up_idx = upper.row_idx.tolist()
    etree = _elimination_tree(up_ptr, up_idx, n)

    # 逐行用行子树求 L(k, :) 的结构
    parent = etree.tolist()
    mark = [-1] * n
    l_rows, l_cols = [], []
    for k in range(n):
        mark[k] = k
        for p in range(up_ptr[k], up_ptr[k + 1]):
            i = up_idx[p]
            while mark[i] != k:
                l_rows.append(k)
                l_cols.append(i)
                mark[i] = k
                i = parent[i]
    diag = np.arange(n, dtype=np.int64)
    rows = np.concatenate([np.asarray(l_rows, dtype=np.int64), diag])
    cols = np.concatenate([np.asarray(l_cols, dtype=np.int64), diag])
    l_pattern = CompressedColumnMatrix.from_triplets(rows, cols, np.zeros(len(rows)), (n, n))

    # source 元素在 permuted 中的位置
    inv = ordering.inverse
    new_r = inv[source.row_idx]
    new_c = inv[source.col_idx]
    keys = np.minimum(new_r, new_c) * n + np.maximum(new_r, new_c)
    perm_keys = permuted.col_idx * n + permuted.row_idx
    source_to_permuted = np.searchsorted(perm_keys, keys)

    logger.debug("符号分解完成: n=%d, nnz(L)=%d", n, l_pattern.nnz)
    return SymbolicFactor(
        ordering=ordering,
        etree=etree,
        col_counts=np.diff(l_pattern.col_ptr),
        l_col_ptr=l_pattern.col_ptr,
        l_row_idx=l_pattern.row_idx,
        source_pattern=source,
        permuted_pattern=permuted,
        source_to_permuted=source_to_permuted,
    )


def analyze(pattern: CompressedColumnMatrix, method: OrderingMethod = "amd") -> SymbolicFactor:
    """排序 + 符号分解"""
    return symbolic_cholesky(pattern, compute_ordering(pattern, method))


def default_pivot_floor(A_lower: CompressedColumnMatrix, relative: float = DEFAULT_RELATIVE_PIVOT_FLOOR) -> float:
    """绝对主元下限 = relative · max|diag(A)|"""
    diag = A_lower.diagonal_values()
    return float(relative * np.abs(diag).max()) if len(diag) else 0.0


def numeric_cholesky(
    A_lower: CompressedColumnMatrix,
    symbolic: SymbolicFactor,
    pivot_floor: Optional[float] = None,
) -> Union[NumericCholesky, NotSpdFailure]:
    """
    左视数值 Cholesky 分解

    Args:
        A_lower: 对称矩阵的下三角存储, 结构须落在 symbolic 分析的结构内
        symbolic: 符号分解
        pivot_floor: 绝对主元下限; 为 None 时取 1e-13·max|diag(A)|

    Returns:
        NumericCholesky | NotSpdFailure: 成功的因子或失败位置

    Raises:
        StructureMismatchError: 结构与符号分解不匹配
    """
    positions = symbolic._locate(A_lower)
    floor = default_pivot_floor(A_lower) if pivot_floor is None else float(pivot_floor)

    n = symbolic.n
    pa = symbolic.permuted_pattern
    pa_vals = np.zeros(pa.nnz)
    pa_vals[symbolic.source_to_permuted[positions]] = A_lower.values
    pa_ptr = pa.col_ptr
    pa_rows = pa.row_idx

    lp = symbolic.l_col_ptr
    li = symbolic.l_row_idx
    lp_list = lp.tolist()
    li_list = li.tolist()
    lx = np.zeros(symbolic.nnz_l)
    work = np.zeros(n)
    next_pos = [0] * n
    # pending[j]: 下一个待用行号为 j 的已完成列
    pending = [[] for _ in range(n)]

    for j in range(n):
        lo, hi = lp_list[j], lp_list[j + 1]
        rows = li[lo:hi]
        s, e = pa_ptr[j], pa_ptr[j + 1]
        work[pa_rows[s:e]] = pa_vals[s:e]
        for k in pending[j]:
            p, end = next_pos[k], lp_list[k + 1]
            work[li[p:end]] -= lx[p:end] * lx[p]
            if p + 1 < end:
                next_pos[k] = p + 1
                pending[li_list[p + 1]].append(k)
        pending[j] = []

        d = work[j]
        if not d > floor:
            original = int(symbolic.ordering.perm[j])
            logger.debug("数值分解失败: 列 %d (原始 %d), 主元 %.3e <= %.3e", j, original, d, floor)
            return NotSpdFailure(column=j, original_index=original, pivot=float(d), pivot_floor=floor)
        ljj = math.sqrt(d)
        lx[lo] = ljj
        lx[lo + 1:hi] = work[rows[1:]] / ljj
        work[rows] = 0.0
        if lo + 1 < hi:
            next_pos[j] = lo + 1
            pending[li_list[lo + 1]].append(j)

    return NumericCholesky(symbolic=symbolic, l_values=lx)


def factor_solve(factor: NumericCholesky, b) -> np.ndarray:
    """
    用 Cholesky 因子求解 A x = b: 置换 → 前代 → 回代 → 逆置换

    Raises:
        DimensionMismatchError: b 长度与阶数不一致
    """
    b = np.asarray(b, dtype=np.float64)
    n = factor.n
    if b.ndim != 1 or len(b) != n:
        raise DimensionMismatchError(f"右端项长度({b.shape})与因子阶数({n})不一致")
    sym = factor.symbolic
    lp = sym.l_col_ptr.tolist()
    li = sym.l_row_idx
    lx = factor.l_values
    y = sym.ordering.apply(b)

    # L y = P b
    for j in range(n):
        lo, hi = lp[j], lp[j + 1]
        y[j] /= lx[lo]
        if hi > lo + 1:
            y[li[lo + 1:hi]] -= lx[lo + 1:hi] * y[j]
    # Lᵀ x = y
    for j in range(n - 1, -1, -1):
        lo, hi = lp[j], lp[j + 1]
        if hi > lo + 1:
            y[j] -= np.dot(lx[lo + 1:hi], y[li[lo + 1:hi]])
        y[j] /= lx[lo]
    return sym.ordering.apply_inverse(y)
