"""
压缩列存储(CSC)稀疏矩阵与置换

对称矩阵只存储下三角(含对角线)。索引为 int64, 数值为 float64。
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from ..exceptions import DimensionMismatchError, KktError


def _as_index_array(values) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(values, dtype=np.int64).ravel())


def _as_value_array(values) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(values, dtype=np.float64).ravel())


@dataclass(frozen=True, eq=False)
class CompressedColumnMatrix:
    """
    压缩列存储矩阵

    Attributes:
        nrows: 行数
        ncols: 列数
        col_ptr: 列起始偏移, 长度 ncols+1
        row_idx: 行索引, 每列内严格递增
        values: 数值, 与 row_idx 对齐
    """
    nrows: int
    ncols: int
    col_ptr: np.ndarray
    row_idx: np.ndarray
    values: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nrows", int(self.nrows))
        object.__setattr__(self, "ncols", int(self.ncols))
        object.__setattr__(self, "col_ptr", _as_index_array(self.col_ptr))
        object.__setattr__(self, "row_idx", _as_index_array(self.row_idx))
        object.__setattr__(self, "values", _as_value_array(self.values))
        if self.check:
            self._validate()

    def _validate(self) -> None:
        if self.nrows < 0 or self.ncols < 0:
            raise DimensionMismatchError(f"矩阵维度不能为负: {self.nrows}x{self.ncols}")
        if len(self.col_ptr) != self.ncols + 1:
            raise DimensionMismatchError(
                f"col_ptr 长度({len(self.col_ptr)})应为 ncols+1({self.ncols + 1})"
            )
        nnz = len(self.row_idx)
        if len(self.values) != nnz:
            raise DimensionMismatchError(f"values 长度({len(self.values)})与 row_idx 长度({nnz})不一致")
        if self.col_ptr[0] != 0 or self.col_ptr[-1] != nnz:
            raise KktError("col_ptr 首尾必须分别为 0 和 nnz")
        if np.any(np.diff(self.col_ptr) < 0):
            raise KktError("col_ptr 必须单调不减")
        if nnz == 0:
            return
        if self.row_idx.min() < 0 or self.row_idx.max() >= self.nrows:
            raise DimensionMismatchError("行索引越界")
        # 同一列内行索引严格递增(跨列边界处不比较)
        steps = np.diff(self.row_idx)
        boundary = np.zeros(nnz - 1, dtype=bool)
        starts = self.col_ptr[1:-1]
        starts = starts[(starts > 0) & (starts < nnz)]
        boundary[starts - 1] = True
        if np.any((steps <= 0) & ~boundary):
            raise KktError("列内行索引必须严格递增且无重复")

    # ---- 基本属性 ----

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def nnz(self) -> int:
        return int(len(self.row_idx))

    @cached_property
    def col_idx(self) -> np.ndarray:
        """每个存储元素所在的列"""
        return np.repeat(np.arange(self.ncols, dtype=np.int64), np.diff(self.col_ptr))

    # ---- 构造 ----

    @classmethod
    def from_triplets(
        cls,
        rows: Sequence[int],
        cols: Sequence[int],
        vals: Sequence[float],
        shape: Tuple[int, int],
    ) -> "CompressedColumnMatrix":
        """
        由三元组构造矩阵, 重复元素求和, 显式零保留在结构中

        Args:
            rows: 行索引
            cols: 列索引
            vals: 数值
            shape: (nrows, ncols)

        Returns:
            CompressedColumnMatrix: 规范化后的矩阵

        Raises:
            DimensionMismatchError: 索引越界或长度不一致
        """
        nrows, ncols = int(shape[0]), int(shape[1])
        rows = _as_index_array(rows)
        cols = _as_index_array(cols)
        vals = _as_value_array(vals)
        if not (len(rows) == len(cols) == len(vals)):
            raise DimensionMismatchError("三元组的行、列、数值长度不一致")
        if len(rows) and (rows.min() < 0 or rows.max() >= nrows or cols.min() < 0 or cols.max() >= ncols):
            raise DimensionMismatchError(f"三元组索引超出矩阵维度 {nrows}x{ncols}")

        col_ptr = np.zeros(ncols + 1, dtype=np.int64)
        if len(rows) == 0:
            return cls(nrows, ncols, col_ptr, rows, vals, check=False)

        order = np.lexsort((rows, cols))
        rows, cols, vals = rows[order], cols[order], vals[order]
        first = np.ones(len(rows), dtype=bool)
        first[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
        starts = np.flatnonzero(first)
        vals = np.add.reduceat(vals, starts)
        rows, cols = rows[starts], cols[starts]
        np.cumsum(np.bincount(cols, minlength=ncols), out=col_ptr[1:])
        return cls(nrows, ncols, col_ptr, rows, vals, check=False)

    @classmethod
    def from_dense(cls, array, lower: bool = False, keep_zeros: bool = False) -> "CompressedColumnMatrix":
        """由稠密数组构造; lower=True 时只取下三角"""
        dense = np.asarray(array, dtype=np.float64)
        if dense.ndim != 2:
            raise DimensionMismatchError("稠密输入必须是二维数组")
        mask = np.ones(dense.shape, dtype=bool) if keep_zeros else dense != 0.0
        if lower:
            mask &= np.tri(dense.shape[0], dense.shape[1], dtype=bool)
        rows, cols = np.nonzero(mask)
        return cls.from_triplets(rows, cols, dense[rows, cols], dense.shape)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "CompressedColumnMatrix":
        return cls(nrows, ncols, np.zeros(ncols + 1, dtype=np.int64), [], [], check=False)

    @classmethod
    def diagonal(cls, diag: Sequence[float]) -> "CompressedColumnMatrix":
        """对角矩阵(全部对角位置都存储, 包括零)"""
        diag = _as_value_array(diag)
        n = len(diag)
        return cls(n, n, np.arange(n + 1, dtype=np.int64), np.arange(n, dtype=np.int64), diag, check=False)

    @classmethod
    def identity(cls, n: int) -> "CompressedColumnMatrix":
        return cls.diagonal(np.ones(n))

    @classmethod
    def from_scipy(cls, matrix) -> "CompressedColumnMatrix":
        """由 scipy 稀疏矩阵构造(重复元素求和, 显式零保留)"""
        coo = sp.coo_matrix(matrix)
        return cls.from_triplets(coo.row, coo.col, coo.data, coo.shape)

    # ---- 转换 ----

    def to_scipy(self) -> sp.csc_matrix:
        return sp.csc_matrix((self.values.copy(), self.row_idx.copy(), self.col_ptr.copy()), shape=self.shape)

    def to_dense(self, symmetric_lower: bool = False) -> np.ndarray:
        """
        稠密化

        Args:
            symmetric_lower: 为 True 时把下三角存储展开成完整对称矩阵
        """
        dense = np.zeros(self.shape, dtype=np.float64)
        dense[self.row_idx, self.col_idx] = self.values
        if symmetric_lower:
            off = self.row_idx != self.col_idx
            dense[self.col_idx[off], self.row_idx[off]] = self.values[off]
        return dense

    def transpose(self) -> "CompressedColumnMatrix":
        return CompressedColumnMatrix.from_triplets(
            self.col_idx, self.row_idx, self.values, (self.ncols, self.nrows)
        )

    def with_values(self, values: Sequence[float]) -> "CompressedColumnMatrix":
        """结构不变, 替换数值"""
        values = _as_value_array(values)
        if len(values) != self.nnz:
            raise DimensionMismatchError(f"数值长度({len(values)})与 nnz({self.nnz})不一致")
        return CompressedColumnMatrix(self.nrows, self.ncols, self.col_ptr, self.row_idx, values, check=False)

    def same_pattern(self, other: "CompressedColumnMatrix") -> bool:
        return (
            self.shape == other.shape
            and np.array_equal(self.col_ptr, other.col_ptr)
            and np.array_equal(self.row_idx, other.row_idx)
        )

    def diagonal_values(self) -> np.ndarray:
        """主对角线数值, 未存储的位置为 0"""
        n = min(self.nrows, self.ncols)
        diag = np.zeros(n, dtype=np.float64)
        on_diag = self.row_idx == self.col_idx
        diag[self.row_idx[on_diag]] = self.values[on_diag]
        return diag

    def is_lower(self) -> bool:
        return bool(np.all(self.row_idx >= self.col_idx))

    def scaled(self, left: np.ndarray, right: np.ndarray) -> "CompressedColumnMatrix":
        """返回 diag(left)·A·diag(right)"""
        return self.with_values(self.values * left[self.row_idx] * right[self.col_idx])


@dataclass(frozen=True, eq=False)
class Permutation:
    """
    对称置换 P, 约定 (P A Pᵀ)[i, j] = A[perm[i], perm[j]]

    Attributes:
        perm: 新位置 i 上的原始索引
        inverse: 原始索引 k 的新位置
    """
    perm: np.ndarray
    inverse: np.ndarray

    @classmethod
    def from_order(cls, order: Sequence[int]) -> "Permutation":
        """
        由消元顺序构造置换

        Raises:
            KktError: order 不是 [0, n) 上的双射
        """
        perm = _as_index_array(order)
        n = len(perm)
        if n and (perm.min() < 0 or perm.max() >= n):
            raise KktError("置换索引越界")
        inverse = np.full(n, -1, dtype=np.int64)
        inverse[perm] = np.arange(n, dtype=np.int64)
        if np.any(inverse < 0):
            raise KktError("置换不是双射")
        return cls(perm, inverse)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        ident = np.arange(n, dtype=np.int64)
        return cls(ident, ident.copy())

    @property
    def size(self) -> int:
        return int(len(self.perm))

    def apply(self, vector: np.ndarray) -> np.ndarray:
        """P·b"""
        return np.asarray(vector, dtype=np.float64)[self.perm]

    def apply_inverse(self, vector: np.ndarray) -> np.ndarray:
        """Pᵀ·c"""
        out = np.empty(self.size, dtype=np.float64)
        out[self.perm] = vector
        return out


# ---- 乘法与范数 ----

def spmv(A: CompressedColumnMatrix, x, transpose: bool = False) -> np.ndarray:
    """
    稀疏矩阵-向量乘法

    Args:
        A: 矩阵
        x: 向量, 长度为 ncols (transpose 时为 nrows)
        transpose: 为 True 时计算 Aᵀ·x

    Returns:
        np.ndarray: 乘积

    Raises:
        DimensionMismatchError: 向量长度不匹配
    """
    x = np.asarray(x, dtype=np.float64)
    expected = A.nrows if transpose else A.ncols
    if x.ndim != 1 or len(x) != expected:
        raise DimensionMismatchError(f"向量长度({x.shape})与矩阵 {A.nrows}x{A.ncols} 不匹配")
    if transpose:
        return np.bincount(A.col_idx, weights=A.values * x[A.row_idx], minlength=A.ncols).astype(np.float64)
    return np.bincount(A.row_idx, weights=A.values * x[A.col_idx], minlength=A.nrows).astype(np.float64)


def symmetric_spmv(A_lower: CompressedColumnMatrix, x) -> np.ndarray:
    """下三角存储的对称矩阵乘向量: (L + Lᵀ − diag(L))·x"""
    if A_lower.nrows != A_lower.ncols:
        raise DimensionMismatchError("对称乘法要求方阵")
    if not A_lower.is_lower():
        raise KktError("对称乘法要求下三角存储")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) != A_lower.ncols:
        raise DimensionMismatchError(f"向量长度({x.shape})与矩阵阶数({A_lower.ncols})不匹配")
    rows, cols, vals = A_lower.row_idx, A_lower.col_idx, A_lower.values
    n = A_lower.nrows
    y = np.bincount(rows, weights=vals * x[cols], minlength=n)
    off = rows != cols
    y += np.bincount(cols[off], weights=vals[off] * x[rows[off]], minlength=n)
    return y.astype(np.float64)


def row_abs_sums(A: CompressedColumnMatrix) -> np.ndarray:
    return np.bincount(A.row_idx, weights=np.abs(A.values), minlength=A.nrows).astype(np.float64)


def col_abs_sums(A: CompressedColumnMatrix) -> np.ndarray:
    return np.bincount(A.col_idx, weights=np.abs(A.values), minlength=A.ncols).astype(np.float64)


def symmetric_row_abs_sums(A_lower: CompressedColumnMatrix, diag_shift: Optional[np.ndarray] = None) -> np.ndarray:
    """
    对称矩阵 (可加对角平移 diag_shift) 每行的绝对值和

    对角元按 |a_ii + shift_i| 计入, 与稠密化后逐行求和一致。
    """
    rows, cols, vals = A_lower.row_idx, A_lower.col_idx, A_lower.values
    n = A_lower.nrows
    off = rows != cols
    sums = np.bincount(rows[off], weights=np.abs(vals[off]), minlength=n)
    sums += np.bincount(cols[off], weights=np.abs(vals[off]), minlength=n)
    diag = A_lower.diagonal_values()
    if diag_shift is not None:
        diag = diag + diag_shift
    return (sums + np.abs(diag)).astype(np.float64)


def inf_norm(A: CompressedColumnMatrix) -> float:
    """最大行绝对值和"""
    if A.nrows == 0:
        return 0.0
    return float(row_abs_sums(A).max())


def symmetric_inf_norm(A_lower: CompressedColumnMatrix) -> float:
    """下三角存储对称矩阵的 ∞-范数"""
    if A_lower.nrows == 0:
        return 0.0
    return float(symmetric_row_abs_sums(A_lower).max())


# ---- 结构辅助 ----

def symmetric_lower_pattern(pattern: CompressedColumnMatrix, include_diagonal: bool = True) -> CompressedColumnMatrix:
    """
    对称化后的下三角结构 (数值全为 0)

    (i, j) 与 (j, i) 任一存储即视为结构非零。
    """
    if pattern.nrows != pattern.ncols:
        raise DimensionMismatchError("结构分析要求方阵")
    n = pattern.nrows
    rows, cols = pattern.row_idx, pattern.col_idx
    lo = np.maximum(rows, cols)
    hi = np.minimum(rows, cols)
    if include_diagonal:
        diag = np.arange(n, dtype=np.int64)
        lo = np.concatenate([lo, diag])
        hi = np.concatenate([hi, diag])
    return CompressedColumnMatrix.from_triplets(lo, hi, np.zeros(len(lo)), (n, n))


def gram_lower_triplets(
    A: CompressedColumnMatrix, weights: Optional[np.ndarray] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Aᵀ·diag(w)·A 的下三角三元组

    每一行贡献其非零列两两组合的外积; 结构按非零模式给出, 权重为零时
    也保留对应位置, 因此结果结构与 w 的取值无关。

    Returns:
        Tuple[np.ndarray, np.ndarray, np.ndarray]: (rows, cols, vals), 可能含重复元素
    """
    w = np.ones(A.nrows) if weights is None else np.asarray(weights, dtype=np.float64)
    if len(w) != A.nrows:
        raise DimensionMismatchError(f"权重长度({len(w)})与矩阵行数({A.nrows})不一致")
    at = A.transpose()
    out_rows, out_cols, out_vals = [], [], []
    for r in range(A.nrows):
        lo, hi = at.col_ptr[r], at.col_ptr[r + 1]
        if lo == hi:
            continue
        idx = at.row_idx[lo:hi]
        vals = at.values[lo:hi]
        # 行内列索引递增, tril 的 (a, b) 满足 a >= b
        a, b = np.tril_indices(hi - lo)
        out_rows.append(idx[a])
        out_cols.append(idx[b])
        out_vals.append(w[r] * vals[a] * vals[b])
    if not out_rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), np.zeros(0)
    return np.concatenate(out_rows), np.concatenate(out_cols), np.concatenate(out_vals)


def symmetric_permute(A_lower: CompressedColumnMatrix, ordering: Permutation) -> CompressedColumnMatrix:
    """P·A·Pᵀ 的下三角存储"""
    if ordering.size != A_lower.nrows:
        raise DimensionMismatchError("置换大小与矩阵阶数不一致")
    new_rows = ordering.inverse[A_lower.row_idx]
    new_cols = ordering.inverse[A_lower.col_idx]
    lo = np.maximum(new_rows, new_cols)
    hi = np.minimum(new_rows, new_cols)
    return CompressedColumnMatrix.from_triplets(lo, hi, A_lower.values, A_lower.shape)
