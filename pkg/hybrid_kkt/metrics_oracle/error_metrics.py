"""
误差指标: 后向误差 BE 与相对残差 RR, 以及块 4×4 / 2×2 算子的分块作用与 ∞-范数

BE = ‖Ax̃ − b‖₂ / (‖A‖∞‖x̃‖₂ + ‖b‖₂),  RR = ‖Ax̃ − b‖₂ / ‖b‖₂
"""

from typing import Callable

import numpy as np
from pydantic import BaseModel, Field

from ..exceptions import DimensionMismatchError
from ..kkt_model import BlockKkt4x4, FullSolution, Reduced2x2
from ..sparse_core import (
    CompressedColumnMatrix,
    col_abs_sums,
    row_abs_sums,
    spmv,
    symmetric_row_abs_sums,
    symmetric_spmv,
)


class ErrorReport(BaseModel):
    """误差指标"""
    be: float = Field(..., ge=0.0, description="后向误差")
    rr: float = Field(..., ge=0.0, description="相对残差 (‖b‖=0 时为绝对残差)")
    a_norm_inf: float = Field(..., ge=0.0, description="‖A‖∞")
    rhs_norm: float = Field(..., ge=0.0, description="‖b‖₂")
    solution_norm: float = Field(..., ge=0.0, description="‖x̃‖₂")
    residual_norm: float = Field(0.0, ge=0.0, description="‖Ax̃ − b‖₂")


def error_report(A_apply: Callable[[np.ndarray], np.ndarray], x, b, a_norm_inf: float) -> ErrorReport:
    """
    计算 BE 与 RR

    Args:
        A_apply: x ↦ A·x
        x: 近似解
        b: 右端项
        a_norm_inf: ‖A‖∞

    Returns:
        ErrorReport: 误差指标

    Raises:
        DimensionMismatchError: A·x 与 b 长度不一致
        ValueError: a_norm_inf 为负
    """
    if a_norm_inf < 0:
        raise ValueError("a_norm_inf 必须非负")
    x = np.asarray(x, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    ax = np.asarray(A_apply(x), dtype=np.float64)
    if ax.shape != b.shape:
        raise DimensionMismatchError(f"A·x 长度({ax.shape})与 b 长度({b.shape})不一致")
    residual = float(np.linalg.norm(ax - b))
    x_norm = float(np.linalg.norm(x))
    b_norm = float(np.linalg.norm(b))
    denom = a_norm_inf * x_norm + b_norm
    be = residual / denom if denom > 0 else 0.0
    rr = residual / b_norm if b_norm > 0 else residual
    return ErrorReport(
        be=be, rr=rr, a_norm_inf=a_norm_inf, rhs_norm=b_norm, solution_norm=x_norm, residual_norm=residual
    )


# ---- 块算子 ----

def apply_kkt4x4(sys: BlockKkt4x4, v) -> np.ndarray:
    """块 4×4 算子作用于拼接向量 (Δx, Δs, Δy, Δy_d)"""
    v = np.asarray(v, dtype=np.float64)
    if len(v) != sys.size:
        raise DimensionMismatchError(f"向量长度({len(v)})应为 N={sys.size}")
    sol = FullSolution.from_stacked(v, sys.n_x, sys.m_c, sys.m_d)
    row_x = (
        symmetric_spmv(sys.H, sol.dx) + sys.D_x * sol.dx
        + spmv(sys.J, sol.dy, transpose=True) + spmv(sys.J_d, sol.dyd, transpose=True)
    )
    row_s = sys.D_s * sol.ds - sol.dyd
    row_y = spmv(sys.J, sol.dx)
    row_yd = spmv(sys.J_d, sol.dx) - sol.ds
    return np.concatenate([row_x, row_s, row_y, row_yd])


def apply_kkt2x2(red: Reduced2x2, v) -> np.ndarray:
    """块 2×2 算子作用于拼接向量 (Δx, Δy)"""
    v = np.asarray(v, dtype=np.float64)
    n_x = red.n_x
    if len(v) != n_x + red.m_c:
        raise DimensionMismatchError(f"向量长度({len(v)})应为 {n_x + red.m_c}")
    dx, dy = v[:n_x], v[n_x:]
    return np.concatenate([
        symmetric_spmv(red.H_tilde, dx) + spmv(red.J, dy, transpose=True),
        spmv(red.J, dx),
    ])


def _max_or_zero(*parts: np.ndarray) -> float:
    values = [float(p.max()) for p in parts if len(p)]
    return max(values) if values else 0.0


def kkt4x4_inf_norm(sys: BlockKkt4x4) -> float:
    """块 4×4 算子的 ∞-范数, 逐块累加行绝对值和"""
    rows_x = symmetric_row_abs_sums(sys.H, diag_shift=sys.D_x) + col_abs_sums(sys.J) + col_abs_sums(sys.J_d)
    rows_s = np.abs(sys.D_s) + 1.0
    rows_y = row_abs_sums(sys.J)
    rows_yd = row_abs_sums(sys.J_d) + 1.0
    return _max_or_zero(rows_x, rows_s, rows_y, rows_yd)


def kkt2x2_inf_norm(red: Reduced2x2) -> float:
    """块 2×2 算子的 ∞-范数"""
    rows_x = symmetric_row_abs_sums(red.H_tilde) + col_abs_sums(red.J)
    rows_y = row_abs_sums(red.J)
    return _max_or_zero(rows_x, rows_y)


def matrix_inf_norm(A: CompressedColumnMatrix, symmetric_lower: bool = False) -> float:
    """单个矩阵的 ∞-范数; symmetric_lower 时按完整对称矩阵计算"""
    sums = symmetric_row_abs_sums(A) if symmetric_lower else row_abs_sums(A)
    return _max_or_zero(sums)


def kkt4x4_errors(sys: BlockKkt4x4, solution: FullSolution) -> ErrorReport:
    return error_report(lambda v: apply_kkt4x4(sys, v), solution.stacked(), sys.rhs(), kkt4x4_inf_norm(sys))


def kkt2x2_errors(red: Reduced2x2, dx, dy) -> ErrorReport:
    x = np.concatenate([np.asarray(dx, dtype=np.float64), np.asarray(dy, dtype=np.float64)])
    return error_report(lambda v: apply_kkt2x2(red, v), x, red.rhs(), kkt2x2_inf_norm(red))
