"""
Schur 补 S = J H_δ⁻¹ Jᵀ (+ δ₂I) 上的共轭梯度法

S 只以算子形式出现: 每次作用需要一次 Jᵀ 乘法、一次 Cholesky 三角求解和一次 J 乘法。
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator

from ..exceptions import DimensionMismatchError
from ..sparse_core import CompressedColumnMatrix, NumericCholesky, factor_solve, spmv
from .config import SolverConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SchurOperator:
    """
    Attributes:
        factor: H_δ 的 Cholesky 因子
        J: 约束块
        delta2_active: 对角平移 δ₂ (首次求解为 0)
    """
    factor: NumericCholesky
    J: CompressedColumnMatrix
    delta2_active: float = 0.0

    @property
    def size(self) -> int:
        return self.J.nrows

    def apply(self, v) -> np.ndarray:
        """J·H_δ⁻¹·Jᵀ·v + δ₂·v"""
        v = np.asarray(v, dtype=np.float64)
        if len(v) != self.size:
            raise DimensionMismatchError(f"向量长度({len(v)})应为 m_c={self.size}")
        out = spmv(self.J, factor_solve(self.factor, spmv(self.J, v, transpose=True)))
        if self.delta2_active:
            out = out + self.delta2_active * v
        return out

    def with_delta2(self, delta2: float) -> "SchurOperator":
        return SchurOperator(self.factor, self.J, float(delta2))

    def as_linear_operator(self) -> LinearOperator:
        m = self.size
        return LinearOperator((m, m), matvec=self.apply, dtype=np.float64)


@dataclass
class CgResult:
    """
    Attributes:
        dy: 最终 (或最佳) 迭代值
        iterations: 完成的迭代次数
        small_quadratic_detected: 是否出现 pᵀSp ≤ 阈值·pᵀp
        converged: 相对残差是否达到容差
        relative_residual: 最终真实相对残差 ‖b − S dy‖/‖b‖
        residual_history: 每次迭代的递推相对残差
    """
    dy: np.ndarray
    iterations: int
    small_quadratic_detected: bool
    converged: bool
    relative_residual: float
    residual_history: List[float] = field(default_factory=list)


def cg_schur(
    op: SchurOperator,
    rhs,
    cfg: SolverConfig,
    callback: Optional[Callable[[np.ndarray], None]] = None,
) -> CgResult:
    """
    无预条件共轭梯度

    Args:
        op: Schur 算子
        rhs: 右端项 J w − r_y, 长度 m_c
        cfg: 提供 cg_tol、cg_max_iter 与 small_quadratic_threshold
        callback: 每次迭代后以当前迭代值调用

    Returns:
        CgResult: 迭代结果; 检测到小二次型时立即返回当前迭代值
    """
    b = np.asarray(rhs, dtype=np.float64)
    if len(b) != op.size:
        raise DimensionMismatchError(f"右端项长度({len(b)})应为 m_c={op.size}")
    b_norm = float(np.linalg.norm(b))
    x = np.zeros_like(b)
    if b_norm == 0.0:
        return CgResult(dy=x, iterations=0, small_quadratic_detected=False, converged=True, relative_residual=0.0)

    r = b.copy()
    p = r.copy()
    rr = float(r @ r)
    history: List[float] = []
    converged = False
    detected = False
    iterations = 0
    for k in range(1, cfg.cg_max_iter + 1):
        q = op.apply(p)
        curvature = float(p @ q)
        if curvature <= cfg.small_quadratic_threshold * float(p @ p):
            detected = True
            logger.debug("CG 第 %d 步检测到小二次型 pᵀSp=%.3e", k, curvature)
            break
        alpha = rr / curvature
        x += alpha * p
        r -= alpha * q
        rr_new = float(r @ r)
        iterations = k
        history.append(float(np.sqrt(rr_new)) / b_norm)
        if callback is not None:
            callback(x.copy())
        if history[-1] <= cfg.cg_tol:
            converged = True
            break
        p = r + (rr_new / rr) * p
        rr = rr_new

    true_residual = float(np.linalg.norm(b - op.apply(x))) / b_norm
    if not converged and not detected:
        logger.debug("CG 在 %d 次迭代内未收敛, 相对残差 %.3e", iterations, true_residual)
    return CgResult(
        dy=x,
        iterations=iterations,
        small_quadratic_detected=detected,
        converged=converged,
        relative_residual=true_residual,
        residual_history=history,
    )
