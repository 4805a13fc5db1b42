"""
对块 2×2 算子 [[H̃, Jᵀ], [J, 0]] 的对称 Ruiz 均衡

每轮把第 i 行与第 i 列同时除以 sqrt(第 i 行的 ∞-范数), 直到所有行范数落在
[1−tol, 1+tol] 或达到最大轮数。结构上全零的行保持缩放因子 1。
缩放后的系统为 (D K D)(D⁻¹z) = D b, 因此解的还原为 z = D z_s。
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..exceptions import DimensionMismatchError
from ..sparse_core import CompressedColumnMatrix
from .block_system import Reduced2x2

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RuizScaling:
    """
    对称缩放向量

    Attributes:
        d_left: 长度 n_x + m_c 的正缩放因子, 前 n_x 个作用于 x 块
        n_x: x 块长度
        iterations_used: 检查行范数的轮数 (已均衡的系统为 1)
        converged: 行范数是否进入容差带
    """
    d_left: np.ndarray
    n_x: int
    iterations_used: int
    converged: bool = True

    @property
    def d_x(self) -> np.ndarray:
        return self.d_left[:self.n_x]

    @property
    def d_y(self) -> np.ndarray:
        return self.d_left[self.n_x:]

    @classmethod
    def identity(cls, n_x: int, m_c: int) -> "RuizScaling":
        return cls(d_left=np.ones(n_x + m_c), n_x=n_x, iterations_used=0, converged=True)


def kkt2x2_row_inf_norms(H_tilde: CompressedColumnMatrix, J: CompressedColumnMatrix) -> np.ndarray:
    """块 2×2 算子每行的 ∞-范数 (最大绝对值), 不组装整个矩阵"""
    n_x, m_c = H_tilde.nrows, J.nrows
    norms = np.zeros(n_x + m_c)
    h_abs = np.abs(H_tilde.values)
    np.maximum.at(norms, H_tilde.row_idx, h_abs)
    np.maximum.at(norms, H_tilde.col_idx, h_abs)
    j_abs = np.abs(J.values)
    # Jᵀ 位于 x 行, J 位于 y 行
    np.maximum.at(norms, J.col_idx, j_abs)
    np.maximum.at(norms, n_x + J.row_idx, j_abs)
    return norms


def _apply(red: Reduced2x2, d: np.ndarray) -> Reduced2x2:
    n_x = red.n_x
    d_x, d_y = d[:n_x], d[n_x:]
    return Reduced2x2(
        H_tilde=red.H_tilde.scaled(d_x, d_x),
        J=red.J.scaled(d_y, d_x),
        r_x=d_x * red.r_x,
        r_y=d_y * red.r_y,
    )


def ruiz_scale(
    H_tilde: CompressedColumnMatrix,
    J: CompressedColumnMatrix,
    r_x,
    r_y,
    max_iters: int = 20,
    tol: float = 0.01,
) -> Tuple[Reduced2x2, RuizScaling]:
    """
    对称 Ruiz 缩放

    Args:
        H_tilde: 对称块 (下三角存储)
        J: 约束块
        r_x, r_y: 右端项
        max_iters: 最大轮数
        tol: 行范数容差

    Returns:
        Tuple[Reduced2x2, RuizScaling]: 缩放后的系统与缩放向量
    """
    red = Reduced2x2(H_tilde=H_tilde, J=J, r_x=r_x, r_y=r_y)
    if max_iters < 1:
        raise ValueError("max_iters 必须至少为 1")
    d = np.ones(red.n_x + red.m_c)
    scaled = red
    iterations = 0
    converged = False
    while iterations < max_iters:
        iterations += 1
        norms = kkt2x2_row_inf_norms(scaled.H_tilde, scaled.J)
        nonzero = norms > 0
        if np.all(np.abs(norms[nonzero] - 1.0) <= tol):
            converged = True
            break
        step = np.ones_like(d)
        step[nonzero] = 1.0 / np.sqrt(norms[nonzero])
        d = d * step
        # 每轮从原始数值重新缩放, 避免误差累积
        scaled = _apply(red, d)
    if not converged:
        norms = kkt2x2_row_inf_norms(scaled.H_tilde, scaled.J)
        nonzero = norms > 0
        converged = bool(np.all(np.abs(norms[nonzero] - 1.0) <= tol))
        if not converged:
            logger.debug("Ruiz 缩放在 %d 轮内未进入容差带", max_iters)
    return scaled, RuizScaling(d_left=d, n_x=red.n_x, iterations_used=iterations, converged=converged)


def unscale_solution(scaling: RuizScaling, dx_scaled, dy_scaled) -> Tuple[np.ndarray, np.ndarray]:
    """由缩放系统的解还原原系统的解: dx = D_x dx_s, dy = D_y dy_s"""
    dx_scaled = np.asarray(dx_scaled, dtype=np.float64)
    dy_scaled = np.asarray(dy_scaled, dtype=np.float64)
    if len(dx_scaled) != scaling.n_x or len(dy_scaled) != len(scaling.d_left) - scaling.n_x:
        raise DimensionMismatchError("缩放解的长度与缩放向量不一致")
    return scaling.d_x * dx_scaled, scaling.d_y * dy_scaled


def scale_solution(scaling: RuizScaling, dx, dy) -> Tuple[np.ndarray, np.ndarray]:
    """unscale_solution 的逆: dx_s = dx / D_x"""
    return np.asarray(dx, dtype=np.float64) / scaling.d_x, np.asarray(dy, dtype=np.float64) / scaling.d_y
