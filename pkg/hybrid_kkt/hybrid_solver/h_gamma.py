"""
平移后的 (1,1) 块 H_γ = H̃ + γJᵀJ 与右端项 r̂_x = r_x + γJᵀr_y
"""

from dataclasses import dataclass

import numpy as np

from ..kkt_model import Reduced2x2
from ..sparse_core import (
    CompressedColumnMatrix,
    gram_lower_triplets,
    inf_norm,
    spmv,
    symmetric_inf_norm,
)


@dataclass(frozen=True, eq=False)
class HGammaSystem:
    """
    Attributes:
        H_gamma: H̃ + γJᵀJ (下三角存储, 结构为 H̃ ∪ JᵀJ ∪ 对角, 与 γ 无关)
        r_hat_x: r_x + γJᵀr_y
        gamma_used: 使用的 γ
    """
    H_gamma: CompressedColumnMatrix
    r_hat_x: np.ndarray
    gamma_used: float


def assemble_h_gamma(red: Reduced2x2, gamma: float) -> HGammaSystem:
    """
    显式组装 H_γ

    γ = 0 时 JᵀJ 的结构位置仍以显式零保留, 使符号分解可在不同 γ 间复用。

    Raises:
        ValueError: gamma 为负
    """
    if gamma < 0:
        raise ValueError(f"gamma 必须非负, 实际为 {gamma}")
    n_x = red.n_x
    diag = np.arange(n_x, dtype=np.int64)
    g_rows, g_cols, g_vals = gram_lower_triplets(red.J)
    H = red.H_tilde
    H_gamma = CompressedColumnMatrix.from_triplets(
        np.concatenate([H.row_idx, diag, g_rows]),
        np.concatenate([H.col_idx, diag, g_cols]),
        np.concatenate([H.values, np.zeros(n_x), gamma * g_vals]),
        (n_x, n_x),
    )
    r_hat_x = red.r_x + gamma * spmv(red.J, red.r_y, transpose=True)
    return HGammaSystem(H_gamma=H_gamma, r_hat_x=r_hat_x, gamma_used=float(gamma))


def shift_diagonal(A_lower: CompressedColumnMatrix, delta: float) -> CompressedColumnMatrix:
    """A + δI, 要求对角位置全部存储"""
    if delta == 0.0:
        return A_lower
    on_diag = A_lower.row_idx == A_lower.col_idx
    if int(on_diag.sum()) != A_lower.nrows:
        raise ValueError("对角平移要求所有对角位置都已存储")
    values = A_lower.values.copy()
    values[on_diag] += delta
    return A_lower.with_values(values)


def golub_greif_gamma(red: Reduced2x2) -> float:
    """
    γ = ‖H̃‖ / ‖J‖² 的启发式取值 (∞-范数)

    J 为空时返回 0。
    """
    j_norm = inf_norm(red.J) if red.m_c else 0.0
    if j_norm == 0.0:
        return 0.0
    return symmetric_inf_norm(red.H_tilde) / j_norm ** 2
