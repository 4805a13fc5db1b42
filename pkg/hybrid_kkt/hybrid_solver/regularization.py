"""
最小正则化阶梯: 尝试分解 H_δ = H_γ + δ₁I

先试 δ₁ = 0; 失败后令 δ₁ = δ_min_current, 再失败则 δ_min_current 加倍且
δ₁ 取新值, 直到成功或 δ₁ > δ_max/2。δ_min_current 的加倍在序列中保留,
δ₁ 对每个矩阵从 0 开始。
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from ..sparse_core import NotSpdFailure, NumericCholesky, SymbolicFactor, numeric_cholesky
from .config import RegularizationState, SolverConfig
from .h_gamma import HGammaSystem, shift_diagonal

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FailedDeltaMaxExceeded:
    """
    δ₁ 超过 δ_max/2 仍无法分解

    Attributes:
        attempts: 分解尝试次数
        last_delta1: 最后一次尝试的 δ₁
        last_failure: 最后一次失败的位置
        state: 更新后的状态 (δ_min_current 的加倍保留到下一个矩阵)
    """
    attempts: int
    last_delta1: float
    last_failure: NotSpdFailure
    state: RegularizationState


def try_factorize(
    hg: HGammaSystem,
    symbolic: SymbolicFactor,
    delta1: float,
    cfg: SolverConfig,
) -> Union[NumericCholesky, NotSpdFailure]:
    """对 H_γ + δ₁I 做一次数值分解"""
    H_delta = shift_diagonal(hg.H_gamma, delta1)
    diag = H_delta.diagonal_values()
    floor = cfg.pivot_floor * float(np.abs(diag).max()) if len(diag) else 0.0
    return numeric_cholesky(H_delta, symbolic, pivot_floor=floor)


def factorize_with_ladder(
    hg: HGammaSystem,
    symbolic: SymbolicFactor,
    cfg: SolverConfig,
    state: RegularizationState,
) -> Union[Tuple[NumericCholesky, RegularizationState], FailedDeltaMaxExceeded]:
    """
    带正则化阶梯的 Cholesky 分解

    Args:
        hg: H_γ 系统
        symbolic: 与 H_γ 结构匹配的符号分解
        cfg: 求解器配置
        state: 上一个矩阵传来的状态

    Returns:
        (NumericCholesky, RegularizationState) 或 FailedDeltaMaxExceeded
    """
    delta_min_current = state.delta_min_current
    delta1 = 0.0
    attempts = 1
    outcome = try_factorize(hg, symbolic, delta1, cfg)
    while isinstance(outcome, NotSpdFailure) and delta1 <= cfg.delta_max / 2:
        if delta1 == 0.0:
            delta1 = delta_min_current
        else:
            delta_min_current = 2.0 * delta_min_current
            delta1 = delta_min_current
        attempts += 1
        logger.debug("分解失败于列 %d, 以 δ₁=%.3e 重试 (第 %d 次)", outcome.column, delta1, attempts)
        outcome = try_factorize(hg, symbolic, delta1, cfg)

    new_state = RegularizationState(delta1=delta1, delta_min_current=delta_min_current, attempts=attempts)
    if isinstance(outcome, NotSpdFailure):
        logger.warning("δ₁=%.3e 超过 δ_max/2=%.3e 仍无法分解 (%d 次尝试)", delta1, cfg.delta_max / 2, attempts)
        return FailedDeltaMaxExceeded(
            attempts=attempts, last_delta1=delta1, last_failure=outcome, state=new_state
        )
    if delta1 > 0:
        logger.warning("H_γ 需要正则化 δ₁=%.3e 才能分解", delta1)
    return outcome, new_state


def refactorize_at(
    hg: HGammaSystem, symbolic: SymbolicFactor, delta1: float, cfg: SolverConfig
) -> Optional[NumericCholesky]:
    """在指定 δ₁ 下重试分解, 失败返回 None (用于检验最小性)"""
    outcome = try_factorize(hg, symbolic, delta1, cfg)
    return None if isinstance(outcome, NotSpdFailure) else outcome
