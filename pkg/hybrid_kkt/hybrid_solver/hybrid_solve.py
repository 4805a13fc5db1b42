"""
混合直接-迭代求解流程

单个矩阵: 约化 → Ruiz 缩放 → 组装 H_γ → (符号分析) → 正则化阶梯分解 →
w = H_δ⁻¹r̂_x → CG 求解 S Δy = J w − r_y (小二次型时以 δ₂ 重启一次) →
Δx = H_δ⁻¹(r̂_x − JᵀΔy) → 还原缩放 → 恢复 Δs, Δy_d → 在原系统上计算误差。

序列: 结构一致时只做一次符号分析, δ_min_current 在矩阵之间传递。
"""

import logging
import time
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel, Field

from ..exceptions import KktError
from ..kkt_model import (
    BlockKkt4x4,
    FullSolution,
    KktSequence,
    Reduced2x2,
    RuizScaling,
    patterns_uniform,
    recover,
    reduce,
    ruiz_scale,
    unscale_solution,
)
from ..metrics_oracle import DensityReport, density_report, kkt2x2_errors, kkt4x4_errors
from ..sparse_core import SymbolicFactor, analyze, factor_solve, spmv
from .config import RegularizationState, SolverConfig
from .h_gamma import HGammaSystem, assemble_h_gamma, golub_greif_gamma
from .regularization import FailedDeltaMaxExceeded, factorize_with_ladder
from .schur_cg import SchurOperator, cg_schur

logger = logging.getLogger(__name__)


class SolveStatus(str, Enum):
    """单个矩阵的求解结果"""
    SOLVED = "Solved"
    SOLVED_WITH_DELTA2 = "SolvedWithDelta2"
    FAILED_DELTA_MAX_EXCEEDED = "FailedDeltaMaxExceeded"
    FAILED_CG_NOT_CONVERGED = "FailedCgNotConverged"
    FAILED = "Failed"

    @property
    def succeeded(self) -> bool:
        return self in (SolveStatus.SOLVED, SolveStatus.SOLVED_WITH_DELTA2)


class SolveReport(BaseModel):
    """单个矩阵的求解报告"""
    index: int = Field(0, description="矩阵在序列中的位置 k (从 0 开始)")
    status: SolveStatus = Field(..., description="求解状态")
    gamma: float = Field(..., description="实际使用的 γ")
    delta1_final: float = Field(0.0, description="最终使用的 δ₁")
    delta2_used: float = Field(0.0, description="Schur 系统使用的 δ₂")
    cg_iterations: int = Field(0, description="最终 CG 运行的迭代次数")
    cg_iterations_total: int = Field(0, description="含被中止运行在内的 CG 迭代总数")
    factorization_attempts: int = Field(0, description="数值分解尝试次数")
    small_quadratic_detected: bool = Field(False, description="首次 CG 是否检测到小二次型")
    cg_relative_residual: Optional[float] = Field(None, description="CG 最终真实相对残差")
    be_4x4: Optional[float] = Field(None, description="原块 4×4 系统的后向误差")
    rr_4x4: Optional[float] = Field(None, description="原块 4×4 系统的相对残差")
    be_2x2: Optional[float] = Field(None, description="原块 2×2 系统的后向误差")
    rr_2x2: Optional[float] = Field(None, description="原块 2×2 系统的相对残差")
    be_2x2_scaled: Optional[float] = Field(None, description="缩放后块 2×2 系统的后向误差")
    rr_2x2_scaled: Optional[float] = Field(None, description="缩放后块 2×2 系统的相对残差")
    symbolic_reused: bool = Field(False, description="是否复用了共享的符号分解")
    density: Optional[DensityReport] = Field(None, description="分解密度")
    ruiz_iterations: int = Field(0, description="Ruiz 缩放轮数")
    analysis_seconds: float = Field(0.0, description="排序与符号分析耗时")
    factorization_seconds: float = Field(0.0, description="数值分解 (含阶梯) 耗时")
    solve_seconds: float = Field(0.0, description="三角求解与 CG 耗时")
    message: Optional[str] = Field(None, description="失败说明")


@dataclass(frozen=True, eq=False)
class ReducedSolveOutcome:
    """solve_reduced 的结果; 失败时 dx, dy 为 None"""
    dx: Optional[np.ndarray]
    dy: Optional[np.ndarray]
    report: SolveReport
    state: RegularizationState
    symbolic: SymbolicFactor


@dataclass(frozen=True, eq=False)
class FullSolveOutcome:
    """solve_full 的结果; 失败时 solution 为 None"""
    solution: Optional[FullSolution]
    report: SolveReport
    symbolic: Optional[SymbolicFactor]
    state: RegularizationState


def resolve_gamma(cfg: SolverConfig, red: Reduced2x2) -> float:
    """按配置确定 γ"""
    if cfg.gamma_rule == "golub_greif":
        return golub_greif_gamma(red)
    return cfg.gamma


def solve_reduced(
    red: Reduced2x2,
    cfg: SolverConfig,
    symbolic: Optional[SymbolicFactor] = None,
    state: Optional[RegularizationState] = None,
    h_gamma: Optional[HGammaSystem] = None,
) -> ReducedSolveOutcome:
    """
    求解块 2×2 系统

    Args:
        red: 块 2×2 系统 (通常已缩放)
        cfg: 求解器配置
        symbolic: 共享的符号分解; 为 None 或结构不符时重新分析
        state: 正则化状态; 为 None 时取初始状态
        h_gamma: 预先组装的 H_γ; 为 None 时按配置组装

    Returns:
        ReducedSolveOutcome: 解、报告、更新后的状态与使用的符号分解
    """
    state = RegularizationState.initial(cfg) if state is None else state
    hg = h_gamma if h_gamma is not None else assemble_h_gamma(red, resolve_gamma(cfg, red))

    t0 = time.perf_counter()
    reused = symbolic is not None and symbolic.matches(hg.H_gamma)
    if symbolic is not None and not reused:
        logger.warning("共享的符号分解与 H_γ 结构不符, 重新做符号分析")
    if not reused:
        symbolic = analyze(hg.H_gamma, cfg.ordering)
    t1 = time.perf_counter()

    ladder = factorize_with_ladder(hg, symbolic, cfg, state.for_next_matrix())
    t2 = time.perf_counter()
    if isinstance(ladder, FailedDeltaMaxExceeded):
        report = SolveReport(
            status=SolveStatus.FAILED_DELTA_MAX_EXCEEDED,
            gamma=hg.gamma_used,
            delta1_final=ladder.last_delta1,
            factorization_attempts=ladder.attempts,
            symbolic_reused=reused,
            analysis_seconds=t1 - t0,
            factorization_seconds=t2 - t1,
            message=(
                f"δ₁={ladder.last_delta1:.3e} 时第 {ladder.last_failure.original_index} 个变量的"
                f"主元 {ladder.last_failure.pivot:.3e} 仍不大于下限"
            ),
        )
        return ReducedSolveOutcome(None, None, report, ladder.state, symbolic)
    factor, new_state = ladder

    # w = H_δ⁻¹ r̂_x, 然后在 S Δy = J w − r_y 上做 CG
    w = factor_solve(factor, hg.r_hat_x)
    schur_rhs = spmv(red.J, w) - red.r_y
    op = SchurOperator(factor=factor, J=red.J)
    cg = cg_schur(op, schur_rhs, cfg)
    detected = cg.small_quadratic_detected
    total_iterations = cg.iterations
    delta2 = 0.0
    if detected:
        delta2 = cfg.delta2
        logger.info("Schur 系统出现小二次型, 以 δ₂=%.1e 重启 CG", delta2)
        cg = cg_schur(op.with_delta2(delta2), schur_rhs, cfg)
        total_iterations += cg.iterations

    dx = dy = None
    message = None
    if cg.converged:
        status = SolveStatus.SOLVED_WITH_DELTA2 if delta2 > 0 else SolveStatus.SOLVED
        dy = cg.dy
        dx = factor_solve(factor, hg.r_hat_x - spmv(red.J, dy, transpose=True))
    else:
        status = SolveStatus.FAILED_CG_NOT_CONVERGED
        message = f"CG 未收敛: {cg.iterations} 次迭代后相对残差 {cg.relative_residual:.3e}"
        logger.warning(message)
    t3 = time.perf_counter()

    errors = kkt2x2_errors(red, dx, dy) if dx is not None else None
    report = SolveReport(
        status=status,
        gamma=hg.gamma_used,
        delta1_final=new_state.delta1,
        delta2_used=delta2,
        cg_iterations=cg.iterations,
        cg_iterations_total=total_iterations,
        factorization_attempts=new_state.attempts,
        small_quadratic_detected=detected,
        cg_relative_residual=cg.relative_residual,
        be_2x2=errors.be if errors else None,
        rr_2x2=errors.rr if errors else None,
        symbolic_reused=reused,
        density=density_report(red, factor),
        analysis_seconds=t1 - t0,
        factorization_seconds=t2 - t1,
        solve_seconds=t3 - t2,
        message=message,
    )
    return ReducedSolveOutcome(dx, dy, report, new_state, symbolic)


def _failed_outcome(
    exc: Exception,
    cfg: SolverConfig,
    shared: Optional[SymbolicFactor],
    state: RegularizationState,
) -> FullSolveOutcome:
    message = str(exc) or type(exc).__name__
    report = SolveReport(status=SolveStatus.FAILED, gamma=cfg.gamma, message=message)
    return FullSolveOutcome(None, report, shared, state)


def solve_full(
    sys: BlockKkt4x4,
    cfg: SolverConfig,
    shared: Optional[SymbolicFactor] = None,
    state: Optional[RegularizationState] = None,
) -> FullSolveOutcome:
    """
    求解块 4×4 系统

    任何阶段的异常都转为状态 Failed 的报告, 不向外抛出。

    Returns:
        FullSolveOutcome: 完整解 (失败时为 None)、报告、符号分解与更新后的状态
    """
    state = RegularizationState.initial(cfg) if state is None else state
    try:
        red = reduce(sys)
        if cfg.use_ruiz:
            red_s, scaling = ruiz_scale(red.H_tilde, red.J, red.r_x, red.r_y, cfg.ruiz_max_iters, cfg.ruiz_tol)
        else:
            red_s, scaling = red, RuizScaling.identity(red.n_x, red.m_c)
        inner = solve_reduced(red_s, cfg, shared, state)
        if inner.dx is None:
            report = inner.report.model_copy(update={"ruiz_iterations": scaling.iterations_used})
            return FullSolveOutcome(None, report, inner.symbolic, inner.state)

        dx, dy = unscale_solution(scaling, inner.dx, inner.dy)
        solution = recover(sys, dx, dy)
        e4 = kkt4x4_errors(sys, solution)
        e2 = kkt2x2_errors(red, dx, dy)
    except KktError as exc:
        logger.error("求解失败: %s", exc)
        return _failed_outcome(exc, cfg, shared, state)
    except Exception as exc:
        logger.exception("求解过程中出现意外异常")
        return _failed_outcome(exc, cfg, shared, state)

    report = inner.report.model_copy(update={
        "be_4x4": e4.be,
        "rr_4x4": e4.rr,
        "be_2x2": e2.be,
        "rr_2x2": e2.rr,
        "be_2x2_scaled": inner.report.be_2x2,
        "rr_2x2_scaled": inner.report.rr_2x2,
        "ruiz_iterations": scaling.iterations_used,
    })
    return FullSolveOutcome(solution, report, inner.symbolic, inner.state)


def _shared_analysis(systems: Sequence[BlockKkt4x4], cfg: SolverConfig) -> SymbolicFactor:
    # H_γ 的结构与 γ 和缩放无关, 以 γ=0 组装即可
    return analyze(assemble_h_gamma(reduce(systems[0]), 0.0).H_gamma, cfg.ordering)


def solve_sequence(
    seq: Union[KktSequence, Sequence[BlockKkt4x4]],
    cfg: SolverConfig,
) -> List[SolveReport]:
    """
    按顺序求解系统序列

    Args:
        seq: 系统序列 (非空)
        cfg: 求解器配置; parallel_sequence 为真时每个矩阵使用独立的初始状态

    Returns:
        List[SolveReport]: 每个矩阵的报告, 某个矩阵失败不影响后续矩阵

    Raises:
        ValueError: 序列为空
    """
    systems = list(seq)
    if not systems:
        raise ValueError("系统序列不能为空")
    uniform = seq.pattern_uniform if isinstance(seq, KktSequence) else patterns_uniform(systems)

    if cfg.parallel_sequence:
        common = _shared_analysis(systems, cfg) if uniform else None
        outcomes = Parallel(n_jobs=cfg.n_jobs, prefer="threads")(
            delayed(solve_full)(sys, cfg, common, RegularizationState.initial(cfg)) for sys in systems
        )
        return [o.report.model_copy(update={"index": k}) for k, o in enumerate(outcomes)]

    state = RegularizationState.initial(cfg)
    shared: Optional[SymbolicFactor] = None
    reports: List[SolveReport] = []
    for k, sys in enumerate(systems):
        outcome = solve_full(sys, cfg, shared if uniform else None, state)
        if uniform and outcome.symbolic is not None:
            shared = outcome.symbolic
        state = outcome.state
        if not outcome.report.status.succeeded:
            logger.warning("矩阵 %d 求解失败: %s", k, outcome.report.status.value)
        reports.append(outcome.report.model_copy(update={"index": k}))
    return reports
