"""
混合求解器: H_γ 组装、正则化阶梯、Schur 补 CG 与序列编排
"""

from .config import (
    SolverConfig,
    RegularizationState,
    load_solver_config,
)
from .h_gamma import (
    HGammaSystem,
    assemble_h_gamma,
    shift_diagonal,
    golub_greif_gamma,
)
from .regularization import (
    FailedDeltaMaxExceeded,
    factorize_with_ladder,
    try_factorize,
    refactorize_at,
)
from .schur_cg import (
    SchurOperator,
    CgResult,
    cg_schur,
)
from .hybrid_solve import (
    SolveStatus,
    SolveReport,
    ReducedSolveOutcome,
    FullSolveOutcome,
    resolve_gamma,
    solve_reduced,
    solve_full,
    solve_sequence,
)

__all__ = [
    'SolverConfig',
    'RegularizationState',
    'load_solver_config',
    'HGammaSystem',
    'assemble_h_gamma',
    'shift_diagonal',
    'golub_greif_gamma',
    'FailedDeltaMaxExceeded',
    'factorize_with_ladder',
    'try_factorize',
    'refactorize_at',
    'SchurOperator',
    'CgResult',
    'cg_schur',
    'SolveStatus',
    'SolveReport',
    'ReducedSolveOutcome',
    'FullSolveOutcome',
    'resolve_gamma',
    'solve_reduced',
    'solve_full',
    'solve_sequence',
]
