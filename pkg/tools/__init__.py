"""
工具模块初始化文件
"""

from .data_loader import DataLoader
from .output_formatter import OutputFormatter, MarkdownFormatter, TextFormatter

# KKT 求解适配器
from .kkt_solver_adapter import (
    KktSolverAdapter,
    RunManifest,
    RunSummary,
    REPORTS_CSV_COLUMNS,
    SWEEP_CSV_COLUMNS,
    run_generate,
    run_solve,
    run_sweep_gamma,
    summarize_run,
    compare_orderings,
    generate_adapter,
    solve_adapter,
    sweep_gamma_adapter,
    report_adapter,
    orderings_adapter,
)

__all__ = [
    "DataLoader",
    "OutputFormatter",
    "MarkdownFormatter",
    "TextFormatter",
    "KktSolverAdapter",
    "RunManifest",
    "RunSummary",
    "REPORTS_CSV_COLUMNS",
    "SWEEP_CSV_COLUMNS",

    # 命令核心
    "run_generate",
    "run_solve",
    "run_sweep_gamma",
    "summarize_run",
    "compare_orderings",

    # MCP 适配
    "generate_adapter",
    "solve_adapter",
    "sweep_gamma_adapter",
    "report_adapter",
    "orderings_adapter",
]
