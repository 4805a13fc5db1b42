"""MCP工具组包"""

from .kkt_solver_tools import KktSolverTools

__all__ = [
    "KktSolverTools",
]
