"""
Hybrid KKT Solver
稀疏对称 KKT 系统序列的混合直接-迭代求解器
"""

from .exceptions import KktError
from .logging_config import configure_logging
from .kkt_model import BlockKkt4x4, Reduced2x2, FullSolution, KktSequence, load_sequence, write_sequence
from .hybrid_solver import SolverConfig, SolveReport, SolveStatus, solve_full, solve_reduced, solve_sequence
from .synthetic import GeneratorSpec, generate_sequence

__version__ = "1.0.0"
__author__ = "AIGroup"
__email__ = "jackdark425@gmail.com"

__all__ = [
    "__version__",
    "__author__",
    "__email__",
    "KktError",
    "configure_logging",
    "BlockKkt4x4",
    "Reduced2x2",
    "FullSolution",
    "KktSequence",
    "load_sequence",
    "write_sequence",
    "SolverConfig",
    "SolveReport",
    "SolveStatus",
    "solve_full",
    "solve_reduced",
    "solve_sequence",
    "GeneratorSpec",
    "generate_sequence",
]
