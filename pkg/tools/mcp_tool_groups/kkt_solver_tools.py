"""
KKT 混合求解工具组
生成合成序列、求解序列、γ 扫描、运行摘要与排序比较
"""

from typing import Any, Dict, List, Optional

from mcp.server.fastmcp import Context
from mcp.server.session import ServerSession

from ..kkt_solver_adapter import (
    generate_adapter,
    orderings_adapter,
    report_adapter,
    solve_adapter,
    sweep_gamma_adapter,
)
from ..mcp_tools_registry import ToolGroup


class KktSolverTools(ToolGroup):
    """KKT 混合求解工具组"""

    name = "HYBRID KKT SOLVER"
    description = "使用 hybrid_kkt/ 核心算法的稀疏 KKT 序列求解工具"
    version = "1.0.0"

    @classmethod
    def get_tools(cls) -> List[Dict[str, Any]]:
        """返回工具列表"""
        return [
            {
                "name": "kkt_generate_sequence",
                "handler": cls.generate_tool,
                "description": "Generate a synthetic sequence of sparse KKT systems",
            },
            {
                "name": "kkt_solve_sequence",
                "handler": cls.solve_tool,
                "description": "Solve a KKT sequence with the hybrid Cholesky + Schur CG method",
            },
            {
                "name": "kkt_sweep_gamma",
                "handler": cls.sweep_gamma_tool,
                "description": "Solve a KKT sequence for several penalty values gamma",
            },
            {
                "name": "kkt_run_report",
                "handler": cls.report_tool,
                "description": "Summarize a run_manifest.json",
            },
            {
                "name": "kkt_compare_orderings",
                "handler": cls.orderings_tool,
                "description": "Compare Cholesky fill under AMD, RCM and natural ordering",
            },
        ]

    @classmethod
    def get_help_text(cls) -> str:
        """返回帮助文档"""
        return """
1. Generate Sequence (kkt_generate_sequence)
   - Reuses: hybrid_kkt/synthetic/kkt_generator.py
   - Classes: spd_on_nullspace, indefinite, rank_deficient_j, inconsistent_rank_deficient
   - Output: Matrix Market files + JSON manifest

2. Solve Sequence (kkt_solve_sequence)
   - Reuses: hybrid_kkt/hybrid_solver/hybrid_solve.py
   - Input: manifest_path (see guide://kkt-sequence-format)
   - Output: reports.csv + run_manifest.json, summary as json/markdown/txt

3. Gamma Sweep (kkt_sweep_gamma)
   - One full sequence solve per gamma, written to sweep.csv

4. Run Report (kkt_run_report)
   - Failures, CG iterations, worst backward error, delta1 usage, density

5. Ordering Comparison (kkt_compare_orderings)
   - nnz(L) of H_gamma per matrix for amd / rcm / natural
"""

    @staticmethod
    async def generate_tool(
        n_x: int,
        m_c: int,
        m_d: int,
        out_dir: str,
        indefiniteness: str = "spd_on_nullspace",
        sequence_length: int = 1,
        drift: float = 1e-3,
        graph_degree: int = 4,
        seed: int = 0,
        name: str = "synthetic",
        ctx: Context[ServerSession, None] = None,
    ) -> str:
        """Generate a synthetic KKT sequence"""
        try:
            if ctx:
                await ctx.info("Generating KKT sequence...")

            result = generate_adapter(
                n_x=n_x,
                m_c=m_c,
                m_d=m_d,
                out_dir=out_dir,
                indefiniteness=indefiniteness,
                sequence_length=sequence_length,
                drift=drift,
                graph_degree=graph_degree,
                seed=seed,
                name=name,
            )

            if ctx:
                await ctx.info("KKT sequence generated")

            return result
        except Exception as e:
            if ctx:
                await ctx.error(f"Error: {str(e)}")
            raise

    @staticmethod
    async def solve_tool(
        manifest_path: str,
        out_dir: str,
        config_path: Optional[str] = None,
        gamma: Optional[float] = None,
        delta_min: Optional[float] = None,
        delta_max: Optional[float] = None,
        delta2: Optional[float] = None,
        cg_tol: Optional[float] = None,
        cg_max_iter: Optional[int] = None,
        output_format: str = "json",
        save_path: Optional[str] = None,
        ctx: Context[ServerSession, None] = None,
    ) -> str:
        """Solve a KKT sequence"""
        try:
            if ctx:
                await ctx.info("Solving KKT sequence...")

            result = solve_adapter(
                manifest_path=manifest_path,
                out_dir=out_dir,
                config_path=config_path,
                overrides={
                    "gamma": gamma,
                    "delta_min": delta_min,
                    "delta_max": delta_max,
                    "delta2": delta2,
                    "cg_tol": cg_tol,
                    "cg_max_iter": cg_max_iter,
                },
                output_format=output_format,
                save_path=save_path,
            )

            if ctx:
                await ctx.info("KKT sequence solved")

            return result
        except Exception as e:
            if ctx:
                await ctx.error(f"Error: {str(e)}")
            raise

    @staticmethod
    async def sweep_gamma_tool(
        manifest_path: str,
        gammas: List[float],
        out_dir: str,
        config_path: Optional[str] = None,
        output_format: str = "json",
        save_path: Optional[str] = None,
        ctx: Context[ServerSession, None] = None,
    ) -> str:
        """Gamma sweep over a KKT sequence"""
        try:
            if ctx:
                await ctx.info(f"Sweeping {len(gammas)} gamma values...")

            result = sweep_gamma_adapter(
                manifest_path=manifest_path,
                gammas=gammas,
                out_dir=out_dir,
                config_path=config_path,
                output_format=output_format,
                save_path=save_path,
            )

            if ctx:
                await ctx.info("Gamma sweep complete")

            return result
        except Exception as e:
            if ctx:
                await ctx.error(f"Error: {str(e)}")
            raise

    @staticmethod
    async def report_tool(
        run_manifest_path: str,
        output_format: str = "markdown",
        save_path: Optional[str] = None,
        ctx: Context[ServerSession, None] = None,
    ) -> str:
        """Summarize a solver run"""
        try:
            return report_adapter(
                run_manifest_path=run_manifest_path,
                output_format=output_format,
                save_path=save_path,
            )
        except Exception as e:
            if ctx:
                await ctx.error(f"Error: {str(e)}")
            raise

    @staticmethod
    async def orderings_tool(
        manifest_path: str,
        output_format: str = "markdown",
        out_dir: Optional[str] = None,
        ctx: Context[ServerSession, None] = None,
    ) -> str:
        """Compare fill-reducing orderings"""
        try:
            if ctx:
                await ctx.info("Comparing orderings...")
            return orderings_adapter(manifest_path=manifest_path, output_format=output_format, out_dir=out_dir)
        except Exception as e:
            if ctx:
                await ctx.error(f"Error: {str(e)}")
            raise
