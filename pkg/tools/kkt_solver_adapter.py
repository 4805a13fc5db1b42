"""
KKT 混合求解器适配器
把 hybrid_kkt/ 的核心算法适配为命令行与 MCP 工具: 生成序列、求解、γ 扫描、
运行摘要与排序比较, 结果写为 CSV 与 run_manifest.json
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field

from hybrid_kkt.hybrid_solver import (
    SolverConfig,
    SolveReport,
    SolveStatus,
    assemble_h_gamma,
    load_solver_config,
    solve_sequence,
)
from hybrid_kkt.kkt_model import KktSequence, reduce
from hybrid_kkt.sparse_core import analyze
from hybrid_kkt.synthetic import GeneratorSpec, generate_to_directory

from .data_loader import DataLoader
from .decorators import log_stage
from .output_formatter import OutputFormatter

logger = logging.getLogger(__name__)

CSV_SCHEMA_VERSION = 1
REPORTS_CSV_COLUMNS = [
    "k", "status", "delta1", "delta2", "cg_iterations",
    "be_4x4", "rr_4x4", "be_2x2", "rr_2x2", "nnz_fac", "ratio",
]
SWEEP_CSV_COLUMNS = ["gamma", "k", "cg_iterations", "be_4x4", "rr_4x4", "delta1"]
ORDERING_METHODS = ("amd", "rcm", "natural")


class RunManifest(BaseModel):
    """一次求解或扫描的运行记录"""
    schema_version: int = Field(CSV_SCHEMA_VERSION, description="CSV 列结构版本")
    command: Literal["solve", "sweep-gamma"] = Field(..., description="产生该记录的命令")
    config: SolverConfig = Field(..., description="使用的求解器配置")
    input_manifest: str = Field(..., description="输入序列清单路径")
    outputs: Dict[str, str] = Field(default_factory=dict, description="输出文件路径")
    gammas: Optional[List[float]] = Field(None, description="扫描的 γ 列表")
    reports: List[SolveReport] = Field(default_factory=list, description="逐矩阵求解报告")

    @property
    def failures(self) -> int:
        return sum(1 for r in self.reports if not r.status.succeeded)

    @property
    def all_succeeded(self) -> bool:
        return self.failures == 0


class RunSummary(BaseModel):
    """运行摘要 (扫描时每个 γ 一份)"""
    label: str = Field(..., description="摘要块标题")
    gamma: Optional[float] = Field(None, description="该块对应的 γ")
    n_matrices: int = Field(..., description="矩阵个数")
    failures: int = Field(..., description="未求解成功的矩阵个数")
    solved_with_delta2: int = Field(0, description="使用 δ₂ 的矩阵个数")
    mean_cg_iterations: float = Field(0.0, description="平均 CG 迭代次数")
    max_cg_iterations: int = Field(0, description="最大 CG 迭代次数")
    worst_be_4x4: Optional[float] = Field(None, description="最差的块 4×4 后向误差")
    worst_rr_4x4: Optional[float] = Field(None, description="最差的块 4×4 相对残差")
    delta1_histogram: Dict[str, int] = Field(default_factory=dict, description="δ₁ 取值 → 矩阵个数")
    mean_rho_c: Optional[float] = Field(None, description="平均 ρ_c")
    mean_density_ratio: Optional[float] = Field(None, description="平均 nnz_fac/nnz_op")


# ---- 表格 ----

def reports_dataframe(reports: Sequence[SolveReport]) -> pd.DataFrame:
    """逐矩阵报告 → reports.csv 的列"""
    rows = [
        [
            r.index, r.status.value, r.delta1_final, r.delta2_used, r.cg_iterations,
            r.be_4x4, r.rr_4x4, r.be_2x2, r.rr_2x2,
            r.density.nnz_fac if r.density else None,
            r.density.ratio if r.density else None,
        ]
        for r in reports
    ]
    return pd.DataFrame(rows, columns=REPORTS_CSV_COLUMNS)


def sweep_dataframe(reports: Sequence[SolveReport]) -> pd.DataFrame:
    """γ 扫描报告 → sweep.csv 的列"""
    rows = [[r.gamma, r.index, r.cg_iterations, r.be_4x4, r.rr_4x4, r.delta1_final] for r in reports]
    return pd.DataFrame(rows, columns=SWEEP_CSV_COLUMNS)


def _write_run(run: RunManifest, out: Path) -> RunManifest:
    path = out / "run_manifest.json"
    run.outputs["run_manifest"] = str(path)
    path.write_text(run.model_dump_json(indent=2), encoding="utf-8")
    return run


# ---- 命令核心 ----

@log_stage("生成序列")
def run_generate(spec: GeneratorSpec, out_dir: Union[str, Path], name: str = "synthetic") -> Path:
    """生成合成序列, 返回清单路径"""
    manifest = generate_to_directory(spec, out_dir, name=name)
    logger.info("已生成 %d 个系统: %s", spec.sequence_length, manifest)
    return manifest


@log_stage("求解序列")
def run_solve(seq: KktSequence, cfg: SolverConfig, out_dir: Union[str, Path]) -> RunManifest:
    """
    求解序列并写出 reports.csv 与 run_manifest.json

    Raises:
        ValueError: 序列为空
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports = solve_sequence(seq, cfg)
    csv_path = OutputFormatter.write_csv(reports_dataframe(reports), out / "reports.csv")
    run = RunManifest(
        command="solve",
        config=cfg,
        input_manifest=str(seq.manifest_path or ""),
        outputs={"reports_csv": str(csv_path)},
        reports=reports,
    )
    if not run.all_succeeded:
        logger.warning("%d 个矩阵未求解成功", run.failures)
    return _write_run(run, out)


@log_stage("γ 扫描")
def run_sweep_gamma(
    seq: KktSequence, gammas: Sequence[float], cfg: SolverConfig, out_dir: Union[str, Path]
) -> RunManifest:
    """
    对每个 γ 求解整个序列, 写出 sweep.csv 与 run_manifest.json

    Raises:
        ValueError: γ 列表或序列为空
    """
    if not gammas:
        raise ValueError("γ 列表不能为空")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reports: List[SolveReport] = []
    for gamma in gammas:
        gamma_cfg = cfg.with_overrides(gamma=float(gamma), gamma_rule="fixed")
        reports.extend(solve_sequence(seq, gamma_cfg))
        logger.debug("γ=%.3e 求解完成", gamma)
    csv_path = OutputFormatter.write_csv(sweep_dataframe(reports), out / "sweep.csv")
    run = RunManifest(
        command="sweep-gamma",
        config=cfg,
        input_manifest=str(seq.manifest_path or ""),
        outputs={"sweep_csv": str(csv_path)},
        gammas=[float(g) for g in gammas],
        reports=reports,
    )
    return _write_run(run, out)


def _delta1_key(delta1: float) -> str:
    return "0" if delta1 == 0.0 else f"{delta1:.3e}"


def _mean_or_none(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def _summarize(label: str, gamma: Optional[float], reports: Sequence[SolveReport]) -> RunSummary:
    iterations = [r.cg_iterations for r in reports]
    be = [r.be_4x4 for r in reports if r.be_4x4 is not None]
    rr = [r.rr_4x4 for r in reports if r.rr_4x4 is not None]
    histogram: Dict[str, int] = {}
    for delta1 in sorted(r.delta1_final for r in reports if r.status.succeeded):
        key = _delta1_key(delta1)
        histogram[key] = histogram.get(key, 0) + 1
    return RunSummary(
        label=label,
        gamma=gamma,
        n_matrices=len(reports),
        failures=sum(1 for r in reports if not r.status.succeeded),
        solved_with_delta2=sum(1 for r in reports if r.status == SolveStatus.SOLVED_WITH_DELTA2),
        mean_cg_iterations=float(np.mean(iterations)) if iterations else 0.0,
        max_cg_iterations=max(iterations, default=0),
        worst_be_4x4=max(be) if be else None,
        worst_rr_4x4=max(rr) if rr else None,
        delta1_histogram=histogram,
        mean_rho_c=_mean_or_none([r.density.rho_c for r in reports if r.density]),
        mean_density_ratio=_mean_or_none([r.density.ratio for r in reports if r.density]),
    )


def summarize_run(run: RunManifest) -> List[RunSummary]:
    """运行摘要; γ 扫描按 γ 分块"""
    if run.command == "sweep-gamma" and run.gammas:
        return [
            _summarize(f"γ = {gamma:g}", gamma, [r for r in run.reports if r.gamma == gamma])
            for gamma in run.gammas
        ]
    gamma = run.reports[0].gamma if run.reports else run.config.gamma
    return [_summarize(f"γ = {gamma:g}", gamma, run.reports)]


@log_stage("排序比较")
def compare_orderings(
    seq: KktSequence,
    methods: Sequence[str] = ORDERING_METHODS,
    out_dir: Optional[Union[str, Path]] = None,
) -> pd.DataFrame:
    """
    每个矩阵的 H_γ 在不同排序下的 nnz(L)

    Returns:
        pd.DataFrame: 列为 k, n_x, nnz_h_gamma 以及每种排序的 nnz(L)
    """
    rows = []
    for k, system in enumerate(seq):
        pattern = assemble_h_gamma(reduce(system), 0.0).H_gamma
        row = {"k": k, "n_x": system.n_x, "nnz_h_gamma": pattern.nnz}
        for method in methods:
            row[method] = analyze(pattern, method).nnz_l
        rows.append(row)
    df = pd.DataFrame(rows, columns=["k", "n_x", "nnz_h_gamma", *methods])
    if out_dir is not None:
        OutputFormatter.write_csv(df, Path(out_dir) / "orderings.csv")
    return df


# ---- MCP 工具适配 ----

def _render(payload: BaseModel, formatted: Optional[str], output_format: str, save_path: Optional[str]) -> str:
    if output_format == "json" or formatted is None:
        text = payload.model_dump_json(indent=2)
    else:
        text = formatted
    if save_path:
        OutputFormatter.save_to_file(text, save_path)
        return f"分析完成！结果已保存到: {save_path}\n\n{text}"
    return text


class KktSolverAdapter:
    """
    KKT 求解适配器
    将核心算法适配为 MCP 工具, 返回 JSON / Markdown / 文本
    """

    @staticmethod
    def generate_sequence(
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
    ) -> str:
        """生成合成序列, 返回清单路径 (JSON)"""
        spec = GeneratorSpec(
            n_x=n_x, m_c=m_c, m_d=m_d, indefiniteness=indefiniteness,
            sequence_length=sequence_length, drift=drift, graph_degree=graph_degree, seed=seed,
        )
        manifest = run_generate(spec, out_dir, name=name)
        return json.dumps(
            {"manifest_path": str(manifest), "spec": spec.model_dump(mode="json")},
            ensure_ascii=False, indent=2,
        )

    @staticmethod
    def solve_sequence(
        manifest_path: str,
        out_dir: str,
        config_path: Optional[str] = None,
        overrides: Optional[Dict[str, float]] = None,
        output_format: str = "json",
        save_path: Optional[str] = None,
    ) -> str:
        """求解清单中的序列"""
        cfg = load_solver_config(config_path, overrides)
        run = run_solve(DataLoader.load_sequence(manifest_path), cfg, out_dir)
        formatted = None
        if output_format != "json":
            formatted = OutputFormatter.format_run_summary(summarize_run(run), output_format)
            formatted += "\n" + OutputFormatter.format_report_table(reports_dataframe(run.reports), output_format)
        return _render(run, formatted, output_format, save_path)

    @staticmethod
    def sweep_gamma(
        manifest_path: str,
        gammas: List[float],
        out_dir: str,
        config_path: Optional[str] = None,
        output_format: str = "json",
        save_path: Optional[str] = None,
    ) -> str:
        """在多个 γ 下求解序列"""
        cfg = load_solver_config(config_path)
        run = run_sweep_gamma(DataLoader.load_sequence(manifest_path), gammas, cfg, out_dir)
        formatted = None
        if output_format != "json":
            formatted = OutputFormatter.format_run_summary(summarize_run(run), output_format)
        return _render(run, formatted, output_format, save_path)

    @staticmethod
    def run_report(run_manifest_path: str, output_format: str = "markdown", save_path: Optional[str] = None) -> str:
        """运行记录的摘要"""
        summaries = summarize_run(DataLoader.load_run_manifest(run_manifest_path))
        if output_format == "json":
            text = json.dumps([s.model_dump() for s in summaries], ensure_ascii=False, indent=2)
        else:
            text = OutputFormatter.format_run_summary(summaries, output_format)
        if save_path:
            OutputFormatter.save_to_file(text, save_path)
        return text

    @staticmethod
    def compare_orderings(manifest_path: str, output_format: str = "markdown", out_dir: Optional[str] = None) -> str:
        """比较不同排序下的填充"""
        df = compare_orderings(DataLoader.load_sequence(manifest_path), out_dir=out_dir)
        if output_format == "json":
            return df.to_json(orient="records", indent=2)
        return OutputFormatter.format_report_table(df, output_format)


# 便捷别名
generate_adapter = KktSolverAdapter.generate_sequence
solve_adapter = KktSolverAdapter.solve_sequence
sweep_gamma_adapter = KktSolverAdapter.sweep_gamma
report_adapter = KktSolverAdapter.run_report
orderings_adapter = KktSolverAdapter.compare_orderings
