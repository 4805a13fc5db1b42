"""
输出格式化组件 - 支持 CSV、Markdown 和 TXT 格式
"""

from datetime import datetime
from pathlib import Path
from typing import Any, List, Sequence

import pandas as pd

# 17 位有效数字保证浮点数写出再读入逐位一致
CSV_FLOAT_FORMAT = "%.17g"


class OutputFormatter:
    """输出格式化器"""

    @staticmethod
    def format_run_summary(summaries: Sequence[Any], format_type: str = "markdown") -> str:
        """格式化运行摘要 (扫描时每个 γ 一个摘要块)"""
        if format_type.lower() == "markdown":
            return MarkdownFormatter.format_run_summary(summaries)
        return TextFormatter.format_run_summary(summaries)

    @staticmethod
    def format_report_table(df: pd.DataFrame, format_type: str = "markdown") -> str:
        """格式化逐矩阵报告表"""
        if format_type.lower() == "markdown":
            return MarkdownFormatter.format_table(df)
        return df.to_string(index=False)

    @staticmethod
    def write_csv(df: pd.DataFrame, file_path: Path) -> Path:
        """以固定浮点格式写出 CSV, 缺失值写为空"""
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep="", lineterminator="\n")
        return path

    @staticmethod
    def save_to_file(content: str, file_path: str) -> str:
        """保存内容到文件"""
        path = Path(file_path)
        path.parent.mkdir(parents=True, exist_ok=True)

        with open(path, 'w', encoding='utf-8') as f:
            f.write(content)

        return f"结果已保存到: {file_path}"


def _fmt(value: Any, spec: str = ".3e") -> str:
    if value is None:
        return "n/a"
    return format(value, spec)


def _histogram(histogram: dict) -> str:
    return ", ".join(f"{key}={count}" for key, count in histogram.items()) or "n/a"


class MarkdownFormatter:
    """Markdown格式化器"""

    @staticmethod
    def format_run_summary(summaries: Sequence[Any]) -> str:
        """格式化运行摘要为Markdown"""
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        md = f"""# KKT 序列求解摘要

**生成时间**: {timestamp}

"""
        for summary in summaries:
            md += f"## {summary.label}\n\n"
            md += "| 指标 | 数值 |\n|------|------|\n"
            md += f"| 矩阵数 | {summary.n_matrices} |\n"
            md += f"| failures | {summary.failures} |\n"
            md += f"| 使用 δ₂ 的矩阵数 | {summary.solved_with_delta2} |\n"
            md += f"| 平均 CG 迭代 | {summary.mean_cg_iterations:.2f} |\n"
            md += f"| 最大 CG 迭代 | {summary.max_cg_iterations} |\n"
            md += f"| 最差 BE (4×4) | {_fmt(summary.worst_be_4x4)} |\n"
            md += f"| 最差 RR (4×4) | {_fmt(summary.worst_rr_4x4)} |\n"
            md += f"| δ₁ 分布 | {_histogram(summary.delta1_histogram)} |\n"
            md += f"| 平均 ρ_c | {_fmt(summary.mean_rho_c, '.2f')} |\n"
            md += f"| 平均 nnz_fac/nnz_op | {_fmt(summary.mean_density_ratio, '.3f')} |\n\n"
        return md

    @staticmethod
    def format_table(df: pd.DataFrame) -> str:
        """DataFrame 转 Markdown 表格"""
        columns: List[str] = [str(c) for c in df.columns]
        md = "| " + " | ".join(columns) + " |\n"
        md += "|" + "|".join("---" for _ in columns) + "|\n"
        for row in df.itertuples(index=False):
            cells = ["" if pd.isna(v) else (f"{v:.3e}" if isinstance(v, float) else str(v)) for v in row]
            md += "| " + " | ".join(cells) + " |\n"
        return md


class TextFormatter:
    """纯文本格式化器"""

    @staticmethod
    def format_run_summary(summaries: Sequence[Any]) -> str:
        lines = ["KKT 序列求解摘要", "=" * 40]
        for summary in summaries:
            lines.append(f"[{summary.label}]")
            lines.append(f"matrices: {summary.n_matrices}")
            lines.append(f"failures: {summary.failures}")
            lines.append(f"solved_with_delta2: {summary.solved_with_delta2}")
            lines.append(f"mean_cg_iterations: {summary.mean_cg_iterations:.2f}")
            lines.append(f"max_cg_iterations: {summary.max_cg_iterations}")
            lines.append(f"worst_be_4x4: {_fmt(summary.worst_be_4x4)}")
            lines.append(f"worst_rr_4x4: {_fmt(summary.worst_rr_4x4)}")
            lines.append(f"delta1_usage: {_histogram(summary.delta1_histogram)}")
            lines.append(f"mean_rho_c: {_fmt(summary.mean_rho_c, '.2f')}")
            lines.append(f"mean_density_ratio: {_fmt(summary.mean_density_ratio, '.3f')}")
            lines.append("")
        return "\n".join(lines)
