"""
数据加载组件
读取 KKT 序列清单、运行清单 (run_manifest.json) 与报告 CSV
"""

import re
from pathlib import Path
from typing import List, Union

import pandas as pd
from pydantic import ValidationError

from hybrid_kkt.exceptions import ManifestError
from hybrid_kkt.kkt_model import KktSequence, load_sequence


class DataLoader:
    """序列与运行结果加载器"""

    @staticmethod
    def load_sequence(manifest_path: Union[str, Path]) -> KktSequence:
        """
        从清单加载系统序列

        Args:
            manifest_path: 序列清单路径

        Returns:
            KktSequence: 系统序列

        Raises:
            FileNotFoundError: 清单不存在
            ManifestError: 清单内容错误
        """
        path = Path(manifest_path)
        if not path.exists():
            raise FileNotFoundError(f"清单文件不存在: {manifest_path}")
        if path.suffix.lower() != ".json":
            raise ValueError(f"不支持的清单格式: {path.suffix}")
        return load_sequence(path)

    @staticmethod
    def load_run_manifest(path: Union[str, Path]):
        """
        读取 run_manifest.json

        Raises:
            FileNotFoundError: 文件不存在
            ManifestError: 内容不是合法的运行清单
        """
        # 延迟导入, 避免与适配器模块循环引用
        from .kkt_solver_adapter import RunManifest

        path = Path(path)
        if path.is_dir():
            path = path / "run_manifest.json"
        if not path.exists():
            raise FileNotFoundError(f"运行清单不存在: {path}")
        try:
            return RunManifest.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as exc:
            raise ManifestError(path, f"运行清单格式错误: {exc}") from exc

    @staticmethod
    def load_report_csv(path: Union[str, Path]) -> pd.DataFrame:
        """读取 reports.csv 或 sweep.csv"""
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"报告文件不存在: {path}")
        df = pd.read_csv(path)
        if df.empty:
            raise ValueError(f"报告文件为空: {path}")
        return df

    @staticmethod
    def parse_gamma_list(text: str) -> List[float]:
        """
        解析逗号或空白分隔的 γ 列表, 例如 "1e2,1e4,1e6"

        Raises:
            ValueError: 列表为空或含负数
        """
        items = [item for item in re.split(r"[,\s]+", text.strip()) if item]
        if not items:
            raise ValueError("γ 列表不能为空")
        gammas = [float(item) for item in items]
        if any(g < 0 for g in gammas):
            raise ValueError(f"γ 必须非负: {gammas}")
        return gammas
