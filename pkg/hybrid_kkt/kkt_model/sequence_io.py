"""
KKT 系统序列的清单读写

清单是一个 JSON 文件, 每个系统给出 H (symmetric)、J、J_d 三个 Matrix Market
文件和一个向量 JSON 文件 (D_x, D_s, r_tilde_x, r_s, r_y, r_yd), 路径相对于
清单所在目录。格式说明见 resources/KKT_SEQUENCE_FORMAT_GUIDE.md。
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from ..exceptions import DimensionMismatchError, KktError, ManifestError
from ..sparse_core import read_matrix_market_with_symmetry, write_matrix_market
from .block_system import BlockKkt4x4

logger = logging.getLogger(__name__)

MANIFEST_FORMAT_VERSION = 1
VECTOR_KEYS = ("D_x", "D_s", "r_tilde_x", "r_s", "r_y", "r_yd")


class SystemEntry(BaseModel):
    """清单中的单个系统"""
    index: int = Field(..., ge=0, description="系统在序列中的位置")
    n_x: int = Field(..., ge=0, description="原始变量个数")
    m_c: int = Field(..., ge=0, description="等式约束个数")
    m_d: int = Field(..., ge=0, description="不等式约束个数")
    hessian: str = Field(..., description="H 的 Matrix Market 文件 (symmetric)")
    jacobian: str = Field(..., description="J 的 Matrix Market 文件")
    inequality_jacobian: str = Field(..., description="J_d 的 Matrix Market 文件")
    vectors: str = Field(..., description="对角与右端项向量的 JSON 文件")


class SequenceManifest(BaseModel):
    """序列清单"""
    format_version: int = Field(MANIFEST_FORMAT_VERSION, description="清单格式版本")
    name: str = Field("sequence", description="序列名称")
    systems: List[SystemEntry] = Field(default_factory=list, description="按顺序排列的系统")


@dataclass(frozen=True, eq=False)
class KktSequence:
    """
    按顺序排列的 KKT 系统

    Attributes:
        systems: 系统列表
        pattern_uniform: 所有系统的分块稀疏结构是否相同
        manifest_path: 来源清单
    """
    systems: List[BlockKkt4x4]
    pattern_uniform: bool
    manifest_path: Union[Path, None] = None
    name: str = field(default="sequence")

    def __len__(self) -> int:
        return len(self.systems)

    def __iter__(self) -> Iterator[BlockKkt4x4]:
        return iter(self.systems)

    def __getitem__(self, k: int) -> BlockKkt4x4:
        return self.systems[k]


def patterns_uniform(systems: Sequence[BlockKkt4x4]) -> bool:
    """所有系统的 H、J、J_d 结构是否完全相同"""
    if not systems:
        return True
    first = systems[0]
    return all(
        s.H.same_pattern(first.H) and s.J.same_pattern(first.J) and s.J_d.same_pattern(first.J_d)
        for s in systems[1:]
    )


def read_manifest(manifest_path: Union[str, Path]) -> SequenceManifest:
    """读取并校验清单 JSON"""
    path = Path(manifest_path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(path, f"无法读取清单: {exc}") from exc
    try:
        manifest = SequenceManifest.model_validate_json(text)
    except ValidationError as exc:
        raise ManifestError(path, f"清单格式错误: {exc}") from exc
    if manifest.format_version != MANIFEST_FORMAT_VERSION:
        raise ManifestError(path, f"不支持的清单格式版本: {manifest.format_version}")
    return manifest


def _load_vectors(path: Path) -> Dict[str, np.ndarray]:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(path, f"无法读取向量文件: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(path, f"向量文件不是合法 JSON (第 {exc.lineno} 行): {exc.msg}") from exc
    missing = [key for key in VECTOR_KEYS if key not in raw]
    if missing:
        raise ManifestError(path, f"向量文件缺少字段: {', '.join(missing)}")
    return {key: np.asarray(raw[key], dtype=np.float64) for key in VECTOR_KEYS}


def _load_system(base: Path, entry: SystemEntry) -> BlockKkt4x4:
    H, h_symmetry = read_matrix_market_with_symmetry(base / entry.hessian)
    if h_symmetry != "symmetric" and not H.is_lower():
        raise ManifestError(base / entry.hessian, "H 必须以 symmetric 限定或下三角形式给出")
    J, _ = read_matrix_market_with_symmetry(base / entry.jacobian)
    J_d, _ = read_matrix_market_with_symmetry(base / entry.inequality_jacobian)
    vectors = _load_vectors(base / entry.vectors)
    if H.shape != (entry.n_x, entry.n_x) or J.shape != (entry.m_c, entry.n_x) or J_d.shape != (entry.m_d, entry.n_x):
        raise ManifestError(
            base / entry.hessian,
            f"系统 {entry.index} 的矩阵维度与清单声明 (n_x={entry.n_x}, m_c={entry.m_c}, m_d={entry.m_d}) 不一致",
        )
    try:
        return BlockKkt4x4(H=H, J=J, J_d=J_d, **vectors)
    except KktError as exc:
        raise ManifestError(base / entry.vectors, f"系统 {entry.index}: {exc}") from exc


def load_sequence(manifest_path: Union[str, Path]) -> KktSequence:
    """
    按清单加载系统序列

    Args:
        manifest_path: 清单路径

    Returns:
        KktSequence: 系统列表及结构一致性标志

    Raises:
        ManifestError: 清单或向量文件缺失、格式错误、维度不一致
        MatrixMarketParseError: Matrix Market 文件格式错误 (携带文件与行号)
    """
    path = Path(manifest_path)
    manifest = read_manifest(path)
    base = path.parent
    entries = sorted(manifest.systems, key=lambda e: e.index)
    systems = [_load_system(base, entry) for entry in entries]
    uniform = patterns_uniform(systems)
    if not uniform:
        logger.info("序列 %s 的稀疏结构不一致, 将逐个矩阵做符号分析", manifest.name)
    return KktSequence(systems=systems, pattern_uniform=uniform, manifest_path=path, name=manifest.name)


def write_sequence(
    systems: Sequence[BlockKkt4x4],
    out_dir: Union[str, Path],
    name: str = "sequence",
) -> Path:
    """
    写出系统序列与清单

    Returns:
        Path: 清单路径
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for k, sys in enumerate(systems):
        stem = f"{name}_{k:03d}"
        write_matrix_market(out / f"{stem}_H.mtx", sys.H, symmetric=True)
        write_matrix_market(out / f"{stem}_J.mtx", sys.J)
        write_matrix_market(out / f"{stem}_Jd.mtx", sys.J_d)
        vectors = {key: getattr(sys, key).tolist() for key in VECTOR_KEYS}
        (out / f"{stem}_vectors.json").write_text(json.dumps(vectors), encoding="utf-8")
        entries.append(SystemEntry(
            index=k, n_x=sys.n_x, m_c=sys.m_c, m_d=sys.m_d,
            hessian=f"{stem}_H.mtx",
            jacobian=f"{stem}_J.mtx",
            inequality_jacobian=f"{stem}_Jd.mtx",
            vectors=f"{stem}_vectors.json",
        ))
    manifest = SequenceManifest(name=name, systems=entries)
    path = out / f"{name}_manifest.json"
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    return path
