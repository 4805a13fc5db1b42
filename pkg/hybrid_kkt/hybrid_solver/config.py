"""
求解器配置与正则化状态
"""

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)


class SolverConfig(BaseModel):
    """混合直接-迭代求解器参数"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma: float = Field(1e4, ge=0.0, description="H_γ = H̃ + γJᵀJ 的平移参数 γ")
    delta_min: float = Field(1e-9, gt=0.0, description="δ₁ 阶梯的起始值")
    delta_max: float = Field(1e-6, gt=0.0, description="δ₁ 的上限")
    delta2: float = Field(1e-9, ge=0.0, description="Schur 系统重启时使用的 δ₂")
    cg_tol: float = Field(1e-12, gt=0.0, description="CG 相对残差停止容差")
    cg_max_iter: int = Field(500, ge=1, description="CG 最大迭代次数")
    small_quadratic_threshold: float = Field(1e-12, gt=0.0, description="判定 pᵀSp 过小的相对阈值")
    pivot_floor: float = Field(1e-13, gt=0.0, description="相对主元下限 (乘以 max|diag|)")
    ruiz_tol: float = Field(0.01, gt=0.0, description="Ruiz 行范数容差")
    ruiz_max_iters: int = Field(20, ge=1, description="Ruiz 最大轮数")
    use_ruiz: bool = Field(True, description="是否在求解前做 Ruiz 缩放")
    ordering: Literal["amd", "rcm", "natural"] = Field("amd", description="填充缩减排序方法")
    gamma_rule: Literal["fixed", "golub_greif"] = Field(
        "fixed", description="γ 的取法: 固定值, 或 ‖H̃‖/‖J‖² 启发式"
    )
    parallel_sequence: bool = Field(False, description="序列中各矩阵并行求解 (放弃 δ_min 传递)")
    n_jobs: int = Field(1, ge=1, description="并行求解的线程数")

    @model_validator(mode="after")
    def _check_delta_range(self) -> "SolverConfig":
        if self.delta_min > self.delta_max:
            raise ValueError(f"delta_min({self.delta_min}) 不能大于 delta_max({self.delta_max})")
        return self

    def with_overrides(self, **overrides: Any) -> "SolverConfig":
        """返回覆盖了非 None 字段的新配置"""
        data = self.model_dump()
        data.update({k: v for k, v in overrides.items() if v is not None})
        return SolverConfig(**data)


@dataclass(frozen=True)
class RegularizationState:
    """
    δ₁ 阶梯的状态

    Attributes:
        delta1: 当前矩阵最终使用的 δ₁
        delta_min_current: 加倍基数, 在序列中向后传递
        attempts: 当前矩阵的分解尝试次数
    """
    delta1: float
    delta_min_current: float
    attempts: int = 0

    @classmethod
    def initial(cls, cfg: SolverConfig) -> "RegularizationState":
        return cls(delta1=0.0, delta_min_current=cfg.delta_min, attempts=0)

    def for_next_matrix(self) -> "RegularizationState":
        """δ₁ 对下一个矩阵从 0 重新开始, δ_min_current 保留"""
        return replace(self, delta1=0.0, attempts=0)


def load_solver_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> SolverConfig:
    """
    读取配置文件 (YAML 或 JSON) 并合并覆盖项

    Args:
        path: 配置文件路径; 为 None 时使用默认配置
        overrides: 覆盖项, 值为 None 的键被忽略

    Returns:
        SolverConfig: 校验后的配置

    Raises:
        ValueError: 文件内容不是映射, 或含未知字段/非法取值
    """
    data: Dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        loaded = json.loads(text) if path.suffix.lower() == ".json" else yaml.safe_load(text)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ValueError(f"配置文件 {path} 的内容必须是键值映射")
        data.update(loaded)
        logger.debug("已读取配置文件 %s", path)
    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})
    return SolverConfig(**data)
