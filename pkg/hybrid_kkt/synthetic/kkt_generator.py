"""
合成 KKT 序列生成器

在有界度的类网格图上构造稀疏模式:
    - H: 加权图 Laplacian 减去 ρ·JᵀJ, 再平移对角, 使 H̃ 在 null(J) 上的最小特征值
      等于 +margin (正定类) 或 −margin (不定类);
    - J: 每行以一个互不相同的"中心"节点为主元, 其余元素落在中心的邻居上,
      中心子矩阵严格行对角占优, 因此行满秩 (秩亏类把最后一行替换为第 0 行的副本);
    - J_d: 每行落在一条图边的两个端点上。
序列中所有矩阵共享同一模式, 数值按 drift 的幅度缓慢漂移。
"""

import logging
from enum import Enum
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..exceptions import GeneratorSpecError
from ..kkt_model import BlockKkt4x4, reduce, write_sequence
from ..metrics_oracle import dense_sym_eig, nullspace_min_eigenvalue
from ..sparse_core import CompressedColumnMatrix, gram_lower_triplets, symmetric_row_abs_sums

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 500


class IndefinitenessClass(str, Enum):
    """H̃ 与 J 的性质类别"""
    SPD_ON_NULLSPACE = "spd_on_nullspace"
    INDEFINITE = "indefinite"
    RANK_DEFICIENT_J = "rank_deficient_j"
    INCONSISTENT_RANK_DEFICIENT = "inconsistent_rank_deficient"


class GeneratorSpec(BaseModel):
    """合成序列规格"""
    n_x: int = Field(..., ge=1, description="原始变量个数")
    m_c: int = Field(..., ge=1, description="等式约束个数, 须小于 n_x")
    m_d: int = Field(..., ge=1, description="不等式约束个数")
    graph_degree: int = Field(4, ge=1, description="底层图的度上界")
    indefiniteness: IndefinitenessClass = Field(
        IndefinitenessClass.SPD_ON_NULLSPACE, description="H̃ 在 null(J) 上的性质类别"
    )
    sequence_length: int = Field(1, ge=1, description="序列长度")
    drift: float = Field(1e-3, ge=0.0, description="相邻矩阵间数值扰动的相对幅度")
    seed: int = Field(0, description="随机种子")
    nullspace_margin: float = Field(0.5, gt=0.0, description="H̃ 在 null(J) 上最小特征值的目标绝对值")

    @model_validator(mode="after")
    def _check_feasible(self) -> "GeneratorSpec":
        if self.m_c >= self.n_x:
            raise ValueError(f"m_c({self.m_c}) 必须小于 n_x({self.n_x})")
        rank_deficient = (IndefinitenessClass.RANK_DEFICIENT_J, IndefinitenessClass.INCONSISTENT_RANK_DEFICIENT)
        if self.indefiniteness in rank_deficient and self.m_c < 2:
            raise ValueError("秩亏类别至少需要 2 个等式约束")
        return self

    @property
    def rank_deficient(self) -> bool:
        return self.indefiniteness in (
            IndefinitenessClass.RANK_DEFICIENT_J, IndefinitenessClass.INCONSISTENT_RANK_DEFICIENT
        )


def grid_graph_edges(n: int, max_degree: int, rng: np.random.Generator) -> np.ndarray:
    """
    有界度的类网格图

    以 ⌈√n⌉ 为宽度排布节点, 取网格边并随机丢弃一部分, 度超过 2 的
    配置再补充局部随机边; 所有边满足 i > j 且每个节点度不超过 max_degree。
    """
    width = int(np.ceil(np.sqrt(n)))
    candidates = []
    for i in range(n):
        if (i + 1) % width and i + 1 < n:
            candidates.append((i + 1, i))
        if i + width < n:
            candidates.append((i + width, i))
    keep = rng.random(len(candidates)) >= 0.15
    candidates = [edge for edge, k in zip(candidates, keep) if k]
    extra = max(0, max_degree - 4) * n // 2
    for _ in range(extra):
        i = int(rng.integers(n))
        j = int(np.clip(i + rng.integers(-2 * width, 2 * width + 1), 0, n - 1))
        if i != j:
            candidates.append((max(i, j), min(i, j)))

    degree = np.zeros(n, dtype=np.int64)
    edges = []
    seen = set()
    for i, j in candidates:
        if (i, j) in seen or degree[i] >= max_degree or degree[j] >= max_degree:
            continue
        seen.add((i, j))
        degree[i] += 1
        degree[j] += 1
        edges.append((i, j))
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def _neighbors(n: int, edges: np.ndarray) -> List[List[int]]:
    adj: List[List[int]] = [[] for _ in range(n)]
    for i, j in edges.tolist():
        adj[i].append(j)
        adj[j].append(i)
    return [sorted(a) for a in adj]


def _constraint_pattern(
    spec: GeneratorSpec, adj: List[List[int]], rng: np.random.Generator
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """J 的三元组; 秩亏类别的最后一行稍后由第 0 行覆盖"""
    distinct = spec.m_c - 1 if spec.rank_deficient else spec.m_c
    centers = np.sort(rng.choice(spec.n_x, size=distinct, replace=False))
    rows, cols, vals = [], [], []
    for r, c in enumerate(centers.tolist()):
        neighbor_vals = rng.uniform(0.5, 1.0, size=len(adj[c])) * rng.choice([-1.0, 1.0], size=len(adj[c]))
        rows.extend([r] * (len(adj[c]) + 1))
        cols.extend([c] + adj[c])
        vals.extend([np.abs(neighbor_vals).sum() + rng.uniform(1.0, 2.0)] + neighbor_vals.tolist())
    return np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64), np.asarray(vals)


def _with_duplicate_row(J_distinct: CompressedColumnMatrix, m_c: int) -> CompressedColumnMatrix:
    first = J_distinct.row_idx == 0
    rows = np.concatenate([J_distinct.row_idx, np.full(int(first.sum()), m_c - 1)])
    cols = np.concatenate([J_distinct.col_idx, J_distinct.col_idx[first]])
    vals = np.concatenate([J_distinct.values, J_distinct.values[first]])
    return CompressedColumnMatrix.from_triplets(rows, cols, vals, (m_c, J_distinct.ncols))


def _jitter(values: np.ndarray, drift: float, rng: np.random.Generator) -> np.ndarray:
    return values * (1.0 + drift * rng.standard_normal(len(values)))


def _target_shift(sys_without_shift: BlockKkt4x4, target: float) -> float:
    """使 H̃ 在 null(J) 上的最小特征值等于 target 所需的对角平移"""
    red = reduce(sys_without_shift)
    if sys_without_shift.n_x <= ORACLE_LIMIT:
        H_tilde = red.H_tilde.to_dense(symmetric_lower=True)
        return target - nullspace_min_eigenvalue(H_tilde, red.J.to_dense())
    # 超出稠密预言机规模时用 Gershgorin 界把 H̃ 整体推到目标一侧
    diag = red.H_tilde.diagonal_values()
    off_diag = symmetric_row_abs_sums(red.H_tilde) - np.abs(diag)
    if target > 0:
        return target + max(float(np.max(off_diag - diag)), 0.0)
    return target - max(float(np.max(off_diag + diag)), 0.0)


def generate_sequence(spec: GeneratorSpec) -> List[BlockKkt4x4]:
    """
    生成共享稀疏模式的 KKT 系统序列

    Args:
        spec: 生成规格

    Returns:
        List[BlockKkt4x4]: 长度为 sequence_length 的系统列表

    Raises:
        GeneratorSpecError: 生成结果不满足所要求的类别 (稠密预言机校验)
    """
    rng = np.random.default_rng(spec.seed)
    n_x, m_c, m_d = spec.n_x, spec.m_c, spec.m_d
    edges = grid_graph_edges(n_x, spec.graph_degree, rng)
    adj = _neighbors(n_x, edges)

    j_rows, j_cols, j_vals = _constraint_pattern(spec, adj, rng)
    distinct_rows = m_c - 1 if spec.rank_deficient else m_c
    if len(edges):
        picks = rng.integers(len(edges), size=m_d)
        jd_rows = np.repeat(np.arange(m_d), 2)
        jd_cols = edges[picks].ravel()
    else:
        jd_rows = np.arange(m_d)
        jd_cols = rng.integers(n_x, size=m_d)
    signs = np.tile([1.0, -1.0], m_d) if len(edges) else np.ones(m_d)
    jd_vals = signs * np.repeat(rng.uniform(0.5, 1.5, size=m_d), 2 if len(edges) else 1)

    weights = rng.uniform(0.5, 1.5, size=len(edges))
    D_x = rng.uniform(0.1, 1.0, size=n_x)
    D_s = rng.uniform(0.1, 10.0, size=m_d)
    rhs = {
        "r_tilde_x": rng.standard_normal(n_x),
        "r_s": rng.standard_normal(m_d),
        "r_y": rng.standard_normal(m_c),
        "r_yd": rng.standard_normal(m_d),
    }

    target = -spec.nullspace_margin if spec.indefiniteness == IndefinitenessClass.INDEFINITE else spec.nullspace_margin
    diag = np.arange(n_x, dtype=np.int64)
    systems: List[BlockKkt4x4] = []
    for k in range(spec.sequence_length):
        drift = spec.drift if k > 0 else 0.0
        w_k = _jitter(weights, drift, rng)
        J_distinct = CompressedColumnMatrix.from_triplets(
            j_rows, j_cols, _jitter(j_vals, drift, rng), (distinct_rows, n_x)
        )
        J = _with_duplicate_row(J_distinct, m_c) if spec.rank_deficient else J_distinct
        J_d = CompressedColumnMatrix.from_triplets(jd_rows, jd_cols, _jitter(jd_vals, drift, rng), (m_d, n_x))
        D_x_k = np.abs(_jitter(D_x, drift, rng))
        D_s_k = np.abs(_jitter(D_s, drift, rng))
        vectors = {key: value + drift * rng.standard_normal(len(value)) for key, value in rhs.items()}
        if spec.indefiniteness == IndefinitenessClass.RANK_DEFICIENT_J:
            vectors["r_y"][m_c - 1] = vectors["r_y"][0]
        elif spec.indefiniteness == IndefinitenessClass.INCONSISTENT_RANK_DEFICIENT:
            vectors["r_y"][m_c - 1] = vectors["r_y"][0] + 1.0

        # H0 = L_w − ρ·JᵀJ, 结构为图 ∪ JᵀJ ∪ 对角
        rho = 1.0 / max(float(np.max(np.bincount(J.row_idx, weights=J.values ** 2, minlength=m_c))), 1.0)
        g_rows, g_cols, g_vals = gram_lower_triplets(J)
        lap_diag = np.bincount(edges.ravel(), weights=np.repeat(w_k, 2), minlength=n_x) if len(edges) else np.zeros(n_x)
        rows = np.concatenate([edges[:, 0], diag, g_rows])
        cols = np.concatenate([edges[:, 1], diag, g_cols])
        vals = np.concatenate([-w_k, lap_diag, -rho * g_vals])
        H0 = CompressedColumnMatrix.from_triplets(rows, cols, vals, (n_x, n_x))

        unshifted = BlockKkt4x4(H=H0, J=J, J_d=J_d, D_x=D_x_k, D_s=D_s_k, **vectors)
        shift = _target_shift(unshifted, target)
        H = CompressedColumnMatrix.from_triplets(
            np.concatenate([rows, diag]), np.concatenate([cols, diag]), np.concatenate([vals, np.full(n_x, shift)]),
            (n_x, n_x),
        )
        system = BlockKkt4x4(H=H, J=J, J_d=J_d, D_x=D_x_k, D_s=D_s_k, **vectors)
        verify_class(system, spec.indefiniteness)
        systems.append(system)
    logger.info("生成 %d 个系统: n_x=%d, m_c=%d, m_d=%d, 类别 %s", len(systems), n_x, m_c, m_d, spec.indefiniteness.value)
    return systems


def verify_class(system: BlockKkt4x4, indefiniteness: IndefinitenessClass) -> float:
    """
    用稠密预言机校验 H̃ 在 null(J) 上的最小特征值符号 (n_x 超过上限时跳过)

    Returns:
        float: 最小特征值; 跳过时为 nan
    """
    if system.n_x > ORACLE_LIMIT:
        logger.warning("n_x=%d 超过稠密预言机上限 %d, 跳过类别校验", system.n_x, ORACLE_LIMIT)
        return float("nan")
    red = reduce(system)
    lam = nullspace_min_eigenvalue(red.H_tilde.to_dense(symmetric_lower=True), red.J.to_dense())
    wants_positive = indefiniteness != IndefinitenessClass.INDEFINITE
    if (lam > 0) != wants_positive:
        raise GeneratorSpecError(f"生成的系统不属于类别 {indefiniteness.value}: null(J) 上最小特征值 {lam:.3e}")
    return lam


def generate_to_directory(spec: GeneratorSpec, out_dir: Union[str, Path], name: str = "synthetic") -> Path:
    """生成序列并写出 Matrix Market 文件与清单, 返回清单路径"""
    return write_sequence(generate_sequence(spec), out_dir, name=name)


def h_tilde_extreme_eigenvalues(system: BlockKkt4x4) -> Tuple[float, float]:
    """H̃ 的最小与最大特征值 (稠密预言机)"""
    eig = dense_sym_eig(reduce(system).H_tilde.to_dense(symmetric_lower=True))
    return float(eig[0]), float(eig[-1])
