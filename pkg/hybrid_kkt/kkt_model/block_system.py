"""
块 4×4 KKT 系统、消去 Δs 后的块 2×2 系统, 以及完整解的恢复

块 4×4 系统:
    [H + D_x   0     Jᵀ   J_dᵀ] [Δx ]   [r̃_x ]
    [0         D_s   0    −I  ] [Δs ] = [r_s ]
    [J         0     0    0   ] [Δy ]   [r_y ]
    [J_d       −I    0    0   ] [Δy_d]  [r_yd]

消去 Δs = J_dΔx − r_yd 与 Δy_d = D_sΔs − r_s 后得到
    [H̃  Jᵀ] [Δx]   [r_x]
    [J   0] [Δy] = [r_y],   H̃ = H + D_x + J_dᵀD_sJ_d,  r_x = r̃_x + J_dᵀ(D_s r_yd + r_s)
"""

from dataclasses import dataclass

import numpy as np

from ..exceptions import DimensionMismatchError, KktError
from ..sparse_core import CompressedColumnMatrix, gram_lower_triplets, spmv


def _vector(values, name: str, length: int) -> np.ndarray:
    vec = np.ascontiguousarray(np.asarray(values, dtype=np.float64).ravel())
    if len(vec) != length:
        raise DimensionMismatchError(f"{name} 长度({len(vec)})应为 {length}")
    if not np.all(np.isfinite(vec)):
        raise KktError(f"{name} 含有非有限数值")
    return vec


@dataclass(frozen=True, eq=False)
class BlockKkt4x4:
    """
    块 4×4 KKT 系统 K_k Δ = r_k

    Attributes:
        H: 对称 Hessian 块 (下三角存储, n_x×n_x)
        J: 等式约束 Jacobian (m_c×n_x)
        J_d: 不等式约束 Jacobian (m_d×n_x)
        D_x: 原始变量界的障碍对角 (≥0)
        D_s: 松弛变量的障碍对角 (≥0)
        r_tilde_x, r_s, r_y, r_yd: 右端项分块
    """
    H: CompressedColumnMatrix
    J: CompressedColumnMatrix
    J_d: CompressedColumnMatrix
    D_x: np.ndarray
    D_s: np.ndarray
    r_tilde_x: np.ndarray
    r_s: np.ndarray
    r_y: np.ndarray
    r_yd: np.ndarray

    def __post_init__(self):
        n_x = self.H.nrows
        if self.H.ncols != n_x:
            raise DimensionMismatchError(f"H 必须是方阵, 实际为 {self.H.nrows}x{self.H.ncols}")
        if not self.H.is_lower():
            raise KktError("H 必须以下三角形式存储")
        if self.J.ncols != n_x:
            raise DimensionMismatchError(f"J 列数({self.J.ncols})应为 n_x={n_x}")
        if self.J_d.ncols != n_x:
            raise DimensionMismatchError(f"J_d 列数({self.J_d.ncols})应为 n_x={n_x}")
        m_c, m_d = self.J.nrows, self.J_d.nrows
        object.__setattr__(self, "D_x", _vector(self.D_x, "D_x", n_x))
        object.__setattr__(self, "D_s", _vector(self.D_s, "D_s", m_d))
        object.__setattr__(self, "r_tilde_x", _vector(self.r_tilde_x, "r_tilde_x", n_x))
        object.__setattr__(self, "r_s", _vector(self.r_s, "r_s", m_d))
        object.__setattr__(self, "r_y", _vector(self.r_y, "r_y", m_c))
        object.__setattr__(self, "r_yd", _vector(self.r_yd, "r_yd", m_d))
        if np.any(self.D_x < 0) or np.any(self.D_s < 0):
            raise KktError("D_x 与 D_s 必须非负")

    @property
    def n_x(self) -> int:
        return self.H.nrows

    @property
    def m_c(self) -> int:
        return self.J.nrows

    @property
    def m_d(self) -> int:
        return self.J_d.nrows

    @property
    def size(self) -> int:
        """N = n_x + 2·m_d + m_c"""
        return self.n_x + 2 * self.m_d + self.m_c

    def rhs(self) -> np.ndarray:
        """按 (r̃_x, r_s, r_y, r_yd) 顺序拼接的右端项"""
        return np.concatenate([self.r_tilde_x, self.r_s, self.r_y, self.r_yd])


@dataclass(frozen=True, eq=False)
class Reduced2x2:
    """
    块 2×2 系统

    Attributes:
        H_tilde: H + D_x + J_dᵀD_sJ_d (下三角存储, 对角位置全部存储)
        J: 等式约束 Jacobian
        r_x: 约化后的右端项
        r_y: 约束右端项
    """
    H_tilde: CompressedColumnMatrix
    J: CompressedColumnMatrix
    r_x: np.ndarray
    r_y: np.ndarray

    def __post_init__(self):
        n_x = self.H_tilde.nrows
        if self.H_tilde.ncols != n_x or self.J.ncols != n_x:
            raise DimensionMismatchError("H_tilde 与 J 的维度不一致")
        object.__setattr__(self, "r_x", _vector(self.r_x, "r_x", n_x))
        object.__setattr__(self, "r_y", _vector(self.r_y, "r_y", self.J.nrows))

    @property
    def n_x(self) -> int:
        return self.H_tilde.nrows

    @property
    def m_c(self) -> int:
        return self.J.nrows

    def rhs(self) -> np.ndarray:
        return np.concatenate([self.r_x, self.r_y])


@dataclass(frozen=True, eq=False)
class FullSolution:
    """块 4×4 系统的解 (Δx, Δs, Δy, Δy_d)"""
    dx: np.ndarray
    ds: np.ndarray
    dy: np.ndarray
    dyd: np.ndarray

    def __post_init__(self):
        for name in ("dx", "ds", "dy", "dyd"):
            vec = np.asarray(getattr(self, name), dtype=np.float64).ravel()
            if not np.all(np.isfinite(vec)):
                raise KktError(f"解向量 {name} 含有非有限数值")
            object.__setattr__(self, name, vec)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.dx, self.ds, self.dy, self.dyd])

    @classmethod
    def from_stacked(cls, vector: np.ndarray, n_x: int, m_c: int, m_d: int) -> "FullSolution":
        vector = np.asarray(vector, dtype=np.float64)
        if len(vector) != n_x + 2 * m_d + m_c:
            raise DimensionMismatchError("拼接解向量长度与块维度不一致")
        cuts = np.cumsum([n_x, m_d, m_c])
        dx, ds, dy, dyd = np.split(vector, cuts)
        return cls(dx, ds, dy, dyd)


def reduce(sys: BlockKkt4x4) -> Reduced2x2:
    """
    消去 Δs 与 Δy_d, 得到块 2×2 系统

    H̃ 的结构为 H、完整对角线与 J_dᵀJ_d 结构的并集, 与 D_s 的取值无关。
    """
    n_x = sys.n_x
    diag = np.arange(n_x, dtype=np.int64)
    g_rows, g_cols, g_vals = gram_lower_triplets(sys.J_d, sys.D_s)
    H_tilde = CompressedColumnMatrix.from_triplets(
        np.concatenate([sys.H.row_idx, diag, g_rows]),
        np.concatenate([sys.H.col_idx, diag, g_cols]),
        np.concatenate([sys.H.values, sys.D_x, g_vals]),
        (n_x, n_x),
    )
    r_x = sys.r_tilde_x + spmv(sys.J_d, sys.D_s * sys.r_yd + sys.r_s, transpose=True)
    return Reduced2x2(H_tilde=H_tilde, J=sys.J, r_x=r_x, r_y=sys.r_y.copy())


def recover(sys: BlockKkt4x4, dx, dy) -> FullSolution:
    """由 (Δx, Δy) 恢复 Δs = J_dΔx − r_yd 与 Δy_d = D_sΔs − r_s"""
    dx = np.asarray(dx, dtype=np.float64)
    dy = np.asarray(dy, dtype=np.float64)
    if len(dx) != sys.n_x or len(dy) != sys.m_c:
        raise DimensionMismatchError(f"dx/dy 长度应为 {sys.n_x}/{sys.m_c}, 实际为 {len(dx)}/{len(dy)}")
    ds = spmv(sys.J_d, dx) - sys.r_yd
    dyd = sys.D_s * ds - sys.r_s
    return FullSolution(dx=dx.copy(), ds=ds, dy=dy.copy(), dyd=dyd)
