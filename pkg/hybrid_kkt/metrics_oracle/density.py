"""
分解密度指标

nnz_op = nnz(H̃) + 2·nnz(J) + n_x   (H_δ 以算子形式作用时的乘法次数)
nnz_fac = 2·nnz(L)                  (两次三角求解的乘法次数)
"""

from pydantic import BaseModel, Field

from ..exceptions import DimensionMismatchError
from ..kkt_model import Reduced2x2
from ..sparse_core import NumericCholesky, SymbolicFactor


class DensityReport(BaseModel):
    """分解密度"""
    rho_c: float = Field(..., description="nnz_fac / n_x")
    nnz_op: int = Field(..., description="算子形式的乘法次数")
    nnz_fac: int = Field(..., description="因子形式的乘法次数 2·nnz(L)")
    ratio: float = Field(..., description="nnz_fac / nnz_op")


def symmetric_nnz(red: Reduced2x2) -> int:
    """H̃ 作为完整对称矩阵的非零个数"""
    H = red.H_tilde
    on_diag = int((H.row_idx == H.col_idx).sum())
    return 2 * H.nnz - on_diag


def density_report(red: Reduced2x2, factor) -> DensityReport:
    """
    Args:
        red: 块 2×2 系统
        factor: H_δ 的 NumericCholesky (或其 SymbolicFactor)
    """
    symbolic = factor.symbolic if isinstance(factor, NumericCholesky) else factor
    if not isinstance(symbolic, SymbolicFactor) or symbolic.n != red.n_x:
        raise DimensionMismatchError("因子与块 2×2 系统的维度不一致")
    n_x = red.n_x
    nnz_op = symmetric_nnz(red) + 2 * red.J.nnz + n_x
    nnz_fac = 2 * symbolic.nnz_l
    return DensityReport(
        rho_c=nnz_fac / n_x if n_x else 0.0,
        nnz_op=nnz_op,
        nnz_fac=nnz_fac,
        ratio=nnz_fac / nnz_op if nnz_op else 0.0,
    )
