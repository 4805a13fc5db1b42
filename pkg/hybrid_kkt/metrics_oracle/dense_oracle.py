"""
稠密预言机 (O(n³), 仅用于测试、定理检验与生成时校验, 不进入求解路径)

线性求解、对称特征值与数值秩均委托给 LAPACK (scipy.linalg)。
"""

from typing import Optional

import numpy as np
import scipy.linalg as sla

from ..exceptions import DimensionMismatchError, NotSpdError, NotSymmetricError, SingularMatrixError
from ..kkt_model import BlockKkt4x4, FullSolution, Reduced2x2

DenseMatrix = np.ndarray

DEFAULT_RANK_TOL = 1e-10


def _square(A, name: str = "A") -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatchError(f"{name} 必须是方阵, 实际形状 {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} 含有非有限数值")
    return A


def dense_solve(A: DenseMatrix, b) -> np.ndarray:
    """
    部分主元 LU 求解 A x = b

    Raises:
        SingularMatrixError: U 的某个主元在工作精度下为零
    """
    A = _square(A)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[0]
    if b.shape[0] != n:
        raise DimensionMismatchError(f"右端项长度({b.shape[0]})与阶数({n})不一致")
    if n == 0:
        return np.zeros_like(b)
    lu, piv = sla.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    scale = max(float(np.abs(A).max()), np.finfo(float).tiny)
    if pivots.min() <= n * np.finfo(float).eps * scale:
        raise SingularMatrixError(f"矩阵在工作精度下奇异 (最小主元 {pivots.min():.3e})")
    return sla.lu_solve((lu, piv), b, check_finite=False)


def dense_sym_eig(A: DenseMatrix) -> np.ndarray:
    """
    对称矩阵的全部特征值 (升序)

    Raises:
        NotSymmetricError: 输入不对称
    """
    A = _square(A)
    scale = max(float(np.abs(A).max()), 1.0)
    if np.abs(A - A.T).max(initial=0.0) > 1e-12 * scale:
        raise NotSymmetricError("特征值预言机要求对称矩阵")
    if A.shape[0] == 0:
        return np.zeros(0)
    return sla.eigvalsh(0.5 * (A + A.T), check_finite=False)


def dense_rank(A: DenseMatrix, tol: float = DEFAULT_RANK_TOL) -> int:
    """列主元 QR 的数值秩: |R_ii| > tol·|R_00| 的个数"""
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionMismatchError("dense_rank 要求二维数组")
    if A.size == 0:
        return 0
    R = sla.qr(A, mode="r", pivoting=True, check_finite=False)[0]
    diag = np.abs(np.diag(R))
    if diag[0] == 0.0:
        return 0
    return int(np.sum(diag > tol * diag[0]))


def condition_number(A: DenseMatrix) -> float:
    """对称矩阵的 κ = max|λ| / min|λ|"""
    eig = np.abs(dense_sym_eig(A))
    return float(eig.max() / eig.min()) if eig.min() > 0 else float("inf")


def min_positive_eigenvalue(A: DenseMatrix, tol: float = DEFAULT_RANK_TOL) -> float:
    """大于 tol·λ_max 的最小特征值 (例如 λ*_min(JᵀJ))"""
    eig = dense_sym_eig(A)
    if len(eig) == 0 or eig[-1] <= 0:
        raise ValueError("矩阵没有正特征值")
    return float(eig[eig > tol * eig[-1]].min())


# ---- KKT 稠密化 ----

def densify_kkt2x2(red: Reduced2x2) -> DenseMatrix:
    n_x, m_c = red.n_x, red.m_c
    K = np.zeros((n_x + m_c, n_x + m_c))
    J = red.J.to_dense()
    K[:n_x, :n_x] = red.H_tilde.to_dense(symmetric_lower=True)
    K[:n_x, n_x:] = J.T
    K[n_x:, :n_x] = J
    return K


def densify_kkt4x4(sys: BlockKkt4x4) -> DenseMatrix:
    n_x, m_d, m_c = sys.n_x, sys.m_d, sys.m_c
    ix = slice(0, n_x)
    i_s = slice(n_x, n_x + m_d)
    iy = slice(n_x + m_d, n_x + m_d + m_c)
    iyd = slice(n_x + m_d + m_c, sys.size)
    K = np.zeros((sys.size, sys.size))
    J = sys.J.to_dense()
    J_d = sys.J_d.to_dense()
    K[ix, ix] = sys.H.to_dense(symmetric_lower=True) + np.diag(sys.D_x)
    K[ix, iy] = J.T
    K[ix, iyd] = J_d.T
    K[i_s, i_s] = np.diag(sys.D_s)
    K[i_s, iyd] = -np.eye(m_d)
    K[iy, ix] = J
    K[iyd, ix] = J_d
    K[iyd, i_s] = -np.eye(m_d)
    return K


def dense_solve_kkt4x4(sys: BlockKkt4x4) -> FullSolution:
    """块 4×4 系统的稠密直接解"""
    x = dense_solve(densify_kkt4x4(sys), sys.rhs())
    return FullSolution.from_stacked(x, sys.n_x, sys.m_c, sys.m_d)


def dense_solve_kkt2x2(red: Reduced2x2):
    """块 2×2 系统的稠密直接解, 返回 (dx, dy)"""
    x = dense_solve(densify_kkt2x2(red), red.rhs())
    return x[:red.n_x], x[red.n_x:]


def kkt_condition_number(sys: BlockKkt4x4) -> float:
    """κ(K_k) (可选诊断, 默认报告不计算)"""
    return condition_number(densify_kkt4x4(sys))


# ---- 定理检验 ----

def h_gamma_dense(red: Reduced2x2, gamma: float) -> DenseMatrix:
    J = red.J.to_dense()
    return red.H_tilde.to_dense(symmetric_lower=True) + gamma * (J.T @ J)


def nullspace_min_eigenvalue(H_tilde: DenseMatrix, J: DenseMatrix, rcond: Optional[float] = None) -> float:
    """H̃ 限制在 null(J) 上的最小特征值; null(J) 为空时返回 +inf"""
    H_tilde = _square(H_tilde, "H_tilde")
    J = np.asarray(J, dtype=np.float64).reshape(-1, H_tilde.shape[0])
    Z = sla.null_space(J, rcond=rcond) if J.shape[0] else np.eye(H_tilde.shape[0])
    if Z.shape[1] == 0:
        return float("inf")
    reduced = Z.T @ H_tilde @ Z
    return float(dense_sym_eig(0.5 * (reduced + reduced.T))[0])


def gamma_min(red: Reduced2x2, tol: float = DEFAULT_RANK_TOL) -> float:
    """γ_min = −λ_min(H̃) / λ*_min(JᵀJ)"""
    J = red.J.to_dense()
    lam_h = float(dense_sym_eig(red.H_tilde.to_dense(symmetric_lower=True))[0])
    lam_j = min_positive_eigenvalue(J.T @ J, tol)
    return -lam_h / lam_j


def schur_spectrum(red: Reduced2x2, gamma: float) -> np.ndarray:
    """
    γS = γ·J·H_γ⁻¹·Jᵀ 的特征值 (升序)

    Raises:
        NotSpdError: H_γ 不正定
    """
    H_g = h_gamma_dense(red, gamma)
    try:
        chol = sla.cho_factor(H_g, lower=True, check_finite=False)
    except sla.LinAlgError as exc:
        raise NotSpdError(f"H_γ 在 γ={gamma} 时不正定") from exc
    J = red.J.to_dense()
    S = gamma * (J @ sla.cho_solve(chol, J.T, check_finite=False))
    return dense_sym_eig(0.5 * (S + S.T))
