"""
稠密预言机测试脚本
"""

import sys
import os
import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.exceptions import DimensionMismatchError, NotSpdError, NotSymmetricError, SingularMatrixError
from hybrid_kkt.kkt_model import Reduced2x2
from hybrid_kkt.metrics_oracle import (
    condition_number,
    dense_rank,
    dense_solve,
    dense_sym_eig,
    gamma_min,
    min_positive_eigenvalue,
    nullspace_min_eigenvalue,
    schur_spectrum,
)
from hybrid_kkt.sparse_core import CompressedColumnMatrix


def test_dense_solve():
    """测试 LU 求解与奇异检测"""
    A = np.array([[0.0, 2.0], [1.0, 1.0]])
    assert np.allclose(dense_solve(A, [2.0, 3.0]), [2.0, 1.0], rtol=1e-15)
    assert dense_solve(np.zeros((0, 0)), np.zeros(0)).size == 0

    with pytest.raises(SingularMatrixError):
        dense_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), [1.0, 2.0])
    with pytest.raises(DimensionMismatchError):
        dense_solve(np.eye(2), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        dense_solve(np.array([[np.nan]]), [1.0])
    print("  稠密求解测试通过")


def test_eigenvalues_and_rank():
    """测试对称特征值、数值秩与条件数"""
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(dense_sym_eig(A), [1.0, 3.0], rtol=1e-14)
    assert condition_number(A) == pytest.approx(3.0, rel=1e-14)
    assert condition_number(np.diag([1.0, 0.0])) == float("inf")
    with pytest.raises(NotSymmetricError):
        dense_sym_eig(np.array([[1.0, 2.0], [0.0, 1.0]]))

    J = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 0.0]])
    assert dense_rank(J) == 2
    assert dense_rank(np.zeros((2, 3))) == 0
    assert dense_rank(np.zeros((0, 3))) == 0
    assert min_positive_eigenvalue(np.diag([0.0, 2.0, 5.0])) == 2.0
    with pytest.raises(ValueError):
        min_positive_eigenvalue(-np.eye(2))
    print("  特征值与秩测试通过")


def test_nullspace_min_eigenvalue():
    """测试 H̃ 在 null(J) 上的最小特征值"""
    H = np.diag([-1.0, 2.0, 3.0])
    J = np.array([[1.0, 0.0, 0.0]])
    assert nullspace_min_eigenvalue(H, J) == pytest.approx(2.0, rel=1e-14)
    assert nullspace_min_eigenvalue(H, np.zeros((0, 3))) == pytest.approx(-1.0, rel=1e-14)
    assert nullspace_min_eigenvalue(np.eye(2), np.eye(2)) == float("inf")
    print("  零空间特征值测试通过")


def test_gamma_min_and_schur_spectrum():
    """测试 γ_min 与 γS 的谱"""
    # H̃ = diag(−1, 2), J = [1 0]: γ_min = 1, γ > 1 时 H_γ 正定
    red = Reduced2x2(
        H_tilde=CompressedColumnMatrix.diagonal([-1.0, 2.0]),
        J=CompressedColumnMatrix.from_dense([[1.0, 0.0]]),
        r_x=np.zeros(2),
        r_y=np.zeros(1),
    )
    assert gamma_min(red) == pytest.approx(1.0, rel=1e-14)

    # γS = γ/(γ − 1)
    spectrum = schur_spectrum(red, 11.0)
    assert spectrum.shape == (1,)
    assert spectrum[0] == pytest.approx(1.1, rel=1e-14)
    with pytest.raises(NotSpdError):
        schur_spectrum(red, 0.5)
    print("  γ_min 与 Schur 谱测试通过")


if __name__ == "__main__":
    print("开始测试稠密预言机...")
    test_dense_solve()
    test_eigenvalues_and_rank()
    test_nullspace_min_eigenvalue()
    test_gamma_min_and_schur_spectrum()
    print("所有稠密预言机测试通过!")
