"""
对称 Ruiz 缩放测试脚本
"""

import sys
import os
import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.exceptions import DimensionMismatchError
from hybrid_kkt.kkt_model import (
    Reduced2x2,
    RuizScaling,
    kkt2x2_row_inf_norms,
    reduce,
    ruiz_scale,
    scale_solution,
    unscale_solution,
)
from hybrid_kkt.metrics_oracle import dense_solve_kkt2x2, kkt2x2_errors
from hybrid_kkt.sparse_core import CompressedColumnMatrix
from hybrid_kkt.tests.kkt_fixtures import random_block_system


def test_equilibrated_input_is_identity():
    """测试已均衡的系统在 1 轮内得到恒等缩放"""
    H = CompressedColumnMatrix.identity(3)
    J = CompressedColumnMatrix.from_triplets([0], [1], [1.0], (1, 3))
    scaled, scaling = ruiz_scale(H, J, np.ones(3), np.ones(1))

    assert scaling.iterations_used == 1
    assert scaling.converged
    assert scaling.d_left.tolist() == [1.0] * 4
    assert np.array_equal(scaled.H_tilde.values, H.values)
    print("  已均衡输入测试通过")


def test_diagonal_hand_iteration():
    """测试 diag(100, 1) 缩放为单位阵"""
    H = CompressedColumnMatrix.diagonal([100.0, 1.0])
    J = CompressedColumnMatrix.zeros(0, 2)
    scaled, scaling = ruiz_scale(H, J, np.array([100.0, 1.0]), np.zeros(0))

    assert np.allclose(scaling.d_left, [0.1, 1.0], rtol=1e-15)
    assert np.allclose(scaled.H_tilde.to_dense(), np.eye(2), rtol=1e-15)
    assert np.allclose(scaled.r_x, [10.0, 1.0], rtol=1e-15)
    print("  对角矩阵手算测试通过")


def test_zero_row_keeps_unit_factor():
    """测试结构上全零的行保持缩放因子 1"""
    H = CompressedColumnMatrix.from_triplets([0, 2], [0, 2], [4.0, 9.0], (3, 3))
    J = CompressedColumnMatrix.zeros(1, 3)
    _, scaling = ruiz_scale(H, J, np.ones(3), np.ones(1))

    assert scaling.d_x[1] == 1.0
    assert scaling.d_y[0] == 1.0
    assert np.all(scaling.d_left > 0) and np.all(np.isfinite(scaling.d_left))
    print("  零行测试通过")


def test_random_instance_converges_and_preserves_solution():
    """测试随机实例: 行范数进入 [0.5, 2], 缩放前后解一致"""
    rng = np.random.default_rng(71)
    sys_ = random_block_system(rng, n_x=40, m_c=10, m_d=12)
    # 人为制造量级差异
    row_scale = 10.0 ** rng.uniform(-1, 1, size=40)
    red = reduce(sys_)
    H_tilde = red.H_tilde.scaled(row_scale, row_scale)

    scaled, scaling = ruiz_scale(H_tilde, red.J, red.r_x, red.r_y, max_iters=20, tol=0.01)
    norms = kkt2x2_row_inf_norms(scaled.H_tilde, scaled.J)
    assert np.all((norms >= 0.5) & (norms <= 2.0)), f"行范数越界: [{norms.min()}, {norms.max()}]"
    assert scaling.iterations_used <= 20

    original = Reduced2x2(H_tilde=H_tilde, J=red.J, r_x=red.r_x, r_y=red.r_y)
    dx_ref, dy_ref = dense_solve_kkt2x2(original)
    dx_s, dy_s = dense_solve_kkt2x2(scaled)
    dx, dy = unscale_solution(scaling, dx_s, dy_s)
    ref = np.concatenate([dx_ref, dy_ref])
    assert np.linalg.norm(np.concatenate([dx, dy]) - ref) <= 1e-10 * np.linalg.norm(ref)

    # 残差传递: 还原后的解在原系统上仍是后向稳定的
    assert kkt2x2_errors(scaled, dx_s, dy_s).be <= 1e-13
    assert kkt2x2_errors(original, dx, dy).be <= 1e-11
    print("  随机实例缩放测试通过")


def test_unscale_round_trip():
    """测试缩放与还原互逆"""
    scaling = RuizScaling(d_left=np.array([2.0, 0.5, 4.0]), n_x=2, iterations_used=3)
    dx, dy = np.array([1.0, -3.0]), np.array([7.0])
    back = unscale_solution(scaling, *scale_solution(scaling, dx, dy))
    assert np.array_equal(back[0], dx) and np.array_equal(back[1], dy)

    ident = RuizScaling.identity(2, 1)
    assert unscale_solution(ident, dx, dy)[0].tolist() == dx.tolist()
    with pytest.raises(DimensionMismatchError):
        unscale_solution(scaling, np.ones(3), dy)
    print("  还原往返测试通过")


if __name__ == "__main__":
    print("开始测试 Ruiz 缩放...")
    test_equilibrated_input_is_identity()
    test_diagonal_hand_iteration()
    test_zero_row_keeps_unit_factor()
    test_random_instance_converges_and_preserves_solution()
    test_unscale_round_trip()
    print("所有 Ruiz 缩放测试通过!")
