"""
H_γ 组装与求解器配置测试脚本
"""

import sys
import os
import json
import tempfile
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.hybrid_solver import (
    SolverConfig,
    assemble_h_gamma,
    golub_greif_gamma,
    load_solver_config,
    shift_diagonal,
)
from hybrid_kkt.kkt_model import Reduced2x2, reduce
from hybrid_kkt.sparse_core import CompressedColumnMatrix, spmv, symmetric_spmv
from hybrid_kkt.tests.kkt_fixtures import random_block_system


def test_gamma_zero_is_passthrough():
    """测试 γ = 0 时 H_γ = H̃, r̂_x = r_x"""
    rng = np.random.default_rng(101)
    red = reduce(random_block_system(rng, n_x=20, m_c=5, m_d=4))
    hg = assemble_h_gamma(red, 0.0)

    assert np.array_equal(hg.H_gamma.to_dense(symmetric_lower=True), red.H_tilde.to_dense(symmetric_lower=True))
    assert np.array_equal(hg.r_hat_x, red.r_x)
    assert hg.gamma_used == 0.0
    print("  γ=0 测试通过")


def test_hand_expansion():
    """测试 H̃ = 0, J = [1 1], γ = 10⁴"""
    red = Reduced2x2(
        H_tilde=CompressedColumnMatrix.zeros(2, 2),
        J=CompressedColumnMatrix.from_dense([[1.0, 1.0]]),
        r_x=np.array([1.0, 2.0]),
        r_y=np.array([3.0]),
    )
    hg = assemble_h_gamma(red, 1e4)
    assert hg.H_gamma.to_dense(symmetric_lower=True).tolist() == [[1e4, 1e4], [1e4, 1e4]]
    assert hg.r_hat_x.tolist() == [1.0 + 3e4, 2.0 + 3e4]
    print("  手工展开测试通过")


def test_operator_identity_and_pattern():
    """测试 H_γ·v = H̃·v + γJᵀ(Jv), 且结构与 γ 无关"""
    rng = np.random.default_rng(103)
    red = reduce(random_block_system(rng, n_x=40, m_c=12, m_d=10))
    gamma = 1e4
    hg = assemble_h_gamma(red, gamma)
    for _ in range(20):
        v = rng.standard_normal(40)
        expected = symmetric_spmv(red.H_tilde, v) + gamma * spmv(red.J, spmv(red.J, v), transpose=True)
        got = symmetric_spmv(hg.H_gamma, v)
        assert np.linalg.norm(got - expected) <= 1e-12 * np.linalg.norm(expected)

    assert hg.H_gamma.same_pattern(assemble_h_gamma(red, 0.0).H_gamma), "结构不应依赖 γ"
    with pytest.raises(ValueError):
        assemble_h_gamma(red, -1.0)
    print("  算子恒等式与结构测试通过")


def test_shift_diagonal_and_golub_greif():
    """测试对角平移与 ‖H̃‖/‖J‖² 启发式"""
    A = CompressedColumnMatrix.diagonal([4.0, 4.0])
    assert shift_diagonal(A, 0.5).diagonal_values().tolist() == [4.5, 4.5]
    assert shift_diagonal(A, 0.0) is A
    with pytest.raises(ValueError):
        shift_diagonal(CompressedColumnMatrix.from_triplets([1], [0], [1.0], (2, 2)), 1.0)

    red = Reduced2x2(H_tilde=A, J=CompressedColumnMatrix.from_dense([[1.0, 1.0]]), r_x=np.zeros(2), r_y=np.zeros(1))
    assert golub_greif_gamma(red) == 1.0
    empty = Reduced2x2(H_tilde=A, J=CompressedColumnMatrix.zeros(0, 2), r_x=np.zeros(2), r_y=np.zeros(0))
    assert golub_greif_gamma(empty) == 0.0
    print("  对角平移与 γ 启发式测试通过")


def test_solver_config_validation():
    """测试配置校验与覆盖"""
    cfg = SolverConfig()
    assert (cfg.gamma, cfg.delta_min, cfg.delta_max, cfg.delta2) == (1e4, 1e-9, 1e-6, 1e-9)
    assert (cfg.cg_tol, cfg.cg_max_iter) == (1e-12, 500)

    with pytest.raises(ValueError):
        SolverConfig(delta_min=1e-5, delta_max=1e-6)
    with pytest.raises(ValueError):
        SolverConfig(gamma=-1.0)
    with pytest.raises(ValueError):
        SolverConfig(unknown_field=1)

    changed = cfg.with_overrides(gamma=1e6, delta2=None)
    assert changed.gamma == 1e6 and changed.delta2 == cfg.delta2
    print("  配置校验测试通过")


def test_load_solver_config(tmp_path):
    """测试 YAML/JSON 配置文件与覆盖项"""
    yaml_path = tmp_path / "solver.yaml"
    yaml_path.write_text("gamma: 100.0\ndelta_min: 1.0e-10\nordering: rcm\n", encoding="utf-8")
    cfg = load_solver_config(yaml_path, overrides={"cg_tol": 1e-10, "delta2": None})
    assert cfg.gamma == 100.0 and cfg.delta_min == 1e-10 and cfg.ordering == "rcm"
    assert cfg.cg_tol == 1e-10

    json_path = tmp_path / "solver.json"
    json_path.write_text(json.dumps({"use_ruiz": False}), encoding="utf-8")
    assert load_solver_config(json_path).use_ruiz is False

    bad = tmp_path / "bad.yaml"
    bad.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_solver_config(bad)
    assert load_solver_config() == SolverConfig()
    print("  配置文件测试通过")


if __name__ == "__main__":
    print("开始测试 H_γ 组装与配置...")
    test_gamma_zero_is_passthrough()
    test_hand_expansion()
    test_operator_identity_and_pattern()
    test_shift_diagonal_and_golub_greif()
    test_solver_config_validation()
    with tempfile.TemporaryDirectory() as tmp:
        test_load_solver_config(Path(tmp))
    print("所有 H_γ 与配置测试通过!")
