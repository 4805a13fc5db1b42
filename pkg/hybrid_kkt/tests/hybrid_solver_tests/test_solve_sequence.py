"""
系统序列求解测试脚本: 符号分解复用、δ_min 传递与失败隔离
"""

import sys
import os
import tempfile
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.hybrid_solver import SolverConfig, SolveStatus, solve_full, solve_sequence
from hybrid_kkt.hybrid_solver.hybrid_solve import solve_reduced
from hybrid_kkt.kkt_model import load_sequence, write_sequence
from hybrid_kkt.sparse_core import NumericCholesky, analyze, numeric_cholesky
from hybrid_kkt.tests.kkt_fixtures import reconstruction_error
from hybrid_kkt.synthetic import GeneratorSpec, IndefinitenessClass, generate_sequence


def spd_sequence(length: int = 10, seed: int = 11):
    return generate_sequence(GeneratorSpec(n_x=60, m_c=10, m_d=15, sequence_length=length, seed=seed))


def test_single_symbolic_analysis_for_uniform_sequence():
    """测试 10 个同结构矩阵只做 1 次符号分析、10 次数值分解"""
    systems = spd_sequence()
    factorizations = []

    def recording_cholesky(H_delta, symbolic, **kwargs):
        outcome = numeric_cholesky(H_delta, symbolic, **kwargs)
        factorizations.append((H_delta, outcome))
        return outcome

    with patch("hybrid_kkt.hybrid_solver.hybrid_solve.analyze", wraps=analyze) as analyze_spy, \
            patch("hybrid_kkt.hybrid_solver.regularization.numeric_cholesky", side_effect=recording_cholesky):
        reports = solve_sequence(systems, SolverConfig())

    assert analyze_spy.call_count == 1
    assert len(factorizations) == 10
    for H_delta, outcome in factorizations:
        assert isinstance(outcome, NumericCholesky)
        assert reconstruction_error(outcome, H_delta) <= 1e-12
    assert [r.index for r in reports] == list(range(10))
    assert all(r.status == SolveStatus.SOLVED for r in reports)
    assert [r.symbolic_reused for r in reports] == [False] + [True] * 9
    assert max(r.be_4x4 for r in reports) <= 1e-8
    print("  符号分解复用测试通过")


def test_failure_does_not_stop_sequence():
    """测试第 5 个矩阵失败后其余矩阵照常求解"""
    systems = spd_sequence()
    indefinite = generate_sequence(GeneratorSpec(
        n_x=60, m_c=10, m_d=15, sequence_length=10, seed=11, indefiniteness=IndefinitenessClass.INDEFINITE
    ))
    assert indefinite[5].H.same_pattern(systems[5].H)
    systems[5] = indefinite[5]

    cfg = SolverConfig()
    reports = solve_sequence(systems, cfg)
    statuses = [r.status for r in reports]
    assert statuses[5] == SolveStatus.FAILED_DELTA_MAX_EXCEEDED
    assert statuses[:5] == [SolveStatus.SOLVED] * 5
    assert statuses[6:] == [SolveStatus.SOLVED] * 4
    assert reports[5].factorization_attempts == 11
    # 后续正定矩阵不受放大的 δ_min_current 影响
    assert all(r.delta1_final == 0.0 for r in reports[6:])
    assert all(r.symbolic_reused for r in reports[6:])
    print("  失败隔离测试通过")


def test_unexpected_error_does_not_stop_sequence():
    """测试某个矩阵抛出 LinAlgError 时记为 Failed, 其余矩阵照常求解"""
    systems = spd_sequence(length=3, seed=23)
    calls = []

    def flaky_solve_reduced(*args, **kwargs):
        calls.append(1)
        if len(calls) == 2:
            raise np.linalg.LinAlgError("矩阵奇异")
        return solve_reduced(*args, **kwargs)

    with patch("hybrid_kkt.hybrid_solver.hybrid_solve.solve_reduced", side_effect=flaky_solve_reduced):
        reports = solve_sequence(systems, SolverConfig())

    assert [r.index for r in reports] == [0, 1, 2]
    assert [r.status for r in reports] == [SolveStatus.SOLVED, SolveStatus.FAILED, SolveStatus.SOLVED]
    assert "矩阵奇异" in reports[1].message
    assert reports[1].be_4x4 is None
    assert reports[2].symbolic_reused
    print("  意外异常隔离测试通过")


def test_unexpected_error_in_parallel_mode():
    """测试并行模式下意外异常同样转为 Failed 报告"""
    systems = spd_sequence(length=3, seed=29)
    with patch("hybrid_kkt.hybrid_solver.hybrid_solve.recover", side_effect=FloatingPointError("溢出")):
        reports = solve_sequence(systems, SolverConfig(parallel_sequence=True, n_jobs=2))
    assert len(reports) == 3
    assert all(r.status == SolveStatus.FAILED for r in reports)
    print("  并行意外异常测试通过")


def test_single_matrix_sequence_matches_solve_full():
    """测试长度为 1 的序列与单独求解一致"""
    systems = spd_sequence(length=1, seed=13)
    cfg = SolverConfig()
    [report] = solve_sequence(systems, cfg)
    direct = solve_full(systems[0], cfg).report
    assert report.status == direct.status
    assert report.cg_iterations == direct.cg_iterations
    assert report.be_4x4 == direct.be_4x4
    print("  单矩阵序列测试通过")


def test_empty_sequence_rejected():
    """测试空序列抛出 ValueError"""
    with pytest.raises(ValueError):
        solve_sequence([], SolverConfig())
    print("  空序列测试通过")


def test_parallel_matches_sequential():
    """测试并行模式与顺序模式结果一致"""
    systems = spd_sequence(length=6, seed=17)
    sequential = solve_sequence(systems, SolverConfig())
    parallel = solve_sequence(systems, SolverConfig(parallel_sequence=True, n_jobs=2))

    assert [r.index for r in parallel] == list(range(6))
    assert [r.status for r in parallel] == [r.status for r in sequential]
    assert all(r.symbolic_reused for r in parallel)
    assert np.allclose([r.be_4x4 for r in parallel], [r.be_4x4 for r in sequential], rtol=1e-6, atol=1e-15)
    print("  并行模式测试通过")


def test_loaded_sequence(tmp_path):
    """测试从清单加载的序列可直接求解"""
    seq = load_sequence(write_sequence(spd_sequence(length=3, seed=19), tmp_path, name="s"))
    reports = solve_sequence(seq, SolverConfig())
    assert len(reports) == 3
    assert all(r.status.succeeded for r in reports)
    print("  清单序列测试通过")


if __name__ == "__main__":
    print("开始测试序列求解...")
    test_single_symbolic_analysis_for_uniform_sequence()
    test_failure_does_not_stop_sequence()
    test_unexpected_error_does_not_stop_sequence()
    test_unexpected_error_in_parallel_mode()
    test_single_matrix_sequence_matches_solve_full()
    test_empty_sequence_rejected()
    test_parallel_matches_sequential()
    with tempfile.TemporaryDirectory() as tmp:
        test_loaded_sequence(Path(tmp))
    print("所有序列求解测试通过!")
