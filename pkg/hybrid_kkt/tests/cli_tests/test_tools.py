"""
适配器、注册中心与日志配置测试脚本
"""

import sys
import os
import asyncio
import json
import logging
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# 添加项目根目录到路径
sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..', '..'))

from hybrid_kkt.exceptions import ManifestError
from hybrid_kkt.hybrid_solver import SolverConfig
from hybrid_kkt.logging_config import LOG_ENV_VAR, configure_logging, resolve_log_level
from hybrid_kkt.synthetic import GeneratorSpec
from tools.data_loader import DataLoader
from tools.decorators import log_stage
from tools.kkt_solver_adapter import (
    RunManifest,
    generate_adapter,
    report_adapter,
    run_generate,
    run_solve,
    run_sweep_gamma,
    solve_adapter,
    summarize_run,
)
from tools.mcp_tool_groups.kkt_solver_tools import KktSolverTools
from tools.mcp_tools_registry import ToolRegistry
from tools.output_formatter import OutputFormatter

SPEC = GeneratorSpec(n_x=40, m_c=6, m_d=8, sequence_length=2, seed=13)
TOOL_NAMES = {
    "kkt_generate_sequence",
    "kkt_solve_sequence",
    "kkt_sweep_gamma",
    "kkt_run_report",
    "kkt_compare_orderings",
}


def test_registry_discovers_kkt_tools():
    """测试注册中心自动发现工具组"""
    registry = ToolRegistry()
    registry.auto_discover_groups()
    assert set(registry.get_tool_names()) == TOOL_NAMES
    assert {info["group"] for info in registry.get_all_tools().values()} == {KktSolverTools.name}
    assert "kkt_solve_sequence" in KktSolverTools.get_help_text()
    assert KktSolverTools.name in registry.get_help_text()
    print("  工具发现测试通过")


def test_run_manifest_round_trip(tmp_path):
    """测试运行清单写出后可原样读回"""
    manifest = run_generate(SPEC, tmp_path / "seq")
    run = run_solve(DataLoader.load_sequence(manifest), SolverConfig(), tmp_path / "run")
    loaded = DataLoader.load_run_manifest(tmp_path / "run" / "run_manifest.json")
    assert loaded == run
    assert RunManifest.model_validate_json(run.model_dump_json()) == run
    assert set(run.outputs) == {"reports_csv", "run_manifest"}
    print("  运行清单往返测试通过")


def test_load_run_manifest_errors(tmp_path):
    """测试运行清单的错误路径"""
    with pytest.raises(FileNotFoundError):
        DataLoader.load_run_manifest(tmp_path / "missing.json")
    bad = tmp_path / "run_manifest.json"
    bad.write_text(json.dumps({"command": "plot"}), encoding="utf-8")
    with pytest.raises(ManifestError):
        DataLoader.load_run_manifest(tmp_path)
    print("  运行清单错误测试通过")


def test_load_sequence_errors(tmp_path):
    """测试序列清单的错误路径"""
    with pytest.raises(FileNotFoundError):
        DataLoader.load_sequence(tmp_path / "none.json")
    other = tmp_path / "seq.txt"
    other.write_text("{}", encoding="utf-8")
    with pytest.raises(ValueError):
        DataLoader.load_sequence(other)
    empty = tmp_path / "empty.csv"
    empty.write_text("k,status\n", encoding="utf-8")
    with pytest.raises(ValueError):
        DataLoader.load_report_csv(empty)
    print("  序列加载错误测试通过")


def test_parse_gamma_list():
    """测试 γ 列表解析"""
    assert DataLoader.parse_gamma_list("1e2,1e4 1e6") == [1e2, 1e4, 1e6]
    assert DataLoader.parse_gamma_list(" 0 ") == [0.0]
    with pytest.raises(ValueError):
        DataLoader.parse_gamma_list(" , ")
    with pytest.raises(ValueError):
        DataLoader.parse_gamma_list("1e4,-1")
    print("  γ 列表解析测试通过")


def test_summarize_sweep_blocks(tmp_path):
    """测试扫描摘要按 γ 分块且统计量与报告一致"""
    manifest = run_generate(SPEC, tmp_path / "seq")
    run = run_sweep_gamma(DataLoader.load_sequence(manifest), [1e4, 1e6], SolverConfig(), tmp_path / "sweep")
    summaries = summarize_run(run)
    assert [s.gamma for s in summaries] == [1e4, 1e6]
    for summary in summaries:
        reports = [r for r in run.reports if r.gamma == summary.gamma]
        assert summary.n_matrices == 2
        assert summary.failures == 0
        assert summary.mean_cg_iterations == pytest.approx(np.mean([r.cg_iterations for r in reports]))
        assert summary.worst_be_4x4 == max(r.be_4x4 for r in reports)
        assert summary.delta1_histogram == {"0": 2}
        assert summary.mean_rho_c == pytest.approx(np.mean([r.density.rho_c for r in reports]))
    with pytest.raises(ValueError):
        run_sweep_gamma(DataLoader.load_sequence(manifest), [], SolverConfig(), tmp_path / "none")
    print("  扫描摘要测试通过")


def test_string_adapters(tmp_path):
    """测试 MCP 适配函数的 JSON 与文本输出"""
    generated = json.loads(generate_adapter(n_x=30, m_c=5, m_d=6, out_dir=str(tmp_path / "seq"), seed=3))
    manifest = generated["manifest_path"]
    assert generated["spec"]["n_x"] == 30

    as_json = json.loads(solve_adapter(manifest, str(tmp_path / "run"), overrides={"gamma": None, "cg_tol": 1e-10}))
    assert as_json["command"] == "solve"
    assert as_json["config"]["cg_tol"] == 1e-10
    assert as_json["config"]["gamma"] == 1e4

    save_path = tmp_path / "summary.txt"
    text = solve_adapter(manifest, str(tmp_path / "run"), output_format="txt", save_path=str(save_path))
    assert "failures: 0" in text
    assert save_path.exists()

    markdown = report_adapter(str(tmp_path / "run"))
    assert "| failures | 0 |" in markdown
    records = json.loads(report_adapter(str(tmp_path / "run"), output_format="json"))
    assert records[0]["n_matrices"] == 1
    print("  字符串适配测试通过")


def test_mcp_tool_handler(tmp_path):
    """测试异步工具处理器 (无上下文)"""
    manifest = run_generate(SPEC, tmp_path / "seq")
    result = asyncio.run(KktSolverTools.orderings_tool(str(manifest), output_format="json"))
    rows = json.loads(result)
    assert [row["k"] for row in rows] == [0, 1]
    with pytest.raises(FileNotFoundError):
        asyncio.run(KktSolverTools.report_tool(str(tmp_path / "nowhere")))
    print("  工具处理器测试通过")


def test_write_csv_format(tmp_path):
    """测试 CSV 浮点格式为 17 位有效数字且缺失值为空"""
    df = pd.DataFrame({"k": [0, 1], "be": [0.1, None]})
    path = OutputFormatter.write_csv(df, tmp_path / "out" / "t.csv")
    assert path.read_text(encoding="utf-8") == "k,be\n0,0.10000000000000001\n1,\n"
    print("  CSV 格式测试通过")


def test_log_stage_logs_elapsed(caplog):
    """测试阶段装饰器记录开始与耗时, 并保留返回值"""
    @log_stage("示例阶段")
    def work(x):
        return x * 2

    with caplog.at_level(logging.INFO, logger="tools.decorators"):
        assert work(21) == 42
    messages = [r.getMessage() for r in caplog.records]
    assert "[示例阶段] 开始" in messages
    assert any(m.startswith("[示例阶段] 结束, 耗时") for m in messages)
    print("  阶段日志测试通过")


def test_logging_level_resolution(monkeypatch):
    """测试日志级别解析与环境变量"""
    monkeypatch.setenv(LOG_ENV_VAR, "debug")
    assert resolve_log_level() == logging.DEBUG
    assert resolve_log_level("error") == logging.ERROR
    assert resolve_log_level(logging.INFO) == logging.INFO
    with pytest.raises(ValueError):
        resolve_log_level("chatty")

    configure_logging("INFO")
    configure_logging("INFO")
    handlers = [h for h in logging.getLogger().handlers if h.get_name() == "hybrid_kkt_stderr"]
    assert len(handlers) == 1
    assert logging.getLogger("hybrid_kkt").level == logging.INFO
    configure_logging("WARNING")
    print("  日志配置测试通过")


if __name__ == "__main__":
    print("开始测试适配器与注册中心...")
    test_registry_discovers_kkt_tools()
    test_parse_gamma_list()
    for test in (
        test_run_manifest_round_trip,
        test_load_run_manifest_errors,
        test_load_sequence_errors,
        test_summarize_sweep_blocks,
        test_string_adapters,
        test_mcp_tool_handler,
        test_write_csv_format,
    ):
        with tempfile.TemporaryDirectory() as tmp:
            test(Path(tmp))
    print("所有适配器测试通过!")
