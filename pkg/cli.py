#!/usr/bin/env python3
"""
Hybrid KKT 求解器 - CLI 入口

退出码: 0 全部求解成功, 1 存在失败, 2 用法错误
"""

import functools
import logging

import click

from hybrid_kkt import __version__, __author__, __email__
from hybrid_kkt.exceptions import KktError
from hybrid_kkt.hybrid_solver import load_solver_config
from hybrid_kkt.logging_config import configure_logging
from hybrid_kkt.synthetic import GeneratorSpec, IndefinitenessClass
from tools.data_loader import DataLoader
from tools.kkt_solver_adapter import (
    compare_orderings,
    run_generate,
    run_solve,
    run_sweep_gamma,
    summarize_run,
)
from tools.output_formatter import OutputFormatter

logger = logging.getLogger("tools.cli")


def show_version(ctx: click.Context, _param, value: bool):
    """显示版本信息"""
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"hybrid-kkt v{__version__}")
    click.echo("Hybrid direct-iterative solver for sequences of sparse KKT systems")
    click.echo(f"Author: {__author__}")
    click.echo(f"Email: {__email__}")
    ctx.exit()


def solver_options(func):
    """solve 与 sweep-gamma 共用的求解器参数"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                     help="YAML/JSON 配置文件"),
        click.option("--gamma", type=float, help="γ (默认 1e4)"),
        click.option("--delta-min", type=float, help="δ₁ 阶梯起始值"),
        click.option("--delta-max", type=float, help="δ₁ 上限"),
        click.option("--delta2", type=float, help="Schur 系统重启时的 δ₂"),
        click.option("--cg-tol", type=float, help="CG 相对残差容差"),
        click.option("--cg-max-iter", type=int, help="CG 最大迭代次数"),
        click.option("--pivot-floor", type=float, help="相对主元下限"),
        click.option("--ruiz-tol", type=float, help="Ruiz 行范数容差"),
        click.option("--ordering", type=click.Choice(["amd", "rcm", "natural"]), help="填充缩减排序"),
        click.option("--gamma-rule", type=click.Choice(["fixed", "golub_greif"]), help="γ 的取法"),
        click.option("--no-ruiz", is_flag=True, help="跳过 Ruiz 缩放"),
        click.option("--parallel", is_flag=True, help="各矩阵并行求解 (不传递 δ_min)"),
        click.option("--n-jobs", type=int, help="并行线程数"),
        click.option("--out", "out_dir", type=click.Path(file_okay=False), default="out", show_default=True,
                     help="输出目录"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _build_config(config_path, no_ruiz: bool, parallel: bool, **flags):
    overrides = dict(flags)
    if no_ruiz:
        overrides["use_ruiz"] = False
    if parallel:
        overrides["parallel_sequence"] = True
    try:
        return load_solver_config(config_path, overrides)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


def _load_nonempty(manifest: str):
    try:
        seq = DataLoader.load_sequence(manifest)
    except (KktError, OSError, ValueError) as exc:
        raise click.BadParameter(str(exc), param_hint="MANIFEST") from exc
    if len(seq) == 0:
        raise click.BadParameter(f"清单中没有系统: {manifest}", param_hint="MANIFEST")
    return seq


def _load_run(run_manifest: str):
    try:
        return DataLoader.load_run_manifest(run_manifest)
    except (KktError, OSError, ValueError) as exc:
        raise click.BadParameter(str(exc), param_hint="RUN_MANIFEST") from exc


def _handle_kkt_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (KktError, FileNotFoundError) as exc:
            raise click.ClickException(str(exc)) from exc
    return wrapper


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--version", is_flag=True, callback=show_version, expose_value=False, is_eager=True,
              help="显示版本信息")
@click.option("--verbose", is_flag=True, help="启用详细日志输出 (DEBUG)")
def main(verbose: bool):
    """Hybrid KKT - 稀疏 KKT 系统序列的混合直接-迭代求解器"""
    configure_logging("DEBUG" if verbose else None)


@main.command("gen")
@click.option("--n-x", type=int, required=True, help="原始变量个数")
@click.option("--m-c", type=int, required=True, help="等式约束个数")
@click.option("--m-d", type=int, required=True, help="不等式约束个数")
@click.option("--indefiniteness", type=click.Choice([c.value for c in IndefinitenessClass]),
              default=IndefinitenessClass.SPD_ON_NULLSPACE.value, show_default=True)
@click.option("--length", "sequence_length", type=int, default=1, show_default=True, help="序列长度")
@click.option("--drift", type=float, default=1e-3, show_default=True, help="相邻矩阵的相对扰动")
@click.option("--graph-degree", type=int, default=4, show_default=True, help="底层图的度上界")
@click.option("--seed", type=int, default=0, show_default=True, help="随机种子")
@click.option("--name", default="synthetic", show_default=True, help="序列名称")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="out", show_default=True)
@_handle_kkt_errors
def gen_command(out_dir, name, **spec_fields):
    """生成合成 KKT 序列"""
    try:
        spec = GeneratorSpec(**spec_fields)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc
    click.echo(str(run_generate(spec, out_dir, name=name)))


@main.command("solve")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@solver_options
@_handle_kkt_errors
def solve_command(manifest, out_dir, config_path, no_ruiz, parallel, **flags):
    """求解清单中的序列, 写出 reports.csv 与 run_manifest.json"""
    cfg = _build_config(config_path, no_ruiz, parallel, **flags)
    seq = _load_nonempty(manifest)
    run = run_solve(seq, cfg, out_dir)
    click.echo(OutputFormatter.format_run_summary(summarize_run(run), "txt"))
    click.echo(f"reports: {run.outputs['reports_csv']}")
    if not run.all_succeeded:
        click.get_current_context().exit(1)


@main.command("sweep-gamma")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--gammas", required=True, help='γ 列表, 例如 "1e2,1e4,1e6"')
@solver_options
@_handle_kkt_errors
def sweep_gamma_command(manifest, gammas, out_dir, config_path, no_ruiz, parallel, **flags):
    """对每个 γ 求解整个序列, 写出 sweep.csv"""
    try:
        gamma_list = DataLoader.parse_gamma_list(gammas)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--gammas") from exc
    cfg = _build_config(config_path, no_ruiz, parallel, **flags)
    seq = _load_nonempty(manifest)
    run = run_sweep_gamma(seq, gamma_list, cfg, out_dir)
    click.echo(OutputFormatter.format_run_summary(summarize_run(run), "txt"))
    click.echo(f"sweep: {run.outputs['sweep_csv']}")
    if not run.all_succeeded:
        click.get_current_context().exit(1)


@main.command("report")
@click.argument("run_manifest", type=click.Path(exists=True))
@click.option("--format", "format_type", type=click.Choice(["txt", "markdown"]), default="txt", show_default=True)
@click.option("--save", "save_path", type=click.Path(dir_okay=False), help="另存为文件")
@_handle_kkt_errors
def report_command(run_manifest, format_type, save_path):
    """运行记录的文字摘要"""
    run = _load_run(run_manifest)
    text = OutputFormatter.format_run_summary(summarize_run(run), format_type)
    if save_path:
        OutputFormatter.save_to_file(text, save_path)
    click.echo(text)


@main.command("orderings")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="写出 orderings.csv 的目录")
@click.option("--format", "format_type", type=click.Choice(["txt", "markdown"]), default="txt", show_default=True)
@_handle_kkt_errors
def orderings_command(manifest, out_dir, format_type):
    """比较 AMD / RCM / 自然排序下 H_γ 因子的非零元个数"""
    df = compare_orderings(_load_nonempty(manifest), out_dir=out_dir)
    click.echo(OutputFormatter.format_report_table(df, format_type))


@main.command("serve")
def serve_command():
    """启动 MCP stdio 服务器"""
    from server import main as server_main
    server_main()


# 添加cli函数以匹配pyproject.toml中的入口点定义
cli = main

if __name__ == "__main__":
    main()
