#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
OCCAM 命令行工具
提供合成网络生成、单图拟合、结果评估与模拟实验扫描
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from occam.core.exceptions import OccamError
from occam.core.experiments import (
    ExperimentRunner,
    build_sampler_config,
    get_preset,
    preset_names,
    run_single_fit,
    spec_from_key_values,
    write_summary_csv,
)
from occam.core.fit import threshold_binary
from occam.core.metrics import exnvi, membership_error
from occam.core.sampler import generate_network
from occam.models.experiment import ExperimentKind, ExperimentSpec
from occam.models.generation import profile_names
from occam.models.network import MembershipMatrix
from occam.models.options import OccamOptions
from occam.utils.config import get_settings
from occam.utils.io import (
    read_key_values,
    read_membership_csv,
    write_edge_list,
    write_key_values,
    write_membership_csv,
)
from occam.utils.logger import get_logger, set_level

logger = get_logger("occam.cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILED_ROWS = 2


class CliParser(argparse.ArgumentParser):
    """用法错误以退出码 1 结束"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: 错误: {message}\n")


class OccamCLI:
    """OCCAM 命令行"""

    def generate(self, args: argparse.Namespace) -> int:
        """生成合成网络并写出边列表、Z、Γ 与元数据"""
        config = build_sampler_config(
            n=args.n,
            k=args.k,
            rho=args.rho,
            profile=args.profile,
            theta=args.theta,
            degree=args.degree,
            seed=args.seed,
            allocation=args.allocation,
            alpha=args.alpha,
            saturate=args.saturate,
        )
        network = generate_network(config)
        out = Path(args.out)
        write_edge_list(network.a, out / "edges.txt")
        write_membership_csv(network.params.z, out / "z.csv")
        write_membership_csv(threshold_binary(network.params.z, 1.0 / config.k), out / "gamma.csv")
        write_membership_csv(network.params.theta.theta[:, None], out / "theta.csv")
        write_key_values(
            {
                "n": config.n,
                "k": config.k,
                "rho": args.rho,
                "profile": args.profile,
                "theta": args.theta,
                "degree": args.degree,
                "seed": args.seed,
                "alpha": repr(network.params.alpha),
                "saturate": config.saturate,
                "edges": network.a.edge_count,
            },
            out / "metadata.txt",
        )
        logger.info(f"已生成网络: n={config.n}, 边数={network.a.edge_count}，输出目录 {out}")
        return EXIT_OK

    def fit(self, args: argparse.Namespace) -> int:
        """对边列表拟合 OCCAM"""
        opts = OccamOptions(**_option_overrides(args))
        paths = run_single_fit(args.graph, args.k, opts, args.out)
        for name, path in paths.items():
            print(f"{name}={path}")
        return EXIT_OK

    def evaluate(self, args: argparse.Namespace) -> int:
        """评估两个隶属矩阵 CSV；连续矩阵先按阈值二值化"""
        truth = read_membership_csv(args.truth)
        estimate = read_membership_csv(args.estimate)
        k = truth.shape[1]
        cut = args.threshold if args.threshold is not None else 1.0 / k

        def binarize(values: np.ndarray) -> np.ndarray:
            if np.isin(values, (0.0, 1.0)).all():
                return values.astype(np.uint8)
            return threshold_binary(MembershipMatrix(values), cut)

        report: Dict[str, str] = {"exnvi": repr(exnvi(binarize(truth), binarize(estimate)).value)}
        report["membership_error"] = repr(membership_error(estimate, truth))
        for key, value in report.items():
            print(f"{key}={value}")
        return EXIT_OK

    def sweep(self, args: argparse.Namespace, kind: ExperimentKind) -> int:
        """运行扫描实验；存在失败行时返回退出码 2"""
        spec = _resolve_spec(args, kind)
        rows = ExperimentRunner(spec).run()
        if args.summary:
            write_summary_csv(rows, args.summary)
        failed = sum(row.failed for row in rows)
        if failed:
            logger.warning(f"{failed} 行失败，详见输出文件的 error 列")
            return EXIT_FAILED_ROWS
        return EXIT_OK


def _option_overrides(args: argparse.Namespace) -> Dict[str, object]:
    overrides: Dict[str, object] = {}
    if getattr(args, "c_tau", None) is not None:
        overrides["c_tau"] = args.c_tau
    if getattr(args, "tau", None) is not None:
        overrides["tau_override"] = args.tau
    if getattr(args, "threshold", None) is not None:
        overrides["threshold"] = args.threshold
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return overrides


_SWEEP_FLAGS = {
    "n": "n",
    "k": "k",
    "rho": "rho",
    "profile": "profile",
    "theta": "theta",
    "degree": "degree",
    "alpha": "alpha",
    "saturate": "saturate",
    "c_tau": "c_tau",
    "tau": "tau",
    "reps": "replications",
    "seed": "master_seed",
    "workers": "workers",
    "grid": "grid",
}


def _resolve_spec(args: argparse.Namespace, kind: ExperimentKind) -> ExperimentSpec:
    """按 --preset / --spec / 命令行参数构造实验，命令行参数覆盖前两者"""
    if args.preset and args.spec:
        raise ValueError("--preset 与 --spec 不能同时使用")

    if args.preset:
        spec = get_preset(args.preset, replications=args.reps, master_seed=args.seed)
        if spec.kind is not kind:
            raise ValueError(f"预设 {args.preset} 的实验类型为 {spec.kind.value}，与子命令 {kind.value} 不符")
        updates: Dict[str, object] = {}
        if args.workers is not None:
            updates["workers"] = args.workers
        if args.c_tau is not None or args.tau is not None:
            updates["opts"] = spec.opts.model_copy(update=_option_overrides(argparse.Namespace(c_tau=args.c_tau, tau=args.tau)))
        spec = _replace_spec(spec, **updates)
    else:
        values = {} if not args.spec else read_key_values(args.spec)
        values["kind"] = kind.value
        for flag, key in _SWEEP_FLAGS.items():
            value = getattr(args, flag, None)
            if value is not None:
                values[key] = str(value)
        spec = spec_from_key_values(values)

    output = args.out or spec.output_path or Path(f"{spec.name or kind.value}.csv")
    return _replace_spec(
        spec,
        output_path=Path(output),
        record_timing=spec.record_timing or args.timing,
        show_progress=spec.show_progress and not args.no_progress,
    )


def _replace_spec(spec: ExperimentSpec, **updates) -> ExperimentSpec:
    return replace(spec, **updates) if updates else spec


def _add_model_flags(parser: argparse.ArgumentParser, defaults: bool) -> None:
    sampler = get_settings().sampler
    parser.add_argument("--n", type=int, default=sampler.n if defaults else None, help="节点数")
    parser.add_argument("--k", type=int, default=sampler.k if defaults else None, help="社区数")
    parser.add_argument("--rho", type=float, default=sampler.rho if defaults else None, help="植入划分的社区间连接 ρ")
    parser.add_argument("--profile", choices=profile_names(), default=sampler.profile if defaults else None,
                        help="重叠结构预设，pure 为无重叠")
    parser.add_argument("--theta", choices=["nohub", "hub"], default=sampler.theta if defaults else None,
                        help="度修正分布：无枢纽或 20%% 枢纽节点")
    parser.add_argument("--degree", type=float, default=sampler.degree if defaults else None, help="目标平均度")
    parser.add_argument("--alpha", type=float, default=None, help="直接指定 α，跳过平均度校准")
    parser.add_argument("--saturate", action=argparse.BooleanOptionalAction, default=None,
                        help="边概率截断为 min(αM, 1)，默认仅枢纽分布启用")


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    settings = get_settings()
    parser = CliParser(prog="occam", description="OCCAM 重叠连续社区分配模型工具")
    parser.add_argument("--log-level", default=None, choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="日志级别")
    subparsers = parser.add_subparsers(dest="command", help="可用命令")

    # generate 命令
    generate_parser = subparsers.add_parser("generate", help="生成合成网络")
    _add_model_flags(generate_parser, defaults=True)
    generate_parser.add_argument("--allocation", choices=["deterministic", "multinomial"],
                                 default=settings.sampler.allocation, help="节点分配方式")
    generate_parser.add_argument("--seed", type=int, default=0, help="随机种子")
    generate_parser.add_argument("--out", default="network", help="输出目录")

    # fit 命令
    fit_parser = subparsers.add_parser("fit", help="对边列表文件拟合 OCCAM")
    fit_parser.add_argument("--graph", required=True, help="边列表文件（0 起始的 'i j'）")
    fit_parser.add_argument("--k", type=int, required=True, help="社区数")
    fit_parser.add_argument("--c-tau", dest="c_tau", type=float, default=None, help="正则化常数 C_τ")
    fit_parser.add_argument("--tau", type=float, default=None, help="直接指定 τ")
    fit_parser.add_argument("--threshold", type=float, default=None, help="二值化阈值，默认 1/K")
    fit_parser.add_argument("--seed", type=int, default=None, help="随机种子")
    fit_parser.add_argument("--out", default="fit", help="输出目录")

    # eval 命令
    eval_parser = subparsers.add_parser("eval", help="计算 exNVI 与隶属误差")
    eval_parser.add_argument("--truth", required=True, help="真实隶属矩阵 CSV")
    eval_parser.add_argument("--estimate", required=True, help="估计隶属矩阵 CSV")
    eval_parser.add_argument("--threshold", type=float, default=None, help="连续矩阵的二值化阈值，默认 1/K")

    # 扫描命令
    experiments = settings.experiments
    sweep_help = {
        "sweep-ctau": f"C_τ 扫描（默认每点 {experiments.ctau_replications} 次重复）",
        "sweep-rho": f"ρ 扫描（默认每点 {experiments.rho_replications} 次重复）",
        "trend-n": f"节点数趋势（默认每点 {experiments.trend_replications} 次重复）",
    }
    for command, text in sweep_help.items():
        sweep_parser = subparsers.add_parser(command, help=text, description=text)
        sweep_parser.add_argument("--preset", choices=preset_names(), default=None, metavar="NAME",
                                  help="预设实验名称，如 fig1-n500-rho0.1-nohub-d40")
        sweep_parser.add_argument("--spec", default=None, help="key=value 实验描述文件")
        _add_model_flags(sweep_parser, defaults=False)
        sweep_parser.add_argument("--grid", default=None, help="逗号分隔的扫描值")
        sweep_parser.add_argument("--c-tau", dest="c_tau", type=float, default=None, help="正则化常数 C_τ")
        sweep_parser.add_argument("--tau", type=float, default=None, help="直接指定 τ")
        sweep_parser.add_argument("--reps", type=int, default=None, help="每个网格点的重复次数")
        sweep_parser.add_argument("--seed", type=int, default=None, help="主随机种子")
        sweep_parser.add_argument("--workers", type=int, default=None, help="并行线程数")
        sweep_parser.add_argument("--timing", action="store_true", help="在 CSV 中记录耗时")
        sweep_parser.add_argument("--no-progress", action="store_true", help="不显示进度条")
        sweep_parser.add_argument("--summary", default=None, help="额外写出按扫描值汇总的 CSV")
        sweep_parser.add_argument("--out", default=None, help="结果 CSV 路径")

    return parser


_SWEEP_KINDS = {
    "sweep-ctau": ExperimentKind.CTAU_SWEEP,
    "sweep-rho": ExperimentKind.RHO_SWEEP,
    "trend-n": ExperimentKind.N_TREND,
}


def main(argv: Optional[List[str]] = None) -> int:
    """主函数，返回退出码"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_USAGE
    if args.log_level:
        set_level(args.log_level)

    cli = OccamCLI()
    try:
        if args.command == "generate":
            return cli.generate(args)
        if args.command == "fit":
            return cli.fit(args)
        if args.command == "eval":
            return cli.evaluate(args)
        return cli.sweep(args, _SWEEP_KINDS[args.command])
    except KeyboardInterrupt:
        print("\n操作已取消", file=sys.stderr)
        return EXIT_USAGE
    except (OccamError, ValueError, FileNotFoundError) as e:
        print(f"执行失败: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
