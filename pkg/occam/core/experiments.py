"""模拟实验框架

每个 (网格点, 重复) 拥有由 (主种子, 网格下标, 重复下标) 派生的独立随机数流，
因此输出与并行度无关；单行失败只记录状态，不中断整次扫描。
"""

import re
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from occam.core.exceptions import InvalidParameterError
from occam.core.fit import OccamEstimator, threshold_binary
from occam.core.metrics import exnvi, membership_error
from occam.core.model import planted_partition_b
from occam.core.sampler import generate_network, replication_rng
from occam.models.experiment import (
    CSV_SCHEMA_VERSION,
    ExperimentKind,
    ExperimentRow,
    ExperimentSpec,
    RowStatus,
)
from occam.models.generation import Allocation, SamplerConfig, ThetaLaw, preset_profile
from occam.models.options import OccamOptions
from occam.utils.config import get_settings
from occam.utils.io import FLOAT_FORMAT, read_edge_list, read_key_values, write_key_values, write_membership_csv
from occam.utils.logger import LoggerMixin

CTAU_GRID: Tuple[float, ...] = tuple(2.0 ** e for e in range(-12, 13, 2))
RHO_GRID: Tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(11))
N_GRID: Tuple[float, ...] = (250, 500, 1000, 2000)


def build_sampler_config(
    n: int,
    k: int = 3,
    rho: float = 0.1,
    profile: str = "A",
    theta: str = "nohub",
    degree: float = 40.0,
    seed: int = 0,
    allocation: str = "deterministic",
    alpha: Optional[float] = None,
    saturate: Optional[bool] = None,
) -> SamplerConfig:
    """由命令行风格的参数构造生成配置（植入划分 B）

    saturate 未指定时，枢纽分布启用边概率截断：n=500 时枢纽节点之间的 αM 会超过 1。
    """
    if saturate is None:
        saturate = theta == "hub"
    return SamplerConfig(
        n=int(n),
        k=int(k),
        profile=preset_profile(profile, k),
        theta_law=ThetaLaw.from_name(theta),
        b=planted_partition_b(int(k), float(rho)),
        target_degree=float(degree),
        seed=int(seed),
        allocation=Allocation(allocation),
        alpha=alpha,
        saturate=bool(saturate),
    )


class ExperimentRunner(LoggerMixin):
    """扫描实验执行器"""

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec

    def _configure(self, value: float) -> Tuple[SamplerConfig, OccamOptions]:
        spec = self.spec
        if spec.kind is ExperimentKind.CTAU_SWEEP:
            return spec.base, spec.opts.model_copy(update={"c_tau": float(value)})
        if spec.kind is ExperimentKind.RHO_SWEEP:
            return replace(spec.base, b=planted_partition_b(spec.base.k, float(value))), spec.opts
        if spec.kind is ExperimentKind.N_TREND:
            return replace(spec.base, n=int(value)), spec.opts
        raise InvalidParameterError(f"不支持扫描的实验类型: {spec.kind.value}")

    def run_row(self, grid_index: int, replication: int) -> ExperimentRow:
        """运行一个 (网格点, 重复)，异常记录为失败行"""
        value = float(self.spec.grid[grid_index])
        rng = replication_rng(self.spec.master_seed, grid_index, replication)
        start = time.perf_counter()
        try:
            config, opts = self._configure(value)
            network = generate_network(config, rng)
            opts = opts.model_copy(update={"seed": int(rng.integers(0, 2 ** 63 - 1))})
            result = OccamEstimator(opts).fit(network.a, config.k)

            cut = 1.0 / config.k
            score = exnvi(threshold_binary(network.params.z, cut), threshold_binary(result.z_hat, cut))
            row = ExperimentRow(
                grid_index=grid_index,
                swept_value=value,
                replication_index=replication,
                status=RowStatus.OK,
                exnvi=score.value,
                membership_error=membership_error(result.z_hat, network.params.z),
                alpha_hat=result.alpha_hat,
                tau=result.tau,
            )
        except Exception as e:
            self.logger.warning(f"第 {grid_index} 个网格点第 {replication} 次重复失败: {type(e).__name__}: {e}")
            row = ExperimentRow(
                grid_index=grid_index,
                swept_value=value,
                replication_index=replication,
                status=RowStatus.FAILED,
                error=f"{type(e).__name__}: {e}",
            )
        if self.spec.record_timing:
            row = replace(row, wall_time_ms=(time.perf_counter() - start) * 1000)
        return row

    def run(self) -> List[ExperimentRow]:
        """并行运行全部重复，按 (网格下标, 重复下标) 排序返回"""
        spec = self.spec
        tasks = [(g, r) for g in range(len(spec.grid)) for r in range(spec.replications)]
        self.logger.info(
            f"开始实验 {spec.name or spec.kind.value}: {len(spec.grid)} 个网格点 × {spec.replications} 次重复，"
            f"并行数 {spec.workers}"
        )

        rows: Dict[Tuple[int, int], ExperimentRow] = {}
        progress = tqdm(total=len(tasks), disable=not spec.show_progress, desc=spec.name or spec.kind.value)
        try:
            if spec.workers == 1:
                for task in tasks:
                    rows[task] = self.run_row(*task)
                    progress.update(1)
            else:
                with ThreadPoolExecutor(max_workers=spec.workers) as executor:
                    futures = {executor.submit(self.run_row, *task): task for task in tasks}
                    for future in as_completed(futures):
                        rows[futures[future]] = future.result()
                        progress.update(1)
        finally:
            progress.close()

        ordered = [rows[task] for task in tasks]
        failed = sum(row.failed for row in ordered)
        self.logger.info(f"实验完成: 共 {len(ordered)} 行，失败 {failed} 行")

        if spec.output_path is not None:
            write_rows_csv(ordered, spec.output_path, kind=spec.kind, include_timing=spec.record_timing)
        return ordered


def _run_kind(spec: ExperimentSpec, kind: ExperimentKind) -> List[ExperimentRow]:
    if spec.kind is not kind:
        raise InvalidParameterError(f"实验类型应为 {kind.value}，实际 {spec.kind.value}")
    return ExperimentRunner(spec).run()


def run_ctau_sweep(spec: ExperimentSpec) -> List[ExperimentRow]:
    """C_τ 扫描: 每个常数与重复各生成一张图并拟合"""
    return _run_kind(spec, ExperimentKind.CTAU_SWEEP)


def run_rho_sweep(spec: ExperimentSpec) -> List[ExperimentRow]:
    """ρ 扫描: 植入划分的社区间连接强度"""
    return _run_kind(spec, ExperimentKind.RHO_SWEEP)


def run_n_trend(spec: ExperimentSpec) -> List[ExperimentRow]:
    """节点数趋势: 固定其余设置，记录隶属误差随 n 的变化"""
    return _run_kind(spec, ExperimentKind.N_TREND)


def run_single_fit(
    graph_path: Union[str, Path],
    k: int,
    opts: Optional[OccamOptions] = None,
    output_dir: Union[str, Path] = ".",
) -> Dict[str, Path]:
    """对边列表文件拟合 OCCAM，写出 Ẑ、Γ̂ 与元数据

    Returns:
        各输出文件路径
    """
    a = read_edge_list(graph_path)
    result = OccamEstimator(opts).fit(a, k)
    output_dir = Path(output_dir)
    paths = {
        "z_hat": output_dir / "z_hat.csv",
        "gamma_hat": output_dir / "gamma_hat.csv",
        "metadata": output_dir / "metadata.txt",
    }
    write_membership_csv(result.z_hat, paths["z_hat"])
    write_membership_csv(result.binary, paths["gamma_hat"])
    write_key_values(result.metadata(), paths["metadata"])
    return paths


def rows_to_frame(rows: Sequence[ExperimentRow], include_timing: bool = False) -> pd.DataFrame:
    return pd.DataFrame([row.to_record(include_timing) for row in rows])


def write_rows_csv(
    rows: Sequence[ExperimentRow],
    path: Union[str, Path],
    kind: Optional[ExperimentKind] = None,
    include_timing: bool = False,
) -> None:
    """写出结果 CSV，首行为版本注释 "# schema=1" """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"# schema={CSV_SCHEMA_VERSION}"
    if kind is not None:
        header += f" kind={kind.value}"
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(header + "\n")
        rows_to_frame(rows, include_timing).to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def summarize_rows(rows: Sequence[ExperimentRow]) -> pd.DataFrame:
    """按扫描值汇总: 均值、标准差、成功数与失败数，供绘图使用"""
    frame = rows_to_frame(rows)
    grouped = frame.groupby("swept_value", sort=True)
    summary = grouped.agg(
        exnvi_mean=("exnvi", "mean"),
        exnvi_std=("exnvi", "std"),
        membership_error_mean=("membership_error", "mean"),
        membership_error_std=("membership_error", "std"),
        count=("exnvi", "count"),
    )
    summary["failed"] = grouped["status"].apply(lambda s: int((s == RowStatus.FAILED.value).sum()))
    return summary.reset_index()


def write_summary_csv(rows: Sequence[ExperimentRow], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# schema={CSV_SCHEMA_VERSION} summary\n")
        summarize_rows(rows).to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


_FIG1 = re.compile(r"^fig1-n(?P<n>500|2000)-rho(?P<rho>0\.1|0\.25)-(?P<theta>nohub|hub)-d(?P<degree>20|40)$")
_FIG2 = re.compile(r"^fig2-(?P<profile>A|B|A-caption)-d(?P<degree>20|40)-(?P<theta>nohub|hub)$")


def preset_names() -> List[str]:
    """全部预设名称"""
    names = [
        f"fig1-n{n}-rho{rho}-{theta}-d{d}"
        for n in (500, 2000)
        for rho in ("0.1", "0.25")
        for theta in ("nohub", "hub")
        for d in (20, 40)
    ]
    names += [
        f"fig2-{profile}-d{d}-{theta}"
        for profile in ("A", "B", "A-caption")
        for d in (20, 40)
        for theta in ("nohub", "hub")
    ]
    names.append("trend-n-default")
    return names


def get_preset(
    name: str,
    replications: Optional[int] = None,
    master_seed: Optional[int] = None,
    output_path: Optional[Union[str, Path]] = None,
) -> ExperimentSpec:
    """按名称构造预设实验

    Raises:
        InvalidParameterError: 未知预设
    """
    settings = get_settings().experiments
    seed = settings.master_seed if master_seed is None else master_seed
    common = dict(
        master_seed=seed,
        output_path=Path(output_path) if output_path is not None else None,
        workers=settings.workers,
        record_timing=settings.record_timing,
        show_progress=settings.show_progress,
        name=name,
    )

    match = _FIG1.match(name)
    if match:
        base = build_sampler_config(
            n=int(match["n"]), rho=float(match["rho"]), theta=match["theta"], degree=float(match["degree"])
        )
        return ExperimentSpec(
            kind=ExperimentKind.CTAU_SWEEP,
            grid=CTAU_GRID,
            replications=replications or settings.ctau_replications,
            base=base,
            opts=OccamOptions(),
            **common,
        )

    match = _FIG2.match(name)
    if match:
        base = build_sampler_config(
            n=500, rho=0.0, profile=match["profile"], theta=match["theta"], degree=float(match["degree"])
        )
        return ExperimentSpec(
            kind=ExperimentKind.RHO_SWEEP,
            grid=RHO_GRID,
            replications=replications or settings.rho_replications,
            base=base,
            opts=OccamOptions(c_tau=0.1),
            **common,
        )

    if name == "trend-n-default":
        return ExperimentSpec(
            kind=ExperimentKind.N_TREND,
            grid=N_GRID,
            replications=replications or settings.trend_replications,
            base=build_sampler_config(n=int(N_GRID[0]), rho=0.1, profile="A", theta="nohub", degree=40.0),
            opts=OccamOptions(),
            **common,
        )

    raise InvalidParameterError(f"未知的预设: {name}")


def _parse_grid(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise InvalidParameterError(f"无法解析网格: {text!r}") from None


def _parse_bool(text: str) -> bool:
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def spec_from_key_values(values: Mapping[str, str]) -> ExperimentSpec:
    """由 key=value 字典构造实验，未给出的项取配置默认值

    支持的键: kind, grid, replications, n, k, rho, profile, theta, degree, alpha,
    allocation, saturate, c_tau, tau, master_seed, output, workers, timing, name。
    """
    settings = get_settings()
    if "kind" not in values:
        raise InvalidParameterError("实验描述缺少 kind")
    try:
        kind = ExperimentKind(values["kind"])
    except ValueError:
        raise InvalidParameterError(f"未知的实验类型: {values['kind']}") from None
    if kind is ExperimentKind.SINGLE_FIT:
        raise InvalidParameterError("单次拟合请使用 fit 子命令")

    sampler = settings.sampler
    base = build_sampler_config(
        n=int(values.get("n", sampler.n)),
        k=int(values.get("k", sampler.k)),
        rho=float(values.get("rho", sampler.rho)),
        profile=values.get("profile", sampler.profile),
        theta=values.get("theta", sampler.theta),
        degree=float(values.get("degree", sampler.degree)),
        allocation=values.get("allocation", sampler.allocation),
        alpha=float(values["alpha"]) if "alpha" in values else None,
        saturate=_parse_bool(values["saturate"]) if "saturate" in values else None,
    )
    opts = OccamOptions(
        c_tau=float(values.get("c_tau", settings.fit.c_tau)),
        tau_override=float(values["tau"]) if "tau" in values else None,
    )

    default_grid = {ExperimentKind.CTAU_SWEEP: CTAU_GRID, ExperimentKind.RHO_SWEEP: RHO_GRID, ExperimentKind.N_TREND: N_GRID}
    default_reps = {
        ExperimentKind.CTAU_SWEEP: settings.experiments.ctau_replications,
        ExperimentKind.RHO_SWEEP: settings.experiments.rho_replications,
        ExperimentKind.N_TREND: settings.experiments.trend_replications,
    }
    return ExperimentSpec(
        kind=kind,
        grid=_parse_grid(values["grid"]) if "grid" in values else default_grid[kind],
        replications=int(values.get("replications", default_reps[kind])),
        base=base,
        opts=opts,
        master_seed=int(values.get("master_seed", settings.experiments.master_seed)),
        output_path=Path(values["output"]) if "output" in values else None,
        workers=int(values.get("workers", settings.experiments.workers)),
        record_timing=_parse_bool(values.get("timing", str(settings.experiments.record_timing))),
        show_progress=settings.experiments.show_progress,
        name=values.get("name", ""),
    )


def load_spec(path: Union[str, Path]) -> ExperimentSpec:
    """读取 key=value 实验描述文件"""
    return spec_from_key_values(read_key_values(path))


def mean_by_value(rows: Sequence[ExperimentRow], column: str) -> Dict[float, float]:
    """成功行按扫描值求均值"""
    values: Dict[float, List[float]] = {}
    for row in rows:
        if not row.failed:
            values.setdefault(row.swept_value, []).append(getattr(row, column))
    return {key: float(np.mean(v)) for key, v in values.items()}
