"""模拟实验数据模型"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from occam.models.generation import SamplerConfig
from occam.models.options import OccamOptions

CSV_SCHEMA_VERSION = 1


class ExperimentKind(str, Enum):
    """实验类型"""
    CTAU_SWEEP = "sweep-ctau"
    RHO_SWEEP = "sweep-rho"
    N_TREND = "trend-n"
    SINGLE_FIT = "fit"


class RowStatus(str, Enum):
    """单次重复的运行状态"""
    OK = "ok"
    FAILED = "failed"


@dataclass(frozen=True)
class ExperimentSpec:
    """一次扫描实验的完整描述"""
    kind: ExperimentKind
    grid: Tuple[float, ...]
    replications: int
    base: SamplerConfig
    opts: OccamOptions
    master_seed: int
    output_path: Optional[Path] = None
    workers: int = 1
    record_timing: bool = False
    show_progress: bool = False
    name: str = ""

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError(f"重复次数必须至少为 1: {self.replications}")
        if not self.grid:
            raise ValueError("扫描网格不能为空")
        if self.workers < 1:
            raise ValueError(f"并行数必须至少为 1: {self.workers}")
        if self.kind is ExperimentKind.N_TREND and list(self.grid) != sorted(self.grid):
            raise ValueError("节点数网格必须递增")

    @property
    def row_count(self) -> int:
        return len(self.grid) * self.replications


@dataclass(frozen=True)
class ExperimentRow:
    """一个 (网格点, 重复) 的结果"""
    grid_index: int
    swept_value: float
    replication_index: int
    status: RowStatus
    exnvi: Optional[float] = None
    membership_error: Optional[float] = None
    alpha_hat: Optional[float] = None
    tau: Optional[float] = None
    wall_time_ms: Optional[float] = None
    error: str = ""

    @property
    def failed(self) -> bool:
        return self.status is RowStatus.FAILED

    def to_record(self, include_timing: bool = False) -> Dict[str, Any]:
        record: Dict[str, Any] = {
            "grid_index": self.grid_index,
            "swept_value": self.swept_value,
            "replication_index": self.replication_index,
            "status": self.status.value,
            "exnvi": self.exnvi,
            "membership_error": self.membership_error,
            "alpha_hat": self.alpha_hat,
            "tau": self.tau,
        }
        if include_timing:
            record["wall_time_ms"] = self.wall_time_ms
        record["error"] = self.error
        return record
