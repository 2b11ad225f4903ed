"""计算结果数据模型"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from occam.models.network import MembershipMatrix, frozen_array


@dataclass(frozen=True)
class ConditionResult:
    """单个可识别性条件的检查结果"""
    name: str
    passed: bool
    details: Tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    """可识别性条件 I1–I3 的诊断报告"""
    conditions: Tuple[ConditionResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> ConditionResult:
        for condition in self.conditions:
            if condition.name == name:
                return condition
        raise KeyError(name)

    def failed(self) -> Tuple[str, ...]:
        return tuple(c.name for c in self.conditions if not c.passed)


@dataclass(frozen=True)
class EmbeddingMatrix:
    """邻接谱嵌入 X̂ = Û diag(√max(λ, 0))"""
    x_hat: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    deficient: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "x_hat", frozen_array(self.x_hat))
        object.__setattr__(self, "eigenvalues", frozen_array(self.eigenvalues, ndim=1))
        object.__setattr__(self, "eigenvectors", frozen_array(self.eigenvectors))

    @property
    def n(self) -> int:
        return self.x_hat.shape[0]

    @property
    def k(self) -> int:
        return self.x_hat.shape[1]

    def gram(self) -> np.ndarray:
        """X̂ X̂ᵀ，与特征向量的正交旋转无关"""
        return self.x_hat @ self.x_hat.T


@dataclass(frozen=True)
class NormalizedEmbedding:
    """正则化行归一化后的嵌入 X̂*_τ"""
    rows: np.ndarray
    tau: float

    def __post_init__(self):
        object.__setattr__(self, "rows", frozen_array(self.rows))


@dataclass(frozen=True)
class ClusteringResult:
    """K-medians 聚类结果"""
    centers: np.ndarray
    assignments: np.ndarray
    loss: float
    converged: bool
    restarts_used: int
    best_restart: int = 0
    loss_history: Tuple[float, ...] = ()
    restart_losses: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "centers", frozen_array(self.centers))
        object.__setattr__(self, "assignments", frozen_array(self.assignments, dtype=np.intp, ndim=1))


@dataclass(frozen=True)
class OccamResult:
    """OCCAM 估计结果"""
    z_hat: MembershipMatrix
    s_hat: np.ndarray
    x_hat: EmbeddingMatrix
    x_norm: NormalizedEmbedding
    tau: float
    alpha_hat: float
    threshold: float
    binary: Optional[np.ndarray] = None
    clustering: Optional[ClusteringResult] = None

    def __post_init__(self):
        object.__setattr__(self, "s_hat", frozen_array(self.s_hat))
        if self.binary is not None:
            object.__setattr__(self, "binary", frozen_array(self.binary, dtype=np.uint8))

    def metadata(self) -> Dict[str, str]:
        """扁平 key=value 元数据"""
        meta = {
            "n": str(self.z_hat.n),
            "k": str(self.z_hat.k),
            "alpha_hat": repr(self.alpha_hat),
            "tau": repr(self.tau),
            "threshold": repr(self.threshold),
            "eigenvalues": ",".join(repr(float(v)) for v in self.x_hat.eigenvalues),
            "deficient_columns": ",".join(str(c) for c in self.x_hat.deficient),
            "entropy_convention": "natural_log;degenerate_zero_if_joint_deterministic_else_one",
        }
        if self.clustering is not None:
            meta.update(
                loss=repr(self.clustering.loss),
                converged=str(self.clustering.converged).lower(),
                restarts_used=str(self.clustering.restarts_used),
            )
        return meta


@dataclass(frozen=True)
class ExnviBreakdown:
    """exNVI 结果及其逐社区分解"""
    value: float
    raw_value: float
    permutation: Tuple[int, ...]
    per_community: Tuple[Tuple[float, float], ...]
    cost: Optional[np.ndarray] = field(default=None, repr=False)
