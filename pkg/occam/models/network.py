"""网络与模型参数数据结构

所有类型构造后不可变：内部数组是只读副本。
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from occam.core.exceptions import DimensionMismatch, InvalidParameterError


def frozen_array(values, dtype=float, ndim: int = 2) -> np.ndarray:
    """复制为只读数组并检查维数"""
    array = np.array(values, dtype=dtype, copy=True)
    if array.ndim != ndim:
        raise InvalidParameterError(f"期望 {ndim} 维数组，实际为 {array.ndim} 维")
    array.setflags(write=False)
    return array


def _require_square(array: np.ndarray, what: str) -> None:
    if array.shape[0] != array.shape[1]:
        raise InvalidParameterError(f"{what} 必须是方阵，实际形状 {array.shape}")


@dataclass(frozen=True)
class ConnectivityMatrix:
    """社区连接矩阵 B (K×K)"""
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", frozen_array(self.entries))
        _require_square(self.entries, "连接矩阵")

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        """升序特征值"""
        return np.linalg.eigvalsh((self.entries + self.entries.T) / 2)


@dataclass(frozen=True)
class MembershipMatrix:
    """连续社区隶属矩阵 Z (n×K)，行非负且 L2 范数为 1"""
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", frozen_array(self.entries))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def k(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class DegreeParams:
    """度修正参数 θ (长度 n)"""
    theta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", frozen_array(self.theta, ndim=1))

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def mean(self) -> float:
        return float(self.theta.mean())


@dataclass(frozen=True)
class ModelParams:
    """完整的 OCCAM 参数 (α, Θ, Z, B)"""
    alpha: float
    theta: DegreeParams
    z: MembershipMatrix
    b: ConnectivityMatrix

    def __post_init__(self):
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise InvalidParameterError(f"α 必须是非负有限数: {self.alpha}")
        if self.theta.n != self.z.n:
            raise DimensionMismatch(f"θ 长度 {self.theta.n} 与 Z 行数 {self.z.n} 不一致")
        if self.z.k != self.b.k:
            raise DimensionMismatch(f"Z 列数 {self.z.k} 与 B 维数 {self.b.k} 不一致")

    @property
    def n(self) -> int:
        return self.z.n

    @property
    def k(self) -> int:
        return self.b.k

    def normalized(self) -> "ModelParams":
        """返回 mean(θ)=1 的等价参数化，α 乘以 mean(θ)²，W 不变"""
        scale = self.theta.mean
        if scale <= 0:
            raise InvalidParameterError("θ 均值必须为正才能归一化")
        return ModelParams(
            alpha=self.alpha * scale ** 2,
            theta=DegreeParams(self.theta.theta / scale),
            z=self.z,
            b=self.b,
        )

    def latent_positions(self) -> np.ndarray:
        """总体节点位置 X = √α Θ Z B^{1/2}"""
        from occam.core.model import sqrt_psd

        weighted = self.theta.theta[:, None] * self.z.entries
        return np.sqrt(self.alpha) * weighted @ sqrt_psd(self.b.entries)


@dataclass(frozen=True)
class AdjacencyMatrix:
    """观测到的无向简单图邻接矩阵"""
    entries: np.ndarray

    def __post_init__(self):
        raw = np.asarray(self.entries)
        if raw.size and not np.isin(raw, (0, 1)).all():
            raise InvalidParameterError("邻接矩阵必须是 0/1 矩阵")
        array = frozen_array(raw, dtype=np.uint8)
        _require_square(array, "邻接矩阵")
        if not np.array_equal(array, array.T):
            raise InvalidParameterError("邻接矩阵必须对称")
        if np.any(np.diag(array)):
            raise InvalidParameterError("邻接矩阵对角线必须为 0")
        object.__setattr__(self, "entries", array)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.entries.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.entries.sum(axis=1).astype(np.int64)


@dataclass(frozen=True)
class EdgeProbabilityMatrix:
    """期望边概率矩阵 W = E(A)"""
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", frozen_array(self.entries))
        _require_square(self.entries, "边概率矩阵")

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class BinaryMembership:
    """二值社区指示矩阵 Γ (n×K)"""
    gamma: np.ndarray

    def __post_init__(self):
        array = frozen_array(self.gamma, dtype=np.uint8)
        if array.max(initial=0) > 1:
            raise InvalidParameterError("二值隶属矩阵元素必须为 0 或 1")
        object.__setattr__(self, "gamma", array)

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @property
    def k(self) -> int:
        return self.gamma.shape[1]


GraphMatrix = Union[AdjacencyMatrix, EdgeProbabilityMatrix, np.ndarray]


def as_matrix(value) -> np.ndarray:
    """取出任意矩阵类型的底层数组"""
    if isinstance(value, (AdjacencyMatrix, EdgeProbabilityMatrix, MembershipMatrix, ConnectivityMatrix)):
        return value.entries
    if isinstance(value, BinaryMembership):
        return value.gamma
    return np.asarray(value)
