"""合成网络生成配置模型"""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from occam.core.exceptions import InvalidParameterError, InvalidProfile
from occam.models.network import AdjacencyMatrix, ConnectivityMatrix, EdgeProbabilityMatrix, ModelParams

MASS_TOL = 1e-12


@dataclass(frozen=True)
class OverlapBlock:
    """一个重叠块: 社区子集（0 起始）及其节点质量 π"""
    communities: Tuple[int, ...]
    mass: float

    @property
    def size(self) -> int:
        return len(self.communities)

    def row(self, k: int) -> np.ndarray:
        """该块节点的隶属行 m^{-1/2}·1(k ∈ 子集)"""
        row = np.zeros(k)
        row[list(self.communities)] = 1.0 / np.sqrt(self.size)
        return row


@dataclass(frozen=True)
class OverlapProfile:
    """重叠结构: 块列表，质量之和为 1

    dirichlet_concentration 非空时，大小 m ≥ 2 的块内节点权重取自 Dirichlet(c·1_m)
    再做 L2 归一化；纯节点不受影响。
    """
    k: int
    blocks: Tuple[OverlapBlock, ...]
    dirichlet_concentration: Optional[float] = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidProfile(f"社区数必须至少为 1: {self.k}")
        if not self.blocks:
            raise InvalidProfile("重叠结构不能为空")
        seen = set()
        for block in self.blocks:
            members = tuple(block.communities)
            if not members:
                raise InvalidProfile("块的社区子集不能为空")
            if len(set(members)) != len(members):
                raise InvalidProfile(f"块内社区重复: {members}")
            if min(members) < 0 or max(members) >= self.k:
                raise InvalidProfile(f"社区下标越界: {members}")
            key = frozenset(members)
            if key in seen:
                raise InvalidProfile(f"重复的块: {members}")
            seen.add(key)
            if not np.isfinite(block.mass) or block.mass < 0:
                raise InvalidProfile(f"块质量必须非负: {block.mass}")
        total = sum(block.mass for block in self.blocks)
        if abs(total - 1) > MASS_TOL:
            raise InvalidProfile(f"块质量之和为 {total!r}，应为 1")
        if self.dirichlet_concentration is not None and self.dirichlet_concentration <= 0:
            raise InvalidProfile("Dirichlet 浓度参数必须为正")

    @property
    def masses(self) -> np.ndarray:
        return np.array([block.mass for block in self.blocks])

    @classmethod
    def symmetric(
        cls,
        k: int,
        masses: Sequence[float],
        dirichlet_concentration: Optional[float] = None,
    ) -> "OverlapProfile":
        """按重叠阶数给出每个块的质量

        masses[m-1] 是每个大小为 m 的子集的质量，块按大小、再按字典序排列。
        例如 K=3, masses=(0.3, 0.03, 0.01) 即 3 个纯块各 0.3、3 个两两交集各 0.03、三重交集 0.01。
        """
        if len(masses) > k:
            raise InvalidProfile(f"重叠阶数 {len(masses)} 超过社区数 {k}")
        blocks = [
            OverlapBlock(tuple(subset), float(mass))
            for size, mass in enumerate(masses, start=1)
            for subset in itertools.combinations(range(k), size)
        ]
        return cls(k=k, blocks=tuple(blocks), dirichlet_concentration=dirichlet_concentration)

    @classmethod
    def pure(cls, k: int) -> "OverlapProfile":
        """无重叠: 每个社区质量 1/K"""
        return cls.symmetric(k, [1.0 / k])


# 每阶子集的质量，按 K=3 给出；其他 K 取前 min(阶数, K) 阶后按子集数 C(K, m) 归一化
PROFILE_PRESETS: Dict[str, Tuple[float, ...]] = {
    "A": (0.3, 0.03, 0.01),
    "B": (0.25, 0.07, 0.04),
    # 图注版本，总质量 1.02，使用前归一化
    "A-caption": (0.3, 0.03, 0.03),
}

PURE_PROFILE = "pure"


def profile_names() -> Tuple[str, ...]:
    return tuple(PROFILE_PRESETS) + (PURE_PROFILE,)


def preset_profile(name: str, k: int = 3) -> OverlapProfile:
    """按名称构造预设重叠结构，适用于任意 K"""
    if k < 1:
        raise InvalidProfile(f"社区数必须为正: {k}")
    if name == PURE_PROFILE:
        return OverlapProfile.pure(k)
    if name not in PROFILE_PRESETS:
        raise InvalidProfile(f"未知的重叠结构预设: {name}，可选: {list(profile_names())}")
    masses = np.array(PROFILE_PRESETS[name][:k])
    counts = np.array([math.comb(k, size) for size in range(1, len(masses) + 1)], dtype=float)
    masses = masses / float(masses @ counts)
    return OverlapProfile.symmetric(k, masses.tolist())


class ThetaKind(str, Enum):
    """度修正参数分布类型"""
    POINT_MASS_ONE = "nohub"
    TWO_POINT_HUB = "hub"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ThetaLaw:
    """θ 的离散分布"""
    kind: ThetaKind
    support: Tuple[float, ...] = (1.0,)
    probs: Tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if len(self.support) != len(self.probs) or not self.support:
            raise InvalidParameterError("θ 分布的支撑集与概率长度不一致")
        if any(v <= 0 for v in self.support):
            raise InvalidParameterError(f"θ 支撑集必须严格为正: {self.support}")
        if any(p < 0 for p in self.probs) or abs(sum(self.probs) - 1) > MASS_TOL:
            raise InvalidParameterError(f"θ 概率必须非负且和为 1: {self.probs}")

    @classmethod
    def point_mass_one(cls) -> "ThetaLaw":
        return cls(ThetaKind.POINT_MASS_ONE)

    @classmethod
    def two_point_hub(cls) -> "ThetaLaw":
        """20% 的枢纽节点 θ=20，其余 θ=1"""
        return cls(ThetaKind.TWO_POINT_HUB, (1.0, 20.0), (0.8, 0.2))

    @classmethod
    def custom(cls, support: Sequence[float], probs: Sequence[float]) -> "ThetaLaw":
        return cls(ThetaKind.CUSTOM, tuple(float(v) for v in support), tuple(float(p) for p in probs))

    @classmethod
    def from_name(cls, name: str) -> "ThetaLaw":
        kind = ThetaKind(name)
        if kind is ThetaKind.TWO_POINT_HUB:
            return cls.two_point_hub()
        if kind is ThetaKind.POINT_MASS_ONE:
            return cls.point_mass_one()
        raise InvalidParameterError("自定义 θ 分布需要显式给出支撑集与概率")

    @property
    def mean(self) -> float:
        return float(np.dot(self.support, self.probs))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind is ThetaKind.POINT_MASS_ONE:
            return np.ones(n)
        return rng.choice(np.asarray(self.support), size=n, p=np.asarray(self.probs))


class Allocation(str, Enum):
    """节点分配到重叠块的方式"""
    DETERMINISTIC = "deterministic"
    MULTINOMIAL = "multinomial"


@dataclass(frozen=True)
class SamplerConfig:
    """合成网络生成配置

    alpha 非空时跳过按目标平均度校准，直接使用该 α。
    saturate 为真时边概率取 min(αM, 1)，α 按截断后的期望平均度重新校准。
    """
    n: int
    k: int
    profile: OverlapProfile
    theta_law: ThetaLaw
    b: ConnectivityMatrix
    target_degree: float
    seed: int = 0
    allocation: Allocation = Allocation.DETERMINISTIC
    alpha: Optional[float] = None
    saturate: bool = False

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError(f"节点数必须为正: {self.n}")
        if self.profile.k != self.k or self.b.k != self.k:
            raise InvalidParameterError(
                f"社区数不一致: K={self.k}, 重叠结构 K={self.profile.k}, B 维数 {self.b.k}"
            )
        if self.alpha is None and not self.target_degree > 0:
            raise InvalidParameterError(f"目标平均度必须为正: {self.target_degree}")
        if self.alpha is not None and not self.alpha >= 0:
            raise InvalidParameterError(f"α 必须非负: {self.alpha}")


@dataclass(frozen=True)
class SyntheticNetwork:
    """一次生成的完整结果: 参数、期望矩阵与观测图"""
    params: ModelParams
    w: EdgeProbabilityMatrix
    a: AdjacencyMatrix
    config: SamplerConfig
