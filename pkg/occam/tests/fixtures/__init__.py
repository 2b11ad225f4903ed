"""测试数据构造工具"""

import numpy as np

from occam.core.model import planted_partition_b
from occam.models.generation import Allocation, OverlapProfile, SamplerConfig, ThetaLaw
from occam.models.network import AdjacencyMatrix, DegreeParams, MembershipMatrix, ModelParams
from occam.models.options import KMediansConfig, OccamOptions

PROFILE_A = (0.3, 0.03, 0.01)


def sampler_config(
    n: int = 60,
    k: int = 3,
    rho: float = 0.2,
    masses=PROFILE_A,
    theta: ThetaLaw = None,
    degree: float = 10.0,
    seed: int = 0,
    allocation: Allocation = Allocation.DETERMINISTIC,
    alpha: float = None,
    saturate: bool = False,
) -> SamplerConfig:
    """植入划分 B 的生成配置"""
    return SamplerConfig(
        n=n,
        k=k,
        profile=OverlapProfile.symmetric(k, masses),
        theta_law=theta or ThetaLaw.point_mass_one(),
        b=planted_partition_b(k, rho),
        target_degree=degree,
        seed=seed,
        allocation=allocation,
        alpha=alpha,
        saturate=saturate,
    )


def two_block_params(alpha: float = 0.5) -> ModelParams:
    """4 个节点、两个各含 2 个纯节点的社区，B = I₂"""
    z = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    return ModelParams(
        alpha=alpha,
        theta=DegreeParams(np.ones(4)),
        z=MembershipMatrix(z),
        b=planted_partition_b(2, 0.0),
    )


def disjoint_cliques(sizes) -> AdjacencyMatrix:
    """若干互不相连的完全图"""
    n = sum(sizes)
    a = np.zeros((n, n), dtype=np.uint8)
    start = 0
    for size in sizes:
        a[start:start + size, start:start + size] = 1
        start += size
    np.fill_diagonal(a, 0)
    return AdjacencyMatrix(a)


def complete_graph(n: int) -> AdjacencyMatrix:
    a = np.ones((n, n), dtype=np.uint8)
    np.fill_diagonal(a, 0)
    return AdjacencyMatrix(a)


def random_binary_membership(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    return (rng.random((n, k)) < 0.4).astype(np.uint8)


def random_membership(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """行非负、单位范数的随机隶属矩阵"""
    z = rng.random((n, k)) + 1e-3
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def fast_options(**overrides) -> OccamOptions:
    """单元测试用的较少重启次数"""
    kmedians = KMediansConfig(restarts=3, max_outer_iters=50, weiszfeld_tol=1e-10, weiszfeld_max_iters=500,
                              loss_tol=1e-12, seed=0)
    values = dict(kmedians=kmedians, seed=0)
    values.update(overrides)
    return OccamOptions(**values)
