"""OCCAM 合成网络生成

生成顺序固定为 Z → θ → α → W → A，全部取自同一个随机数流，
同一 (配置, 种子) 得到逐字节相同的结果。
"""

from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from occam.core.exceptions import DegreeTooLarge, EntryOutOfRange, InvalidParameterError
from occam.core.model import expected_matrix
from occam.models.generation import Allocation, SamplerConfig, SyntheticNetwork, ThetaLaw
from occam.models.network import (
    AdjacencyMatrix,
    ConnectivityMatrix,
    DegreeParams,
    EdgeProbabilityMatrix,
    MembershipMatrix,
    ModelParams,
)
from occam.utils.logger import get_logger

logger = get_logger(__name__)

# 浮点误差下 n·π 的取整保护
_COUNT_EPS = 1e-9


def largest_remainder_counts(n: int, masses: Sequence[float]) -> np.ndarray:
    """最大余数法把 n 个节点按质量分配到各块

    余数相同时下标小的块优先，总数恰好为 n。
    """
    raw = n * np.asarray(masses, dtype=float)
    counts = np.floor(raw + _COUNT_EPS).astype(np.int64)
    remainders = np.clip(raw - counts, 0.0, None)
    missing = n - int(counts.sum())
    if missing < 0:
        raise InvalidParameterError(f"分配数之和 {counts.sum()} 超过节点数 {n}")
    # 稳定排序保证并列时下标小者优先
    order = np.argsort(-remainders, kind="stable")
    counts[order[:missing]] += 1
    return counts


def replication_rng(master_seed: int, grid_index: int, replication: int) -> np.random.Generator:
    """由 (主种子, 网格下标, 重复下标) 派生独立随机数流"""
    return np.random.default_rng(np.random.SeedSequence([master_seed, grid_index, replication]))


def sample_memberships(config: SamplerConfig, rng: np.random.Generator) -> MembershipMatrix:
    """按重叠结构生成隶属矩阵 Z

    Args:
        config: 生成配置
        rng: 随机数流

    Returns:
        n×K 隶属矩阵，每行 L2 范数为 1
    """
    profile = config.profile
    if config.allocation is Allocation.DETERMINISTIC:
        counts = largest_remainder_counts(config.n, profile.masses)
        block_of_node = np.repeat(np.arange(len(profile.blocks)), counts)
        block_of_node = block_of_node[rng.permutation(config.n)]
    else:
        block_of_node = rng.choice(len(profile.blocks), size=config.n, p=profile.masses)

    patterns = np.stack([block.row(config.k) for block in profile.blocks])
    z = patterns[block_of_node]

    if profile.dirichlet_concentration is not None:
        for i in range(config.n):
            block = profile.blocks[block_of_node[i]]
            if block.size < 2:
                continue
            weights = rng.dirichlet(np.full(block.size, profile.dirichlet_concentration))
            row = np.zeros(config.k)
            row[list(block.communities)] = weights
            z[i] = row / np.linalg.norm(row)

    return MembershipMatrix(z)


def sample_degree_params(law: ThetaLaw, n: int, rng: np.random.Generator) -> DegreeParams:
    """按 θ 分布独立抽取度修正参数"""
    return DegreeParams(law.sample(n, rng))


def _offdiagonal_mass(theta: DegreeParams, z: MembershipMatrix, b: ConnectivityMatrix) -> float:
    """Σ_{i≠j} M_ij，其中 M = ΘZBZᵀΘ，不构造 n×n 矩阵"""
    t = theta.theta[:, None] * z.entries
    column_sums = t.sum(axis=0)
    total = float(column_sums @ b.entries @ column_sums)
    diagonal = float(np.einsum("ik,kl,il->", t, b.entries, t))
    return total - diagonal


def calibrate_alpha(
    theta: DegreeParams,
    z: MembershipMatrix,
    b: ConnectivityMatrix,
    target_degree: float,
) -> float:
    """选取 α 使期望平均度恰好等于目标值: α = d̄·n / Σ_{i≠j} M_ij

    Raises:
        InvalidParameterError: 目标平均度不为正，或 M 的非对角元之和不为正
        DegreeTooLarge: 校准后的边概率超过 1
    """
    if not target_degree > 0:
        raise InvalidParameterError(f"目标平均度必须为正: {target_degree}")
    mass = _offdiagonal_mass(theta, z, b)
    if not mass > 0:
        raise InvalidParameterError("M 的非对角元之和不为正，无法校准 α")
    alpha = target_degree * z.n / mass
    try:
        expected_matrix(ModelParams(alpha=alpha, theta=theta, z=z, b=b))
    except EntryOutOfRange as e:
        raise DegreeTooLarge(f"目标平均度 {target_degree} 过大: {e}") from e
    return alpha


def _offdiagonal_product(theta: DegreeParams, z: MembershipMatrix, b: ConnectivityMatrix) -> np.ndarray:
    t = theta.theta[:, None] * z.entries
    m = t @ b.entries @ t.T
    m = (m + m.T) / 2
    np.fill_diagonal(m, 0.0)
    return m


def calibrate_alpha_saturated(
    theta: DegreeParams,
    z: MembershipMatrix,
    b: ConnectivityMatrix,
    target_degree: float,
) -> float:
    """截断模型下的 α: 使 Σ_{i≠j} min(αM_ij, 1) = d̄·n

    Raises:
        DegreeTooLarge: 即使所有正概率都取 1 也达不到目标平均度
    """
    if not target_degree > 0:
        raise InvalidParameterError(f"目标平均度必须为正: {target_degree}")
    m = _offdiagonal_product(theta, z, b)
    target = target_degree * z.n
    if np.count_nonzero(m > 0) < target:
        raise DegreeTooLarge(f"目标平均度 {target_degree} 超过截断模型可达到的上限")

    def excess(alpha: float) -> float:
        return float(np.minimum(alpha * m, 1.0).sum()) - target

    low = target / float(m.sum())
    if excess(low) >= 0:
        return low
    high = 2 * low
    while excess(high) < 0:
        high *= 2
    return float(brentq(excess, low, high, xtol=1e-15, rtol=1e-14))


def saturated_expected_matrix(params: ModelParams) -> EdgeProbabilityMatrix:
    """截断的期望矩阵 min(α Θ Z B Zᵀ Θ, 1)"""
    t = params.theta.theta[:, None] * params.z.entries
    m = t @ params.b.entries @ t.T
    w = np.clip(params.alpha * (m + m.T) / 2, 0.0, 1.0)
    clipped = int(np.count_nonzero(np.triu(params.alpha * m >= 1.0, k=1)))
    if clipped:
        logger.debug(f"{clipped} 对节点的边概率被截断为 1")
    return EdgeProbabilityMatrix(w)


def sample_adjacency(w: EdgeProbabilityMatrix, rng: np.random.Generator) -> AdjacencyMatrix:
    """按上三角行优先顺序独立抽取 Bernoulli(W_ij) 边"""
    n = w.n
    rows, cols = np.triu_indices(n, k=1)
    edges = rng.random(rows.size) < w.entries[rows, cols]
    a = np.zeros((n, n), dtype=np.uint8)
    a[rows[edges], cols[edges]] = 1
    a[cols[edges], rows[edges]] = 1
    return AdjacencyMatrix(a)


def generate_network(config: SamplerConfig, rng: Optional[np.random.Generator] = None) -> SyntheticNetwork:
    """运行完整生成流程

    Args:
        config: 生成配置
        rng: 随机数流，默认由 config.seed 创建

    Returns:
        参数、期望矩阵与观测图
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)

    z = sample_memberships(config, rng)
    theta = sample_degree_params(config.theta_law, config.n, rng)
    if config.alpha is not None:
        alpha = float(config.alpha)
    elif config.saturate:
        alpha = calibrate_alpha_saturated(theta, z, config.b, config.target_degree)
    else:
        alpha = calibrate_alpha(theta, z, config.b, config.target_degree)
    params = ModelParams(alpha=alpha, theta=theta, z=z, b=config.b)
    w = saturated_expected_matrix(params) if config.saturate else expected_matrix(params)
    a = sample_adjacency(w, rng)

    logger.debug(f"生成网络: n={config.n}, K={config.k}, α={alpha:.6g}, 边数={a.edge_count}")
    return SyntheticNetwork(params=params, w=w, a=a, config=config)
