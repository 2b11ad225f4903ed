"""OCCAM 估计器

嵌入 → 正则化行归一化 → K-medians → 投影 → 归一化 → 阈值化。
"""

from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve
from scipy.spatial.distance import cdist

from occam.core.exceptions import InvalidParameterError, SingularCenters
from occam.core.kmedians import KMediansFitter
from occam.core.spectral import (
    estimate_alpha,
    regularized_row_normalize,
    regularizer_tau,
    spectral_embedding,
)
from occam.models.network import GraphMatrix, MembershipMatrix, as_matrix
from occam.models.options import OccamOptions
from occam.models.results import NormalizedEmbedding, OccamResult
from occam.utils.logger import LoggerMixin, log_execution_time

MAX_CENTER_CONDITION = 1e12
ZERO_ROW_TOL = 1e-12


def project_memberships(x_norm: NormalizedEmbedding, s_hat: np.ndarray) -> np.ndarray:
    """未归一化的投影系数 Ŷ = X̂*_τ Ŝᵀ (ŜŜᵀ)⁻¹，解线性方程组而不显式求逆

    Raises:
        SingularCenters: ŜŜᵀ 的条件数超过 1e12
    """
    s_hat = np.asarray(s_hat, dtype=float)
    gram = s_hat @ s_hat.T
    condition = np.linalg.cond(gram)
    if not np.isfinite(condition) or condition > MAX_CENTER_CONDITION:
        raise SingularCenters(f"ŜŜᵀ 条件数 {condition:.3g} 超过 {MAX_CENTER_CONDITION:g}")
    # (ŜŜᵀ) Ŷᵀ = Ŝ X̂*ᵀ
    return solve(gram, s_hat @ x_norm.rows.T, assume_a="sym").T


def normalize_memberships(y_hat: np.ndarray, s_hat: np.ndarray) -> MembershipMatrix:
    """负值截断为 0 后逐行 L2 归一化

    截断后范数低于 1e-12 的行替换为最近中心对应的纯指示向量，
    最近中心按截断前的行到 Ŝ 各行的距离确定。

    Args:
        y_hat: n×K 投影系数
        s_hat: K×K 聚类中心

    Returns:
        行非负且单位范数的隶属矩阵
    """
    y_hat = np.asarray(y_hat, dtype=float)
    clamped = np.clip(y_hat, 0.0, None)
    norms = np.linalg.norm(clamped, axis=1)
    degenerate = norms < ZERO_ROW_TOL

    z = np.zeros_like(clamped)
    z[~degenerate] = clamped[~degenerate] / norms[~degenerate, None]
    if degenerate.any():
        nearest = np.argmin(cdist(y_hat[degenerate], np.asarray(s_hat, dtype=float)), axis=1)
        z[np.flatnonzero(degenerate), nearest] = 1.0
    return MembershipMatrix(z)


def threshold_binary(z: MembershipMatrix, t: float) -> np.ndarray:
    """Γ_ik = 1(Z_ik ≥ t)，t ∈ (0, 1]"""
    if not 0 < t <= 1:
        raise InvalidParameterError(f"阈值必须在 (0, 1] 内: {t}")
    return (z.entries >= t).astype(np.uint8)


class OccamEstimator(LoggerMixin):
    """OCCAM 重叠社区估计器"""

    def __init__(self, opts: Optional[OccamOptions] = None):
        self.opts = opts or OccamOptions()

    @log_execution_time
    def fit(self, a: GraphMatrix, k: int, seed_nodes: Optional[Sequence[int]] = None) -> OccamResult:
        """估计连续隶属矩阵

        Args:
            a: 邻接矩阵；也接受期望边概率矩阵 W 以做无噪声验证
            k: 社区数
            seed_nodes: 可选的 K 个节点下标，用其归一化嵌入行作为 K-medians 初始中心

        Returns:
            估计结果
        """
        entries = as_matrix(a)
        n = entries.shape[0]
        if not 1 <= k <= n:
            raise InvalidParameterError(f"社区数 K={k} 必须在 [1, n={n}] 内")

        alpha_hat = estimate_alpha(entries, k)
        if self.opts.tau_override is not None:
            tau = float(self.opts.tau_override)
        else:
            tau = regularizer_tau(alpha_hat, k, n, self.opts.c_tau)
        self.logger.debug(f"α̂={alpha_hat:.6g}, τ={tau:.6g}")

        x_hat = spectral_embedding(entries, k)
        x_norm = regularized_row_normalize(x_hat, tau)

        initial_centers = None
        if seed_nodes is not None:
            seed_nodes = list(seed_nodes)
            if len(seed_nodes) != k:
                raise InvalidParameterError(f"需要 {k} 个初始节点，实际 {len(seed_nodes)} 个")
            initial_centers = x_norm.rows[seed_nodes]

        fitter = KMediansFitter(self.opts.kmedians)
        clustering = fitter.fit(
            x_norm.rows,
            k,
            rng=np.random.default_rng(self.opts.seed),
            initial_centers=initial_centers,
        )

        y_hat = project_memberships(x_norm, clustering.centers)
        z_hat = normalize_memberships(y_hat, clustering.centers)
        threshold = self.opts.resolved_threshold(k)
        binary = threshold_binary(z_hat, threshold)

        self.logger.debug(f"OCCAM 估计完成: n={n}, K={k}, K-medians 损失={clustering.loss:.6g}")
        return OccamResult(
            z_hat=z_hat,
            s_hat=clustering.centers,
            x_hat=x_hat,
            x_norm=x_norm,
            tau=tau,
            alpha_hat=alpha_hat,
            threshold=threshold,
            binary=binary,
            clustering=clustering,
        )


def fit(
    a: GraphMatrix,
    k: int,
    opts: Optional[OccamOptions] = None,
    seed_nodes: Optional[Sequence[int]] = None,
) -> OccamResult:
    """OCCAM 估计的便捷函数，参见 OccamEstimator.fit"""
    return OccamEstimator(opts).fit(a, k, seed_nodes=seed_nodes)
