"""评估指标: 扩展归一化信息变差 (exNVI) 与隶属矩阵误差

熵一律取自然对数；概率用经验频率代替。
"""

from typing import Union

import numpy as np
from scipy.stats import entropy

from occam.core.exceptions import InvalidParameterError, ShapeMismatch
from occam.core.matching import min_sum_permutation
from occam.models.network import BinaryMembership, MembershipMatrix, as_matrix
from occam.models.results import ExnviBreakdown

BinaryInput = Union[BinaryMembership, np.ndarray]
ContinuousInput = Union[MembershipMatrix, np.ndarray]


def _binary_vector(values) -> np.ndarray:
    vector = np.asarray(values)
    if vector.ndim != 1:
        raise InvalidParameterError(f"需要一维向量，实际 {vector.ndim} 维")
    if not np.isin(vector, (0, 1)).all():
        raise InvalidParameterError("向量元素必须为 0 或 1")
    return vector.astype(np.int64)


def _entropy_of_counts(counts: np.ndarray) -> float:
    if counts.sum() == 0:
        return 0.0
    return float(entropy(counts))


def binary_joint_entropy(u, v) -> float:
    """两个二值向量的经验联合熵"""
    u = _binary_vector(u)
    v = _binary_vector(v)
    if u.shape != v.shape:
        raise ShapeMismatch(f"向量长度不一致: {u.shape[0]} vs {v.shape[0]}")
    if u.size == 0:
        raise InvalidParameterError("向量不能为空")
    return _entropy_of_counts(np.bincount(2 * u + v, minlength=4))


def binary_entropy(u) -> float:
    """二值向量的经验熵"""
    u = _binary_vector(u)
    return _entropy_of_counts(np.bincount(u, minlength=2))


def conditional_normalized_entropy(gamma_hat_l, gamma_k) -> float:
    """归一化条件熵 H̄(Γ̂_l | Γ_k) = [H(Γ_k, Γ̂_l) - H(Γ_k)] / H(Γ_k)

    H(Γ_k) = 0 时: 联合熵也为 0 则返回 0，否则返回 1。
    """
    joint = binary_joint_entropy(gamma_k, gamma_hat_l)
    marginal = binary_entropy(gamma_k)
    if marginal == 0:
        return 0.0 if joint == 0 else 1.0
    return (joint - marginal) / marginal


def _columns(value, what: str) -> np.ndarray:
    matrix = np.asarray(as_matrix(value))
    if matrix.ndim != 2:
        raise InvalidParameterError(f"{what} 必须是二维矩阵")
    return matrix


def exnvi(gamma: BinaryInput, gamma_hat: BinaryInput) -> ExnviBreakdown:
    """扩展归一化信息变差

    1 - min_σ (1/2K) Σ_k [H̄(Γ̂_σ(k)|Γ_k) + H̄(Γ_k|Γ̂_σ(k))]，σ 取遍列置换。

    Args:
        gamma: 真实二值隶属 (n×K)
        gamma_hat: 估计二值隶属 (n×K)

    Returns:
        exNVI 值、最优置换与逐社区分解

    Raises:
        ShapeMismatch: 两个矩阵形状不一致
    """
    truth = _columns(gamma, "gamma")
    estimate = _columns(gamma_hat, "gamma_hat")
    if truth.shape != estimate.shape:
        raise ShapeMismatch(f"隶属矩阵形状不一致: {truth.shape} vs {estimate.shape}")
    k = truth.shape[1]
    if k == 0:
        raise InvalidParameterError("社区数必须至少为 1")

    # forward[k, l] = H̄(Γ̂_l | Γ_k), backward[k, l] = H̄(Γ_k | Γ̂_l)
    forward = np.empty((k, k))
    backward = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            forward[i, j] = conditional_normalized_entropy(estimate[:, j], truth[:, i])
            backward[i, j] = conditional_normalized_entropy(truth[:, i], estimate[:, j])
    cost = forward + backward

    perm, total = min_sum_permutation(cost)
    raw = 1.0 - total / (2 * k)
    rows = np.arange(k)
    per_community = tuple(
        (float(f), float(b)) for f, b in zip(forward[rows, perm], backward[rows, perm])
    )
    cost.setflags(write=False)
    return ExnviBreakdown(
        value=float(np.clip(raw, 0.0, 1.0)),
        raw_value=float(raw),
        permutation=tuple(int(p) for p in perm),
        per_community=per_community,
        cost=cost,
    )


def membership_error(z_hat: ContinuousInput, z: ContinuousInput) -> float:
    """列置换匹配后的 ||Ẑ P - Z||_F / √n

    Raises:
        ShapeMismatch: 两个矩阵形状不一致
    """
    estimate = np.asarray(_columns(z_hat, "z_hat"), dtype=float)
    truth = np.asarray(_columns(z, "z"), dtype=float)
    if estimate.shape != truth.shape:
        raise ShapeMismatch(f"隶属矩阵形状不一致: {estimate.shape} vs {truth.shape}")
    n = truth.shape[0]
    if n == 0:
        return 0.0

    # cost[k, l] = ||Z_k - Ẑ_l||²，Frobenius 范数按列分解
    cost = ((truth[:, :, None] - estimate[:, None, :]) ** 2).sum(axis=0)
    perm, _ = min_sum_permutation(cost)
    return float(np.linalg.norm(estimate[:, perm] - truth) / np.sqrt(n))
