"""OCCAM 模型核心

期望边概率矩阵 W = α Θ Z B Zᵀ Θ、可识别性条件检查，以及矩阵平方根工具。
"""

from typing import List

import numpy as np
from scipy.linalg import eigh
from scipy.spatial.distance import cdist

from occam.core.exceptions import EntryOutOfRange, InvalidParameterError, NotPSD, ShapeMismatch
from occam.core.matching import min_max_permutation
from occam.models.network import ConnectivityMatrix, EdgeProbabilityMatrix, ModelParams
from occam.models.results import ConditionResult, ValidationReport

# 浮点噪声容忍度
RANGE_SLACK = 1e-12
SYMMETRY_TOL = 1e-10
PSD_CLAMP_TOL = 1e-8

B_SYMMETRY_TOL = 1e-12
ROW_NORM_TOL = 1e-10
PURE_NODE_TOL = 1e-8
THETA_MEAN_TOL = 1e-6


def expected_matrix(params: ModelParams) -> EdgeProbabilityMatrix:
    """计算期望边概率矩阵 W = α Θ Z B Zᵀ Θ

    Args:
        params: 模型参数

    Returns:
        n×n 边概率矩阵，逐位对称

    Raises:
        EntryOutOfRange: 非对角元超出 [0, 1]
    """
    t = params.theta.theta[:, None] * params.z.entries
    m = t @ params.b.entries @ t.T
    w = params.alpha * (m + m.T) / 2

    off_diag = ~np.eye(params.n, dtype=bool)
    values = w[off_diag]
    if values.size:
        high, low = float(values.max()), float(values.min())
        if high > 1 + RANGE_SLACK or low < -RANGE_SLACK:
            raise EntryOutOfRange(f"边概率超出 [0, 1]: 最小值 {low:.6g}, 最大值 {high:.6g}")
    # 容差内的越界值贴回边界，clip 保持对称
    w = np.clip(w, 0.0, None)
    w[off_diag] = np.minimum(w[off_diag], 1.0)
    return EdgeProbabilityMatrix(w)


def _check_connectivity(b: np.ndarray) -> ConditionResult:
    details: List[str] = []
    if not np.allclose(b, b.T, rtol=0, atol=B_SYMMETRY_TOL):
        details.append("B 不对称")
    if not np.allclose(np.diag(b), 1.0, rtol=0, atol=B_SYMMETRY_TOL):
        details.append(f"B 对角线不全为 1: {np.round(np.diag(b), 6).tolist()}")
    smallest = float(np.linalg.eigvalsh((b + b.T) / 2)[0])
    if smallest <= 0:
        details.append(f"B 不是严格正定的，最小特征值 {smallest:.6g}")
    return ConditionResult("I1", not details, tuple(details))


def _check_memberships(z: np.ndarray) -> ConditionResult:
    details: List[str] = []
    if np.any(z < 0):
        details.append("Z 存在负元素")
    norms = np.linalg.norm(z, axis=1)
    bad_rows = np.flatnonzero(np.abs(norms - 1) > ROW_NORM_TOL)
    if bad_rows.size:
        details.append(f"{bad_rows.size} 行的 L2 范数不为 1，首个: 第 {int(bad_rows[0])} 行")
    has_pure = (z >= 1 - PURE_NODE_TOL).any(axis=0) if z.shape[0] else np.zeros(z.shape[1], dtype=bool)
    for k in np.flatnonzero(~has_pure):
        details.append(f"社区 {int(k)} 没有纯节点")
    return ConditionResult("I2", not details, tuple(details))


def _check_degrees(theta: np.ndarray, mean_tol: float) -> ConditionResult:
    details: List[str] = []
    if np.any(theta <= 0):
        details.append("θ 存在非正元素")
    mean = float(theta.mean()) if theta.size else 0.0
    if abs(mean - 1) > mean_tol:
        details.append(f"θ 均值 {mean:.6g} 偏离 1 超过 {mean_tol:g}")
    return ConditionResult("I3", not details, tuple(details))


def validate_identifiability(params: ModelParams, theta_mean_tol: float = THETA_MEAN_TOL) -> ValidationReport:
    """检查可识别性条件 I1–I3，仅做诊断，从不抛出异常

    Args:
        params: 模型参数
        theta_mean_tol: I3 中 θ 均值与 1 的容差

    Returns:
        逐条件的诊断报告
    """
    return ValidationReport((
        _check_connectivity(params.b.entries),
        _check_memberships(params.z.entries),
        _check_degrees(params.theta.theta, theta_mean_tol),
    ))


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """对称半正定矩阵的平方根

    Raises:
        InvalidParameterError: 矩阵不是对称方阵
        NotPSD: 存在小于 -1e-8 的特征值
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidParameterError(f"需要方阵，实际形状 {m.shape}")
    if not np.allclose(m, m.T, rtol=0, atol=SYMMETRY_TOL):
        raise InvalidParameterError("矩阵不对称")
    eigenvalues, eigenvectors = eigh((m + m.T) / 2)
    if eigenvalues.size and eigenvalues[0] < -PSD_CLAMP_TOL:
        raise NotPSD(f"最小特征值 {eigenvalues[0]:.6g} 小于 {-PSD_CLAMP_TOL:g}")
    root = (eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ eigenvectors.T
    return (root + root.T) / 2


def _check_planted(k: int, rho: float) -> None:
    if k < 1:
        raise InvalidParameterError(f"社区数必须至少为 1: {k}")
    if not 0 <= rho < 1:
        raise InvalidParameterError(f"ρ 必须在 [0, 1) 内: {rho}")


def planted_partition_b(k: int, rho: float) -> ConnectivityMatrix:
    """植入划分连接矩阵 (1-ρ)I + ρ11ᵀ"""
    _check_planted(k, rho)
    return ConnectivityMatrix((1 - rho) * np.eye(k) + rho * np.ones((k, k)))


def planted_partition_sqrt_closed_form(k: int, rho: float) -> np.ndarray:
    """植入划分连接矩阵平方根的闭式解

    对角元为 (√((K-1)ρ+1) + (K-1)√(1-ρ))/K，非对角元为 (√((K-1)ρ+1) - √(1-ρ))/K。
    """
    _check_planted(k, rho)
    top = np.sqrt((k - 1) * rho + 1)
    rest = np.sqrt(1 - rho)
    diag = (top + (k - 1) * rest) / k
    off = (top - rest) / k
    return np.full((k, k), off) + (diag - off) * np.eye(k)


def hausdorff_centers_distance(s: np.ndarray, t: np.ndarray) -> float:
    """两组聚类中心之间的 Hausdorff 距离: min_σ max_k ||S_k - T_σ(k)||"""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if s.shape != t.shape:
        raise ShapeMismatch(f"中心矩阵形状不一致: {s.shape} vs {t.shape}")
    if s.shape[0] == 0:
        return 0.0
    _, value = min_max_permutation(cdist(s, t))
    return value
