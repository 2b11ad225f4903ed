"""谱嵌入与正则化"""

import warnings

import numpy as np
from scipy.linalg import eigh

from occam.core.exceptions import (
    DeficientSpectrum,
    DeficientSpectrumWarning,
    InvalidParameterError,
    NonpositiveAlpha,
)
from occam.models.network import GraphMatrix, as_matrix
from occam.models.results import EmbeddingMatrix, NormalizedEmbedding
from occam.utils.logger import get_logger

logger = get_logger(__name__)


def estimate_alpha(a: GraphMatrix, k: int) -> float:
    """稀疏度估计 α̂ = Σ_{i≠j} A_ij / (n(n-1)K)"""
    entries = as_matrix(a)
    n = entries.shape[0]
    if n < 2:
        raise InvalidParameterError(f"节点数必须至少为 2: {n}")
    if k < 1:
        raise InvalidParameterError(f"社区数必须至少为 1: {k}")
    offdiag_sum = float(entries.sum(dtype=np.float64) - np.trace(entries))
    return offdiag_sum / (n * (n - 1) * k)


def regularizer_tau(alpha_hat: float, k: int, n: int, c_tau: float = 0.1) -> float:
    """推荐的正则化参数 τ = c_τ · α̂^0.2 · K^1.5 / n^0.3

    Raises:
        NonpositiveAlpha: α̂ ≤ 0（空图）
    """
    if not alpha_hat > 0:
        raise NonpositiveAlpha(f"α̂ 必须为正，实际 {alpha_hat}；空图无法嵌入")
    if not c_tau > 0:
        raise InvalidParameterError(f"c_τ 必须为正: {c_tau}")
    return c_tau * alpha_hat ** 0.2 * k ** 1.5 / n ** 0.3


def spectral_embedding(a: GraphMatrix, k: int) -> EmbeddingMatrix:
    """取代数意义上最大的 K 个特征对，X̂ = Û diag(√max(λ, 0))

    对称输入即可，W 可以直接代替 A 传入。部分特征值非正时对应列置零并告警。

    Args:
        a: 邻接矩阵或任意对称矩阵
        k: 嵌入维数

    Returns:
        嵌入矩阵，特征值按降序排列并保留符号

    Raises:
        InvalidParameterError: K 不在 [1, n] 内
        DeficientSpectrum: 选出的 K 个特征值全部非正
    """
    entries = np.asarray(as_matrix(a), dtype=float)
    n = entries.shape[0]
    if not 1 <= k <= n:
        raise InvalidParameterError(f"嵌入维数 K={k} 必须在 [1, n={n}] 内")

    eigenvalues, eigenvectors = eigh(entries, subset_by_index=[n - k, n - 1])
    eigenvalues = eigenvalues[::-1].copy()
    eigenvectors = eigenvectors[:, ::-1].copy()

    deficient = tuple(int(i) for i in np.flatnonzero(eigenvalues <= 0))
    if len(deficient) == k:
        raise DeficientSpectrum(f"前 {k} 个特征值全部非正: {eigenvalues.tolist()}")
    if deficient:
        message = f"第 {list(deficient)} 个特征值非正，对应列已置零: {eigenvalues[list(deficient)].tolist()}"
        logger.warning(message)
        warnings.warn(message, DeficientSpectrumWarning, stacklevel=2)

    x_hat = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
    logger.debug(f"谱嵌入完成: n={n}, K={k}, 特征值={np.round(eigenvalues, 6).tolist()}")
    return EmbeddingMatrix(x_hat=x_hat, eigenvalues=eigenvalues, eigenvectors=eigenvectors, deficient=deficient)


def regularized_row_normalize(x: EmbeddingMatrix, tau: float) -> NormalizedEmbedding:
    """行正则化归一化: x̂ᵢ / (||x̂ᵢ|| + τ)，零行保持为零"""
    if not tau > 0:
        raise InvalidParameterError(f"τ 必须为正: {tau}")
    norms = np.linalg.norm(x.x_hat, axis=1, keepdims=True)
    return NormalizedEmbedding(rows=x.x_hat / (norms + tau), tau=float(tau))
