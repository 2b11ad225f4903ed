"""K-medians 聚类

最小化样本损失 (1/n) Σᵢ min_k ||qᵢ - s_k||₂：Lloyd 式交替（分配 / Weiszfeld 几何中位数），
距离加权播种，多次重启取最优。所有并列情况都取下标最小者。
"""

from typing import List, Optional, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from occam.core.exceptions import ConvergenceError, InvalidParameterError, TooFewPoints
from occam.models.options import KMediansConfig
from occam.models.results import ClusteringResult
from occam.utils.logger import LoggerMixin

# 迭代点与数据点重合的判定距离
COINCIDENCE_TOL = 1e-12
# 单调性检查允许的浮点误差
MONOTONE_SLACK = 1e-12


def kmedians_loss(q: np.ndarray, s: np.ndarray) -> float:
    """每行到最近中心的平均欧氏距离（不平方）"""
    q = np.asarray(q, dtype=float)
    s = np.asarray(s, dtype=float)
    if q.ndim != 2 or s.ndim != 2 or q.shape[1] != s.shape[1]:
        raise InvalidParameterError(f"形状不一致: q {q.shape}, s {s.shape}")
    if q.shape[0] == 0:
        return 0.0
    return float(cdist(q, s).min(axis=1).mean())


def _sum_distances(points: np.ndarray, x: np.ndarray) -> float:
    return float(np.linalg.norm(points - x, axis=1).sum())


def geometric_median(points: np.ndarray, tol: float = 1e-8, max_iters: int = 200) -> np.ndarray:
    """Weiszfeld 迭代求几何中位数

    从坐标均值出发；迭代点落在数据点上时用次梯度条件判断最优性，
    不是最优则沿次梯度方向移动 tol 后继续。

    Args:
        points: m×d 点集
        tol: 步长收敛容差
        max_iters: 最大迭代次数

    Returns:
        长度 d 的中位数，目标值不超过均值与最近数据点的目标值
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise InvalidParameterError("点集必须是非空二维数组")
    if points.shape[0] == 1:
        return points[0].copy()

    mean = points.mean(axis=0)
    x = mean.copy()
    for _ in range(max_iters):
        diffs = points - x
        dists = np.linalg.norm(diffs, axis=1)
        coincident = dists < COINCIDENCE_TOL
        if coincident.any():
            others = ~coincident
            if not others.any():
                break
            pull = (diffs[others] / dists[others, None]).sum(axis=0)
            pull_norm = float(np.linalg.norm(pull))
            # 次梯度条件: 合力不超过重合点的个数
            if pull_norm <= coincident.sum():
                break
            x = x + tol * pull / pull_norm
            continue

        weights = 1.0 / dists
        x_next = weights @ points / weights.sum()
        step = float(np.linalg.norm(x_next - x))
        x = x_next
        if step < tol:
            break

    nearest = points[int(np.argmin(np.linalg.norm(points - x, axis=1)))]
    candidates = (x, mean, nearest)
    objectives = [_sum_distances(points, c) for c in candidates]
    return np.array(candidates[int(np.argmin(objectives))], dtype=float)


def _assign(q: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    dists = cdist(q, centers)
    labels = np.argmin(dists, axis=1)
    return labels, dists


class KMediansFitter(LoggerMixin):
    """K-medians 拟合器"""

    def __init__(self, config: Optional[KMediansConfig] = None):
        self.config = config or KMediansConfig()

    def fit(
        self,
        q: np.ndarray,
        k: int,
        rng: Optional[np.random.Generator] = None,
        initial_centers: Optional[np.ndarray] = None,
    ) -> ClusteringResult:
        """多次重启拟合，返回损失最小的一次（并列取先出现者）

        Args:
            q: n×d 数据
            k: 聚类数
            rng: 随机数流，默认由 config.seed 创建
            initial_centers: 指定初始中心时只运行一次，不做随机播种

        Raises:
            TooFewPoints: n < K
        """
        q = np.asarray(q, dtype=float)
        n = q.shape[0]
        if k < 1:
            raise InvalidParameterError(f"聚类数必须至少为 1: {k}")
        if n < k:
            raise TooFewPoints(f"样本数 {n} 少于聚类数 {k}")
        if rng is None:
            rng = np.random.default_rng(self.config.seed)

        if initial_centers is not None:
            initial_centers = np.array(initial_centers, dtype=float)
            if initial_centers.shape != (k, q.shape[1]):
                raise InvalidParameterError(f"初始中心形状应为 {(k, q.shape[1])}，实际 {initial_centers.shape}")
            runs = [self._run(q, initial_centers)]
        else:
            # 每次重启独立的子随机流
            child_seeds = rng.integers(0, 2 ** 63 - 1, size=self.config.restarts)
            runs = [
                self._run(q, self._seed_centers(q, k, np.random.default_rng(int(seed))))
                for seed in child_seeds
            ]

        restart_losses = tuple(run[2] for run in runs)
        best = 0
        for index, loss in enumerate(restart_losses):
            if loss < restart_losses[best]:
                best = index
        centers, labels, loss, converged, history = runs[best]

        self.logger.debug(f"K-medians 完成: K={k}, 各次重启损失={[round(v, 8) for v in restart_losses]}, 最优={best}")
        return ClusteringResult(
            centers=centers,
            assignments=labels,
            loss=loss,
            converged=converged,
            restarts_used=len(runs),
            best_restart=best,
            loss_history=tuple(history),
            restart_losses=restart_losses,
        )

    @staticmethod
    def _seed_centers(q: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
        """距离加权播种：首个中心均匀抽取，之后按到已选中心的最小距离（不平方）加权"""
        n = q.shape[0]
        chosen = [int(rng.integers(n))]
        min_dist = np.linalg.norm(q - q[chosen[0]], axis=1)
        for _ in range(1, k):
            total = float(min_dist.sum())
            if total > 0:
                index = int(rng.choice(n, p=min_dist / total))
            else:
                index = int(rng.integers(n))
            chosen.append(index)
            min_dist = np.minimum(min_dist, np.linalg.norm(q - q[index], axis=1))
        return q[chosen].copy()

    def _reseed_empty(self, q: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """把空簇中心移到离所属中心最远的数据行"""
        labels, dists = _assign(q, centers)
        k = centers.shape[0]
        for _ in range(k):
            empty = np.setdiff1d(np.arange(k), labels)
            if empty.size == 0:
                break
            own = dists[np.arange(q.shape[0]), labels]
            farthest = int(np.argmax(own))
            if own[farthest] == 0:
                break
            centers[empty[0]] = q[farthest]
            labels, dists = _assign(q, centers)
        return labels, dists

    def _update_centers(self, q: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> np.ndarray:
        """逐簇替换为几何中位数，仅在该簇目标值不增加时接受"""
        updated = centers.copy()
        for c in range(centers.shape[0]):
            members = q[labels == c]
            if members.shape[0] == 0:
                continue
            candidate = geometric_median(
                members,
                tol=self.config.weiszfeld_tol,
                max_iters=self.config.weiszfeld_max_iters,
            )
            if _sum_distances(members, candidate) <= _sum_distances(members, centers[c]):
                updated[c] = candidate
        return updated

    def _run(self, q: np.ndarray, centers: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float, bool, List[float]]:
        centers = centers.copy()
        loss = kmedians_loss(q, centers)
        history = [loss]
        converged = False

        for _ in range(self.config.max_outer_iters):
            labels, _ = self._reseed_empty(q, centers)
            centers = self._update_centers(q, centers, labels)
            new_loss = kmedians_loss(q, centers)
            if new_loss > loss + MONOTONE_SLACK:
                raise ConvergenceError(f"K-medians 损失上升: {loss!r} -> {new_loss!r}")
            improvement = loss - new_loss
            loss = new_loss
            history.append(loss)
            if improvement < self.config.loss_tol:
                converged = True
                break

        labels, _ = _assign(q, centers)
        return centers, labels, kmedians_loss(q, centers), converged, history


def fit_kmedians(
    q: np.ndarray,
    k: int,
    config: Optional[KMediansConfig] = None,
    rng: Optional[np.random.Generator] = None,
    initial_centers: Optional[np.ndarray] = None,
) -> ClusteringResult:
    """K-medians 聚类的便捷函数，参见 KMediansFitter.fit"""
    return KMediansFitter(config).fit(q, k, rng=rng, initial_centers=initial_centers)
