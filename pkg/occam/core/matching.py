"""标签置换匹配

K ≤ 8 时穷举所有置换，否则用匈牙利算法（scipy.optimize.linear_sum_assignment）。
置换约定: perm[k] 是第一组中第 k 行/列对应的第二组下标。
"""

import itertools
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

BRUTE_FORCE_MAX_K = 8


@lru_cache(maxsize=BRUTE_FORCE_MAX_K + 1)
def all_permutations(k: int) -> np.ndarray:
    """按字典序排列的全部置换 (k! × k)"""
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.intp).reshape(-1, k)
    perms.setflags(write=False)
    return perms


def permutation_cost(cost: np.ndarray, perm: np.ndarray) -> float:
    """给定置换下的总代价，所有搜索路径共用同一求和顺序"""
    return float(np.sum(cost[np.arange(cost.shape[0]), perm]))


def min_sum_permutation(cost: np.ndarray, brute_force: Optional[bool] = None) -> Tuple[np.ndarray, float]:
    """最小化 Σ_k cost[k, perm[k]]

    Args:
        cost: K×K 代价矩阵
        brute_force: 强制指定搜索方式，默认按 K 自动选择

    Returns:
        (置换, 最小代价)
    """
    k = cost.shape[0]
    if brute_force is None:
        brute_force = k <= BRUTE_FORCE_MAX_K
    if brute_force:
        perms = all_permutations(k)
        totals = cost[np.arange(k), perms].sum(axis=1)
        perm = perms[int(np.argmin(totals))]
    else:
        rows, cols = linear_sum_assignment(cost)
        perm = cols[np.argsort(rows)]
    perm = np.asarray(perm, dtype=np.intp)
    return perm, permutation_cost(cost, perm)


def _has_perfect_matching(allowed: np.ndarray) -> bool:
    rows, cols = linear_sum_assignment((~allowed).astype(float))
    return bool(np.all(allowed[rows, cols]))


def min_max_permutation(cost: np.ndarray, brute_force: Optional[bool] = None) -> Tuple[np.ndarray, float]:
    """瓶颈指派: 最小化 max_k cost[k, perm[k]]

    大 K 时对候选代价值做二分查找，每步用指派判断阈值图是否存在完美匹配，结果精确。
    """
    k = cost.shape[0]
    if brute_force is None:
        brute_force = k <= BRUTE_FORCE_MAX_K
    if brute_force:
        perms = all_permutations(k)
        worst = cost[np.arange(k), perms].max(axis=1)
        perm = perms[int(np.argmin(worst))]
        return perm, float(cost[np.arange(k), perm].max())

    candidates = np.unique(cost)
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _has_perfect_matching(cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    threshold = candidates[lo]
    # 在阈值图内取总代价最小的完美匹配
    masked = np.where(cost <= threshold, cost, np.inf)
    rows, cols = linear_sum_assignment(np.where(np.isinf(masked), cost.max() * k + 1.0, masked))
    perm = np.asarray(cols[np.argsort(rows)], dtype=np.intp)
    return perm, float(threshold)
