"""
填充缩减排序: 近似最小度(AMD)、反向 Cuthill-McKee 与自然顺序

AMD 在商图上进行消元: 被消去的变量成为"元素", 变量的邻接由剩余的原始边
(A_i) 与相邻元素集合 (E_i) 共同描述。度使用 AMD 的近似外部度上界, 相同度
按最小原始索引打破平局; 闭邻域相同的变量合并为超变量一起消去。
"""

import heapq
import logging
from typing import Dict, List, Literal, Set

import numpy as np
from scipy.sparse.csgraph import reverse_cuthill_mckee

from ..exceptions import DimensionMismatchError, KktError
from .csc_matrix import CompressedColumnMatrix, Permutation, symmetric_lower_pattern

logger = logging.getLogger(__name__)

OrderingMethod = Literal["amd", "rcm", "natural"]


class _QuotientGraph:
    """AMD 消元过程中的商图状态"""

    def __init__(self, n: int, adjacency: List[Set[int]]):
        self.n = n
        self.var_adj: List[Set[int]] = adjacency
        self.elem_adj: List[Set[int]] = [set() for _ in range(n)]
        self.elem_vars: Dict[int, Set[int]] = {}
        self.weight = np.ones(n, dtype=np.int64)
        self.members: List[List[int]] = [[i] for i in range(n)]
        self.alive: Set[int] = set(range(n))
        self.degree = np.array([len(adj) for adj in adjacency], dtype=np.int64)
        self.remaining_weight = n
        self._heap = [(int(self.degree[i]), i) for i in range(n)]
        heapq.heapify(self._heap)

    def _weight_of(self, variables) -> int:
        return int(sum(self.weight[v] for v in variables))

    def _push(self, v: int) -> None:
        heapq.heappush(self._heap, (int(self.degree[v]), v))

    def pop_pivot(self) -> int:
        # 惰性删除: 跳过已消去或度已过期的条目
        while True:
            deg, v = heapq.heappop(self._heap)
            if v in self.alive and deg == self.degree[v]:
                return v

    def reach(self, v: int) -> Set[int]:
        """变量 v 在消元图中的闭邻域"""
        out = {v} | self.var_adj[v]
        for e in self.elem_adj[v]:
            out |= self.elem_vars[e]
        return out

    def eliminate(self, p: int) -> List[int]:
        """消去超变量 p, 返回按消元顺序排列的原始变量"""
        lp = set(self.var_adj[p])
        for e in self.elem_adj[p]:
            lp |= self.elem_vars[e]
        lp.discard(p)
        lp &= self.alive

        # 吸收 p 相邻的元素
        for e in self.elem_adj[p]:
            for v in self.elem_vars.pop(e):
                if v != p:
                    self.elem_adj[v].discard(e)
        self.alive.discard(p)
        self.remaining_weight -= int(self.weight[p])
        for v in self.var_adj[p]:
            self.var_adj[v].discard(p)
        self.var_adj[p] = set()
        self.elem_adj[p] = set()

        # p 成为新元素, 其变量之间的原始边已被元素覆盖
        self.elem_vars[p] = lp
        for v in lp:
            self.elem_adj[v].add(p)
            self.var_adj[v] -= lp

        self._aggressive_absorption(p, lp)
        self._update_degrees(p, lp)
        self._detect_supervariables(lp)

        # 非主变量先于主变量(最小索引)输出
        principal, *others = self.members[p]
        return sorted(others) + [principal]

    def _aggressive_absorption(self, p: int, lp: Set[int]) -> None:
        candidates = set()
        for v in lp:
            candidates |= self.elem_adj[v]
        candidates.discard(p)
        for e in sorted(candidates):
            if self.elem_vars[e] <= lp:
                for v in self.elem_vars.pop(e):
                    self.elem_adj[v].discard(e)

    def _update_degrees(self, p: int, lp: Set[int]) -> None:
        lp_weight = self._weight_of(lp)
        # |Le \ Lp| 对所有与 Lp 相邻的元素
        outside: Dict[int, int] = {}
        for v in lp:
            for e in self.elem_adj[v]:
                if e != p and e not in outside:
                    outside[e] = self._weight_of(self.elem_vars[e] - lp)
        for v in lp:
            nv = int(self.weight[v])
            # 只含 v 自身的元素不贡献外部度
            bound_external = self.remaining_weight - nv
            bound_previous = int(self.degree[v]) + lp_weight - nv
            bound_structural = (
                self._weight_of(self.var_adj[v])
                + lp_weight - nv
                + sum(outside[e] for e in self.elem_adj[v] if e != p)
            )
            self.degree[v] = max(0, min(bound_external, bound_previous, bound_structural))
            self._push(v)

    def _detect_supervariables(self, lp: Set[int]) -> None:
        candidates = set(lp)
        for v in lp:
            candidates |= self.var_adj[v]
        candidates &= self.alive
        groups: Dict[frozenset, List[int]] = {}
        for v in sorted(candidates):
            groups.setdefault(frozenset(self.reach(v)), []).append(v)
        for group in groups.values():
            if len(group) < 2:
                continue
            principal = group[0]
            for v in group[1:]:
                self._merge(principal, v)
            self._push(principal)

    def _merge(self, principal: int, v: int) -> None:
        for u in self.var_adj[v]:
            self.var_adj[u].discard(v)
        for e in self.elem_adj[v]:
            self.elem_vars[e].discard(v)
        self.var_adj[principal].discard(v)
        self.weight[principal] += self.weight[v]
        self.members[principal].extend(self.members[v])
        self.degree[principal] = max(0, int(self.degree[principal]) - int(self.weight[v]))
        self.alive.discard(v)
        self.var_adj[v] = set()
        self.elem_adj[v] = set()
        self.members[v] = []


def _adjacency_sets(pattern: CompressedColumnMatrix) -> List[Set[int]]:
    lower = symmetric_lower_pattern(pattern, include_diagonal=False)
    n = lower.nrows
    adjacency: List[Set[int]] = [set() for _ in range(n)]
    for r, c in zip(lower.row_idx.tolist(), lower.col_idx.tolist()):
        adjacency[r].add(c)
        adjacency[c].add(r)
    return adjacency


def amd_order(pattern: CompressedColumnMatrix) -> Permutation:
    """
    近似最小度排序

    Args:
        pattern: 方阵结构(可为下三角或完整存储, 内部对称化)

    Returns:
        Permutation: perm[i] 为第 i 个被消去的原始变量

    Raises:
        DimensionMismatchError: 输入不是方阵
    """
    if pattern.nrows != pattern.ncols:
        raise DimensionMismatchError(f"AMD 要求方阵, 实际为 {pattern.nrows}x{pattern.ncols}")
    n = pattern.nrows
    graph = _QuotientGraph(n, _adjacency_sets(pattern))
    order: List[int] = []
    while graph.alive:
        order.extend(graph.eliminate(graph.pop_pivot()))
    if len(order) != n:
        raise KktError(f"AMD 输出长度({len(order)})与阶数({n})不一致")
    return Permutation.from_order(order)


def rcm_order(pattern: CompressedColumnMatrix) -> Permutation:
    """反向 Cuthill-McKee 排序 (带宽缩减)"""
    if pattern.nrows != pattern.ncols:
        raise DimensionMismatchError(f"RCM 要求方阵, 实际为 {pattern.nrows}x{pattern.ncols}")
    lower = symmetric_lower_pattern(pattern)
    graph = lower.with_values(np.ones(lower.nnz)).to_scipy()
    graph = (graph + graph.T).tocsr()
    return Permutation.from_order(reverse_cuthill_mckee(graph, symmetric_mode=True))


def natural_order(pattern: CompressedColumnMatrix) -> Permutation:
    return Permutation.identity(pattern.nrows)


def compute_ordering(pattern: CompressedColumnMatrix, method: OrderingMethod = "amd") -> Permutation:
    """按名称选择排序方法"""
    if method == "amd":
        return amd_order(pattern)
    if method == "rcm":
        return rcm_order(pattern)
    if method == "natural":
        return natural_order(pattern)
    raise ValueError(f"未知的排序方法: {method}")
