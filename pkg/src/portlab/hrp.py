"""Hierarchical risk parity: distance transforms, single-linkage tree,
quasi-diagonal seriation, and recursive bisection.

The pipeline runs correlation -> correlation distance -> co-distance ->
single-linkage tree -> leaf order -> recursive bisection over the
covariance matrix. Clustering operates on the co-distance matrix; the
correlation distance is only the intermediate transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytics import VARIANCE_FLOOR, CorrMatrix, CovMatrix, ReturnTable, correlation, covariance
from .mvp import Portfolio

LINKAGE_METHODS = ("single", "ward")


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric non-negative distances with zero diagonal.

    ``kind`` records which transform produced it: "correlation" for the
    elementwise sqrt(0.5 * (1 - rho)) map, "codistance" for the pairwise
    Euclidean distance between its columns.
    """

    tickers: tuple[str, ...]
    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        n = len(self.tickers)
        if values.shape != (n, n):
            raise ValueError("distance matrix shape does not match tickers")
        if np.max(np.abs(values - values.T), initial=0.0) > 1e-12:
            raise ValueError("distance matrix must be symmetric within 1e-12")
        if np.any(np.diag(values) != 0.0):
            raise ValueError("distance matrix diagonal must be zero")
        if np.any(values < 0):
            raise ValueError("distances must be non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "tickers", tuple(self.tickers))
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class MergeRecord:
    """One agglomeration step: child node ids, merge distance, merged leaf count."""

    left: int
    right: int
    distance: float
    size: int


@dataclass(frozen=True)
class LinkageTree:
    """N-1 merges over node ids 0..N-1 (leaves) and N..2N-2 (internal)."""

    n_leaves: int
    merges: tuple[MergeRecord, ...]

    def __post_init__(self) -> None:
        n = self.n_leaves
        if len(self.merges) != n - 1:
            raise ValueError(f"expected {n - 1} merges, got {len(self.merges)}")
        seen: set[int] = set()
        sizes = {i: 1 for i in range(n)}
        prev = -math.inf
        for step, m in enumerate(self.merges):
            new_id = n + step
            for child in (m.left, m.right):
                if child not in sizes:
                    raise ValueError(f"merge {step} references unknown node {child}")
                if child in seen:
                    raise ValueError(f"node {child} used as a child twice")
                seen.add(child)
            if m.size != sizes[m.left] + sizes[m.right]:
                raise ValueError(f"merge {step} size {m.size} inconsistent with children")
            if m.distance < prev - 1e-12:
                raise ValueError("merge distances must be non-decreasing")
            prev = m.distance
            sizes[new_id] = m.size
        object.__setattr__(self, "merges", tuple(self.merges))

    @property
    def root(self) -> int:
        return self.n_leaves + len(self.merges) - 1


@dataclass(frozen=True)
class SeriationOrder:
    """Dendrogram leaf order: a permutation of 0..N-1."""

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise ValueError("order must be a permutation of 0..N-1")
        object.__setattr__(self, "order", tuple(int(i) for i in self.order))


def corr_distance(corr: CorrMatrix) -> DistanceMatrix:
    """Map correlations to distances: ``sqrt(0.5 * (1 - rho))``."""
    values = np.sqrt(np.maximum(0.5 * (1.0 - corr.values), 0.0))
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(corr.tickers, values, kind="correlation")


def codistance(d: DistanceMatrix) -> DistanceMatrix:
    """Euclidean distance between distance-matrix columns.

    Measures how similarly two assets relate to the rest of the portfolio:
    ``sqrt(sum_k (D[k,i] - D[k,j])^2)``.
    """
    diff = d.values[:, :, None] - d.values[:, None, :]
    values = np.sqrt((diff * diff).sum(axis=0))
    return DistanceMatrix(d.tickers, values, kind="codistance")


def single_linkage(d: DistanceMatrix) -> LinkageTree:
    """Agglomerate by repeatedly merging the closest pair (min-distance update)."""
    return linkage_tree(d, method="single")


def linkage_tree(d: DistanceMatrix, method: str = "single") -> LinkageTree:
    """Agglomerative clustering of a distance matrix.

    "single" is the allocation path: cluster distance is the minimum over
    element pairs, applied via the min update rule. "ward" (Lance-Williams
    update) exists only for dendrogram export. Ties in the closest pair
    break to the lexicographically smallest (left, right) node ids.

    Child order in each merge record is label-invariant: a leaf precedes
    an internal sibling, internal siblings keep formation order, and two
    leaves order by their column sum in the input matrix (falling back to
    node id on exact ties). This keeps the downstream seriation, and so
    the HRP weights, equivariant under input permutations.
    """
    if method not in LINKAGE_METHODS:
        raise ValueError(f"unknown linkage method {method!r}")
    n = len(d.tickers)
    if n < 2:
        raise ValueError("need at least 2 assets to cluster")
    colsums = d.values.sum(axis=0)

    total = 2 * n - 1
    dm = np.full((total, total), np.inf)
    dm[:n, :n] = d.values
    sizes = np.ones(total, dtype=int)
    active = list(range(n))  # kept ascending; new ids are always the largest
    merges: list[MergeRecord] = []

    for step in range(n - 1):
        best_a = best_b = -1
        best_dist = math.inf
        for ai in range(len(active)):
            for bi in range(ai + 1, len(active)):
                a, b = active[ai], active[bi]
                if dm[a, b] < best_dist:
                    best_dist = dm[a, b]
                    best_a, best_b = a, b
        new_id = n + step
        sizes[new_id] = sizes[best_a] + sizes[best_b]
        left, right = best_a, best_b
        if right < n and (colsums[right], right) < (colsums[left], left):
            left, right = right, left
        merges.append(MergeRecord(left, right, float(best_dist), int(sizes[new_id])))
        for c in active:
            if c == best_a or c == best_b:
                continue
            if method == "single":
                dist = min(dm[c, best_a], dm[c, best_b])
            else:
                dist = _ward_update(
                    dm[c, best_a], dm[c, best_b], best_dist,
                    sizes[best_a], sizes[best_b], sizes[c],
                )
            dm[new_id, c] = dm[c, new_id] = dist
        active.remove(best_a)
        active.remove(best_b)
        active.append(new_id)

    return LinkageTree(n, tuple(merges))


def _ward_update(d_ca: float, d_cb: float, d_ab: float, na: int, nb: int, nc: int) -> float:
    denom = na + nb + nc
    sq = ((na + nc) * d_ca**2 + (nb + nc) * d_cb**2 - nc * d_ab**2) / denom
    return math.sqrt(max(sq, 0.0))


def quasi_diag_order(tree: LinkageTree) -> SeriationOrder:
    """Depth-first leaf order of the tree, left subtree before right.

    Reordering the covariance matrix by this permutation pulls large
    entries toward the diagonal.
    """
    order: list[int] = []
    stack = [tree.root]
    while stack:
        node = stack.pop()
        if node < tree.n_leaves:
            order.append(node)
        else:
            merge = tree.merges[node - tree.n_leaves]
            stack.append(merge.right)
            stack.append(merge.left)
    return SeriationOrder(tuple(order))


def cluster_variance(cov_sub: np.ndarray) -> float:
    """Variance of a cluster under inverse-variance weights.

    ``w = diag(V)^-1 / trace(diag(V)^-1)`` then ``w' V w``, with diagonal
    entries floored at VARIANCE_FLOOR so constant assets cannot divide by zero.
    """
    v = np.atleast_2d(np.asarray(cov_sub, dtype=float))
    if v.shape[0] == 0:
        raise ValueError("cluster must be non-empty")
    diag = np.maximum(np.diag(v), VARIANCE_FLOOR)
    v = v.copy()
    np.fill_diagonal(v, diag)
    w = 1.0 / diag
    w /= w.sum()
    return float(w @ v @ w)


def recursive_bisection(cov: CovMatrix, order: SeriationOrder) -> Portfolio:
    """Top-down weight assignment over the seriated asset list.

    All weights start at 1. Each cluster splits into two contiguous
    halves (ceil(n/2) | rest); the left half is scaled by
    ``a = 1 - V1/(V1 + V2)`` and the right by ``1 - a``, where each V is the
    inverse-variance cluster variance. Cluster variances are floored so
    every split factor stays strictly inside (0, 1).
    """
    n = len(order.order)
    if cov.values.shape[0] != n:
        raise ValueError("seriation order does not match covariance size")
    weights = np.ones(n)
    stack: list[list[int]] = [list(order.order)]
    while stack:
        items = stack.pop()
        if len(items) < 2:
            continue
        half = (len(items) + 1) // 2
        left, right = items[:half], items[half:]
        v1 = max(cluster_variance(cov.values[np.ix_(left, left)]), VARIANCE_FLOOR)
        v2 = max(cluster_variance(cov.values[np.ix_(right, right)]), VARIANCE_FLOOR)
        alpha = 1.0 - v1 / (v1 + v2)
        weights[left] *= alpha
        weights[right] *= 1.0 - alpha
        stack.append(left)
        stack.append(right)
    weights /= weights.sum()
    return Portfolio(cov.tickers, weights)


def hrp_weights(returns: ReturnTable, method: str = "single") -> Portfolio:
    """Full pipeline from a return table to HRP weights."""
    corr = correlation(returns)
    dbar = codistance(corr_distance(corr))
    tree = linkage_tree(dbar, method=method)
    order = quasi_diag_order(tree)
    return recursive_bisection(covariance(returns), order)


def linkage_to_records(tree: LinkageTree) -> list[dict]:
    """Merge list as plain dicts, consumable by standard dendrogram plotters."""
    return [
        {"left": m.left, "right": m.right, "distance": m.distance, "size": m.size}
        for m in tree.merges
    ]


def tree_from_records(records: list[dict], n_leaves: int) -> LinkageTree:
    """Inverse of :func:`linkage_to_records`."""
    merges = tuple(
        MergeRecord(int(r["left"]), int(r["right"]), float(r["distance"]), int(r["size"]))
        for r in records
    )
    return LinkageTree(n_leaves, merges)
