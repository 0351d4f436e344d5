"""Asset reordering (quasi-diagonalization) by single-linkage clustering
on the correlation distance, so that bisection discards less covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .covmat import cov_values
from .errors import DimensionMismatch, InputError, ZeroVariance

SERIATION_METHODS = ("single_linkage", "identity")


@dataclass(frozen=True)
class Permutation:
    """order[i] = original index of the asset placed at position i."""

    order: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.order) != list(range(len(self.order))):
            raise InputError("order is not a permutation of 0..n-1")

    def __len__(self) -> int:
        return len(self.order)

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.order)
        for pos, orig in enumerate(self.order):
            inv[orig] = pos
        return Permutation(tuple(inv))


def correlation_distance(cov) -> np.ndarray:
    """d_ij = sqrt(0.5 * (1 - rho_ij)), zero diagonal, entries in [0, 1]."""
    values = cov_values(cov)
    diag = np.diag(values)
    if diag.min() <= 0.0:
        raise ZeroVariance("correlation distance needs strictly positive variances")
    vol = np.sqrt(diag)
    corr = values / np.outer(vol, vol)
    corr = np.clip(corr, -1.0, 1.0)
    dist = np.sqrt(np.maximum(0.5 * (1.0 - corr), 0.0))
    np.fill_diagonal(dist, 0.0)
    return dist


def seriate(cov, method: str = "single_linkage") -> Permutation:
    values = cov_values(cov)
    n = values.shape[0]
    if method == "identity":
        return Permutation(tuple(range(n)))
    if method != "single_linkage":
        raise InputError(f"unknown seriation method {method!r}")
    if n <= 2:
        return Permutation(tuple(range(n)))
    dist = correlation_distance(values)
    return Permutation(tuple(_single_linkage_order(dist)))


def _single_linkage_order(dist: np.ndarray) -> list[int]:
    """Dendrogram leaf order from agglomerative single-linkage clustering.

    Merge selection is by minimum linkage distance with exact ties broken by
    the lexicographically smallest pair of cluster ids, where a cluster's id
    is its smallest original index. Within a merge the child with the smaller
    (total-distance-mass, id) key is placed first; the distance-mass key keeps
    the leaf order a function of distances alone whenever they are distinct,
    the id key makes full ties (e.g. equicorrelated inputs) reproducible.
    """
    n = dist.shape[0]
    rowmass = dist.sum(axis=1)

    leaves = [[i] for i in range(n)]           # leaf lists per live cluster
    ids = list(range(n))                       # smallest original index per cluster
    keys = [(rowmass[i], i) for i in range(n)]  # ordering key per cluster
    link = dist.copy()
    np.fill_diagonal(link, np.inf)
    alive = list(range(n))

    while len(alive) > 1:
        rows = np.asarray(alive)
        sub = link[np.ix_(rows, rows)]
        d_min = sub.min()
        tie_i, tie_j = np.nonzero(sub == d_min)
        best = None
        for ti, tj in zip(tie_i.tolist(), tie_j.tolist()):
            if ti >= tj:
                continue
            i, j = alive[ti], alive[tj]
            pair_ids = (min(ids[i], ids[j]), max(ids[i], ids[j]))
            if best is None or pair_ids < best[0]:
                best = (pair_ids, (i, j))
        i, j = best[1]
        first, second = (i, j) if keys[i] <= keys[j] else (j, i)
        leaves[i] = leaves[first] + leaves[second]
        ids[i] = min(ids[i], ids[j])
        keys[i] = min(keys[i], keys[j])
        merged_link = np.minimum(link[i], link[j])
        link[i] = merged_link
        link[:, i] = merged_link
        link[i, i] = np.inf
        alive.remove(j)

    return leaves[alive[0]]


def permute_matrix(cov, perm: Permutation) -> np.ndarray:
    """P Sigma P': entry (i, j) of the result is Sigma[order[i], order[j]]."""
    values = cov_values(cov)
    if values.shape[0] != len(perm):
        raise DimensionMismatch("permutation size does not match matrix size")
    idx = np.asarray(perm.order)
    return values[np.ix_(idx, idx)]


def permute_vector(vec, perm: Permutation) -> np.ndarray:
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (len(perm),):
        raise DimensionMismatch("permutation size does not match vector size")
    return vec[np.asarray(perm.order)]


def unpermute_weights(weights, perm: Permutation) -> np.ndarray:
    """Map weights computed in permuted coordinates back to the original order."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(perm),):
        raise DimensionMismatch("permutation size does not match weight size")
    out = np.empty_like(weights)
    out[np.asarray(perm.order)] = weights
    return out
