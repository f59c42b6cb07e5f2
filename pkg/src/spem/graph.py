"""Weighted k-nearest-neighbor fuzzy graph and its normalized Laplacian.

The pipeline is ``build_knn -> fuzzy_weights -> symmetrize ->
normalized_laplacian``.  Neighbor search is exact (blocked brute force);
tie-breaking is by ascending index so artifacts are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .data import DataMatrix
from .errors import IsolatedVertex, SigmaSearchFailed, ValidationError

SIGMA_TOLERANCE = 1e-5
SIGMA_MAX_ITER = 64
SIGMA_FLOOR = 1e-12
EDGE_DROP_THRESHOLD = 1e-12


@dataclass(frozen=True)
class NeighborLists:
    """Exact k nearest neighbors per point, self excluded, rows ascending."""

    indices: np.ndarray   # (N, k) int64
    distances: np.ndarray  # (N, k) float64, row-wise ascending

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    @property
    def k(self) -> int:
        return self.indices.shape[1]


@dataclass(frozen=True)
class DirectedWeights:
    """Per-point fuzzy membership weights with their local scale parameters.

    ``weights[i, j]`` is the directed weight from point ``i`` to
    ``indices[i, j]``.  ``degenerate_k`` flags the k=1 fallback where every
    weight is 1 and sigma is unused.
    """

    indices: np.ndarray   # (N, k) int64
    weights: np.ndarray   # (N, k) float64 in (0, 1]
    rho: np.ndarray       # (N,) distance to nearest neighbor
    sigma: np.ndarray     # (N,) bandwidth from the bisection
    degenerate_k: bool = False


@dataclass(frozen=True)
class FuzzyGraph:
    """Symmetric weighted adjacency as an edge list with i < j per edge."""

    n: int
    heads: np.ndarray    # (E,) int64, heads[e] < tails[e]
    tails: np.ndarray    # (E,) int64
    weights: np.ndarray  # (E,) float64 in (0, 1]
    degree: np.ndarray   # (N,) float64, row sums of the symmetric adjacency

    @property
    def n_edges(self) -> int:
        return self.heads.shape[0]

    def adjacency(self) -> sp.csr_matrix:
        """Symmetric CSR adjacency built from the edge list."""
        ij = np.concatenate([self.heads, self.tails])
        ji = np.concatenate([self.tails, self.heads])
        w = np.concatenate([self.weights, self.weights])
        return sp.coo_matrix((w, (ij, ji)), shape=(self.n, self.n)).tocsr()


@dataclass(frozen=True)
class LaplacianMatrix:
    """Sparse symmetric normalized Laplacian L = I - D^{-1/2} W D^{-1/2}."""

    n: int
    matrix: sp.csr_matrix
    degree: np.ndarray   # kept for trivial-mode identification downstream


def _pairwise_sq_euclidean(block: np.ndarray, data: np.ndarray,
                           sq_norms: np.ndarray, start: int) -> np.ndarray:
    d2 = sq_norms[start:start + block.shape[0], None] + sq_norms[None, :]
    d2 -= 2.0 * (block @ data.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def build_knn(data: DataMatrix, k: int, metric: str = "euclidean",
              block_size: int = 256) -> NeighborLists:
    """Exact k nearest neighbors under the given metric.

    Brute-force correctness is the contract; the search is merely blocked so
    the full N x N distance matrix never materializes.  Ties are broken by
    ascending index.
    """
    x = data.points
    n = x.shape[0]
    if not 1 <= k < n:
        raise ValidationError(f"need 1 <= k < N, got k={k}, N={n}")
    if metric not in ("euclidean", "cosine"):
        raise ValidationError(f"unknown metric {metric!r}")

    if metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        if np.any(norms == 0.0):
            raise ValidationError("cosine metric undefined for zero-norm rows")
        x = x / norms[:, None]

    sq_norms = np.einsum("ij,ij->i", x, x) if metric == "euclidean" else None

    indices = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k), dtype=np.float64)
    col_ids = np.arange(n)

    for start in range(0, n, block_size):
        block = x[start:start + block_size]
        b = block.shape[0]
        if metric == "euclidean":
            d = _pairwise_sq_euclidean(block, x, sq_norms, start)
        else:
            d = 1.0 - block @ x.T
            np.clip(d, 0.0, 2.0, out=d)
        d[np.arange(b), start + np.arange(b)] = np.inf
        # stable sort keeps equal distances in ascending-index order
        order = np.argsort(d, axis=1, kind="stable")[:, :k]
        indices[start:start + b] = col_ids[order]
        dk = np.take_along_axis(d, order, axis=1)
        distances[start:start + b] = np.sqrt(dk) if metric == "euclidean" else dk

    return NeighborLists(indices=indices, distances=distances)


def fuzzy_weights(nbrs: NeighborLists) -> DirectedWeights:
    """Adaptive-bandwidth membership weights exp(-max(0, d - rho) / sigma).

    ``rho`` is the distance to the nearest neighbor; ``sigma`` is found per
    point by bisection so the weights sum to log2(k), giving every point
    comparable total connectivity.  The nearest edge always gets weight 1.
    """
    d = nbrs.distances
    n, k = d.shape
    rho = d[:, 0].copy()

    if k == 1:
        return DirectedWeights(
            indices=nbrs.indices,
            weights=np.ones((n, 1)),
            rho=rho,
            sigma=np.full(n, np.nan),
            degenerate_k=True,
        )

    gaps = np.maximum(d - rho[:, None], 0.0)   # (N, k), column 0 is all zeros
    target = np.log2(k)

    def weight_sum(sigma: np.ndarray, rows: np.ndarray) -> np.ndarray:
        with np.errstate(under="ignore"):
            return np.exp(-gaps[rows] / sigma[:, None]).sum(axis=1)

    lo = np.full(n, SIGMA_FLOOR)
    hi = np.maximum(d[:, -1], SIGMA_FLOOR) * 1024.0
    all_rows = np.arange(n)

    f_hi = weight_sum(hi, all_rows)
    short = np.nonzero(f_hi < target - SIGMA_TOLERANCE)[0]
    if short.size:
        raise SigmaSearchFailed(int(short[0]))

    # rows already at/above target with sigma at the floor (duplicate-heavy
    # neighborhoods) keep sigma = floor; their weights are correct as-is
    f_lo = weight_sum(lo, all_rows)
    sigma = lo.copy()
    active = np.nonzero(f_lo < target)[0]

    lo_a, hi_a = lo[active], hi[active]
    for _ in range(SIGMA_MAX_ITER):
        if active.size == 0:
            break
        mid = 0.5 * (lo_a + hi_a)
        f_mid = weight_sum(mid, active)
        done = np.abs(f_mid - target) <= SIGMA_TOLERANCE
        sigma[active[done]] = mid[done]
        too_big = f_mid > target
        hi_a = np.where(too_big, mid, hi_a)
        lo_a = np.where(too_big, lo_a, mid)
        keep = ~done
        active, lo_a, hi_a = active[keep], lo_a[keep], hi_a[keep]
    if active.size:
        sigma[active] = 0.5 * (lo_a + hi_a)

    with np.errstate(under="ignore"):
        weights = np.exp(-gaps / sigma[:, None])
    return DirectedWeights(
        indices=nbrs.indices, weights=weights, rho=rho, sigma=sigma
    )


def symmetrize(directed: DirectedWeights) -> FuzzyGraph:
    """Probabilistic t-conorm union: w_ij = a + b - a*b.

    Edges below the drop threshold are discarded to keep the list strictly
    sparse; degrees are computed from the kept symmetric weights.
    """
    n, k = directed.weights.shape
    rows = np.repeat(np.arange(n, dtype=np.int64), k)
    cols = directed.indices.ravel().astype(np.int64)
    vals = directed.weights.ravel()
    a = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    union = a + a.T - a.multiply(a.T)

    coo = union.tocoo()
    upper = coo.row < coo.col
    i, j, w = coo.row[upper], coo.col[upper], coo.data[upper]
    keep = w >= EDGE_DROP_THRESHOLD
    i, j, w = i[keep], j[keep], w[keep]
    order = np.lexsort((j, i))
    i, j, w = i[order].astype(np.int64), j[order].astype(np.int64), w[order]

    degree = np.zeros(n)
    np.add.at(degree, i, w)
    np.add.at(degree, j, w)
    return FuzzyGraph(n=n, heads=i, tails=j, weights=w, degree=degree)


def normalized_laplacian(g: FuzzyGraph) -> LaplacianMatrix:
    """L = I - D^{-1/2} W D^{-1/2}, stored sparse and exactly symmetric."""
    if np.any(g.degree <= 0.0):
        bad = int(np.nonzero(g.degree <= 0.0)[0][0])
        raise IsolatedVertex(
            f"vertex {bad} has zero degree; drop or reconnect it before "
            "building the Laplacian"
        )
    # each off-diagonal entry computed once, so L is symmetric to the bit
    scaled = g.weights / np.sqrt(g.degree[g.heads] * g.degree[g.tails])
    ij = np.concatenate([g.heads, g.tails])
    ji = np.concatenate([g.tails, g.heads])
    vals = np.concatenate([-scaled, -scaled])
    off = sp.coo_matrix((vals, (ij, ji)), shape=(g.n, g.n)).tocsr()
    lap = (sp.identity(g.n, format="csr") + off).tocsr()
    return LaplacianMatrix(n=g.n, matrix=lap, degree=g.degree.copy())
