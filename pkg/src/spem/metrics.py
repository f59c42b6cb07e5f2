"""Embedding-quality measures with brute-force-verifiable definitions.

All rank computations break ties by ascending point index so every value is
reproducible and comparable against an independent double-loop reference.
Pairwise budgets: exact condensed distances up to N = 3000, a seeded sample
of 2e6 pairs beyond that.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
import scipy.stats

from .data import DataMatrix
from .errors import (
    DegenerateDistances,
    GraphTooFragmented,
    KTooLarge,
    ShapeMismatch,
    ValidationError,
    ZeroReference,
)
from .optimizer import ProjectionMatrix

EXACT_PAIR_LIMIT = 3000
PAIR_SAMPLE_BUDGET = 2_000_000


@dataclass(frozen=True)
class DistanceSummary:
    """Pairwise distances, condensed or a seeded subsample of pairs."""

    values: np.ndarray    # (L,) float64
    n_points: int
    sampled: bool
    pair_indices: np.ndarray | None = None  # (L, 2) when sampled

    @property
    def n_pairs(self) -> int:
        return self.values.shape[0]


def _as_points(x) -> np.ndarray:
    if isinstance(x, DataMatrix):
        return x.points
    arr = np.ascontiguousarray(np.asarray(x, dtype=np.float64))
    if arr.ndim != 2:
        raise ValidationError(f"expected a 2-D point array, got ndim={arr.ndim}")
    return arr


def _full_distances(x: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", x, x)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def pairwise_summary(x, budget: int = PAIR_SAMPLE_BUDGET,
                     seed: int = 0) -> DistanceSummary:
    """Condensed distances for small N, a seeded pair sample otherwise."""
    pts = _as_points(x)
    n = pts.shape[0]
    if n <= EXACT_PAIR_LIMIT:
        iu = np.triu_indices(n, k=1)
        d = _full_distances(pts)[iu]
        return DistanceSummary(values=d, n_points=n, sampled=False)
    rng = np.random.default_rng(seed)
    pairs = np.empty((0, 2), dtype=np.int64)
    while pairs.shape[0] < budget:
        cand = rng.integers(0, n, size=(budget + budget // 8, 2))
        cand = cand[cand[:, 0] != cand[:, 1]]
        cand.sort(axis=1)
        pairs = np.concatenate([pairs, cand])[:budget]
    diff = pts[pairs[:, 0]] - pts[pairs[:, 1]]
    d = np.linalg.norm(diff, axis=1)
    return DistanceSummary(values=d, n_points=n, sampled=True,
                           pair_indices=pairs)


def paired_summaries(x, y, budget: int = PAIR_SAMPLE_BUDGET,
                     seed: int = 0) -> tuple[DistanceSummary, DistanceSummary]:
    """Distance summaries of two spaces over identical pair indices."""
    sx = pairwise_summary(x, budget=budget, seed=seed)
    pts_y = _as_points(y)
    if pts_y.shape[0] != sx.n_points:
        raise ShapeMismatch("the two spaces must hold the same number of points")
    if not sx.sampled:
        sy = pairwise_summary(y, budget=budget, seed=seed)
    else:
        idx = sx.pair_indices
        d = np.linalg.norm(pts_y[idx[:, 0]] - pts_y[idx[:, 1]], axis=1)
        sy = DistanceSummary(values=d, n_points=sx.n_points, sampled=True,
                             pair_indices=idx)
    return sx, sy


def reconstruction_error(y_full: np.ndarray, y_s: np.ndarray,
                         align: bool = False) -> float:
    """E = ||Y_full - Y_s||_F / ||Y_full||_F.

    ``align`` first applies the optimal orthogonal map (polar factor of the
    cross-covariance) of Y_s onto Y_full, for comparing embeddings from
    different runs whose frames are unrelated.
    """
    yf = np.asarray(y_full, dtype=np.float64)
    ys = np.asarray(y_s, dtype=np.float64)
    if yf.shape != ys.shape:
        raise ShapeMismatch(f"shape mismatch: {yf.shape} vs {ys.shape}")
    ref = np.linalg.norm(yf)
    if ref == 0.0:
        raise ZeroReference("reference embedding has zero Frobenius norm")
    if align:
        u, _, vt = np.linalg.svd(ys.T @ yf)
        ys = ys @ (u @ vt)
    return float(np.linalg.norm(yf - ys) / ref)


def prefix_error_curve(p_full: ProjectionMatrix,
                       sizes=None) -> np.ndarray:
    """Reconstruction error of row-prefix truncations of a fixed P.

    With orthonormal modes, ||Y_full - Y_prefix(s)||_F is exactly the norm of
    the dropped rows, so E(s) = sqrt(sum_{r>s} ||p_r||^2) / ||P||_F — a
    non-increasing function of s by construction.
    """
    row_sq = np.einsum("ij,ij->i", p_full.values, p_full.values)
    total = row_sq.sum()
    if total == 0.0:
        raise ZeroReference("P is identically zero")
    tail = np.concatenate([np.cumsum(row_sq[::-1])[::-1][1:], [0.0]])
    tail = np.maximum(tail, 0.0)
    curve = np.sqrt(tail / total)
    if sizes is None:
        return curve
    sizes = np.asarray(sizes, dtype=np.int64)
    if sizes.min() < 1 or sizes.max() > p_full.rows:
        raise ValidationError("prefix sizes out of range")
    return curve[sizes - 1]


def _rank_matrix(x: np.ndarray) -> np.ndarray:
    """ranks[i, j] = 1-based rank of j among i's distances, ties by index.

    Diagonal entries are 0 (a point is not its own neighbor).
    """
    d = _full_distances(x)
    np.fill_diagonal(d, -1.0)  # self sorts first even among duplicates
    order = np.argsort(d, axis=1, kind="stable")
    n = d.shape[0]
    ranks = np.empty((n, n), dtype=np.int64)
    rows = np.arange(n)[:, None]
    ranks[rows, order] = np.arange(n)[None, :]
    return ranks


def _check_k(n: int, k: int) -> None:
    if not 1 <= k < (n - 1) / 2:
        raise KTooLarge(f"need 1 <= k < (N-1)/2, got k={k}, N={n}")


def continuity(x, y, k: int) -> float:
    """Penalty for neighbors of the original space lost in the embedding.

    1 - (2 / (N k (2N - 3k - 1))) * sum_i sum_{j in U_k(i)} (rank_Y(i,j) - k),
    U_k(i) = k-NN of i in X that are not k-NN of i in Y.
    """
    px, py = _as_points(x), _as_points(y)
    n = px.shape[0]
    if py.shape[0] != n:
        raise ShapeMismatch("X and Y must hold the same number of points")
    _check_k(n, k)
    rx = _rank_matrix(px)
    ry = _rank_matrix(py)
    missing = (rx <= k) & (ry > k)
    penalty = np.sum(ry[missing] - k)
    return float(1.0 - 2.0 * penalty / (n * k * (2 * n - 3 * k - 1)))


def mrre_missing(x, y, k: int) -> float:
    """Mean relative rank error over the original-space k-neighborhoods.

    Reported as 1 - normalized error so 1 is perfect and higher is better.
    """
    px, py = _as_points(x), _as_points(y)
    n = px.shape[0]
    if py.shape[0] != n:
        raise ShapeMismatch("X and Y must hold the same number of points")
    _check_k(n, k)
    rx = _rank_matrix(px)
    ry = _rank_matrix(py)
    sel = (rx >= 1) & (rx <= k)
    err = np.sum(np.abs(rx[sel] - ry[sel]) / rx[sel])
    l = np.arange(1, k + 1)
    norm = n * np.sum(np.abs(n - 2 * l + 1) / l)
    return float(1.0 - err / norm)


def spearman_rho(dx: DistanceSummary | np.ndarray,
                 dy: DistanceSummary | np.ndarray) -> float:
    """Pearson correlation of fractional (average-tie) ranks.

    Returns NaN when either array is constant — the correlation is undefined
    there and must not read as "no correlation".
    """
    vx = dx.values if isinstance(dx, DistanceSummary) else np.asarray(dx, float)
    vy = dy.values if isinstance(dy, DistanceSummary) else np.asarray(dy, float)
    if vx.shape != vy.shape:
        raise ShapeMismatch("distance arrays differ in length")
    if np.all(vx == vx[0]) or np.all(vy == vy[0]):
        return float("nan")
    rx = scipy.stats.rankdata(vx, method="average")
    ry = scipy.stats.rankdata(vy, method="average")
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx @ ry) / np.sqrt((rx @ rx) * (ry @ ry)))


def isotonic_fit(values: np.ndarray) -> np.ndarray:
    """Least-squares non-decreasing fit via pool-adjacent-violators."""
    y = np.asarray(values, dtype=np.float64)
    n = y.shape[0]
    # block-merge PAV: each block holds (mean, weight)
    means = np.empty(n)
    weights = np.empty(n)
    lengths = np.empty(n, dtype=np.int64)
    top = 0
    for v in y:
        means[top] = v
        weights[top] = 1.0
        lengths[top] = 1
        top += 1
        while top > 1 and means[top - 2] >= means[top - 1]:
            w = weights[top - 2] + weights[top - 1]
            means[top - 2] = (weights[top - 2] * means[top - 2]
                              + weights[top - 1] * means[top - 1]) / w
            weights[top - 2] = w
            lengths[top - 2] += lengths[top - 1]
            top -= 1
    return np.repeat(means[:top], lengths[:top])


def stress_pair(dx: DistanceSummary | np.ndarray,
                dy: DistanceSummary | np.ndarray) -> tuple[float, float]:
    """(nonmetric, scale_normalized) stress between two distance arrays.

    scale_normalized: sqrt(sum(dX - a dY)^2 / sum dX^2), a = <dX,dY>/<dY,dY>.
    nonmetric: Kruskal stress-1 after replacing dX by its isotonic fit in the
    order of dY (ties by index), with the analogous optimal scaling.
    """
    vx = dx.values if isinstance(dx, DistanceSummary) else np.asarray(dx, float)
    vy = dy.values if isinstance(dy, DistanceSummary) else np.asarray(dy, float)
    if vx.shape != vy.shape:
        raise ShapeMismatch("distance arrays differ in length")
    if np.all(vx == vx[0]):
        raise DegenerateDistances("all reference distances are equal")
    yy = float(vy @ vy)
    if yy == 0.0:
        raise DegenerateDistances("embedding distances are identically zero")

    alpha = float(vx @ vy) / yy
    scale_norm = np.sqrt(np.sum((vx - alpha * vy) ** 2) / np.sum(vx ** 2))

    order = np.argsort(vy, kind="stable")
    fitted = np.empty_like(vx)
    fitted[order] = isotonic_fit(vx[order])
    alpha_iso = float(fitted @ vy) / yy
    denom = np.sum((alpha_iso * vy) ** 2)
    if denom == 0.0:
        raise DegenerateDistances("isotonic scaling collapsed to zero")
    nonmetric = np.sqrt(np.sum((fitted - alpha_iso * vy) ** 2) / denom)
    return float(nonmetric), float(scale_norm)


@dataclass(frozen=True)
class DemapResult:
    value: float
    coverage: float
    n_component: int


def demap(x, y, k_geo: int = 15) -> DemapResult:
    """Spearman correlation of kNN-graph geodesics vs embedding distances.

    Geodesics run over the symmetrized k_geo-NN graph with Euclidean edge
    lengths, restricted to the largest connected component; the coverage
    fraction of that component is reported alongside.
    """
    px, py = _as_points(x), _as_points(y)
    n = px.shape[0]
    if py.shape[0] != n:
        raise ShapeMismatch("X and Y must hold the same number of points")
    if not 2 <= k_geo < n:
        raise ValidationError(f"need 2 <= k_geo < N, got k_geo={k_geo}")

    from .graph import build_knn  # local import avoids a cycle at module load
    nbrs = build_knn(DataMatrix(px), k_geo)
    rows = np.repeat(np.arange(n, dtype=np.int64), k_geo)
    cols = nbrs.indices.ravel()
    vals = nbrs.distances.ravel()
    adj = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    adj = adj.maximum(adj.T)

    n_comp, labels = csgraph.connected_components(adj, directed=False)
    sizes = np.bincount(labels, minlength=n_comp)
    main = int(np.argmax(sizes))
    coverage = float(sizes[main] / n)
    if coverage < 0.5:
        raise GraphTooFragmented(coverage)

    keep = np.nonzero(labels == main)[0]
    sub = adj[keep][:, keep]
    geo = csgraph.shortest_path(sub, method="D", directed=False)
    iu = np.triu_indices(keep.size, k=1)
    d_geo = geo[iu]
    d_emb = _full_distances(py[keep])[iu]
    return DemapResult(value=spearman_rho(d_geo, d_emb), coverage=coverage,
                       n_component=int(sizes[main]))


METRIC_COLUMNS = (
    "s", "recon_error", "continuity", "mrre", "spearman_rho",
    "nonmetric_stress", "scale_normalized_stress", "demap", "demap_coverage",
)


@dataclass(frozen=True)
class MetricReport:
    """Per-stage quality scores plus the parameters that produced them."""

    per_stage: dict[int, dict[str, float]]
    parameters: dict[str, object] = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "per_stage": {str(s): vals for s, vals in self.per_stage.items()},
            "parameters": self.parameters,
        }
        return json.dumps(payload, indent=2, allow_nan=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(METRIC_COLUMNS)
        for s in sorted(self.per_stage):
            row = self.per_stage[s]
            writer.writerow([s] + [repr(row.get(c, float("nan")))
                                   for c in METRIC_COLUMNS[1:]])
        return buf.getvalue()


def evaluate_stages(x, stages, k: int = 15, demap_k: int = 15,
                    pair_seed: int = 0,
                    reference: np.ndarray | None = None) -> MetricReport:
    """Full metric suite for a list of (s, Y) stage snapshots.

    ``reference`` defaults to the last stage's embedding; reconstruction
    error compares each stage against it within the shared run frame.
    """
    px = _as_points(x)
    if not stages:
        raise ValidationError("no stages to evaluate")
    y_ref = stages[-1][1] if reference is None else reference
    per_stage: dict[int, dict[str, float]] = {}
    for s, y in stages:
        dx, dy = paired_summaries(px, y, seed=pair_seed)
        nonmetric, scale_norm = stress_pair(dx, dy)
        dm = demap(px, y, k_geo=demap_k)
        per_stage[int(s)] = {
            "recon_error": reconstruction_error(y_ref, y),
            "continuity": continuity(px, y, k),
            "mrre": mrre_missing(px, y, k),
            "spearman_rho": spearman_rho(dx, dy),
            "nonmetric_stress": nonmetric,
            "scale_normalized_stress": scale_norm,
            "demap": dm.value,
            "demap_coverage": dm.coverage,
        }
    n = px.shape[0]
    exact = n <= EXACT_PAIR_LIMIT
    return MetricReport(
        per_stage=per_stage,
        parameters={
            "k_metric": k,
            "demap_k": demap_k,
            "sample_pairs": n * (n - 1) // 2 if exact else PAIR_SAMPLE_BUDGET,
            "pair_seed": pair_seed,
        },
    )
