"""Cross-entropy optimization of the projection matrix P.

The embedding is Y = U P for a fixed orthonormal mode basis U, so descent
happens in the low-dimensional coefficient space: every sampled pairwise
interaction becomes a rank-one update of P.  ``dense_loss`` and
``dense_loss_grad`` are full-sum reference implementations used by tests;
``optimize`` is the sampled production path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import _kernels
from .errors import (
    FitDiverged,
    NonFiniteUpdate,
    TooLargeForDense,
    ValidationError,
)
from .graph import FuzzyGraph
from .spectral import SpectralSubspace

Q_CLAMP = 1e-12
DENSE_LIMIT = 2000
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class CurveParams:
    """Shape (a, b) of the similarity curve q(d) = (1 + a d^{2b})^{-1}."""

    a: float
    b: float
    min_dist: float = 0.1
    spread: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise ValidationError(f"a must be finite and > 0, got {self.a}")
        if not (np.isfinite(self.b) and self.b > 0):
            raise ValidationError(f"b must be finite and > 0, got {self.b}")


@dataclass(frozen=True)
class ProjectionMatrix:
    """s x m' coefficient matrix; row order matches the subspace modes."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 2:
            raise ValidationError(f"P must be 2-D, got ndim={v.ndim}")
        if not np.isfinite(v).all():
            raise ValidationError("P contains non-finite entries")
        object.__setattr__(self, "values", v)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class OptimizerConfig:
    epochs: int
    initial_lr: float = 1.0
    negative_samples: int = 5
    gamma: float = 5.0
    grad_clip: float = 4.0
    eps: float = 1e-3
    seed: int = 0
    deterministic: bool = True

    def __post_init__(self):
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        for name in ("initial_lr", "negative_samples", "gamma", "grad_clip",
                     "eps"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be > 0")


def fit_ab(min_dist: float, spread: float = 1.0) -> CurveParams:
    """Least-squares fit of (a, b) to the min_dist/spread target curve.

    Target: 1 for d <= min_dist, exp(-(d - min_dist)/spread) beyond, sampled
    at 300 points on [0, 3*spread].
    """
    if spread <= 0 or not 0 <= min_dist < spread * 10:
        raise ValidationError(
            f"need spread > 0 and 0 <= min_dist < 10*spread, "
            f"got min_dist={min_dist}, spread={spread}"
        )
    xv = np.linspace(0.0, spread * 3.0, 300)
    yv = np.where(
        xv <= min_dist, 1.0, np.exp(-(xv - min_dist) / spread)
    )

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2.0 * b))

    popt, _, info, msg, ier = scipy.optimize.curve_fit(
        curve, xv, yv, p0=(1.0, 1.0), full_output=True, gtol=1e-10,
        maxfev=10000,
    )
    if ier not in (1, 2, 3, 4) or not np.all(np.isfinite(popt)) or popt.min() <= 0:
        raise FitDiverged(last_iterate=tuple(popt), message=msg)
    return CurveParams(a=float(popt[0]), b=float(popt[1]),
                       min_dist=float(min_dist), spread=float(spread))


def q_similarity(yi: np.ndarray, yj: np.ndarray, c: CurveParams) -> float:
    """q = (1 + a ||yi - yj||^{2b})^{-1}, in (0, 1]."""
    d2 = float(np.sum((np.asarray(yi, dtype=np.float64)
                       - np.asarray(yj, dtype=np.float64)) ** 2))
    return 1.0 / (1.0 + c.a * d2 ** c.b)


def pair_gradients(yi: np.ndarray, yj: np.ndarray, c: CurveParams,
                   eps: float = 1e-3) -> tuple[np.ndarray, np.ndarray]:
    """(attractive, repulsive) gradients of the pair penalties w.r.t. yi.

    attractive = d(-log q)/dyi, repulsive = d(-log(1-q))/dyi with the eps
    guard in the repulsive denominator.  Both are returned unclipped; the
    optimizer clips per coordinate at application time.
    """
    yi = np.asarray(yi, dtype=np.float64)
    yj = np.asarray(yj, dtype=np.float64)
    diff = yi - yj
    d2 = float(diff @ diff)
    if d2 == 0.0:
        return np.zeros_like(diff), np.zeros_like(diff)
    denom = 1.0 + c.a * d2 ** c.b
    attr = (2.0 * c.a * c.b * d2 ** (c.b - 1.0) / denom) * diff
    rep = (-2.0 * c.b / ((eps + d2) * denom)) * diff
    return attr, rep


def _pairwise_sq_dists(y: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", y, y)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (y @ y.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def _check_dense_inputs(p: ProjectionMatrix, u: SpectralSubspace,
                        g: FuzzyGraph) -> np.ndarray:
    if p.rows != u.s:
        raise ValidationError(f"P has {p.rows} rows but subspace has s={u.s}")
    if u.n != g.n:
        raise ValidationError("subspace and graph disagree on n")
    if g.n > DENSE_LIMIT:
        raise TooLargeForDense(
            f"dense reference is quadratic; n={g.n} exceeds {DENSE_LIMIT}"
        )
    return u.basis @ p.values


def dense_loss(p: ProjectionMatrix, u: SpectralSubspace, g: FuzzyGraph,
               c: CurveParams, gamma: float) -> float:
    """Full-sum objective: -sum_edges w log q - gamma sum_{i<j} log(1 - q).

    q is clamped to [1e-12, 1 - 1e-12] before the logs.  Quadratic in n;
    guarded to n <= 2000.
    """
    y = _check_dense_inputs(p, u, g)
    d2 = _pairwise_sq_dists(y)
    with np.errstate(divide="ignore"):
        q = 1.0 / (1.0 + c.a * d2 ** c.b)
    np.clip(q, Q_CLAMP, 1.0 - Q_CLAMP, out=q)

    attract = -np.sum(g.weights * np.log(q[g.heads, g.tails]))
    log_rep = np.log(1.0 - q)
    np.fill_diagonal(log_rep, 0.0)
    repulse = -gamma * 0.5 * np.sum(log_rep)
    return float(attract + repulse)


def dense_loss_grad(p: ProjectionMatrix, u: SpectralSubspace, g: FuzzyGraph,
                    c: CurveParams, gamma: float) -> np.ndarray:
    """Analytic gradient of dense_loss w.r.t. every entry of P.

    Pairs sitting in a clamped region of q contribute zero, matching the
    piecewise-constant loss there.
    """
    y = _check_dense_inputs(p, u, g)
    n = y.shape[0]
    d2 = _pairwise_sq_dists(y)
    with np.errstate(divide="ignore"):
        dpb = d2 ** c.b
    denom = 1.0 + c.a * dpb
    q = 1.0 / denom

    off_diag = ~np.eye(n, dtype=bool)
    pos = d2 > 0.0

    # d(-log q)/d(d2) where q is above its clamp floor
    coef_a = np.zeros_like(d2)
    mask_a = pos & (q > Q_CLAMP)
    coef_a[mask_a] = c.a * c.b * dpb[mask_a] / (d2[mask_a] * denom[mask_a])

    # d(-log(1-q))/d(d2) where 1-q is above the floor
    coef_r = np.zeros_like(d2)
    mask_r = pos & off_diag & (1.0 - q > Q_CLAMP)
    coef_r[mask_r] = -c.b / (d2[mask_r] * denom[mask_r])

    w = np.zeros_like(d2)
    w[g.heads, g.tails] = g.weights
    w[g.tails, g.heads] = g.weights

    coef = w * coef_a + gamma * coef_r
    grad_y = 2.0 * (coef.sum(axis=1)[:, None] * y - coef @ y)
    return u.basis.T @ grad_y


def optimize(u: SpectralSubspace, g: FuzzyGraph, p0: ProjectionMatrix,
             cfg: OptimizerConfig, c: CurveParams, *,
             lr_offset: int = 0, lr_total: int | None = None,
             stage_index: int | None = None,
             progress=None) -> ProjectionMatrix:
    """Edge-sampled SGD on P with negative sampling.

    Each edge is processed ceil(epochs * w / w_max) times, spread uniformly
    over the epochs; each processing applies one attractive pair update and
    ``negative_samples`` repulsive updates against random non-anchor points,
    every repulsive sample carrying weight gamma/negative_samples.  The
    learning rate decays linearly to zero over ``lr_total`` epochs (defaults
    to cfg.epochs); ``lr_offset`` places this call inside a longer decay
    window so multi-stage runs share one continuous schedule.

    ``progress``, when given, is called as progress(epoch, mean_loss) with
    the mean sampled penalty of the finished epoch.
    """
    if p0.rows != u.s:
        raise ValidationError(f"P0 has {p0.rows} rows but subspace has s={u.s}")
    if u.n != g.n:
        raise ValidationError("subspace and graph disagree on n")
    if cfg.epochs == 0:
        return ProjectionMatrix(p0.values.copy())
    total = cfg.epochs if lr_total is None else lr_total
    if total < lr_offset + cfg.epochs:
        raise ValidationError("lr window shorter than the requested epochs")

    p = p0.values.copy()
    basis = np.ascontiguousarray(u.basis)
    w_max = g.weights.max()
    # divide first: w_max/w_max is exactly 1, so the count never exceeds
    # cfg.epochs through rounding noise in (epochs*w)/w_max
    n_processings = np.ceil(cfg.epochs * (g.weights / w_max))
    eps_per_edge = cfg.epochs / n_processings
    next_sample = np.zeros(g.n_edges)

    gamma_per_neg = cfg.gamma / cfg.negative_samples
    seed = np.uint64(cfg.seed & _SEED_MASK)
    state = _kernels.seed_state(seed)

    for epoch in range(cfg.epochs):
        alpha = cfg.initial_lr * (1.0 - (lr_offset + epoch) / total)
        if cfg.deterministic:
            loss, count = _kernels.run_epoch(
                p, basis, g.heads, g.tails, next_sample, eps_per_edge,
                epoch, c.a, c.b, gamma_per_neg, cfg.negative_samples,
                cfg.grad_clip, cfg.eps, alpha, state,
            )
        else:
            loss, count = _kernels.run_epoch_relaxed(
                p, basis, g.heads, g.tails, next_sample, eps_per_edge,
                epoch, c.a, c.b, gamma_per_neg, cfg.negative_samples,
                cfg.grad_clip, cfg.eps, alpha, seed,
            )
        if not np.isfinite(p).all():
            raise NonFiniteUpdate(stage_index, epoch)
        if progress is not None:
            progress(epoch, loss / max(count, 1))
    return ProjectionMatrix(p)
