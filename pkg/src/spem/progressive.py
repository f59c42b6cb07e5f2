"""Coarse-to-fine optimization over a nested sequence of spectral subspaces.

Each stage widens the subspace, copies the learned projection rows verbatim,
seeds the new rows with small noise, and continues SGD.  Because the bases
are prefix-nested, the embedding is continuous across stage boundaries up to
that noise, and one linear learning-rate decay spans the whole run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateSchedule, ValidationError
from .graph import FuzzyGraph
from .optimizer import CurveParams, OptimizerConfig, ProjectionMatrix, optimize
from .spectral import Spectrum, subspace

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class StageSchedule:
    """Strictly increasing subspace sizes with their epoch allocation."""

    sizes: np.ndarray           # (T,) int64, strictly increasing
    epochs_per_stage: np.ndarray  # (T,) int64, each >= 1

    def __post_init__(self):
        sizes = np.asarray(self.sizes, dtype=np.int64)
        epochs = np.asarray(self.epochs_per_stage, dtype=np.int64)
        if sizes.ndim != 1 or sizes.size == 0:
            raise ValidationError("schedule needs at least one stage")
        if sizes[0] < 1 or np.any(np.diff(sizes) <= 0):
            raise ValidationError("stage sizes must be strictly increasing >= 1")
        if epochs.shape != sizes.shape or np.any(epochs < 1):
            raise ValidationError("each stage needs >= 1 epoch")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "epochs_per_stage", epochs)

    @property
    def n_stages(self) -> int:
        return self.sizes.size

    @property
    def total_epochs(self) -> int:
        return int(self.epochs_per_stage.sum())


@dataclass(frozen=True)
class StageResult:
    """Snapshot of one finished stage."""

    s: int
    p: ProjectionMatrix
    y: np.ndarray        # (n, m') = U_s P, stored for the viewer
    epochs_used: int
    wall_time: float


def make_schedule(s_full: int, t: int, mode: str,
                  total_epochs: int) -> StageSchedule:
    """Equal or logarithmic stage sizes with floor-divided epoch allocation.

    equal: round(r * s_full / t) for r = 1..t.  log: floor of a geometric
    sweep from 1 to s_full (t + 1 knots collapse to ~t distinct sizes, giving
    the 1, 2, 3, 5, 8, ... progression).  Duplicate sizes are merged; the
    last stage always lands on s_full and absorbs the leftover epochs.
    """
    if not 1 <= t <= s_full:
        raise ValidationError(f"need 1 <= t <= s_full, got t={t}, s_full={s_full}")
    if total_epochs < t:
        raise ValidationError(
            f"need total_epochs >= t, got {total_epochs} < {t}"
        )
    if mode == "equal":
        raw = np.floor(np.arange(1, t + 1) * (s_full / t) + 0.5).astype(np.int64)
    elif mode == "log":
        if t == 1:
            raw = np.array([s_full], dtype=np.int64)
        else:
            raw = np.floor(np.geomspace(1.0, float(s_full), t + 1)).astype(np.int64)
    else:
        raise ValidationError(f"unknown schedule mode {mode!r}")

    sizes = np.unique(raw)
    sizes = sizes[sizes >= 1]
    if sizes.size == 0:
        raise DegenerateSchedule("no stage sizes survived deduplication")
    sizes[-1] = s_full

    n_stages = sizes.size
    base = total_epochs // n_stages
    if base < 1:
        raise DegenerateSchedule(
            f"{total_epochs} epochs cannot cover {n_stages} stages"
        )
    epochs = np.full(n_stages, base, dtype=np.int64)
    epochs[-1] += total_epochs - base * n_stages
    return StageSchedule(sizes=sizes, epochs_per_stage=epochs)


def augment(p_prev: ProjectionMatrix, s_new: int, seed,
            scale: float | None = None) -> ProjectionMatrix:
    """Grow P to s_new rows: old rows copied bit-exactly, new rows small.

    Default noise scale is 1e-4 times the largest learned coefficient,
    floored at 1e-4 so fresh rows never start at exactly zero spread.
    """
    if s_new <= p_prev.rows:
        raise ValidationError(
            f"s_new must exceed current rows, got {s_new} <= {p_prev.rows}"
        )
    if scale is None:
        scale = max(1e-4 * float(np.abs(p_prev.values).max()), 1e-4)
    rng = np.random.default_rng(seed)
    fresh = rng.uniform(-scale, scale, size=(s_new - p_prev.rows, p_prev.cols))
    return ProjectionMatrix(np.vstack([p_prev.values, fresh]))


def init_first_stage(u, m_prime: int, seed,
                     noise: float = 1e-4) -> ProjectionMatrix:
    """Scaled-identity projection: start at the Laplacian-Eigenmaps layout.

    The identity block maps mode r to embedding axis r; the scale is chosen
    so the initial embedding has max coordinate extent 10.
    """
    if u.s < 1:
        raise ValidationError("subspace must have at least one mode")
    base = np.eye(u.s, m_prime)
    extent = np.abs(u.basis @ base).max()
    if extent == 0.0:
        raise ValidationError("degenerate basis: zero initial extent")
    p0 = (10.0 / extent) * base
    if noise != 0.0:
        rng = np.random.default_rng(seed)
        p0 = p0 + rng.uniform(-noise, noise, size=p0.shape)
    return ProjectionMatrix(p0)


def _stage_seed(seed: int, stage: int, salt: int) -> tuple[int, ...]:
    return (seed & _SEED_MASK, stage, salt)


def run_progressive(spec: Spectrum, g: FuzzyGraph, schedule: StageSchedule,
                    cfg: OptimizerConfig, c: CurveParams, *,
                    m_prime: int = 2, augment_scale: float | None = None,
                    init_noise: float = 1e-4,
                    progress_stream=None) -> list[StageResult]:
    """Run every stage of the schedule and return all snapshots in order.

    A single-stage schedule at s = n-1 reproduces the non-progressive
    full-spectrum run.  The learning rate decays linearly across the summed
    epoch budget of all stages, not per stage, so late stages refine rather
    than rearrange.
    """
    s_final = int(schedule.sizes[-1])
    if s_final > spec.n_modes:
        raise ValidationError(
            f"schedule needs {s_final} modes but spectrum holds {spec.n_modes}"
        )
    if g.n != spec.n:
        raise ValidationError("graph and spectrum disagree on n")

    total = schedule.total_epochs
    results: list[StageResult] = []
    p = None
    offset = 0
    n_stages = schedule.n_stages

    for r in range(n_stages):
        t0 = time.perf_counter()
        s = int(schedule.sizes[r])
        epochs = int(schedule.epochs_per_stage[r])
        u = subspace(spec, s)
        if p is None:
            p = init_first_stage(u, m_prime, _stage_seed(cfg.seed, r, 0),
                                 noise=init_noise)
        else:
            p = augment(p, s, _stage_seed(cfg.seed, r, 0), scale=augment_scale)

        opt_seed = int(np.random.SeedSequence(
            _stage_seed(cfg.seed, r, 1)).generate_state(1, np.uint64)[0])
        stage_cfg = replace(cfg, epochs=epochs, seed=opt_seed)

        progress = None
        if progress_stream is not None:
            def progress(epoch, mean_loss, _r=r, _s=s, _e=epochs):
                print(
                    f"stage {_r + 1}/{n_stages} s={_s} "
                    f"epoch {epoch + 1}/{_e} loss={mean_loss:.6f}",
                    file=progress_stream,
                )

        p = optimize(u, g, p, stage_cfg, c, lr_offset=offset, lr_total=total,
                     stage_index=r, progress=progress)
        offset += epochs
        results.append(StageResult(
            s=s,
            p=p,
            y=u.basis @ p.values,
            epochs_used=epochs,
            wall_time=time.perf_counter() - t0,
        ))
    return results
