"""Per-mode and per-point explanation data behind the embedding.

The projection row norms say which graph frequencies the optimizer uses
globally; participation/contribution split that story per point, and grid
aggregation summarizes image datasets over the embedding plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingThumbnails, ValidationError
from .optimizer import ProjectionMatrix
from .spectral import SpectralSubspace


@dataclass(frozen=True)
class SpectralResponse:
    """Row norms of P per mode: the embedding's frequency usage profile."""

    mode_index: np.ndarray  # (S,) 1-based, ascending
    magnitude: np.ndarray   # (S,) ||p_s||_2
    eigenvalue: np.ndarray  # (S,)


@dataclass(frozen=True)
class PetalGlyphSpec:
    """Radial glyph data for one point over the leading K modes.

    outline length = participation |u_{n,s}|; filled length = contribution
    |u_{n,s}| * ||p_s||; delta > 0 marks modes amplified above the dataset's
    typical row-norm scale (drawn red), delta < 0 suppressed ones (blue).
    """

    point_id: int
    participation: np.ndarray        # (K,) >= 0
    contribution: np.ndarray         # (K,) >= 0
    delta: np.ndarray                # (K,) signed
    index_angles: np.ndarray         # (K,) clockwise from 12 o'clock
    direction_angles: np.ndarray | None  # (K,) atan2 of p_s rows, m'=2 only


@dataclass(frozen=True)
class GridSummary:
    """Per-cell counts, mean thumbnails and mean positions on a regular grid."""

    grid_cols: int
    grid_rows: int
    cells: dict[tuple[int, int], dict]


def spectral_response(p: ProjectionMatrix,
                      eigenvalues: np.ndarray) -> SpectralResponse:
    """magnitude[s] = ||row s of P||_2, indexed 1..S to match mode numbering."""
    ev = np.asarray(eigenvalues, dtype=np.float64)
    if ev.shape != (p.rows,):
        raise ValidationError(
            f"need eigenvalues of length {p.rows}, got shape {ev.shape}"
        )
    mags = np.linalg.norm(p.values, axis=1)
    return SpectralResponse(
        mode_index=np.arange(1, p.rows + 1, dtype=np.int64),
        magnitude=mags,
        eigenvalue=ev.copy(),
    )


def glyph_ref_scale(u: SpectralSubspace, p: ProjectionMatrix,
                    k: int) -> float:
    """Typical amplification: median of contribution/participation.

    Taken over every (point, mode) pair with nonzero participation across
    the leading k modes; the ratio equals ||p_s|| there, so this is the
    participation-weighted median row norm — a single scale-free baseline
    for the red/blue delta coloring.
    """
    if not 1 <= k <= u.s:
        raise ValidationError(f"need 1 <= K <= s={u.s}, got K={k}")
    part = np.abs(u.basis[:, :k])
    norms = np.linalg.norm(p.values[:k], axis=1)
    ratios = np.broadcast_to(norms, part.shape)[part > 0]
    if ratios.size == 0:
        return 0.0
    return float(np.median(ratios))


def glyph_data(u: SpectralSubspace, p: ProjectionMatrix, point_ids,
               k: int = 10) -> list[PetalGlyphSpec]:
    """Petal glyph specs for the requested points over the first K modes."""
    if p.rows != u.s:
        raise ValidationError(f"P has {p.rows} rows but subspace has s={u.s}")
    if not 1 <= k <= u.s:
        raise ValidationError(f"need 1 <= K <= s={u.s}, got K={k}")
    ref = glyph_ref_scale(u, p, k)
    norms = np.linalg.norm(p.values[:k], axis=1)
    index_angles = np.pi / 2 - 2.0 * np.pi * np.arange(k) / k
    if p.cols == 2:
        direction = np.arctan2(p.values[:k, 1], p.values[:k, 0])
    else:
        direction = None

    specs = []
    for pid in np.asarray(point_ids, dtype=np.int64):
        if not 0 <= pid < u.n:
            raise ValidationError(f"point id {pid} out of range [0, {u.n})")
        part = np.abs(u.basis[pid, :k])
        contrib = part * norms
        specs.append(PetalGlyphSpec(
            point_id=int(pid),
            participation=part,
            contribution=contrib,
            delta=contrib - part * ref,
            index_angles=index_angles.copy(),
            direction_angles=None if direction is None else direction.copy(),
        ))
    return specs


def _bin_indices(coords: np.ndarray, n_bins: int) -> np.ndarray:
    """Equal-width bins over [min, max]; boundary values go to the lower bin."""
    lo, hi = coords.min(), coords.max()
    if hi == lo:
        return np.zeros(coords.shape[0], dtype=np.int64)
    width = (hi - lo) / n_bins
    idx = np.ceil((coords - lo) / width).astype(np.int64) - 1
    return np.clip(idx, 0, n_bins - 1)


def grid_aggregate(y: np.ndarray, thumbnails: np.ndarray | None,
                   grid_cols: int, grid_rows: int) -> GridSummary:
    """Mean thumbnail and mean position per non-empty grid cell."""
    if thumbnails is None:
        raise MissingThumbnails("grid aggregation needs a thumbnail stack")
    y = np.asarray(y, dtype=np.float64)
    th = np.asarray(thumbnails, dtype=np.float64)
    if y.ndim != 2 or y.shape[1] != 2:
        raise ValidationError(f"Y must be (n, 2), got {y.shape}")
    if th.ndim != 3 or th.shape[0] != y.shape[0]:
        raise ValidationError("thumbnails must be (n, H, W) matching Y")
    if grid_cols < 1 or grid_rows < 1:
        raise ValidationError("grid dimensions must be >= 1")

    col = _bin_indices(y[:, 0], grid_cols)
    row = _bin_indices(y[:, 1], grid_rows)
    cells: dict[tuple[int, int], dict] = {}
    flat = col * grid_rows + row
    for cell_id in np.unique(flat):
        sel = flat == cell_id
        cells[(int(cell_id) // grid_rows, int(cell_id) % grid_rows)] = {
            "count": int(sel.sum()),
            "mean_thumbnail": th[sel].mean(axis=0),
            "mean_position": y[sel].mean(axis=0),
        }
    return GridSummary(grid_cols=grid_cols, grid_rows=grid_rows, cells=cells)
