"""Input point-set container shared by the graph, metrics and CLI layers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteInput, ValidationError


@dataclass(frozen=True)
class DataMatrix:
    """An N x M point set with optional integer labels and raster thumbnails.

    ``points`` is always a float64 C-contiguous array.  ``thumbnails``, when
    present, is an (N, H, W) grayscale stack used only for grid aggregation.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    thumbnails: np.ndarray | None = None

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2:
            raise ValidationError(f"points must be 2-D, got ndim={pts.ndim}")
        n, m = pts.shape
        if n < 3 or m < 1:
            raise ValidationError(f"need N >= 3 and M >= 1, got shape {pts.shape}")
        if not np.isfinite(pts).all():
            raise NonFiniteInput("points contain NaN or Inf")
        object.__setattr__(self, "points", pts)

        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (n,):
                raise ValidationError(
                    f"labels must have length N={n}, got shape {lab.shape}"
                )
            object.__setattr__(self, "labels", lab)

        if self.thumbnails is not None:
            th = np.asarray(self.thumbnails, dtype=np.float64)
            if th.ndim != 3 or th.shape[0] != n:
                raise ValidationError(
                    "thumbnails must be an (N, H, W) stack matching points"
                )
            object.__setattr__(self, "thumbnails", th)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def m(self) -> int:
        return self.points.shape[1]
