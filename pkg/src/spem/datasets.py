"""Seeded synthetic datasets with exported intrinsic coordinates.

Every generator draws each variable from its own seeded stream in row-major
order, so growing n extends the dataset without disturbing the points
already generated (the blob generator is the exception: its label blocks
depend on n).
"""

from __future__ import annotations

import numpy as np

from .data import DataMatrix
from .errors import CenterPlacementFailed, ValidationError


def _stream(seed: int, channel: int) -> np.random.Generator:
    return np.random.default_rng([seed & ((1 << 63) - 1), channel])


def gen_swiss_roll(n: int, noise_sigma: float = 0.0,
                   seed: int = 0) -> tuple[DataMatrix, np.ndarray]:
    """Rolled 2-D sheet in 3-D: (t cos t, h, t sin t) + isotropic noise.

    Returns the data and the intrinsic (t, h) pairs for ground-truth checks.
    """
    if n < 10:
        raise ValidationError(f"need n >= 10, got {n}")
    if noise_sigma < 0:
        raise ValidationError("noise_sigma must be >= 0")
    t = 1.5 * np.pi + 3.0 * np.pi * _stream(seed, 1).random(n)
    h = 21.0 * _stream(seed, 2).random(n)
    pts = np.column_stack([t * np.cos(t), h, t * np.sin(t)])
    if noise_sigma > 0:
        pts = pts + noise_sigma * _stream(seed, 3).standard_normal((n, 3))
    return DataMatrix(pts), np.column_stack([t, h])


def gen_multiscale_loop(n: int, m: int = 30, freq: int = 16,
                        amp: float = 0.15, noise_sigma: float = 0.05,
                        seed: int = 0) -> tuple[DataMatrix, np.ndarray]:
    """Circle with a high-frequency radial ripple, lifted into m dimensions.

    r(theta) = 1 + amp*sin(freq*theta); the 2-D curve is embedded through a
    seeded random orthonormal 2->m map, then isotropic noise is added on all
    m coordinates.  Returns the data and the angles theta.
    """
    if n < 10:
        raise ValidationError(f"need n >= 10, got {n}")
    if m < 2:
        raise ValidationError(f"need m >= 2, got {m}")
    if freq < 1 or int(freq) != freq:
        raise ValidationError("freq must be a positive integer")
    if amp < 0 or noise_sigma < 0:
        raise ValidationError("amp and noise_sigma must be >= 0")

    theta = 2.0 * np.pi * _stream(seed, 1).random(n)
    r = 1.0 + amp * np.sin(freq * theta)
    base = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    # lift depends only on the seed so growing n keeps the same plane
    raw = _stream(seed, 10).standard_normal((m, 2))
    lift = np.linalg.qr(raw)[0][:, :2]
    pts = base @ lift.T
    if noise_sigma > 0:
        pts = pts + noise_sigma * _stream(seed, 3).standard_normal((n, m))
    return DataMatrix(pts), theta


def loop_lift(m: int, seed: int) -> np.ndarray:
    """The orthonormal 2->m lift gen_multiscale_loop uses for this seed."""
    raw = _stream(seed, 10).standard_normal((m, 2))
    return np.linalg.qr(raw)[0][:, :2]


def gen_gaussian_blobs(n: int, m: int, n_blobs: int, spread: float,
                       seed: int = 0) -> DataMatrix:
    """Equal-sized isotropic clusters with centers >= 6*spread apart.

    Labels are attached to the returned DataMatrix; block r covers points
    [r*floor(n/b), ...), with the remainder absorbed by the last block.
    """
    if n < 10:
        raise ValidationError(f"need n >= 10, got {n}")
    if n_blobs < 2:
        raise ValidationError(f"need n_blobs >= 2, got {n_blobs}")
    if spread <= 0:
        raise ValidationError("spread must be > 0")

    rng = _stream(seed, 20)
    half_width = 6.0 * spread * n_blobs
    centers = np.empty((n_blobs, m))
    placed = 0
    attempts = 0
    while placed < n_blobs:
        cand = rng.uniform(-half_width, half_width, size=m)
        dists = np.linalg.norm(centers[:placed] - cand, axis=1)
        if placed == 0 or dists.min() >= 6.0 * spread:
            centers[placed] = cand
            placed += 1
        else:
            attempts += 1
            if attempts >= 1000:
                raise CenterPlacementFailed(
                    f"placed {placed}/{n_blobs} centers after 1000 rejections"
                )

    block = n // n_blobs
    labels = np.full(n, n_blobs - 1, dtype=np.int64)
    for r in range(n_blobs):
        labels[r * block:(r + 1) * block] = r
    pts = centers[labels] + spread * _stream(seed, 21).standard_normal((n, m))
    return DataMatrix(pts, labels=labels)
