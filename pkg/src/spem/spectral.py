"""Eigenbasis of the normalized Laplacian and truncated spectral subspaces.

The constant direction (the zero-eigenvalue vector proportional to D^{1/2}1)
carries no geometry and is always excluded; additional zero-eigenvalue
vectors of disconnected graphs encode component membership and are kept.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ConvergenceFailure,
    NotSymmetric,
    SubspaceTooLarge,
    ValidationError,
)

RESIDUAL_TOL = 1e-8
NULL_EIGENVALUE_TOL = 1e-9
TRIVIAL_COSINE_TOL = 1e-6
DENSE_LIMIT = 8192
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class Spectrum:
    """Ordered non-trivial eigenpairs of a normalized Laplacian."""

    eigenvalues: np.ndarray   # (n_modes,) ascending
    modes: np.ndarray         # (n, n_modes) orthonormal columns
    trivial_excluded: bool
    residuals: np.ndarray     # (n_modes,) per-mode ||L u - lambda u||_2

    @property
    def n(self) -> int:
        return self.modes.shape[0]

    @property
    def n_modes(self) -> int:
        return self.modes.shape[1]


@dataclass(frozen=True)
class SpectralSubspace:
    """Leading s columns of a Spectrum (prefix slice, nesting by construction)."""

    s: int
    basis: np.ndarray        # (n, s)
    eigenvalues: np.ndarray  # (s,)

    @property
    def n(self) -> int:
        return self.basis.shape[0]


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry positive (ties: lowest index)."""
    idx = np.argmax(np.abs(vecs), axis=0)
    flip = vecs[idx, np.arange(vecs.shape[1])] < 0.0
    vecs = vecs.copy()
    vecs[:, flip] *= -1.0
    return vecs


def _solve_dense(lap: sp.csr_matrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    dense = lap.toarray()
    vals, vecs = scipy.linalg.eigh(dense)
    return vals[:k], vecs[:, :k]


def _solve_iterative(lap: sp.csr_matrix, k: int) -> tuple[np.ndarray, np.ndarray]:
    n = lap.shape[0]
    a = lap.tocsc()
    v0 = np.full(n, 1.0 / np.sqrt(n))
    try:
        if k <= n - 2:
            # shift-invert about -0.5 targets the low end of the [0, 2] spectrum
            vals, vecs = spla.eigsh(a, k=k, sigma=-0.5, which="LM", v0=v0)
        else:
            # ARPACK caps k at n-1; fetch the low block and the top pair apart
            vals, vecs = spla.eigsh(a, k=n - 1, sigma=-0.5, which="LM", v0=v0)
            top_val, top_vec = spla.eigsh(a, k=1, which="LA", v0=v0)
            top_vec = _reorthogonalize_top(vals, vecs, top_val[0], top_vec[:, 0])
            vals = np.concatenate([vals, top_val])
            vecs = np.column_stack([vecs, top_vec])
    except spla.ArpackNoConvergence as exc:
        raise ConvergenceFailure(
            converged=len(exc.eigenvalues), requested=k
        ) from exc
    order = np.argsort(vals, kind="stable")
    return vals[order], vecs[:, order]


def _reorthogonalize_top(vals: np.ndarray, vecs: np.ndarray,
                         top_val: float, top_vec: np.ndarray) -> np.ndarray:
    # if the largest eigenvalue is degenerate with the block below, the two
    # separate solves may overlap; project the overlap out
    near = np.abs(vals - top_val) < 1e-8
    if near.any():
        block = vecs[:, near]
        top_vec = top_vec - block @ (block.T @ top_vec)
        norm = np.linalg.norm(top_vec)
        if norm < 1e-6:
            raise ConvergenceFailure(converged=len(vals), requested=len(vals) + 1)
        top_vec = top_vec / norm
    return top_vec


def _remove_trivial(vals: np.ndarray, vecs: np.ndarray,
                    degree: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Drop exactly one constant direction from the null block.

    With several zero eigenvalues (disconnected graph) the solver returns an
    arbitrary basis of the null space; rotate that block so one column aligns
    with D^{1/2}1 exactly, then drop it and keep the rest.
    """
    phi = np.sqrt(degree)
    phi /= np.linalg.norm(phi)

    null = np.nonzero(vals < NULL_EIGENVALUE_TOL)[0]
    if null.size == 0:
        raise ValidationError(
            "no zero eigenvalue found; input is not a graph Laplacian"
        )
    cosines = np.abs(phi @ vecs[:, null])
    if null.size == 1 or cosines.max() >= 1.0 - TRIVIAL_COSINE_TOL:
        if cosines.max() < 1.0 - TRIVIAL_COSINE_TOL:
            raise ValidationError(
                "zero-eigenvalue mode does not match the constant direction; "
                "Laplacian and degree vector are inconsistent"
            )
        drop = null[int(np.argmax(cosines))]
    else:
        block = vecs[:, null]
        coeff = block.T @ phi
        rot = np.linalg.qr(coeff[:, None], mode="complete")[0]
        vecs = vecs.copy()
        vecs[:, null] = block @ rot
        drop = null[0]

    keep = np.ones(vals.shape[0], dtype=bool)
    keep[drop] = False
    return vals[keep], vecs[:, keep]


def eigendecompose(lap, s_max: int, mode: str = "auto") -> Spectrum:
    """First ``s_max`` non-trivial eigenpairs of the Laplacian, ascending.

    ``auto`` solves densely when n <= 8192 or when more than half the
    spectrum is requested (partial Krylov solvers lose their advantage
    there); otherwise a shift-invert Lanczos solve is used.
    """
    matrix, degree = lap.matrix, lap.degree
    n = matrix.shape[0]
    if not 1 <= s_max <= n - 1:
        raise ValidationError(f"need 1 <= s_max <= n-1, got s_max={s_max}, n={n}")
    asym = abs(matrix - matrix.T).max()
    if asym > SYMMETRY_TOL:
        raise NotSymmetric(f"max |L - L^T| = {asym:.3g} exceeds {SYMMETRY_TOL}")

    if mode == "auto":
        mode = "dense" if (n <= DENSE_LIMIT or s_max > n // 2) else "iterative"
    if mode == "dense" or n < 8:
        vals, vecs = _solve_dense(matrix, s_max + 1)
    elif mode == "iterative":
        vals, vecs = _solve_iterative(matrix, s_max + 1)
    else:
        raise ValidationError(f"unknown mode {mode!r}")

    vals, vecs = _remove_trivial(vals, vecs, degree)
    vals, vecs = vals[:s_max], np.ascontiguousarray(vecs[:, :s_max])
    vecs = _fix_signs(vecs)

    residuals = np.linalg.norm(matrix @ vecs - vecs * vals[None, :], axis=0)
    if residuals.max() > RESIDUAL_TOL:
        bad = int(np.sum(residuals <= RESIDUAL_TOL))
        raise ConvergenceFailure(converged=bad, requested=s_max)
    return Spectrum(
        eigenvalues=vals, modes=vecs, trivial_excluded=True, residuals=residuals
    )


def subspace(spec: Spectrum, s: int) -> SpectralSubspace:
    """Prefix slice of the spectrum: the s lowest non-trivial modes."""
    if not 1 <= s <= spec.n_modes:
        raise SubspaceTooLarge(
            f"requested s={s} but only {spec.n_modes} modes are available"
        )
    return SpectralSubspace(
        s=s, basis=spec.modes[:, :s], eigenvalues=spec.eigenvalues[:s]
    )


def project_exact(u: SpectralSubspace, y: np.ndarray) -> np.ndarray:
    """P = U^T Y: exact projection coefficients of Y onto the subspace.

    When Y lies in span(U) this inverts the embedding map Y = U P.
    """
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 2 or y.shape[0] != u.basis.shape[0]:
        raise ValidationError(
            f"Y must be (n, m) with n={u.basis.shape[0]}, got {y.shape}"
        )
    return u.basis.T @ y
