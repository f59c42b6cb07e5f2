"""Eigendecomposition, trivial-mode removal, subspace slicing, projection."""

import numpy as np
import pytest
import scipy.sparse as sp

from spem import (
    ConvergenceFailure,
    SubspaceTooLarge,
    ValidationError,
    eigendecompose,
    normalized_laplacian,
    project_exact,
    subspace,
)
from spem.graph import FuzzyGraph
from spem.spectral import _fix_signs

from .conftest import cloud, pipeline
from . import oracles


def path_graph(n: int) -> FuzzyGraph:
    heads = np.arange(n - 1)
    tails = heads + 1
    w = np.ones(n - 1)
    degree = np.zeros(n)
    np.add.at(degree, heads, w)
    np.add.at(degree, tails, w)
    return FuzzyGraph(n=n, heads=heads, tails=tails, weights=w, degree=degree)


def test_two_node_graph_single_mode():
    lap = normalized_laplacian(path_graph(2))
    spec = eigendecompose(lap, 1)
    assert spec.trivial_excluded
    assert spec.eigenvalues.shape == (1,)
    assert spec.eigenvalues[0] == pytest.approx(2.0, abs=1e-12)
    u = spec.modes[:, 0]
    expected = np.array([1.0, -1.0]) / np.sqrt(2)
    assert (np.allclose(u, expected, atol=1e-12)
            or np.allclose(u, -expected, atol=1e-12))


def test_three_node_path_spectrum():
    lap = normalized_laplacian(path_graph(3))
    spec = eigendecompose(lap, 2)
    np.testing.assert_allclose(spec.eigenvalues, [1.0, 2.0], atol=1e-12)


def test_trivial_mode_removed_and_orthonormal(small_pipeline):
    g, lap, spec = small_pipeline
    assert spec.eigenvalues[0] > 0  # connected graph: one zero mode, removed
    phi = np.sqrt(g.degree)
    phi /= np.linalg.norm(phi)
    overlaps = np.abs(spec.modes.T @ phi)
    assert overlaps.max() < 1e-6
    gram = spec.modes.T @ spec.modes
    assert np.abs(gram - np.eye(spec.n_modes)).max() < 1e-8
    assert np.all(np.diff(spec.eigenvalues) >= 0)
    assert spec.eigenvalues.min() > -1e-8
    assert spec.eigenvalues.max() < 2 + 1e-8
    assert np.all(spec.residuals <= 1e-8)


def test_dense_iterative_agree_n200():
    data = cloud(200, 3, seed=31)
    g, lap, _ = pipeline(data, 8)
    dense = eigendecompose(lap, 199, mode="dense")
    iterative = eigendecompose(lap, 199, mode="iterative")
    np.testing.assert_allclose(iterative.eigenvalues, dense.eigenvalues,
                               atol=1e-8)
    angles = oracles.principal_angles(dense.modes, iterative.modes)
    assert angles.max() < 1e-6


def test_iterative_partial_spectrum():
    data = cloud(150, 3, seed=5)
    _, lap, _ = pipeline(data, 7)
    dense = eigendecompose(lap, 20, mode="dense")
    iterative = eigendecompose(lap, 20, mode="iterative")
    np.testing.assert_allclose(iterative.eigenvalues, dense.eigenvalues,
                               atol=1e-8)
    assert np.all(iterative.residuals <= 1e-8)


def test_disconnected_graph_keeps_component_indicators():
    # two separate edges: 2 components, null space dim 2; one direction
    # (the global phi) is trivial, the orthogonal one carries the split
    g = FuzzyGraph(n=4, heads=np.array([0, 2]), tails=np.array([1, 3]),
                   weights=np.array([1.0, 1.0]),
                   degree=np.ones(4))
    lap = normalized_laplacian(g)
    spec = eigendecompose(lap, 3)
    assert spec.n_modes == 3
    assert spec.eigenvalues[0] == pytest.approx(0.0, abs=1e-12)
    phi = np.sqrt(g.degree)
    phi /= np.linalg.norm(phi)
    assert np.abs(spec.modes.T @ phi).max() < 1e-6
    # the kept null vector separates the components
    u0 = spec.modes[:, 0]
    assert np.sign(u0[0]) == np.sign(u0[1])
    assert np.sign(u0[2]) == np.sign(u0[3])
    assert np.sign(u0[0]) != np.sign(u0[2])


def test_sign_convention_deterministic():
    rng = np.random.default_rng(3)
    cols = rng.standard_normal((9, 4))
    fixed = _fix_signs(cols.copy())
    for c in range(4):
        col = fixed[:, c]
        assert col[np.argmax(np.abs(col))] > 0
    # flipping input signs lands on the same representative
    np.testing.assert_array_equal(_fix_signs(-cols.copy()), fixed)


def test_eigendecompose_validates_s_max(small_pipeline):
    _, lap, _ = small_pipeline
    with pytest.raises(ValidationError):
        eigendecompose(lap, 0)
    with pytest.raises(ValidationError):
        eigendecompose(lap, lap.n)  # only n-1 non-trivial modes exist


def test_eigendecompose_rejects_asymmetric():
    from spem.graph import LaplacianMatrix

    mat = sp.csr_matrix(np.array([[1.0, -0.5], [-0.2, 1.0]]))
    lap = LaplacianMatrix(n=2, matrix=mat, degree=np.ones(2))
    with pytest.raises(ValidationError):
        eigendecompose(lap, 1)


# --- subspace ----------------------------------------------------------------


def test_subspace_prefix_nesting(small_pipeline):
    _, _, spec = small_pipeline
    s1 = subspace(spec, 1)
    np.testing.assert_array_equal(s1.basis[:, 0], spec.modes[:, 0])
    full = subspace(spec, spec.n_modes)
    np.testing.assert_array_equal(full.basis, spec.modes)
    a, b = subspace(spec, 4), subspace(spec, 9)
    np.testing.assert_array_equal(a.basis, b.basis[:, :4])
    np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues[:4])


def test_subspace_too_large(small_pipeline):
    _, _, spec = small_pipeline
    with pytest.raises(SubspaceTooLarge):
        subspace(spec, spec.n_modes + 1)


# --- project_exact -----------------------------------------------------------


def test_project_exact_recovers_coefficients(small_pipeline):
    _, _, spec = small_pipeline
    full = subspace(spec, spec.n_modes)
    rng = np.random.default_rng(12)
    r = rng.standard_normal((full.s, 2))
    y = full.basis @ r
    p = project_exact(full, y)
    np.testing.assert_allclose(p, r, atol=1e-10)


def test_project_exact_orthogonal_target_gives_zero(small_pipeline):
    g, _, spec = small_pipeline
    part = subspace(spec, 5)
    # phi spans the orthogonal complement direction excluded from the basis
    phi = np.sqrt(g.degree)[:, None]
    p = project_exact(part, phi * [1.0, -2.0])
    # phi is orthogonal to every non-trivial mode
    assert np.abs(p).max() < 1e-10


def test_project_exact_least_squares_optimality():
    data = cloud(50, 3, seed=77)
    _, _, spec = pipeline(data, 6)
    u = subspace(spec, 10)
    rng = np.random.default_rng(8)
    y = rng.standard_normal((50, 2))
    p = project_exact(u, y)
    base = np.linalg.norm(y - u.basis @ p)
    for _ in range(100):
        alt = p + rng.standard_normal(p.shape) * rng.uniform(0.01, 2.0)
        assert base <= np.linalg.norm(y - u.basis @ alt) + 1e-12


def test_project_exact_shape_validation(small_pipeline):
    _, _, spec = small_pipeline
    u = subspace(spec, 3)
    with pytest.raises(ValidationError):
        project_exact(u, np.zeros((u.n + 1, 2)))
