"""Shared fixtures: small clouds and the graph -> spectrum pipeline."""

from __future__ import annotations

import numpy as np
import pytest

from spem import (
    DataMatrix,
    build_knn,
    eigendecompose,
    fuzzy_weights,
    normalized_laplacian,
    symmetrize,
)


def cloud(n: int, m: int, seed: int) -> DataMatrix:
    rng = np.random.default_rng(seed)
    return DataMatrix(rng.standard_normal((n, m)))


def pipeline(data: DataMatrix, k: int, s_max: int | None = None,
             mode: str = "auto"):
    """data -> (fuzzy graph, laplacian, spectrum)."""
    g = symmetrize(fuzzy_weights(build_knn(data, k)))
    lap = normalized_laplacian(g)
    if s_max is None:
        s_max = data.n - 1
    return g, lap, eigendecompose(lap, s_max, mode=mode)


@pytest.fixture(scope="session")
def small_cloud() -> DataMatrix:
    return cloud(60, 4, seed=11)


@pytest.fixture(scope="session")
def small_pipeline(small_cloud):
    return pipeline(small_cloud, k=6)


# Criterion pass/fail lines recorded by tests/test_acceptance.py; echoed in
# the terminal summary because capture swallows in-test prints on success.
CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
