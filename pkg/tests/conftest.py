import numpy as np
import pytest

from tspbound import DistanceMatrix


def euclid_matrix(points, nint=False) -> DistanceMatrix:
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    c = np.sqrt((diff * diff).sum(axis=2))
    if nint:
        c = np.floor(c + 0.5)
    np.fill_diagonal(c, 0.0)
    return DistanceMatrix(costs=c, symmetric=True)


def random_points(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random((n, 2))


def random_metric(n: int, seed: int) -> DistanceMatrix:
    return euclid_matrix(random_points(n, seed))


UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


@pytest.fixture
def unit_square() -> DistanceMatrix:
    return euclid_matrix(UNIT_SQUARE)
