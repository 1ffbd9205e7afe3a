import numpy as np
import pytest
from sklearn.base import clone

from tspbound import TspHeuristicSolver
from conftest import UNIT_SQUARE, random_points, euclid_matrix


def test_fit_on_coordinates():
    est = TspHeuristicSolver(iterations=1, sample_count=4)
    est.fit(np.array(UNIT_SQUARE))
    assert est.length_ == pytest.approx(4.0)
    assert sorted(est.tour_) == [0, 1, 2, 3]
    assert est.report_.lower_ref_source == "oracle"


def test_fit_predict_returns_order():
    est = TspHeuristicSolver(iterations=1, sample_count=4)
    order = est.fit_predict(random_points(7, 3))
    assert sorted(order.tolist()) == list(range(7))


def test_precomputed_matrix():
    d = euclid_matrix(random_points(6, 5))
    est = TspHeuristicSolver(metric="precomputed", iterations=2, sample_count=4)
    est.fit(d.costs)
    assert est.length_ > 0


def test_get_params_and_clone():
    est = TspHeuristicSolver(iterations=3, level=3, seed=7)
    params = est.get_params()
    assert params["iterations"] == 3
    assert params["level"] == 3
    cloned = clone(est)
    assert cloned.get_params() == params


def test_set_params_roundtrip():
    est = TspHeuristicSolver()
    est.set_params(seed=9, neighbor_count=5)
    assert est.seed == 9
    assert est.neighbor_count == 5


def test_invalid_metric():
    with pytest.raises(ValueError):
        TspHeuristicSolver(metric="cosine").fit(np.array(UNIT_SQUARE))


def test_asymmetric_precomputed_rejected():
    m = np.array([[0.0, 1, 2], [5, 0, 1], [2, 1, 0.0]])
    with pytest.raises(ValueError):
        TspHeuristicSolver(metric="precomputed").fit(m)


def test_wrong_shape_rejected():
    with pytest.raises(ValueError):
        TspHeuristicSolver().fit(np.zeros((5, 3)))


def test_determinism_same_seed():
    pts = random_points(9, 1)
    a = TspHeuristicSolver(iterations=3, seed=5, sample_count=4).fit(pts)
    b = TspHeuristicSolver(iterations=3, seed=5, sample_count=4).fit(pts)
    assert a.tour_ == b.tour_
    assert a.length_ == b.length_
