"""Stock dictionaries and graph helpers."""
import numpy as np
import pytest

from l1geo.dictionaries import (complete_graph_edges, connected_components,
                                difference_dict, fused_lasso_dict,
                                identity_dict, incidence_dict,
                                phi_separates_components)


def test_identity_dict():
    D = identity_dict(3)
    assert np.array_equal(D, np.eye(3))


def test_difference_dict():
    D = difference_dict(4)
    assert D.shape == (4, 3)  # atoms as columns
    x = np.array([1.0, 3.0, 6.0, 10.0])
    assert np.allclose(D.T @ x, [2.0, 3.0, 4.0])


def test_fused_lasso_dict():
    D = fused_lasso_dict(3)
    assert D.shape == (3, 5)
    x = np.array([1.0, 2.0, 4.0])
    assert np.allclose(D.T @ x, [1.0, 2.0, 4.0, 1.0, 2.0])


def test_incidence_dict():
    edges = [(0, 1), (1, 2)]
    D = incidence_dict(edges, 3)
    assert D.shape == (3, 2)
    x = np.array([5.0, 3.0, 2.0])
    assert np.allclose(D.T @ x, [2.0, 1.0])  # x_u - x_v per edge
    with pytest.raises(ValueError):
        incidence_dict([(0, 0)], 2)
    with pytest.raises(ValueError):
        incidence_dict([(0, 3)], 3)


def test_complete_graph_edges():
    assert complete_graph_edges(4) == [(0, 1), (0, 2), (0, 3), (1, 2),
                                       (1, 3), (2, 3)]
    D = incidence_dict(complete_graph_edges(4), 4)
    assert D.shape == (4, 6)
    # kernel of D^T is the constants
    assert np.allclose(D.T @ np.ones(4), 0.0)


def test_connected_components():
    comps = connected_components([(0, 1), (2, 3)], 5)
    assert comps == [frozenset({0, 1}), frozenset({2, 3}), frozenset({4})]
    assert connected_components([], 2) == [frozenset({0}), frozenset({1})]


def test_phi_separates_components():
    edges = [(0, 1)]
    # one measurement of a 2-vertex path: cannot pin the constant mode
    assert not phi_separates_components(np.array([[1.0, -1.0]]), edges, 2)
    assert phi_separates_components(np.array([[1.0, 1.0]]), edges, 2)
    # two components need two independent component means
    edges2 = [(0, 1), (2, 3)]
    Phi_good = np.array([[1.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 1.0]])
    Phi_bad = np.array([[1.0, 1.0, 1.0, 1.0]])
    assert phi_separates_components(Phi_good, edges2, 4)
    assert not phi_separates_components(Phi_bad, edges2, 4)
