"""Tests for the gradient-boosted tree ensemble."""
import math

import numpy as np
import pytest

from contrastmap.boosting import (TreeNode, boosted_proba, boosted_scores,
                                  logistic_loss, train_boosted_trees)


def test_base_rate_log_odds():
    X = np.zeros((4, 1))
    y = np.array([1.0, 1.0, 1.0, 0.0])
    model = train_boosted_trees(X, y, rounds=1)
    assert model.base_score == pytest.approx(math.log(3.0), abs=1e-12)


def test_xor_reaches_perfect_accuracy():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    y = np.array([0.0, 1.0, 1.0, 0.0])
    model = train_boosted_trees(X, y, rounds=50, shrinkage=0.3, max_depth=2)
    pred = (boosted_proba(model, X) >= 0.5).astype(float)
    assert np.array_equal(pred, y)


def test_single_split_on_separable_1d():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    model = train_boosted_trees(X, y, rounds=1, shrinkage=0.1, max_depth=2)
    root = model.trees[0]
    assert root.feature == 0
    assert root.threshold == pytest.approx(1.5)
    # both children are leaves: no further gain within the pure halves
    assert root.left.is_leaf and root.right.is_leaf


def test_loss_non_increasing_per_round():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((80, 5))
    y = (X[:, 0] * X[:, 1] > 0).astype(float)  # interaction target
    model = train_boosted_trees(X, y, rounds=40, shrinkage=0.1, max_depth=2)
    scores = np.full(len(y), model.base_score)
    losses = [logistic_loss(y, scores)]
    for tree in model.trees:
        from contrastmap.boosting import _tree_predict
        scores = scores + model.shrinkage * _tree_predict(tree, X)
        losses.append(logistic_loss(y, scores))
    assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))


def test_single_class_rejected():
    with pytest.raises(ValueError, match="single-class"):
        train_boosted_trees(np.zeros((3, 1)), np.ones(3), rounds=1)


def test_rounds_validated():
    with pytest.raises(ValueError, match="rounds"):
        train_boosted_trees(np.zeros((2, 1)), np.array([0.0, 1.0]), rounds=0)


def test_determinism():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((50, 4))
    y = (X[:, 0] > 0).astype(float)
    m1 = train_boosted_trees(X, y, rounds=10)
    m2 = train_boosted_trees(X, y, rounds=10)
    assert np.array_equal(boosted_scores(m1, X), boosted_scores(m2, X))


def test_tree_serialization_round_trip():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((40, 3))
    y = (X[:, 0] + X[:, 1] > 0).astype(float)
    model = train_boosted_trees(X, y, rounds=5)
    for tree in model.trees:
        again = TreeNode.from_dict(tree.to_dict())
        from contrastmap.boosting import _tree_predict
        assert np.array_equal(_tree_predict(tree, X), _tree_predict(again, X))


def test_depth_limit_respected():
    rng = np.random.default_rng(3)
    X = rng.standard_normal((60, 4))
    y = (X[:, 0] * X[:, 2] > 0).astype(float)
    model = train_boosted_trees(X, y, rounds=5, max_depth=2)

    def depth(node):
        if node.is_leaf:
            return 0
        return 1 + max(depth(node.left), depth(node.right))

    assert all(depth(t) <= 2 for t in model.trees)
