"""Gradient-boosted shallow regression trees with logistic loss.

Additive depth-limited trees fit to the negative gradient of the logistic
loss, exact greedy split search over every feature, Newton leaf values and
shrinkage. Everything is deterministic: split-gain ties break on the lowest
feature index, then the lowest threshold.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

H_EPS = 1e-16
GAIN_TOL = 1e-12


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": self.value}
        return {"feature": self.feature, "threshold": self.threshold,
                "left": self.left.to_dict(), "right": self.right.to_dict()}

    @classmethod
    def from_dict(cls, doc: dict) -> "TreeNode":
        if "value" in doc:
            return cls(value=float(doc["value"]))
        return cls(feature=int(doc["feature"]), threshold=float(doc["threshold"]),
                   left=cls.from_dict(doc["left"]), right=cls.from_dict(doc["right"]))


@dataclass
class BoostedTrees:
    base_score: float
    trees: list[TreeNode]
    shrinkage: float
    feature_dimension: int


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _best_split(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                sort_idx: np.ndarray, Xs: np.ndarray, mask: np.ndarray):
    """Best (gain, feature, threshold) over all features for the masked rows.

    ``sort_idx`` is a per-column argsort of X and ``Xs`` the column-sorted
    feature matrix, both computed once per ensemble. Returns None when no
    valid split exists.
    """
    n, d = X.shape
    ms = mask[sort_idx]                               # (n, d) node membership in sorted order
    gs = np.where(ms, g[sort_idx], 0.0)
    hs = np.where(ms, h[sort_idx], 0.0)
    cg = np.cumsum(gs, axis=0)
    ch = np.cumsum(hs, axis=0)
    cnt = np.cumsum(ms, axis=0)
    G = cg[-1]
    H = ch[-1]
    n_node = cnt[-1]

    # value of the next in-node row below each position (per column)
    pos = np.where(ms, np.arange(n)[:, None], n)
    nxt_pos = np.minimum.accumulate(pos[::-1], axis=0)[::-1]
    nxt_pos = np.vstack([nxt_pos[1:], np.full(d, n, dtype=nxt_pos.dtype)])
    safe = np.minimum(nxt_pos, n - 1)
    nxt_val = np.take_along_axis(Xs, safe, axis=0)

    valid = ms & (cnt >= 1) & (cnt < n_node) & (nxt_pos < n) & (nxt_val > Xs)
    if not valid.any():
        return None
    GL, HL = cg, ch
    GR, HR = G - cg, H - ch
    gain = GL * GL / (HL + H_EPS) + GR * GR / (HR + H_EPS) - G * G / (H + H_EPS)
    gain = np.where(valid, gain, -np.inf)
    best_gain = gain.max()
    # deterministic ties: lowest feature index, then lowest threshold
    rows, cols = np.nonzero(gain == best_gain)
    thresholds = 0.5 * (Xs[rows, cols] + nxt_val[rows, cols])
    order = np.lexsort((thresholds, cols))
    i = order[0]
    return float(best_gain), int(cols[i]), float(thresholds[i])


def _build_tree(X: np.ndarray, g: np.ndarray, h: np.ndarray,
                sort_idx: np.ndarray, Xs: np.ndarray, mask: np.ndarray,
                depth: int) -> TreeNode:
    split = _best_split(X, g, h, sort_idx, Xs, mask) if depth > 0 else None
    if split is not None and split[0] <= GAIN_TOL:
        # a zero-gain split is worth taking only when a child split can still
        # realize the gain (XOR-style interactions): needs remaining depth and
        # mixed gradient signs in the node
        gm = g[mask]
        if depth < 2 or gm.min() >= 0.0 or gm.max() <= 0.0:
            split = None
    if split is None:
        G = g[mask].sum()
        H = h[mask].sum()
        return TreeNode(value=-G / (H + H_EPS))
    _, feature, threshold = split
    go_left = mask & (X[:, feature] <= threshold)
    go_right = mask & ~(X[:, feature] <= threshold)
    return TreeNode(feature=feature, threshold=threshold,
                    left=_build_tree(X, g, h, sort_idx, Xs, go_left, depth - 1),
                    right=_build_tree(X, g, h, sort_idx, Xs, go_right, depth - 1))


def _tree_predict(node: TreeNode, X: np.ndarray) -> np.ndarray:
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        nd, idx = stack.pop()
        if nd.is_leaf:
            out[idx] = nd.value
            continue
        left = X[idx, nd.feature] <= nd.threshold
        stack.append((nd.left, idx[left]))
        stack.append((nd.right, idx[~left]))
    return out


def train_boosted_trees(X: np.ndarray, y: np.ndarray, rounds: int = 200,
                        shrinkage: float = 0.1, max_depth: int = 2) -> BoostedTrees:
    """Fit the ensemble: base-rate log-odds, then one tree per round."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if rounds < 1:
        raise ValueError("rounds must be >= 1")
    p_base = y.mean()
    if p_base in (0.0, 1.0):
        raise ValueError("single-class input")
    base = math.log(p_base / (1.0 - p_base))
    sort_idx = np.argsort(X, axis=0, kind="stable")
    Xs = np.take_along_axis(X, sort_idx, axis=0)
    scores = np.full(len(y), base)
    mask = np.ones(len(y), dtype=bool)
    trees: list[TreeNode] = []
    for _ in range(rounds):
        p = _sigmoid(scores)
        g = p - y
        h = p * (1.0 - p)
        tree = _build_tree(X, g, h, sort_idx, Xs, mask, max_depth)
        trees.append(tree)
        scores = scores + shrinkage * _tree_predict(tree, X)
    return BoostedTrees(base_score=base, trees=trees, shrinkage=shrinkage,
                        feature_dimension=X.shape[1])


def boosted_scores(model: BoostedTrees, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    scores = np.full(X.shape[0], model.base_score)
    for tree in model.trees:
        scores += model.shrinkage * _tree_predict(tree, X)
    return scores


def boosted_proba(model: BoostedTrees, X: np.ndarray) -> np.ndarray:
    return _sigmoid(boosted_scores(model, X))


def logistic_loss(y: np.ndarray, scores: np.ndarray) -> float:
    y = np.asarray(y, dtype=np.float64)
    return float(np.mean(np.logaddexp(0.0, scores) - y * scores))
