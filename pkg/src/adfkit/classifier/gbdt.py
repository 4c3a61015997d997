"""Gradient-boosted decision trees on logistic loss, from scratch.

Boosting follows the second-order recipe: per round, fit a regression tree
to the gradient/hessian statistics of the logistic loss, using exact greedy
splits (every distinct feature value is a candidate threshold) and leaf
values -G/(H + lambda). Split search runs level-wise with one histogram
pass per level: every feature's distinct values occupy a segment of a global
bin axis, so a single bincount keyed by (node, global bin) accumulates all
candidate statistics at once. This is still the exact algorithm because the
bins enumerate the distinct values.

Determinism: split ties resolve to the lowest feature index, then the lowest
threshold, so a fixed dataset always yields a bit-identical model.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DataError

_GAIN_EPS = 1e-12


@dataclass
class Hyperparams:
    n_rounds: int = 200
    max_depth: int = 6
    learning_rate: float = 0.1
    l2_leaf_penalty: float = 1.0
    min_leaf_count: int = 5
    one_hot_threshold: int = 32
    knn_k: int = 5
    decision_threshold: float = 0.5

    def to_dict(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "l2_leaf_penalty": self.l2_leaf_penalty,
            "min_leaf_count": self.min_leaf_count,
            "one_hot_threshold": self.one_hot_threshold,
            "knn_k": self.knn_k,
            "decision_threshold": self.decision_threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        return cls(**{k: v for k, v in d.items() if k in cls.__dataclass_fields__})


@dataclass
class FlatTree:
    """Array-of-nodes tree; feature == -1 marks a leaf."""

    feature: np.ndarray  # int32
    threshold: np.ndarray  # float64; go left when x <= threshold
    left: np.ndarray  # int32
    right: np.ndarray  # int32
    value: np.ndarray  # float64 leaf values (0.0 on internal nodes)

    def predict(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(x.shape[0], dtype=np.int32)
        while True:
            internal = self.feature[node] >= 0
            if not internal.any():
                break
            idx = np.nonzero(internal)[0]
            cur = node[idx]
            go_left = x[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
        return self.value[node]

    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FlatTree":
        return cls(
            feature=np.asarray(d["feature"], dtype=np.int32),
            threshold=np.asarray(d["threshold"], dtype=np.float64),
            left=np.asarray(d["left"], dtype=np.int32),
            right=np.asarray(d["right"], dtype=np.int32),
            value=np.asarray(d["value"], dtype=np.float64),
        )


@dataclass
class GBDTModel:
    trees: list[FlatTree]
    base_score: float  # initial log-odds
    learning_rate: float
    params: Hyperparams
    feature_names: list[str]
    train_loss: list[float] = field(default_factory=list)

    def margin(self, x: np.ndarray, n_trees: int | None = None) -> np.ndarray:
        """Raw log-odds using the first ``n_trees`` trees (all by default)."""
        trees = self.trees if n_trees is None else self.trees[:n_trees]
        out = np.full(x.shape[0], self.base_score, dtype=np.float64)
        for tree in trees:
            out += self.learning_rate * tree.predict(x)
        return out

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return _sigmoid(self.margin(x))

    def to_dict(self) -> dict:
        return {
            "base_score": self.base_score,
            "learning_rate": self.learning_rate,
            "params": self.params.to_dict(),
            "feature_names": self.feature_names,
            "train_loss": self.train_loss,
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GBDTModel":
        return cls(
            trees=[FlatTree.from_dict(t) for t in d["trees"]],
            base_score=float(d["base_score"]),
            learning_rate=float(d["learning_rate"]),
            params=Hyperparams.from_dict(d["params"]),
            feature_names=list(d["feature_names"]),
            train_loss=list(d.get("train_loss", [])),
        )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


@dataclass
class _FeatureLayout:
    """Concatenated per-feature bin segments on one global axis."""

    bin_values: list[np.ndarray]  # sorted distinct values per feature
    offsets: np.ndarray  # segment start per feature
    total_bins: int
    segment_of_bin: np.ndarray  # feature index per global bin
    candidate: np.ndarray  # False on each segment's last bin (no right side)


def _layout(x: np.ndarray) -> tuple[np.ndarray, _FeatureLayout]:
    n_features = x.shape[1]
    bin_values: list[np.ndarray] = []
    widths = np.empty(n_features, dtype=np.int64)
    cols = []
    for j in range(n_features):
        uniq, inverse = np.unique(x[:, j], return_inverse=True)
        bin_values.append(uniq)
        widths[j] = uniq.shape[0]
        cols.append(inverse.astype(np.int64))
    offsets = np.zeros(n_features, dtype=np.int64)
    np.cumsum(widths[:-1], out=offsets[1:])
    total = int(widths.sum())
    segment_of_bin = np.repeat(np.arange(n_features, dtype=np.int64), widths)
    candidate = np.ones(total, dtype=bool)
    candidate[offsets + widths - 1] = False
    codes_flat = np.stack(cols, axis=1) + offsets[None, :]
    return codes_flat, _FeatureLayout(bin_values, offsets, total, segment_of_bin, candidate)


class _TreeBuilder:
    """Accumulates nodes for one tree during level-wise growth."""

    def __init__(self) -> None:
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def add_node(self) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.value.append(0.0)
        return len(self.feature) - 1

    def finish(self) -> FlatTree:
        return FlatTree(
            feature=np.asarray(self.feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            left=np.asarray(self.left, dtype=np.int32),
            right=np.asarray(self.right, dtype=np.int32),
            value=np.asarray(self.value, dtype=np.float64),
        )


def _build_tree(
    codes_flat: np.ndarray,
    layout: _FeatureLayout,
    g: np.ndarray,
    h: np.ndarray,
    params: Hyperparams,
) -> FlatTree:
    n_rows, n_features = codes_flat.shape
    total_bins = layout.total_bins
    lam = params.l2_leaf_penalty
    builder = _TreeBuilder()
    root = builder.add_node()

    node_of_row = np.zeros(n_rows, dtype=np.int64)  # position within frontier
    frontier = [root]
    active = np.ones(n_rows, dtype=bool)

    for _depth in range(params.max_depth):
        if not frontier:
            break
        n_front = len(frontier)
        rows = np.nonzero(active)[0]
        if rows.size == 0:
            break
        pos = node_of_row[rows]
        g_rows = g[rows]
        h_rows = h[rows]

        tot_g = np.bincount(pos, weights=g_rows, minlength=n_front)
        tot_h = np.bincount(pos, weights=h_rows, minlength=n_front)
        tot_c = np.bincount(pos, minlength=n_front)
        parent_obj = tot_g**2 / (tot_h + lam)

        key = (pos[:, None] * total_bins + codes_flat[rows]).ravel()
        size = n_front * total_bins
        hist_g = np.bincount(key, weights=np.repeat(g_rows, n_features), minlength=size)
        hist_h = np.bincount(key, weights=np.repeat(h_rows, n_features), minlength=size)
        hist_c = np.bincount(key, minlength=size)
        hist_g = hist_g.reshape(n_front, total_bins)
        hist_h = hist_h.reshape(n_front, total_bins)
        hist_c = hist_c.reshape(n_front, total_bins).astype(np.int64)

        # Per-feature prefix sums: global cumsum minus the total entering
        # each feature's segment.
        cum_g = np.cumsum(hist_g, axis=1)
        cum_h = np.cumsum(hist_h, axis=1)
        cum_c = np.cumsum(hist_c, axis=1)
        starts = layout.offsets
        zero = np.zeros((n_front, 1))
        enter_g = np.concatenate([zero, cum_g[:, starts[1:] - 1]], axis=1)
        enter_h = np.concatenate([zero, cum_h[:, starts[1:] - 1]], axis=1)
        enter_c = np.concatenate([zero, cum_c[:, starts[1:] - 1]], axis=1)
        seg = layout.segment_of_bin
        gl = cum_g - enter_g[:, seg]
        hl = cum_h - enter_h[:, seg]
        cl = cum_c - enter_c[:, seg]
        gr = tot_g[:, None] - gl
        hr = tot_h[:, None] - hl
        cr = tot_c[:, None] - cl

        gain = 0.5 * (gl**2 / (hl + lam) + gr**2 / (hr + lam) - parent_obj[:, None])
        invalid = (
            (cl < params.min_leaf_count)
            | (cr < params.min_leaf_count)
            | ~layout.candidate[None, :]
        )
        gain[invalid] = -np.inf

        # First argmax = lowest (feature, threshold), the declared tie rule.
        best_flat = np.argmax(gain, axis=1)
        best_gain = gain[np.arange(n_front), best_flat]
        best_feature = seg[best_flat]
        split_mask = best_gain > _GAIN_EPS

        new_frontier: list[int] = []
        remap = np.full(n_front, -1, dtype=np.int64)  # old pos -> new left pos
        for p, node_id in enumerate(frontier):
            if not split_mask[p]:
                builder.value[node_id] = -tot_g[p] / (tot_h[p] + lam)
                continue
            j = int(best_feature[p])
            t = int(best_flat[p] - layout.offsets[j])
            left_id = builder.add_node()
            right_id = builder.add_node()
            builder.feature[node_id] = j
            builder.threshold[node_id] = float(layout.bin_values[j][t])
            builder.left[node_id] = left_id
            builder.right[node_id] = right_id
            remap[p] = len(new_frontier)
            new_frontier.extend((left_id, right_id))

        if not new_frontier:
            frontier = []
            break

        # Route rows of split nodes; rows in finished nodes become inactive.
        row_split = split_mask[pos]
        split_rows = rows[row_split]
        if split_rows.size:
            p_rows = node_of_row[split_rows]
            flat_thr = best_flat[p_rows]
            go_left = codes_flat[split_rows, best_feature[p_rows]] <= flat_thr
            node_of_row[split_rows] = remap[p_rows] + np.where(go_left, 0, 1)
        active[rows[~row_split]] = False
        frontier = new_frontier

    if frontier:
        rows = np.nonzero(active)[0]
        pos = node_of_row[rows]
        tot_g = np.bincount(pos, weights=g[rows], minlength=len(frontier))
        tot_h = np.bincount(pos, weights=h[rows], minlength=len(frontier))
        for p, node_id in enumerate(frontier):
            builder.value[node_id] = -tot_g[p] / (tot_h[p] + lam)
    return builder.finish()


def train_gbdt(
    x: np.ndarray,
    y: np.ndarray,
    params: Hyperparams,
    feature_names: list[str] | None = None,
) -> GBDTModel:
    """Boost ``params.n_rounds`` trees on logistic loss."""
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise DataError("feature matrix and labels disagree")
    if x.shape[0] == 0:
        raise DataError("cannot train on zero rows")
    y = y.astype(np.float64)
    base_rate = float(np.clip(y.mean(), 1e-6, 1.0 - 1e-6))
    base_score = math.log(base_rate / (1.0 - base_rate))

    codes_flat, layout = _layout(x)

    model = GBDTModel(
        trees=[],
        base_score=base_score,
        learning_rate=params.learning_rate,
        params=params,
        feature_names=feature_names or [f"f{j}" for j in range(x.shape[1])],
    )
    margin = np.full(x.shape[0], base_score, dtype=np.float64)
    for _ in range(params.n_rounds):
        p = _sigmoid(margin)
        g = p - y
        h = p * (1.0 - p)
        tree = _build_tree(codes_flat, layout, g, h, params)
        model.trees.append(tree)
        # Same routing code as inference, so train and predict agree bitwise.
        margin += params.learning_rate * tree.predict(x)
        model.train_loss.append(log_loss(y, _sigmoid(margin)))
    return model
