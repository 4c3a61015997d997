"""Cross-validated training of the uniqueness classifier.

Measured uniqueness comes from out-of-fold predictions: each group's label
is predicted by the fold model that never saw it, so a group's own label
cannot leak into its measurement. The final model is refit on all rows for
deployment and for classifying new groups.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ChannelMismatchError, DataError, SingleClassError
from ..fingerprint import FingerprintGroup
from ..registry import AttributeRegistry, scoped_meta_attributes
from ..stats import meta_value_from_members
from .encoding import EncoderState, fit_encoder_rows, meta_rows
from .gbdt import GBDTModel, Hyperparams, _sigmoid, train_gbdt
from .imputing import ImputerState, fit_imputer, impute_rows


@dataclass
class FoldMetrics:
    fold: int
    accuracy: float
    auc: float
    n_test: int


@dataclass
class TrainedClassifier:
    channel: str
    encoder: EncoderState
    imputer: ImputerState
    model: GBDTModel
    cv_metrics: list[FoldMetrics]
    seed: int
    hyperparams: Hyperparams
    # Meta-attribute membership frozen at fit time so prediction does not
    # depend on having the training registry at hand.
    meta_members: dict[str, list[str]] = field(default_factory=dict)
    oof_scores: dict[str, float] = field(default_factory=dict)  # group key -> score
    oof_labels: dict[str, int] = field(default_factory=dict)


def _group_key(group: FingerprintGroup) -> str:
    return "|".join((*group.config.key(), group.digest))


def _auc(y: np.ndarray, scores: np.ndarray) -> float:
    """Rank-based AUC (Mann-Whitney), ties get midranks."""
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum_pos = ranks[y == 1].sum()
    return float((rank_sum_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def stratified_folds(y: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Fold index per row; each class is spread round-robin after a seeded
    shuffle, so class shares stay balanced across folds."""
    if k < 2:
        raise DataError("k_folds must be >= 2")
    rng = np.random.default_rng(seed)
    fold = np.empty(len(y), dtype=np.int64)
    for cls in np.unique(y):
        idx = np.nonzero(y == cls)[0]
        perm = rng.permutation(idx)
        fold[perm] = np.arange(len(perm)) % k
    return fold


def _fit_pipeline(
    rows: list[list[str | None]],
    y: np.ndarray,
    meta_names: list[str],
    params: Hyperparams,
) -> tuple[ImputerState, EncoderState, GBDTModel]:
    imputer = fit_imputer(rows, meta_names, k=params.knn_k)
    imputed = impute_rows(rows, imputer)
    encoder = fit_encoder_rows(imputed, meta_names, threshold=params.one_hot_threshold)
    x = encoder.transform(imputed)
    model = train_gbdt(x, y, params, feature_names=encoder.feature_names)
    return imputer, encoder, model


def train(
    groups: Sequence[FingerprintGroup],
    reg: AttributeRegistry,
    channel: str,
    hyperparams: Hyperparams | None = None,
    k_folds: int = 5,
    seed: int = 0,
) -> TrainedClassifier:
    """Train with stratified k-fold CV and record out-of-fold predictions."""
    params = hyperparams or Hyperparams()
    groups = [g for g in groups if g.config.channel == channel]
    if not groups:
        raise DataError(f"no groups for channel {channel!r}")
    y = np.array([g.ground_truth_uniqueness for g in groups], dtype=np.int64)
    if len(np.unique(y)) < 2:
        raise SingleClassError("training data contains a single uniqueness class")
    meta_names = scoped_meta_attributes(reg, channel)
    rows = meta_rows(groups, reg, channel)

    fold_of = stratified_folds(y, k_folds, seed)
    counts = np.bincount(fold_of, minlength=k_folds)
    for f in range(k_folds):
        test = fold_of == f
        for cls in (0, 1):
            if np.sum((y == cls) & ~test) < 2:
                raise DataError(
                    f"fold {f}: fewer than 2 training groups of class {cls}; "
                    f"need more data or fewer folds (fold sizes {counts.tolist()})"
                )

    oof_score = np.zeros(len(groups), dtype=np.float64)
    cv_metrics: list[FoldMetrics] = []
    for f in range(k_folds):
        test_idx = np.nonzero(fold_of == f)[0]
        train_idx = np.nonzero(fold_of != f)[0]
        train_rows = [rows[i] for i in train_idx]
        imputer, encoder, model = _fit_pipeline(train_rows, y[train_idx], meta_names, params)
        test_rows = impute_rows([rows[i] for i in test_idx], imputer)
        x_test = encoder.transform(test_rows)
        scores = _sigmoid(model.margin(x_test))
        oof_score[test_idx] = scores
        labels = (scores >= params.decision_threshold).astype(np.int64)
        cv_metrics.append(
            FoldMetrics(
                fold=f,
                accuracy=float((labels == y[test_idx]).mean()),
                auc=_auc(y[test_idx], scores),
                n_test=len(test_idx),
            )
        )

    imputer, encoder, model = _fit_pipeline(rows, y, meta_names, params)
    clf = TrainedClassifier(
        channel=channel,
        encoder=encoder,
        imputer=imputer,
        model=model,
        cv_metrics=cv_metrics,
        seed=seed,
        hyperparams=params,
        meta_members={meta: reg.meta_members(meta) for meta in meta_names},
    )
    for i, group in enumerate(groups):
        key = _group_key(group)
        clf.oof_scores[key] = float(oof_score[i])
        clf.oof_labels[key] = int(oof_score[i] >= params.decision_threshold)
    return clf


def assign_measured_uniqueness(
    groups: Sequence[FingerprintGroup], clf: TrainedClassifier
) -> None:
    """Write out-of-fold labels into the groups the classifier was trained on."""
    for group in groups:
        if group.config.channel != clf.channel:
            continue
        key = _group_key(group)
        if key in clf.oof_labels:
            group.measured_uniqueness = clf.oof_labels[key]


def predict(clf: TrainedClassifier, group: FingerprintGroup) -> tuple[int, float]:
    """Label and score for one group under the final (refit) model."""
    if group.config.channel != clf.channel:
        raise ChannelMismatchError(
            f"group channel {group.config.channel!r} != classifier channel {clf.channel!r}"
        )
    row = [
        meta_value_from_members(group.attributes, clf.meta_members[meta])
        for meta in clf.encoder.meta_names
    ]
    imputed = impute_rows([row], clf.imputer)
    x = clf.encoder.transform(imputed)
    score = float(_sigmoid(clf.model.margin(x))[0])
    return (1 if score >= clf.hyperparams.decision_threshold else 0, score)


def save_classifier(clf: TrainedClassifier, path: str | Path) -> None:
    """Versioned JSON model file: encoder, imputer reference rows, trees."""
    ref_rows = []
    for r in range(clf.imputer.reference.shape[0]):
        row = []
        for j, meta in enumerate(clf.imputer.meta_names):
            code = int(clf.imputer.reference[r, j])
            vocab = clf.imputer.vocab[meta]
            row.append(vocab[code] if 0 <= code < len(vocab) else None)
        ref_rows.append(row)
    doc = {
        "format": "adfkit-classifier/1",
        "channel": clf.channel,
        "seed": clf.seed,
        "hyperparams": clf.hyperparams.to_dict(),
        "meta_members": clf.meta_members,
        "encoder": {
            "meta_names": clf.encoder.meta_names,
            "kinds": clf.encoder.kinds,
            "vocabularies": clf.encoder.vocabularies,
            "frequencies": clf.encoder.frequencies,
            "threshold": clf.encoder.threshold,
        },
        "imputer": {
            "k": clf.imputer.k,
            "meta_names": clf.imputer.meta_names,
            "reference_rows": ref_rows,
        },
        "model": clf.model.to_dict(),
        "cv_metrics": [
            {"fold": m.fold, "accuracy": m.accuracy, "auc": m.auc, "n_test": m.n_test}
            for m in clf.cv_metrics
        ],
        "oof_scores": clf.oof_scores,
        "oof_labels": clf.oof_labels,
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_classifier(path: str | Path) -> TrainedClassifier:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != "adfkit-classifier/1":
        raise DataError(f"unsupported model file format in {path}")
    encoder = EncoderState(
        meta_names=list(doc["encoder"]["meta_names"]),
        kinds=dict(doc["encoder"]["kinds"]),
        vocabularies={k: list(v) for k, v in doc["encoder"]["vocabularies"].items()},
        frequencies={k: dict(v) for k, v in doc["encoder"]["frequencies"].items()},
        threshold=int(doc["encoder"]["threshold"]),
    )
    imputer = fit_imputer(
        [list(row) for row in doc["imputer"]["reference_rows"]],
        list(doc["imputer"]["meta_names"]),
        k=int(doc["imputer"]["k"]),
    )
    return TrainedClassifier(
        channel=doc["channel"],
        encoder=encoder,
        imputer=imputer,
        model=GBDTModel.from_dict(doc["model"]),
        cv_metrics=[FoldMetrics(**m) for m in doc["cv_metrics"]],
        seed=int(doc["seed"]),
        hyperparams=Hyperparams.from_dict(doc["hyperparams"]),
        meta_members={k: list(v) for k, v in doc["meta_members"].items()},
        oof_scores=dict(doc.get("oof_scores", {})),
        oof_labels={k: int(v) for k, v in doc.get("oof_labels", {}).items()},
    )
